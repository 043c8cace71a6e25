"""Shared helpers: catalog shortcuts and an independent Frenet-ODE oracle."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.integrate import solve_ivp

from l2curves import Branch, FamilyDescriptor, evaluate_family

settings.register_profile("l2", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("l2")


def family(fid, params=None, epsilon=1, branch="plus", sign="pos", **kw):
    desc = FamilyDescriptor(fid, params or {}, epsilon, Branch(branch), sign=__import__("l2curves").Sign(sign))
    return evaluate_family(desc, **kw)


def frenet_trajectory(kappa_of_point, s_eval, x0, y0, xd0, yd0):
    """Integrate x'' = kappa y', y'' = kappa x' with scipy's DOP853.

    ``kappa_of_point(x, y)`` gives the curvature at a point. Independent of
    the package's quadrature pipeline, so it serves as an oracle.
    """
    def rhs(_s, z):
        x, y, xd, yd = z
        k = kappa_of_point(x, y)
        return [xd, yd, k * yd, k * xd]

    s_eval = np.asarray(s_eval, dtype=float)
    sol = solve_ivp(rhs, (s_eval[0], s_eval[-1]), [x0, y0, xd0, yd0], method="DOP853",
                    t_eval=s_eval, rtol=1e-12, atol=1e-13)
    assert sol.success, sol.message
    return sol.y[0], sol.y[1]


@pytest.fixture
def fam():
    return family
