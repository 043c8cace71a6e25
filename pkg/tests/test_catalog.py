import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from l2curves.catalog import (
    FamilyDescriptor,
    FamilyDomainError,
    FamilyId,
    Parameterization,
    PseudopolarOnly,
    closed_form,
    elastic_constants,
    enneper_c_graph,
    evaluate_family,
    family_info,
    intrinsic_equation,
    registry,
    sinusoidal_relation,
)
from l2curves.core import Branch, source_jet, to_pseudopolar
from l2curves.quadrature import Variable

from conftest import family, frenet_trajectory

# (family, params, epsilon, branch) covering every closed-form case
CASES = [
    ("geodesic", {"c": 1.0}, 1, "plus"),
    ("geodesic", {"c": -0.5, "phi0": 0.3}, -1, "plus"),
    ("pseudocircle_origin", {"k0": 0.5}, 1, "plus"),
    ("pseudocircle_origin", {"k0": 0.5}, 1, "minus"),
    ("pseudocircle_v", {"k0": 1.0, "c": 0.5}, 1, "plus"),
    ("sturm_extended", {"mu": 1.0}, 1, "plus"),
    ("sturm_extended", {"mu": 1.0}, 1, "minus"),
    ("sturm_extended", {"mu": -1.0}, 1, "minus"),
    ("sturm_extended", {"mu": -0.5}, 1, "minus"),
    ("sturm_extended", {"mu": 2.0}, 1, "minus"),
    ("sturm_extended", {"mu": -2.0}, -1, "plus"),
    ("sturm_extended", {"mu": -0.5, "trivial": 1.0}, 1, "minus"),
    ("sinusoidal", {"n": 2.0, "lam": 3.0}, 1, "plus"),
    ("sinusoidal", {"n": -0.5, "lam": 0.5}, 1, "minus"),
    ("elastic", {"c": 0.0}, 1, "plus"),
    ("elastic", {"c": 1.0}, -1, "plus"),
    ("elastic", {"c": -1.0}, 1, "plus"),
    ("enneper", {}, 1, "plus"),
    ("enneper_c", {"c": 1.0}, 1, "plus"),
    ("enneper_c", {"c": -1.0}, -1, "plus"),
    ("grim_reaper", {}, -1, "plus"),
    ("exp_c", {"c": 1.0}, 1, "plus"),
    ("exp_c", {"c": -1.0}, 1, "plus"),
]


def test_registry_lists_every_family_once():
    ids = [info.id for info in registry()]
    assert ids == list(FamilyId)
    for info in registry():
        schema = info.schema()
        assert schema["id"] == info.id.value
        assert all(set(p) == {"name", "type", "default", "doc", "constraint"} for p in schema["params"])


@pytest.mark.parametrize("fid, params, eps, branch", [
    ("pseudocircle_origin", {"k0": -1.0}, 1, "plus"),
    ("norwich", {"c": 0.0}, 1, "plus"),
    ("norwich", {"c": -1.0}, 1, "plus"),
    ("sturm_extended", {"mu": 0.0}, 1, "plus"),
    ("sturm_extended", {"mu": 2.0, "trivial": 1.0}, 1, "minus"),
    ("sturm_extended", {"mu": 0.5, "trivial": 1.0}, 1, "plus"),
    ("sinusoidal", {"n": -1.0}, 1, "plus"),
    ("sinusoidal", {"n": 2.0, "lam": -1.0}, 1, "minus"),
    ("enneper_c", {"c": 0.0}, 1, "plus"),
    ("geodesic", {"k0": 1.0}, 1, "plus"),
])
def test_invalid_parameters(fid, params, eps, branch):
    with pytest.raises(FamilyDomainError):
        FamilyDescriptor(fid, params, eps, Branch(branch))


def test_samples_outside_the_domain():
    with pytest.raises(FamilyDomainError):
        evaluate_family(FamilyDescriptor("grim_reaper"), np.linspace(-1, 1, 10))


@pytest.mark.parametrize("fid, params, eps, branch", CASES)
def test_closed_form_follows_the_frenet_equations(fid, params, eps, branch):
    """Integrate the curvature law from one catalog point and compare with the catalog."""
    c = family(fid, params, eps, branch, count=64)
    law = closed_form(FamilyDescriptor(fid, params, eps, Branch(branch))).momentum
    if law.variable is Variable.RHO:
        k = lambda x, y: float(law.kappa(math.sqrt(abs(y * y - x * x))))
    else:
        k = lambda x, y: float(law.kappa(y - x))
    xd, yd, _, _ = source_jet(c.source, c.s[:1])
    x, y = frenet_trajectory(k, c.s, c.x[0], c.y[0], float(xd[0]), float(yd[0]))
    scale = 1 + np.max(np.hypot(c.x, c.y))
    assert np.max(np.hypot(x - c.x, y - c.y)) < 1e-7 * scale


@pytest.mark.parametrize("fid, params, eps, branch", CASES)
def test_closed_form_is_unit_speed(fid, params, eps, branch):
    c = family(fid, params, eps, branch, count=64)
    xd, yd, _, _ = source_jet(c.source, c.s)
    assert np.nanmax(np.abs(-xd * xd + yd * yd - eps)) < 1e-7


@pytest.mark.parametrize("c", [1.0, -1.0, 0.5, 3.0])
def test_norwich_curvature_times_rho(c):
    branch = "plus" if c > 0 else "minus"
    curve = family("norwich", {"c": c}, 1, branch)
    assert np.max(np.abs(curve.kappa * curve.rho - 1)) < 1e-10
    assert closed_form(FamilyDescriptor("norwich", {"c": c}, 1, Branch(branch))).parameterization \
        is Parameterization.AUX_T
    assert np.allclose(np.diff(curve.s), curve.s[1] - curve.s[0], rtol=1e-9)


@pytest.mark.parametrize("c", [0.0, 1.0, -1.0, 2.5, -0.3])
def test_elastic_energy_is_quarter_tension_squared(c):
    sigma, energy = elastic_constants(c)
    assert (sigma, energy) == ((0.0, 0.0) if c == 0 else (4 * c, 4 * c * c))
    assert energy == sigma**2 / 4


@pytest.mark.parametrize("eps", [1, -1])
def test_enneper_generatrix(eps):
    curve = family("enneper", {}, eps)
    assert np.max(np.abs(curve.u - eps * curve.v**3 / 3)) < 1e-12


@pytest.mark.parametrize("eps", [1, -1])
def test_grim_reaper_graph(eps):
    curve = family("grim_reaper", {}, eps)
    assert np.max(np.abs(curve.u + eps * np.exp(-2 * curve.v) / 2)) < 1e-12
    assert np.allclose(curve.kappa, 1 / curve.s)


@given(st.sampled_from([1.0, -1.0, 2.0]), st.sampled_from([1, -1]), st.floats(0.05, 3.0))
def test_enneper_c_graph_slope(c, eps, offset):
    # du/dv = eps K(v)^2 with K = -eps v/(c v - 1)
    v = 1 / c + math.copysign(offset, c) / abs(c)
    u = enneper_c_graph(c, eps)
    h = 1e-5 * abs(v)
    slope = (u(v + h) - u(v - h)) / (2 * h)
    K = -eps * v / (c * v - 1)
    assert slope == pytest.approx(eps * K * K, rel=1e-6)


@pytest.mark.parametrize("n, lam", [(2.0, 3.0), (0.5, 1.5), (1.0, 2.0), (-2.0, -1.0), (-0.5, 0.5)])
@pytest.mark.parametrize("eps, branch", [(1, "plus"), (1, "minus"), (-1, "plus"), (-1, "minus")])
def test_sinusoidal_pseudopolar_equation(n, lam, eps, branch):
    d = FamilyDescriptor("sinusoidal", {"n": n, "lam": lam}, eps, Branch(branch))
    curve = evaluate_family(d)
    pts = [to_pseudopolar(p) for p in zip(curve.x, curve.y)]
    rho = np.array([p.rho for p in pts])
    nu = np.array([p.nu for p in pts])
    radial = Branch.PLUS if d.radial_plus else Branch.MINUS
    assert np.max(np.abs(sinusoidal_relation(n, lam, radial)(rho, nu))) < 1e-8


def test_sturm_constant_solution():
    mu = -0.5
    curve = family("sturm_extended", {"mu": mu, "trivial": 1.0}, 1, "minus")
    assert np.allclose(curve.rho, (1 - mu) / 2, rtol=1e-13)
    assert np.allclose(curve.kappa, 2 + mu / curve.rho, rtol=1e-13)


@pytest.mark.parametrize("fid, params", [("sinusoidal", {}), ("norwich", {}), ("enneper_c", {})])
def test_pseudopolar_only_families(fid, params):
    with pytest.raises(PseudopolarOnly):
        intrinsic_equation(FamilyDescriptor(fid, params))


def test_momentum_matches_curvature_law():
    for fid, params, eps, branch in CASES:
        cf = closed_form(FamilyDescriptor(fid, params, eps, Branch(branch)))
        arg = np.linspace(0.5, 2.5, 7) if cf.momentum.variable is Variable.RHO else np.linspace(1.2, 2.5, 7)
        assert cf.momentum.consistency_residual(arg, eps) < 1e-6, fid


def test_family_info_lookup():
    assert family_info("elastic").variable is Variable.V
    assert family_info(FamilyId.NORWICH).uses_branch
