import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from l2curves.core import Branch
from l2curves.panels import adaptive_panels, bracketed_solve, gauss_legendre
from l2curves.quadrature import (
    CumulativeTable,
    EmptyDomain,
    Interval,
    MomentumSpec,
    NonIntegrableSingularity,
    NumericFailure,
    SamplingPolicy,
    SolveRequest,
    Variable,
    arc_from_rho,
    degenerate_solutions,
    domain_scan,
    momentum_from_kappa,
    primitive,
    solve,
)
from l2curves.verify import Law, check_curvature_law, check_momentum, check_unit_speed


def test_gauss_legendre_exact_for_degree_39():
    val = gauss_legendre(lambda x: x**39, np.array(0.0), np.array(1.0))
    assert float(val) == pytest.approx(1 / 40, rel=1e-14)


def test_adaptive_panels_refine_where_needed():
    # a sharp peak at 0.3: panels concentrate there, the sum is exact
    f = lambda x: (1 / (1e-4 + (x - 0.3) ** 2))[None, ...]
    panels = adaptive_panels(f, 0.0, 1.0, 1)
    total = sum(p.values[0] for p in panels)
    exact = 100 * (math.atan(0.7 / 1e-2) + math.atan(0.3 / 1e-2))
    assert total == pytest.approx(exact, rel=1e-13)
    widths = {round(p.a, 6): p.b - p.a for p in panels}
    near = min(w for a, w in widths.items() if abs(a - 0.3) < 0.05)
    assert near < min(w for a, w in widths.items() if a > 0.8)
    assert all(q.a == p.b for p, q in zip(panels, panels[1:]))


def test_cumulative_table_with_endpoint_substitution():
    # int_0^x dt / sqrt(t) = 2 sqrt(x), with the sqrt substitution at 0
    table = CumulativeTable((lambda t: 1 / np.sqrt(t),), 0.0, 4.0, True, False, 1)
    x = np.array([0.0, 1e-8, 0.25, 1.0, 3.999])
    assert np.allclose(table(x)[0], 2 * np.sqrt(x), rtol=1e-13, atol=1e-15)


@given(st.floats(0.0, 3.9))
def test_cumulative_table_inversion(target):
    table = CumulativeTable((lambda t: 1 + t * t,), 0.0, 2.0, False, False, 1)
    x = float(table.invert(np.array(target / 3.9 * float(table.total()[0]))))
    assert float(table(np.array(x))[0]) == pytest.approx(target / 3.9 * float(table.total()[0]), abs=1e-12)


@given(st.floats(-30, 30))
def test_primitive_matches_antiderivative(x):
    F = primitive(np.cos, base=0.3)
    assert float(F(np.array(x))) == pytest.approx(math.sin(x) - math.sin(0.3), abs=1e-12)


def test_primitive_across_a_pole_below_the_base():
    # 1/t integrated from base 2 down to 0.01: whole panels never straddle 0
    F = primitive(lambda t: 1 / t, base=2.0)
    assert float(F(np.array(0.01))) == pytest.approx(math.log(0.01 / 2.0), rel=1e-12)


def test_bracketed_solve_with_and_without_derivative():
    target = np.array([0.5, 2.0, 7.0])
    a, b = np.zeros(3), np.full(3, 3.0)
    x1 = bracketed_solve(np.exp, target + 1, a, b)
    x2 = bracketed_solve(np.exp, target + 1, a, b, dF=np.exp)
    assert np.allclose(x1, np.log(target + 1), rtol=1e-14)
    assert np.allclose(x2, np.log(target + 1), rtol=1e-14)


def test_momentum_from_kappa_rho():
    m = momentum_from_kappa(lambda r: 2 + 1 / r, Variable.RHO, c=0.25)
    r = np.array([0.5, 1.0, 4.0])
    assert np.allclose(m.K(r), r * r + r + 0.25, rtol=1e-13)
    assert m.consistency_residual(r) < 1e-8


def test_momentum_from_kappa_v():
    # int_0^v 2t dt = v^2, K = -eps/(c + v^2)
    m = momentum_from_kappa(lambda v: 2 * v, Variable.V, c=1.0, epsilon=-1)
    v = np.array([-2.0, 0.0, 3.0])
    assert np.allclose(m.K(v), 1 / (1 + v * v), rtol=1e-13)


def test_domain_scan_finds_turning_point():
    # K = rho^2 + 2 rho - 0.3 on the minus radial type: radicand vanishes at rho ~ 0.0969 and 0.2416
    m = MomentumSpec(Variable.RHO, lambda r: r * r + 2 * r - 0.3, -0.3)
    ivs = domain_scan(SolveRequest(m, 1, Branch.MINUS))
    ends = sorted([iv.hi for iv in ivs if iv.hi_singular] + [iv.lo for iv in ivs if iv.lo_singular and iv.lo > 0])
    # K = rho and K = -rho: rho^2 + rho - 0.3 = 0 and rho^2 + 3 rho - 0.3 = 0
    assert ends == pytest.approx([(-3 + math.sqrt(10.2)) / 2, (-1 + math.sqrt(2.2)) / 2], rel=1e-12)


def test_empty_domain():
    m = MomentumSpec(Variable.RHO, lambda r: 0 * r)
    with pytest.raises(EmptyDomain):
        solve(SolveRequest(m, 1, Branch.MINUS))


def test_double_zero_is_not_integrable():
    m = MomentumSpec(Variable.RHO, lambda r: r * r)
    iv = Interval(1.0, 2.0, lo_singular=True, lo_double=True)
    with pytest.raises(NonIntegrableSingularity):
        arc_from_rho(SolveRequest(m, 1, Branch.MINUS), iv)


def test_v_hint_across_a_pole_is_rejected():
    m = MomentumSpec(Variable.V, lambda v: -1 / v)
    with pytest.raises(NumericFailure):
        solve(SolveRequest(m, 1, domain_hint=Interval(-1.0, 1.0)))


def test_solve_is_deterministic():
    m = momentum_from_kappa(lambda r: 2 + 1 / r, Variable.RHO)
    a = solve(SolveRequest(m, 1, Branch.MINUS))
    b = solve(SolveRequest(momentum_from_kappa(lambda r: 2 + 1 / r, Variable.RHO), 1, Branch.MINUS))
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y) and np.array_equal(a.s, b.s)


def test_pipeline_checks_on_a_turning_orbit():
    mu, c = 2.0, -0.3
    m = MomentumSpec(Variable.RHO, lambda r: r * r + mu * r + c, c, lambda r: 2 + mu / r)
    curve = solve(SolveRequest(m, 1, Branch.MINUS))
    assert curve.s[0] == pytest.approx(-curve.s[-1])  # symmetric about the turning point
    assert check_unit_speed(curve).passed
    assert check_curvature_law(curve, Law.OF_RHO, m.kappa, 1e-5).passed
    assert check_momentum(curve, m).passed


def test_explicit_s_range_and_count():
    m = MomentumSpec(Variable.V, lambda v: -1 / (v * v + 1), 1.0, lambda v: 2 * v)
    curve = solve(SolveRequest(m, 1, sampling=SamplingPolicy(64, (-1.0, 1.0))))
    assert len(curve) == 64 and curve.s[0] == -1.0 and curve.s[-1] == 1.0
    with pytest.raises(ValueError):
        solve(SolveRequest(m, 1, sampling=SamplingPolicy(64, (-5.0, 5.0))))


def test_constant_orbit_of_the_trivial_law():
    mu = -0.5
    rho0 = (1 - mu) / 2
    c = rho0 - rho0 * rho0 - mu * rho0
    m = MomentumSpec(Variable.RHO, lambda r: r * r + mu * r + c, c, lambda r: 2 + mu / r)
    orbits = degenerate_solutions(SolveRequest(m, 1, Branch.MINUS))
    assert len(orbits) == 1
    assert np.allclose(orbits[0].rho, rho0, rtol=1e-12)


def test_cancelled_denominator_ends_the_domain():
    # c + F(v) = e^v is pure rounding noise far to the left
    m = momentum_from_kappa(np.exp, Variable.V, 1.0, 1)
    assert np.isnan(m.K(np.array(-40.0)))
    assert float(m.K(np.array(-5.0))) == pytest.approx(-math.exp(5.0), rel=1e-9)
    (iv,) = domain_scan(SolveRequest(m, 1))
    assert -25.0 < iv.lo < -15.0


def test_noisy_integrand_stops_refining():
    rng = np.random.default_rng(0)
    noisy = lambda x: (np.cos(x) * (1 + 1e-10 * rng.standard_normal(np.shape(x))))[None, ...]
    panels = adaptive_panels(noisy, 0.0, 10.0, 1)
    assert len(panels) < 500
    assert sum(p.values[0] for p in panels) == pytest.approx(math.sin(10.0), abs=1e-8)
