import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from l2curves import FamilyDescriptor, evaluate_family, pipeline_request, solve
from l2curves.core import Branch
from l2curves.catalog import closed_form, elastic_constants
from l2curves.quadrature import MomentumSpec, SolveRequest, Variable
from l2curves.verify import (
    CheckReport,
    Law,
    check_curvature_law,
    check_elastica,
    check_intrinsic,
    check_momentum,
    check_soliton,
    check_unit_speed,
    compare_intrinsic,
    guard_mask,
    intrinsic_shift,
    kappa_derivatives,
    make_report,
    tol_verify,
)

from conftest import family


def _pipeline(fid, params, eps=1, branch="plus"):
    d = FamilyDescriptor(fid, params, eps, Branch(branch))
    cat = evaluate_family(d)
    return solve(pipeline_request(d, cat)), cat


def test_pipeline_matches_sturm_mu_one():
    pipe, cat = _pipeline("sturm_extended", {"mu": 1.0}, 1, "minus")
    assert compare_intrinsic(pipe, cat).passed


def test_pipeline_matches_elastic_c_two():
    pipe, cat = _pipeline("elastic", {"c": 2.0})
    assert compare_intrinsic(pipe, cat).passed


def test_different_laws_are_told_apart():
    a = family("sturm_extended", {"mu": 1.0}, 1, "minus")
    b = family("sturm_extended", {"mu": -1.0}, 1, "minus")
    report = compare_intrinsic(a, b)
    assert not report.passed and report.max_residual > 1e-2


@pytest.mark.parametrize("fid, params, eps, branch", [
    ("elastic", {"c": 1.0}, 1, "plus"), ("sturm_extended", {"mu": -0.5}, 1, "minus"),
    ("grim_reaper", {}, -1, "plus"), ("sinusoidal", {"n": 2.0, "lam": 3.0}, 1, "minus"),
])
def test_compare_is_reflexive(fid, params, eps, branch):
    c = family(fid, params, eps, branch)
    report = compare_intrinsic(c, c)
    assert report.passed and report.max_residual < 1e-12


@given(st.floats(-1.0, 1.0), st.floats(0.2, 0.8))
def test_compare_finds_the_shift_and_is_symmetric(shift, length):
    whole = family("elastic", {"c": 1.0})
    d = closed_form(FamilyDescriptor("elastic", {"c": 1.0}))
    lo = -1.2 + 0.5 * (1 + shift) * (2.4 - length * 2.4)
    part = evaluate_family(FamilyDescriptor("elastic", {"c": 1.0}), np.linspace(lo, lo + length * 2.4, 300))
    ab, ba = compare_intrinsic(whole, part), compare_intrinsic(part, whole)
    assert ab.passed and ba.passed
    delta, _, _ = intrinsic_shift(part, whole)
    assert delta == pytest.approx(0.0, abs=1e-6)
    assert d.default_range[0] <= lo


def test_short_sub_arc_still_matches():
    a = family("grim_reaper", {}, 1)
    b = evaluate_family(FamilyDescriptor("grim_reaper"), np.linspace(2.0, 2.5, 64))
    assert compare_intrinsic(a, b).passed


def test_compare_rejects_impossible_overlap():
    a = family("grim_reaper", {}, 1)
    with pytest.raises(ValueError, match="overlap"):
        compare_intrinsic(a, a, min_overlap=1.5)


def test_guard_mask():
    s = np.linspace(0, 1, 101)
    m = guard_mask(s, 0.1)
    assert not m[:10].any() and m[10:91].all() and not m[91:].any()


def test_report_serialisation():
    r = make_report("x", np.array([1.0, -3.0, 2.0]), np.array([0.0, 1.0, 2.0]), 2.5)
    assert (r.max_residual, r.worst_s, r.passed) == (3.0, 1.0, False)
    assert json.loads(r.to_json()) == {"id": "x", "residual": 3.0, "threshold": 2.5, "pass": False, "worst_s": 1.0}


def test_non_finite_residuals_fail():
    r = make_report("x", np.array([0.0, np.nan]), np.array([0.0, 1.0]), 1.0)
    assert not r.passed and math.isinf(r.max_residual) and r.worst_s == 1.0


def test_tolerance_override(monkeypatch):
    monkeypatch.setenv("L2CURVES_TOL", "1e-3")
    assert tol_verify() == 1e-3
    assert check_unit_speed(family("enneper")).threshold == 1e-3
    monkeypatch.setenv("L2CURVES_TOL", "-1")
    with pytest.raises(ValueError):
        tol_verify()
    monkeypatch.delenv("L2CURVES_TOL")
    assert tol_verify() == 1e-6


def test_wrong_law_fails():
    c = family("sturm_extended", {"mu": 1.0}, 1, "minus")
    assert check_curvature_law(c, Law.OF_RHO, lambda r: 2 + 1 / r).passed
    assert not check_curvature_law(c, Law.OF_RHO, lambda r: 2 + 1.01 / r).passed


def test_momentum_sign_matters():
    c = family("enneper", {}, 1)
    assert check_momentum(c, MomentumSpec(Variable.V, lambda v: v)).passed
    assert not check_momentum(c, MomentumSpec(Variable.V, lambda v: -v)).passed


def test_soliton_only_for_grim_reapers():
    assert check_soliton(family("grim_reaper", {}, 1)).passed
    assert not check_soliton(family("elastic", {"c": 1.0})).passed


def test_intrinsic_check():
    c = family("grim_reaper", {}, -1)
    assert check_intrinsic(c, lambda s: 1 / s).passed
    assert not check_intrinsic(c, lambda s: 1 / (s + 0.01)).passed


@pytest.mark.parametrize("c", [0.0, 1.0, -1.0])
def test_elastica_with_numerical_derivatives(c):
    # drop the analytic derivatives: the source's curvature law is differentiated instead
    curve = family("elastic", {"c": c})
    stripped = type(curve)(curve.s, curve.x, curve.y, curve.epsilon, curve.kappa, source=curve.source)
    _, _, _, analytic = kappa_derivatives(stripped)
    assert not analytic
    eq, en = check_elastica(stripped, *elastic_constants(c))
    assert eq.passed and en.passed and eq.threshold == pytest.approx(1e-5)


def test_elastica_rejects_wrong_tension():
    eq, en = check_elastica(family("elastic", {"c": 1.0}), 0.0, 0.0)
    assert not eq.passed and not en.passed


def test_sample_only_checks_fall_back_to_finite_differences():
    c = family("sturm_extended", {"mu": -0.5}, 1, "minus", count=2001).without_source()
    assert check_unit_speed(c).passed
    assert check_curvature_law(c, Law.OF_RHO, lambda r: 2 - 0.5 / r, 1e-5).passed


def test_check_report_fields():
    r = CheckReport("a", 0.5, 1.0, True, 0.0)
    assert r.pass_ and r.to_record()["id"] == "a"
