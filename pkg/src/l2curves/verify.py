"""Executable invariant checks over sampled curves.

Every check returns a :class:`CheckReport` holding the largest residual
over the checked samples, the threshold, and the arc length where the
residual peaks. A guard band (default 2% of the s-range at each end) keeps
poles at singular endpoints out of the maximum.
"""
from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from .core import CurveSamples, central_derivatives, function_jet, is_uniform, null_jet, null_points, numeric_curvature
from .quadrature import TOL_VERIFY, MomentumSpec, Variable

DEFAULT_GUARD = 0.02
_DENSE = 8
TOL_ENV = "L2CURVES_TOL"


def tol_verify() -> float:
    """Verification tolerance, overridable through ``L2CURVES_TOL``."""
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw.strip() == "":
        return TOL_VERIFY
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{TOL_ENV} must be a positive number, got {raw!r}")
    return value


class Law(enum.Enum):
    OF_RHO = "rho"
    OF_V = "v"


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    max_residual: float
    threshold: float
    passed: bool
    worst_s: float

    @property
    def pass_(self) -> bool:
        return self.passed

    def to_record(self) -> dict:
        return {"id": self.check_id, "residual": self.max_residual, "threshold": self.threshold,
                "pass": self.passed, "worst_s": self.worst_s}

    def to_json(self) -> str:
        return json.dumps(self.to_record(), allow_nan=True)


def guard_mask(s: np.ndarray, guard: float = DEFAULT_GUARD) -> np.ndarray:
    """True for samples at least ``guard`` of the s-range away from both ends."""
    s = np.asarray(s, dtype=float)
    band = guard * (s[-1] - s[0])
    return (s >= s[0] + band) & (s <= s[-1] - band)


def make_report(check_id: str, residual, s, threshold: float, mask=None) -> CheckReport:
    """Report the largest |residual| over masked samples.

    Non-finite residuals inside the mask count as failures; a mask with no
    finite residual at all gives an infinite residual.
    """
    r = np.abs(np.asarray(residual, dtype=float) * np.ones_like(s))
    keep = np.ones(r.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    r = r[keep]
    ss = np.asarray(s, dtype=float)[keep]
    if r.size == 0:
        return CheckReport(check_id, math.inf, threshold, False, math.nan)
    bad = ~np.isfinite(r)
    if np.any(bad):
        i = int(np.argmax(bad))
        return CheckReport(check_id, math.inf, threshold, False, float(ss[i]))
    i = int(np.argmax(r))
    worst = float(r[i])
    return CheckReport(check_id, worst, threshold, worst <= threshold, float(ss[i]))


def _interior(samples: CurveSamples, guard: float) -> np.ndarray:
    return guard_mask(samples.s, guard)


def check_unit_speed(samples: CurveSamples, threshold: Optional[float] = None,
                     guard: float = DEFAULT_GUARD) -> CheckReport:
    """max |g(gamma', gamma') - eps| over interior samples, with g = du dv."""
    threshold = tol_verify() if threshold is None else threshold
    ud, vd, _, _ = null_jet(samples)
    residual = ud * vd - samples.epsilon
    return make_report("unit_speed", residual, samples.s, threshold, _interior(samples, guard))


def law_argument(samples: CurveSamples, law: Law) -> np.ndarray:
    """rho = sqrt(|u v|) or v along the samples."""
    u, v = null_points(samples)
    return np.sqrt(np.abs(u * v)) if law is Law.OF_RHO else v


def check_curvature_law(samples: CurveSamples, law: Law, kappa: Callable[[np.ndarray], np.ndarray],
                        threshold: Optional[float] = None, guard: float = DEFAULT_GUARD) -> CheckReport:
    """max |kappa_num(s) - kappa(rho(s) or v(s))| with finite-difference kappa_num."""
    threshold = tol_verify() if threshold is None else threshold
    law = Law(law)
    with np.errstate(all="ignore"):
        expected = np.asarray(kappa(law_argument(samples, law)), dtype=float)
    residual = numeric_curvature(samples) - expected
    return make_report(f"curvature_law.{law.value}", residual, samples.s, threshold, _interior(samples, guard))


def momentum_residual(samples: CurveSamples, momentum: MomentumSpec) -> np.ndarray:
    """rho^2 nu' - K(rho) (angular) or u' - K(v) (linear) at every sample.

    rho^2 nu' is read off as sigma g(gamma, N) = sigma (v u' - u v')/2, with
    sigma = +1 where the point lies in |y| > |x| (u v > 0) and -1 elsewhere.
    The mismatch is relative to K where |K| > 1.
    """
    ud, vd, _, _ = null_jet(samples)
    u, v = null_points(samples)
    with np.errstate(all="ignore"):
        if momentum.variable is Variable.RHO:
            sigma = np.where(u * v > 0, 1.0, -1.0)
            K = np.asarray(momentum.K(np.sqrt(np.abs(u * v))), dtype=float)
            lhs = sigma * (v * ud - u * vd) / 2
        else:
            K = np.asarray(momentum.K(v), dtype=float)
            lhs = ud
        return (lhs - K) / np.maximum(1.0, np.abs(K))


def check_momentum(samples: CurveSamples, momentum: MomentumSpec, threshold: Optional[float] = None,
                   guard: float = DEFAULT_GUARD) -> CheckReport:
    """max |rho^2 nu' - K(rho)| or max |u' - K(v)|, relative where |K| > 1."""
    threshold = tol_verify() if threshold is None else threshold
    kind = "angular" if momentum.variable is Variable.RHO else "linear"
    return make_report(f"momentum.{kind}", momentum_residual(samples, momentum), samples.s, threshold,
                       _interior(samples, guard))


def kappa_derivatives(samples: CurveSamples):
    """(kappa, kappa', kappa'', analytic) along the samples.

    Analytic derivatives are used when the samples carry them. Otherwise a
    continuous curvature law attached to the source is differentiated with
    eighth-order stencils, and failing that the sampled curvature with
    7-point central differences on the uniform grid.
    """
    kappa = samples.kappa if samples.kappa is not None else numeric_curvature(samples)
    if samples.kappa_dot is not None and samples.kappa_ddot is not None:
        return kappa, samples.kappa_dot, samples.kappa_ddot, True
    src = samples.source
    if src is not None and src.kappa is not None:
        kd, kdd = function_jet(src.kappa, samples.s, src.lo, src.hi, lo_tail=src.lo_tail, hi_tail=src.hi_tail)
        return kappa, kd, kdd, False
    if not is_uniform(samples.s):
        raise ValueError("numerical kappa derivatives need uniform arc-length samples")
    h = samples.s[1] - samples.s[0]
    kd, kdd = central_derivatives(kappa, h, stencil=7)
    return kappa, kd, kdd, False


def check_elastica(samples: CurveSamples, sigma: float, energy: float, threshold: Optional[float] = None,
                   energy_threshold: Optional[float] = None,
                   guard: float = DEFAULT_GUARD) -> tuple[CheckReport, CheckReport]:
    """Elastica equation 2k'' - k^3 - sigma k = 0 and conservation of
    E = k'^2 - k^4/4 - sigma k^2/2.

    Returns the equation report and the energy report. Thresholds are
    relaxed tenfold when the derivatives are numerical.
    """
    threshold = tol_verify() if threshold is None else threshold
    energy_threshold = threshold if energy_threshold is None else energy_threshold
    k, kd, kdd, analytic = kappa_derivatives(samples)
    if not analytic:
        threshold *= 10
        energy_threshold *= 10
    mask = _interior(samples, guard)
    eq = 2 * kdd - k**3 - sigma * k
    en = kd * kd - k**4 / 4 - sigma * k * k / 2 - energy
    return (make_report("elastica.equation", eq, samples.s, threshold, mask),
            make_report("elastica.energy", en, samples.s, energy_threshold, mask))


def soliton_residual(samples: CurveSamples) -> np.ndarray:
    """kappa - g((1, 1), N) with N = (y', x'), i.e. kappa - (x' - y') = kappa + v'."""
    ud, vd, udd, vdd = null_jet(samples)
    kappa = samples.epsilon * (udd * vd - ud * vdd) / 2
    return kappa + vd


def check_soliton(samples: CurveSamples, threshold: Optional[float] = None,
                  guard: float = DEFAULT_GUARD) -> CheckReport:
    """Translating-soliton equation kappa = g((1, 1), N)."""
    threshold = tol_verify() if threshold is None else threshold
    return make_report("soliton", soliton_residual(samples), samples.s, threshold, _interior(samples, guard))


def check_intrinsic(samples: CurveSamples, kappa_of_s: Callable[[np.ndarray], np.ndarray],
                    threshold: Optional[float] = None, guard: float = DEFAULT_GUARD) -> CheckReport:
    """max |kappa_num(s) - kappa(s)| against a stated intrinsic equation."""
    threshold = tol_verify() if threshold is None else threshold
    with np.errstate(all="ignore"):
        residual = numeric_curvature(samples) - np.asarray(kappa_of_s(samples.s), dtype=float)
    return make_report("intrinsic", residual, samples.s, threshold, _interior(samples, guard))


# -- intrinsic comparison -----------------------------------------------------


class _KappaView:
    """kappa(s) of a sampled curve on its guarded range, at arbitrary s."""

    def __init__(self, samples: CurveSamples, guard: float):
        mask = guard_mask(samples.s, guard)
        kappa = samples.kappa if samples.kappa is not None else numeric_curvature(samples)
        kappa = np.asarray(kappa, dtype=float) * np.ones_like(samples.s)
        mask &= np.isfinite(kappa)
        if np.count_nonzero(mask) < 4:
            raise ValueError("too few finite curvature samples to compare")
        self.s = samples.s[mask]
        self.kappa = kappa[mask]
        self.lo, self.hi = float(self.s[0]), float(self.s[-1])
        self._exact = None
        src = samples.source
        if src is not None and src.kappa is not None and samples.kappa is not None:
            fn = src.kappa
            self._exact = lambda q: np.asarray(fn(q), dtype=float) * np.ones_like(q)
            # the search runs on a dense spline; only the final residual is exact
            dense = np.linspace(self.lo, self.hi, _DENSE * self.s.size)
            with np.errstate(all="ignore"):
                values = self._exact(dense)
            if np.all(np.isfinite(values)):
                self._fast = CubicSpline(dense, values)
            else:
                self._fast = CubicSpline(self.s, self.kappa)
        else:
            self._fast = CubicSpline(self.s, self.kappa)

    def __call__(self, q, exact: bool = False):
        q = np.asarray(q, dtype=float)
        if q.size == 0:
            return q
        fn = self._exact if exact and self._exact is not None else self._fast
        with np.errstate(all="ignore"):
            return fn(q)


def _shift_residual(a: _KappaView, b: _KappaView, delta: float, min_overlap: float, exact: bool = False):
    """Symmetric max mismatch of kappa_a(s + delta) and kappa_b(s) on the overlap.

    ``min_overlap`` is the least admissible overlap length.
    """
    if min(a.hi, b.hi + delta) - max(a.lo, b.lo + delta) < min_overlap:
        return math.inf, math.nan
    sb = b.s[(b.s + delta >= a.lo) & (b.s + delta <= a.hi)]
    sa = a.s[(a.s - delta >= b.lo) & (a.s - delta <= b.hi)]
    if sb.size < 2 and sa.size < 2:
        return math.inf, math.nan
    rb = np.abs(a(sb + delta, exact) - b(sb, exact))
    ra = np.abs(a(sa, exact) - b(sa - delta, exact))
    rb = np.append(np.where(np.isfinite(rb), rb, math.inf), -1.0)
    ra = np.append(np.where(np.isfinite(ra), ra, math.inf), -1.0)
    ib, ia = int(np.argmax(rb)), int(np.argmax(ra))
    if rb[ib] >= ra[ia]:
        return float(rb[ib]), float(sb[ib])
    return float(ra[ia]), float(sa[ia] - delta)


def intrinsic_shift(a: CurveSamples, b: CurveSamples, guard: float = DEFAULT_GUARD,
                    min_overlap: float = 0.25, grid: int = 401) -> tuple[float, float, float]:
    """Best s-translation delta aligning kappa_b(s) with kappa_a(s + delta).

    Returns (delta, residual, worst_s). The shift is located on a grid
    spanning every admissible overlap (plus the exact endpoint alignments)
    and refined by golden-section search around the best grid point.

    Raises:
        ValueError: if no shift gives enough overlap.
    """
    ka, kb = _KappaView(a, guard), _KappaView(b, guard)
    need = min_overlap * min(ka.hi - ka.lo, kb.hi - kb.lo)
    lo, hi = ka.lo - kb.hi, ka.hi - kb.lo
    deltas = np.linspace(lo, hi, grid)
    deltas = np.unique(np.concatenate([deltas, [ka.lo - kb.lo, ka.hi - kb.hi]]))
    values = np.array([_shift_residual(ka, kb, d, need)[0] for d in deltas])
    if not np.any(np.isfinite(values)):
        raise ValueError("the two curves have no admissible overlap after any s-shift")
    i = int(np.argmin(values))
    best_d, best_v = float(deltas[i]), float(values[i])
    if 0 < i < deltas.size - 1 and values[i - 1] > best_v < values[i + 1]:
        obj = lambda d: _shift_residual(ka, kb, float(d), need)[0]
        try:
            res = minimize_scalar(obj, bracket=(deltas[i - 1], best_d, deltas[i + 1]), method="golden",
                                  options={"xtol": 1e-12})
            if lo <= res.x <= hi and res.fun < best_v:
                best_d, best_v = float(res.x), float(res.fun)
        except ValueError:
            pass
    value, worst = _shift_residual(ka, kb, best_d, need, exact=True)
    return best_d, value, worst


def compare_intrinsic(a: CurveSamples, b: CurveSamples, threshold: Optional[float] = None,
                      guard: float = DEFAULT_GUARD, min_overlap: float = 0.25) -> CheckReport:
    """Compare the intrinsic equations of two curves up to a shift of s.

    Minimizes over delta the larger of max |kappa_a(s + delta) - kappa_b(s)|
    on the overlap taken on either curve's samples, so the result is
    symmetric in (a, b). The overlap must cover ``min_overlap`` of the
    shorter curve's guarded s-range. Curvature comes from the attached law values
    when present, else from finite differences.

    Raises:
        ValueError: if no shift gives enough overlap.
    """
    threshold = tol_verify() if threshold is None else threshold
    _, value, worst = intrinsic_shift(a, b, guard, min_overlap)
    return CheckReport("compare_intrinsic", value, threshold, value <= threshold, worst)


def all_passed(reports: Iterable[CheckReport]) -> bool:
    return all(r.passed for r in reports)
