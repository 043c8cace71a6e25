"""Geometry of the Lorentz-Minkowski plane L^2 = (R^2, -dx^2 + dy^2).

Metric, causal character, pseudodistances, the Frenet apparatus of
unit-speed curves, orthochrone boosts, pseudopolar and null (u, v)
coordinates, and finite-difference curvature of sampled curves.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline

SPACELIKE_EPS = 1
TIMELIKE_EPS = -1


class PlanePoint(NamedTuple):
    x: float
    y: float


PlaneVector = PlanePoint


class Causal(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


class Branch(enum.Enum):
    """Pseudopolar branch: PLUS where |y| >= |x|, MINUS where |x| >= |y|."""

    PLUS = "plus"
    MINUS = "minus"

    @property
    def sigma(self) -> int:
        return 1 if self is Branch.PLUS else -1


class Sign(enum.Enum):
    POS = "pos"
    NEG = "neg"

    @property
    def value_sign(self) -> int:
        return 1 if self is Sign.POS else -1


def check_epsilon(epsilon: int) -> int:
    if epsilon not in (1, -1):
        raise ValueError(f"causal sign must be +1 or -1, got {epsilon!r}")
    return int(epsilon)


def metric_g(a, b) -> float:
    """Lorentzian inner product g(a, b) = -a.x*b.x + a.y*b.y."""
    return -a[0] * b[0] + a[1] * b[1]


def light_tolerance(w, scale: float = 1e-10) -> float:
    return scale * (1.0 + w[0] * w[0] + w[1] * w[1])


def causal_character(w, tol: Optional[float] = None) -> Causal:
    """Classify a non-zero vector as spacelike, timelike or lightlike.

    ``tol`` defaults to ``1e-10 * (1 + |w|^2)``.
    """
    if w[0] == 0 and w[1] == 0:
        raise ValueError("the zero vector has no causal character")
    if tol is None:
        tol = light_tolerance(w)
    q = metric_g(w, w)
    if q > tol:
        return Causal.SPACELIKE
    if q < -tol:
        return Causal.TIMELIKE
    return Causal.LIGHTLIKE


def pseudodistance_origin(p) -> float:
    return math.sqrt(abs(-p[0] * p[0] + p[1] * p[1]))


def pseudodistance(p, q) -> float:
    d = (q[0] - p[0], q[1] - p[1])
    return math.sqrt(abs(metric_g(d, d)))


def signed_curvature_from_jet(xd, yd, xdd, ydd, epsilon: int, tol: float = 1e-6) -> float:
    """Signed curvature eps*(xdd*yd - xd*ydd) of a unit-speed jet.

    Raises:
        ValueError: if ``g((xd, yd), (xd, yd))`` differs from ``epsilon`` by
            more than ``tol``.
    """
    epsilon = check_epsilon(epsilon)
    speed = -xd * xd + yd * yd
    if abs(speed - epsilon) > tol:
        raise ValueError(f"jet is not unit-speed: g(T,T)={speed!r}, expected {epsilon}")
    return epsilon * (xdd * yd - xd * ydd)


@dataclass(frozen=True)
class FrenetFrame:
    T: PlaneVector
    N: PlaneVector
    epsilon: int


def frenet_frame(xd: float, yd: float, epsilon: int) -> FrenetFrame:
    """Tangent T = (xd, yd) and normal N = (yd, xd)."""
    return FrenetFrame(PlaneVector(xd, yd), PlaneVector(yd, xd), check_epsilon(epsilon))


def orthochrone(nu: float, p):
    """Boost R_nu(x, y) = (cosh nu x + sinh nu y, sinh nu x + cosh nu y).

    Works on scalars or numpy arrays for the coordinates.
    """
    ch, sh = math.cosh(nu), math.sinh(nu)
    x, y = p[0], p[1]
    return PlanePoint(ch * x + sh * y, sh * x + ch * y)


@dataclass(frozen=True)
class PseudopolarPoint:
    rho: float
    nu: float
    branch: Branch
    sign: Sign
    indeterminate: bool = False


def to_pseudopolar(p, tol: Optional[float] = None) -> PseudopolarPoint:
    """Pseudopolar coordinates (rho, nu) with explicit branch and sign.

    Points on the light cone map to ``rho = 0`` with ``nu = nan`` and
    ``indeterminate=True``.
    """
    x, y = float(p[0]), float(p[1])
    if tol is None:
        tol = light_tolerance((x, y))
    q = -x * x + y * y
    if abs(q) <= tol:
        dominant = y if abs(y) >= abs(x) else x
        sign = Sign.POS if dominant >= 0 else Sign.NEG
        branch = Branch.PLUS if abs(y) >= abs(x) else Branch.MINUS
        return PseudopolarPoint(0.0, math.nan, branch, sign, True)
    rho = math.sqrt(abs(q))
    if q > 0:
        return PseudopolarPoint(rho, math.atanh(x / y), Branch.PLUS, Sign.POS if y > 0 else Sign.NEG)
    return PseudopolarPoint(rho, math.atanh(y / x), Branch.MINUS, Sign.POS if x > 0 else Sign.NEG)


def from_pseudopolar(q: PseudopolarPoint) -> PlanePoint:
    return pseudopolar_point(q.rho, q.nu, q.branch, q.sign)


def pseudopolar_point(rho, nu, branch: Branch, sign: Sign = Sign.POS):
    """Rectangular coordinates of (rho, nu); accepts numpy arrays."""
    k = sign.value_sign
    if branch is Branch.PLUS:
        return PlanePoint(k * rho * np.sinh(nu), k * rho * np.cosh(nu))
    return PlanePoint(k * rho * np.cosh(nu), k * rho * np.sinh(nu))


def pseudopolar_null(rho, nu, branch: Branch, sign: Sign = Sign.POS):
    """Null coordinates (u, v) of (rho, nu), free of the cancellation in y - x."""
    k = sign.value_sign
    if branch is Branch.PLUS:
        return k * rho * np.exp(nu), k * rho * np.exp(-nu)
    return k * rho * np.exp(nu), -k * rho * np.exp(-nu)


def uv_coords(p):
    """Null coordinates u = y + x, v = y - x."""
    return p[1] + p[0], p[1] - p[0]


def xy_from_uv(u, v) -> PlanePoint:
    return PlanePoint((u - v) / 2, (u + v) / 2)


@dataclass(frozen=True)
class CurveSource:
    """The position function behind a set of samples, on its open s-domain.

    Lets derivatives be taken on the curve itself rather than on the
    sample grid. ``lo_tail`` / ``hi_tail`` give the arc length from each
    domain end to the nearest singularity of the curve beyond it: zero
    when the end itself is singular, positive when the computed data merely
    stop there. Difference stencils scale with the distance to the
    singularity and only have to fit inside the domain.

    ``null`` optionally evaluates the null coordinates (u, v) directly.
    Near the light cone x and y are large and nearly equal, so metric
    quantities computed from them cancel badly; from (u, v) they do not.
    """

    position: Callable[[np.ndarray], tuple]
    lo: float = -math.inf
    hi: float = math.inf
    kappa: Optional[Callable[[np.ndarray], np.ndarray]] = None
    lo_tail: float = 0.0
    hi_tail: float = 0.0
    null: Optional[Callable[[np.ndarray], tuple]] = None

    def __call__(self, s):
        x, y = self.position(np.asarray(s, dtype=float))
        return np.asarray(x, dtype=float), np.asarray(y, dtype=float)

    def mapped(self, transform: Callable[[np.ndarray, np.ndarray], tuple],
               null_transform: Optional[Callable[[np.ndarray, np.ndarray], tuple]] = None) -> "CurveSource":
        """Source of the transformed curve; ``transform`` must preserve kappa(s).

        The null-coordinate evaluator is carried over only when
        ``null_transform`` gives the same map in (u, v).
        """
        null = None
        if self.null is not None and null_transform is not None:
            inner = self.null
            null = lambda s: null_transform(*inner(np.asarray(s, dtype=float)))
        return CurveSource(lambda s: transform(*self(s)), self.lo, self.hi, self.kappa, self.lo_tail, self.hi_tail,
                           null)


@dataclass(frozen=True, eq=False)
class CurveSamples:
    """Samples of a unit-speed curve gamma(s) = (x(s), y(s)).

    ``kappa`` is an optional attached curvature (analytic or prescribed);
    ``kappa_dot`` / ``kappa_ddot`` are optional analytic derivatives of it.
    ``source``, when present, evaluates the curve at arbitrary s.
    """

    s: np.ndarray
    x: np.ndarray
    y: np.ndarray
    epsilon: int
    kappa: Optional[np.ndarray] = None
    kappa_dot: Optional[np.ndarray] = None
    kappa_ddot: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)
    source: Optional[CurveSource] = None

    def __post_init__(self):
        check_epsilon(self.epsilon)
        s = np.asarray(self.s, dtype=float)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        for name in ("kappa", "kappa_dot", "kappa_ddot"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, np.asarray(val, dtype=float))
        if not (s.shape == self.x.shape == self.y.shape) or s.ndim != 1:
            raise ValueError("s, x, y must be one-dimensional arrays of equal length")
        if s.size > 1 and np.any(np.diff(s) <= 0):
            raise ValueError("arc length samples must be strictly increasing")

    def __len__(self) -> int:
        return self.s.size

    @property
    def u(self) -> np.ndarray:
        return self.y + self.x

    @property
    def v(self) -> np.ndarray:
        return self.y - self.x

    @property
    def rho(self) -> np.ndarray:
        return np.sqrt(np.abs(-self.x**2 + self.y**2))

    def with_points(self, x, y, epsilon: Optional[int] = None, transform=None, null_transform=None,
                    **changes) -> "CurveSamples":
        """Copy with new points; ``transform`` maps the source the same way."""
        source = self.source
        if source is not None:
            source = source.mapped(transform, null_transform) if transform is not None else None
        return replace(self, x=x, y=y, epsilon=self.epsilon if epsilon is None else epsilon,
                       source=source, **changes)

    def without_source(self) -> "CurveSamples":
        return replace(self, source=None)


# -- finite differences -------------------------------------------------------

_STENCILS = {
    5: (
        np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
        np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
    ),
    7: (
        np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0,
        np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0,
    ),
}


def central_derivatives(f: np.ndarray, h: float, stencil: int = 5):
    """First and second central differences on a uniform grid.

    The ``stencil // 2`` samples at each end are NaN.
    """
    w1, w2 = _STENCILS[stencil]
    half = stencil // 2
    f = np.asarray(f, dtype=float)
    n = f.size
    d1 = np.full(n, np.nan)
    d2 = np.full(n, np.nan)
    if n < stencil:
        return d1, d2
    core1 = np.zeros(n - 2 * half)
    core2 = np.zeros(n - 2 * half)
    for k in range(stencil):
        seg = f[k : n - 2 * half + k]
        core1 += w1[k] * seg
        core2 += w2[k] * seg
    d1[half : n - half] = core1 / h
    d2[half : n - half] = core2 / (h * h)
    return d1, d2


def is_uniform(s: np.ndarray, rtol: float = 1e-9) -> bool:
    ds = np.diff(s)
    return bool(np.all(np.abs(ds - ds.mean()) <= rtol * abs(ds.mean())))


def _uniform_view(samples: CurveSamples):
    if len(samples) < 5:
        raise ValueError("need at least 5 samples")
    s = samples.s
    if np.any(np.diff(s) <= 0):
        raise ValueError("arc length samples must be strictly increasing")
    if is_uniform(s):
        return s, samples.x, samples.y, False
    grid = np.linspace(s[0], s[-1], s.size)
    return grid, CubicSpline(s, samples.x)(grid), CubicSpline(s, samples.y)(grid), True


_JET1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_JET2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])


def _jet_steps(s: np.ndarray, lo: float, hi: float, rel_step: float, lo_tail: float = 0.0,
               hi_tail: float = 0.0) -> np.ndarray:
    span = float(s[-1] - s[0]) if s.size > 1 else 1.0
    h = np.full(s.shape, rel_step * span)
    for dist, tail in ((s - lo, lo_tail), (hi - s, hi_tail)):
        # the curve varies on the scale of the distance to its singularity
        h = np.minimum(h, rel_step * (dist + tail))
        if tail > 0:
            h = np.minimum(h, dist / 4.5)  # the 9-point stencil must fit
    return np.where(h > 0, h, np.nan)


def _stencil(s: np.ndarray, h: np.ndarray) -> np.ndarray:
    return s[:, None] + np.nan_to_num(h)[:, None] * np.arange(-4, 5)


def function_jet(f: Callable[[np.ndarray], np.ndarray], s, lo: float, hi: float, rel_step: float = 0.02,
                 lo_tail: float = 0.0, hi_tail: float = 0.0):
    """Eighth-order central first and second derivatives of f at s.

    The step at each point is ``rel_step`` times the smaller of the sampled
    span and its distance to the nearest singularity (a domain end plus
    its tail), so stencils stay inside the domain and shrink near poles.
    Points on a domain end get NaN.
    """
    s = np.asarray(s, dtype=float)
    h = _jet_steps(s, lo, hi, rel_step, lo_tail, hi_tail)
    pts = _stencil(s, h)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    return vals @ _JET1 / h, vals @ _JET2 / h**2


_TURN_STEP = 0.05


def _pair_pass(fn, s: np.ndarray, h: np.ndarray):
    pts = _stencil(s, h)
    a, b = fn(pts.ravel())
    a = np.asarray(a, dtype=float).reshape(pts.shape)
    b = np.asarray(b, dtype=float).reshape(pts.shape)
    return a @ _JET1 / h, b @ _JET1 / h, a @ _JET2 / h**2, b @ _JET2 / h**2


def _pair_jet(fn, source: CurveSource, s: np.ndarray, rel_step: float):
    s = np.asarray(s, dtype=float)
    h = _jet_steps(s, source.lo, source.hi, rel_step, source.lo_tail, source.hi_tail)
    jet = _pair_pass(fn, s, h)
    for _ in range(3):
        ad, bd, add, bdd = jet
        with np.errstate(all="ignore"):
            rate = np.hypot(add, bdd) / np.hypot(ad, bd)
            cap = _TURN_STEP / rate
        redo = np.isfinite(cap) & (cap < 0.9 * h)
        if not np.any(redo):
            break
        h = np.where(redo, cap, h)
        sub = _pair_pass(fn, s[redo], h[redo])
        jet = tuple(a.copy() for a in jet)
        for a, b in zip(jet, sub):
            a[redo] = b
    return jet


def source_jet(source: CurveSource, s: np.ndarray, rel_step: float = 0.02):
    """(xd, yd, xdd, ydd) of a curve source by eighth-order stencils.

    Steps follow :func:`function_jet` and are further limited so the
    tangent turns by at most a few percent across one step; points where
    the first pass shows faster turning are recomputed.
    """
    return _pair_jet(source, source, s, rel_step)


def tangent_jet(samples: CurveSamples, stencil: int = 5):
    """Central-difference (xd, yd, xdd, ydd) at the sample points.

    Uses the curve's ``source`` when available, otherwise the samples
    themselves (resampled to a uniform grid if needed).
    """
    if samples.source is not None:
        if len(samples) < 5:
            raise ValueError("need at least 5 samples")
        return source_jet(samples.source, samples.s)
    grid, x, y, resampled = _uniform_view(samples)
    h = grid[1] - grid[0]
    xd, xdd = central_derivatives(x, h, stencil)
    yd, ydd = central_derivatives(y, h, stencil)
    if resampled:
        back = lambda a: np.interp(samples.s, grid, a, left=np.nan, right=np.nan)
        xd, yd, xdd, ydd = map(back, (xd, yd, xdd, ydd))
    return xd, yd, xdd, ydd


def null_jet(samples: CurveSamples, stencil: int = 5):
    """(ud, vd, udd, vdd): derivatives of the null coordinates u = y + x, v = y - x.

    Taken on the source's null evaluator when it has one, so that
    g(gamma', gamma') = ud vd stays accurate near the light cone.
    """
    src = samples.source
    if src is not None and src.null is not None:
        if len(samples) < 5:
            raise ValueError("need at least 5 samples")
        return _pair_jet(src.null, src, samples.s, 0.02)
    xd, yd, xdd, ydd = tangent_jet(samples, stencil)
    return yd + xd, yd - xd, ydd + xdd, ydd - xdd


def null_points(samples: CurveSamples) -> tuple[np.ndarray, np.ndarray]:
    """(u, v) at the samples, from the null evaluator when available."""
    src = samples.source
    if src is not None and src.null is not None:
        u, v = src.null(samples.s)
        return np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    return samples.u, samples.v


def numeric_curvature(samples: CurveSamples, stencil: int = 5) -> np.ndarray:
    """Curvature eps*(xdd*yd - xd*ydd) = eps*(udd*vd - ud*vdd)/2 from central differences.

    Returns an array aligned with ``samples.s``; end samples without a full
    stencil are NaN.
    """
    ud, vd, udd, vdd = null_jet(samples, stencil)
    return samples.epsilon * (udd * vd - ud * vdd) / 2


# -- isometries on sampled curves ---------------------------------------------


def orthochrone_samples(nu: float, samples: CurveSamples) -> CurveSamples:
    boost = lambda x, y: orthochrone(nu, (x, y))
    x, y = boost(samples.x, samples.y)
    up, down = math.exp(nu), math.exp(-nu)
    return samples.with_points(x, y, transform=boost, null_transform=lambda u, v: (up * u, down * v))


def _swap(x, y):
    return y, x


def _reflect_u(x, y):
    return xy_from_uv(-(y + x), y - x)


def _point_reflect(x, y):
    return -x, -y


def swap_samples(samples: CurveSamples) -> CurveSamples:
    """(x, y) -> (y, x): exchanges spacelike and timelike, keeps kappa(rho)."""
    return samples.with_points(samples.y, samples.x, -samples.epsilon, transform=_swap,
                               null_transform=lambda u, v: (u, -v))


def reflect_u_samples(samples: CurveSamples) -> CurveSamples:
    """(u, v) -> (-u, v): exchanges spacelike and timelike, keeps kappa(s)."""
    x, y = _reflect_u(samples.x, samples.y)
    return samples.with_points(x, y, -samples.epsilon, transform=_reflect_u, null_transform=lambda u, v: (-u, v))


def point_reflect_samples(samples: CurveSamples) -> CurveSamples:
    return samples.with_points(-samples.x, -samples.y, transform=_point_reflect,
                               null_transform=lambda u, v: (-u, -v))
