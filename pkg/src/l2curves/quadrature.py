"""Curves with prescribed curvature kappa(rho) or kappa(v), by quadratures.

Two pipelines, one per conserved momentum:

* angular momentum K(rho) = rho^2 nu'(s), an anti-derivative of rho*kappa(rho):
  integrate s(rho), invert it, integrate nu, and assemble pseudopolar points;
* linear momentum K(v) = u'(s), with -eps/K an anti-derivative of kappa(v):
  integrate s(v), invert it, integrate u.

Every integral is tabulated on adaptive Gauss-Legendre panels and evaluated
exactly (not interpolated) at query points. Integrable inverse-square-root
endpoint singularities are removed by the substitution rho = rho0 +/- w^2.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from .core import (Branch, CurveSamples, CurveSource, Sign, check_epsilon, pseudopolar_null, pseudopolar_point,
                   xy_from_uv)
from .panels import GL_NODES, GL_WEIGHTS, adaptive_panels, bracketed_solve, gauss_legendre

TOL_INT = 1e-10
TOL_VERIFY = 1e-6
_TAIL_CAP = 1e6
RHO_WINDOW = (0.0, 50.0)
V_WINDOW = (-50.0, 50.0)
SCAN_PROBES = 4096
# least relative size of c + F(v) kept by momentum_from_kappa
_V_CANCEL = 1e-9

ProgressSink = Callable[[str, float], None]


class NumericFailure(RuntimeError):
    """A pipeline could not produce a curve (bad domain, divergent integral)."""


class EmptyDomain(NumericFailure):
    pass


class NonIntegrableSingularity(NumericFailure):
    def __init__(self, location: float, message: str = ""):
        self.location = location
        super().__init__(message or f"non-integrable singularity at {location!r}")


class Variable(enum.Enum):
    RHO = "rho"
    V = "v"


@dataclass(frozen=True)
class MomentumSpec:
    """Momentum function K of rho or v, with integration constant c.

    ``kappa`` is the prescribed curvature law, when known.
    """

    variable: Variable
    K: Callable[[np.ndarray], np.ndarray]
    c: float = 0.0
    kappa: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def consistency_residual(self, points, epsilon: int = 1, h: float = 1e-5) -> float:
        """Max mismatch between dK and the curvature law at ``points``.

        RHO: |K'(rho) - rho kappa(rho)|; V: |d(-eps/K)/dv - kappa(v)|.
        """
        if self.kappa is None:
            raise ValueError("no curvature law attached")
        p = np.asarray(points, dtype=float)
        if self.variable is Variable.RHO:
            dK = (self.K(p + h) - self.K(p - h)) / (2 * h)
            return float(np.max(np.abs(dK - p * self.kappa(p))))
        inv = lambda q: -epsilon / self.K(q)
        d = (inv(p + h) - inv(p - h)) / (2 * h)
        return float(np.max(np.abs(d - self.kappa(p))))


class _Primitive:
    """F(x) = integral of f from ``base`` to x.

    The line is cut into panels of width ``width`` starting at ``base``;
    whole-panel integrals are computed adaptively once and cached as
    running sums, so each evaluation costs a single 20-point rule on the
    partial panel.
    """

    def __init__(self, f, base: float, width: float):
        self.f = f
        self.base = float(base)
        self.width = float(width)
        self.up = np.zeros(1)  # up[k] = integral over [base, base + k width]
        self.down = np.zeros(1)  # down[k] = integral over [base - k width, base]

        self.rough: set[int] = set()  # panels that needed subdivision

    def _panel(self, k: int) -> float:
        a = self.base + k * self.width
        f = lambda x: self.f(x)[None, ...]
        panels = adaptive_panels(f, a, a + self.width, 1, n_init=1)
        if len(panels) > 2:
            self.rough.add(k)
        return float(sum(p.values[0] for p in panels))

    def _grow(self, k_hi: int, k_lo: int) -> None:
        # up to the panel holding x as well, so its smoothness is known
        if k_hi + 1 >= self.up.size:
            extra = [self._panel(k) for k in range(self.up.size - 1, k_hi + 1)]
            self.up = np.concatenate([self.up, self.up[-1] + np.cumsum(extra)])
        if 1 - k_lo >= self.down.size:
            extra = [self._panel(-k - 1) for k in range(self.down.size - 1, 1 - k_lo)]
            self.down = np.concatenate([self.down, self.down[-1] + np.cumsum(extra)])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        ok = np.isfinite(flat)
        k = np.zeros(flat.shape, dtype=np.int64)
        # whole panels always lie between base and x, never beyond x
        rel = (flat[ok] - self.base) / self.width
        k[ok] = np.where(rel >= 0, np.floor(rel), np.ceil(rel)).astype(np.int64)
        if np.any(ok):
            self._grow(int(k[ok].max()), int(k[ok].min()))
        start = self.base + k * self.width
        whole = np.where(k >= 0, self.up[np.clip(k, 0, self.up.size - 1)],
                         -self.down[np.clip(-k, 0, self.down.size - 1)])
        end = np.where(ok, flat, start)
        # the panel containing x: [start, start + w) above base, (start - w, start] below
        holder = np.where(flat >= self.base, k, k - 1)
        rough = np.isin(holder, list(self.rough)) if self.rough else np.zeros(flat.shape, dtype=bool)
        with np.errstate(all="ignore"):
            part = gauss_legendre(self.f, start, end)
            if np.any(rough):
                part[rough] = _refined_rule(self.f, start[rough], end[rough])
        out = np.where(ok, whole + part, np.nan)
        return out.reshape(x.shape)


def _refined_rule(f, a: np.ndarray, b: np.ndarray, depth: int = 0) -> np.ndarray:
    """Gauss-Legendre integrals over [a_i, b_i], bisected where halves disagree."""
    mid = 0.5 * (a + b)
    whole = gauss_legendre(f, a, b)
    halves = gauss_legendre(f, a, mid) + gauss_legendre(f, mid, b)
    bad = ~(np.abs(halves - whole) <= 1e-14 * np.abs(halves) + 1e-300)
    bad &= np.isfinite(halves) | np.isfinite(whole)
    if depth >= 40 or not np.any(bad):
        return halves
    out = halves.copy()
    out[bad] = (_refined_rule(f, a[bad], mid[bad], depth + 1)
                + _refined_rule(f, mid[bad], b[bad], depth + 1))
    return out


def primitive(f: Callable[[np.ndarray], np.ndarray], base: float = 0.0, width: float = 0.125):
    """Return F(x) = integral of f from ``base`` to x.

    Exact panel sums are cached on a grid of ``width`` anchored at ``base``
    and extended on demand, so repeated evaluation is cheap.
    """
    return _Primitive(f, base, width)


def momentum_from_kappa(
    kappa: Callable[[np.ndarray], np.ndarray],
    variable: Variable,
    c: float = 0.0,
    epsilon: int = 1,
    base: float = 0.0,
) -> MomentumSpec:
    """Build K from a curvature law by numerical anti-differentiation.

    RHO: K(rho) = c + int_base^rho t kappa(t) dt.
    V:   K(v) = -eps / (c + int_base^v kappa(t) dt).
    """
    epsilon = check_epsilon(epsilon)
    if variable is Variable.RHO:
        F = primitive(lambda t: t * kappa(t), base)
        return MomentumSpec(variable, lambda r: c + F(r), c, kappa)
    F = primitive(kappa, base)

    def K(v):
        Fv = F(v)
        den = c + Fv
        # where c + F is mostly rounding noise, K has no correct digits left
        noisy = np.abs(den) < _V_CANCEL * (abs(c) + np.abs(Fv))
        return np.where(noisy, np.nan, -epsilon / np.where(noisy, 1.0, den))

    return MomentumSpec(variable, K, c, kappa)


@dataclass(frozen=True)
class Interval:
    """Validity window; singular ends are zeros of the radicand (or poles of K).

    ``*_double`` marks a double zero (non-integrable, equilibrium orbit).
    """

    lo: float
    hi: float
    lo_singular: bool = False
    hi_singular: bool = False
    lo_double: bool = False
    hi_double: bool = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    @property
    def lo_turning(self) -> bool:
        return self.lo_singular and not self.lo_double and self.lo > 0

    @property
    def hi_turning(self) -> bool:
        return self.hi_singular and not self.hi_double

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class SamplingPolicy:
    count: int = 512
    s_range: Optional[tuple[float, float]] = None
    guard: float = 0.02

    def __post_init__(self):
        if self.count < 16:
            raise ValueError("sampling count must be at least 16")


@dataclass(frozen=True)
class Anchor:
    """Fixes the free constants: at ``point`` (rho or v), s = ``s`` and nu/u = ``value``."""

    point: Optional[float] = None
    s: float = 0.0
    value: float = 0.0


@dataclass(frozen=True)
class SolveRequest:
    momentum: MomentumSpec
    epsilon: int = 1
    branch: Branch = Branch.PLUS
    sign: Sign = Sign.POS
    domain_hint: Optional[Interval] = None
    sampling: SamplingPolicy = field(default_factory=SamplingPolicy)
    anchor: Anchor = field(default_factory=Anchor)
    window: Optional[tuple[float, float]] = None
    probes: int = SCAN_PROBES
    tol_int: float = TOL_INT

    def __post_init__(self):
        check_epsilon(self.epsilon)

    @property
    def variable(self) -> Variable:
        return self.momentum.variable

    def radicand(self, rho):
        """K^2 + sigma*eps*rho^2 (sigma = +1 on the PLUS branch)."""
        K = self.momentum.K(rho)
        return K * K + self.branch.sigma * self.epsilon * rho * rho


# -- domain scan -------------------------------------------------------------


def _refine_sign_change(f, a: float, b: float) -> float:
    return brentq(f, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=400)


def _refine_boundary(valid, a: float, b: float, iters: int = 200) -> float:
    """Bisect between a valid point ``a`` and an invalid point ``b``."""
    for _ in range(iters):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        if valid(m):
            a = m
        else:
            b = m
    return a


def _scan_rho(request: SolveRequest) -> list[Interval]:
    lo, hi = request.window or RHO_WINDOW
    R = lambda r: request.radicand(np.asarray(r, dtype=float))
    with np.errstate(all="ignore"):
        probes = np.linspace(lo, hi, request.probes + 1)
        if probes[0] <= 0:
            probes[0] = hi * 1e-12
        vals = R(probes)
        r_at_lo = float(R(np.array(lo))) if lo > 0 else float(request.momentum.K(np.array(0.0))) ** 2
    scale = lambda r: 1.0 + float(request.momentum.K(np.array(r))) ** 2 + r * r
    good = np.isfinite(vals) & (vals > 0)

    # split points: sign changes, plus touching (double) zeros
    cuts: list[tuple[float, bool]] = []  # (location, double)
    for i in range(len(probes) - 1):
        if good[i] != good[i + 1]:
            a, b = probes[i], probes[i + 1]
            if np.isfinite(vals[i]) and np.isfinite(vals[i + 1]):
                root = _refine_sign_change(lambda r: float(R(np.array(r))), a, b)
                toward = b if good[i + 1] else a
                for _ in range(64):
                    if float(R(np.array(root))) >= 0:
                        break
                    root = float(np.nextafter(root, toward))
                cuts.append((root, False))
            else:
                ok = lambda r: bool(np.isfinite(R(np.array(r))) and R(np.array(r)) > 0)
                root = _refine_boundary(ok, a, b) if good[i] else _refine_boundary(ok, b, a)
                cuts.append((root, False))
    for i in range(1, len(probes) - 1):
        if good[i - 1] and good[i] and good[i + 1] and vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]:
            if vals[i] > 1e-4 * scale(probes[i]):
                continue
            res = minimize_scalar(
                lambda r: float(R(np.array(r))),
                bounds=(probes[i - 1], probes[i + 1]),
                method="bounded",
                options={"xatol": 1e-13},
            )
            if res.fun <= 1e-12 * scale(res.x):
                cuts.append((float(res.x), True))

    cuts.sort()
    lo_singular = (r_at_lo <= 1e-24) if lo <= 0 else (r_at_lo <= 0)
    edges = [(lo, lo_singular, False)] + [(c, True, d) for c, d in cuts] + [(hi, False, False)]
    out = []
    for (a, sa, da), (b, sb, db) in zip(edges[:-1], edges[1:]):
        if not b > a:
            continue
        with np.errstate(all="ignore"):
            mv = R(np.array(0.5 * (a + b)))
        if np.isfinite(mv) and mv > 0:
            out.append(Interval(a, b, sa, sb, da, db))
    return [_classify_double_ends(request, iv) for iv in out]


def _classify_double_ends(request: SolveRequest, iv: Interval) -> Interval:
    """Sign-change zeros whose derivative vanishes are double (non-integrable)."""

    def is_double(r0: float) -> bool:
        if r0 <= 0:
            return False
        h = 1e-6 * max(1.0, r0)
        with np.errstate(all="ignore"):
            d = (request.radicand(np.array(r0 + h)) - request.radicand(np.array(r0 - h))) / (2 * h)
        K0 = float(request.momentum.K(np.array(r0)))
        return abs(float(d)) <= 1e-7 * (1.0 + K0 * K0 + r0 * r0)

    lo_d = iv.lo_double or (iv.lo_singular and is_double(iv.lo))
    hi_d = iv.hi_double or (iv.hi_singular and is_double(iv.hi))
    return Interval(iv.lo, iv.hi, iv.lo_singular, iv.hi_singular, lo_d, hi_d)


def _scan_v(request: SolveRequest) -> list[Interval]:
    lo, hi = request.window or V_WINDOW
    K = request.momentum.K

    def state(v) -> int:
        with np.errstate(all="ignore"):
            k = float(K(np.array(v, dtype=float)))
        if not np.isfinite(k) or k == 0:
            return 0
        return 1 if k > 0 else -1

    probes = np.linspace(lo, hi, request.probes + 1)
    with np.errstate(all="ignore"):
        kv = K(probes)
    st = np.where(~np.isfinite(kv) | (kv == 0), 0, np.sign(kv)).astype(int)
    out = []
    i = 0
    n = len(probes)
    while i < n:
        if st[i] == 0:
            i += 1
            continue
        j = i
        while j + 1 < n and st[j + 1] == st[i]:
            j += 1
        sgn = st[i]
        same = lambda v, sgn=sgn: state(v) == sgn
        a = lo if i == 0 else _refine_boundary(same, probes[i], probes[i - 1])
        b = hi if j == n - 1 else _refine_boundary(same, probes[j], probes[j + 1])
        if b > a:
            out.append(Interval(a, b, i != 0, j != n - 1))
        i = j + 1
    return out


def domain_scan(request: SolveRequest) -> list[Interval]:
    """Maximal sub-intervals of the scan window where the pipeline is valid.

    RHO: the radicand K^2 + sigma eps rho^2 is strictly positive.
    V: K is finite with constant non-zero sign (ds = eps K dv monotone).
    """
    if request.variable is Variable.RHO:
        return _scan_rho(request)
    return _scan_v(request)


def _pick_interval(request: SolveRequest) -> Interval:
    intervals = domain_scan(request)
    if not intervals:
        raise EmptyDomain("no valid region in the scan window")
    hint = request.domain_hint
    if hint is None:
        return max(intervals, key=lambda iv: (iv.width, iv.lo))
    mid = 0.5 * (hint.lo + hint.hi)
    for iv in intervals:
        if iv.contains(mid):
            if request.variable is Variable.V and not (iv.contains(hint.lo) and iv.contains(hint.hi)):
                raise NumericFailure(
                    f"K changes sign or is singular inside [{hint.lo}, {hint.hi}] (ds changes sign)"
                )
            return iv
    raise EmptyDomain(f"hint [{hint.lo}, {hint.hi}] lies outside every valid region")


def _hinted_interval(request: SolveRequest) -> Interval:
    """The valid interval picked for the request, clipped to its domain hint."""
    iv = _pick_interval(request)
    h = request.domain_hint
    if h is None:
        return iv
    lo_in, hi_in = h.lo > iv.lo, h.hi < iv.hi
    return Interval(h.lo if lo_in else iv.lo, h.hi if hi_in else iv.hi,
                    iv.lo_singular and not lo_in, iv.hi_singular and not hi_in,
                    iv.lo_double and not lo_in, iv.hi_double and not hi_in)


# -- tabulated cumulative integrals ------------------------------------------


@dataclass
class _Region:
    """rho = to_x(w) on [wa, wb], increasing in w."""

    kind: str  # "lo": x = x0 + w^2 ; "hi": x = x0 - w^2 ; "id": x = w
    x0: float
    wa: float
    wb: float

    def to_x(self, w):
        if self.kind == "lo":
            return self.x0 + w * w
        if self.kind == "hi":
            return self.x0 - w * w
        return w

    def dx_dw(self, w):
        if self.kind == "lo":
            return 2.0 * w
        if self.kind == "hi":
            return -2.0 * w
        return np.ones_like(w)

    def to_w(self, x):
        if self.kind == "lo":
            return np.sqrt(np.maximum(x - self.x0, 0.0))
        if self.kind == "hi":
            return -np.sqrt(np.maximum(self.x0 - x, 0.0))
        return x


class CumulativeTable:
    """Cumulative integrals of several integrands g_k(x) dx over [lo, hi].

    Values are exact quadratures (panel sums plus a partial Gauss-Legendre
    rule), so they can be inverted by root finding without interpolation
    error. Component 0 must be monotone increasing for inversion.
    """

    def __init__(self, integrands, lo: float, hi: float, sub_lo: bool, sub_hi: bool,
                 n_integrands: int, required: int = 1, rtol: float = 1e-14):
        self.integrands = integrands
        self.lo, self.hi = lo, hi
        self.n = n_integrands
        if sub_lo and sub_hi:
            mid = 0.5 * (lo + hi)
            d = math.sqrt(mid - lo)
            regions = [_Region("lo", lo, 0.0, d), _Region("hi", hi, -d, 0.0)]
        elif sub_lo:
            regions = [_Region("lo", lo, 0.0, math.sqrt(hi - lo))]
        elif sub_hi:
            regions = [_Region("hi", hi, -math.sqrt(hi - lo), 0.0)]
        else:
            regions = [_Region("id", 0.0, lo, hi)]
        self.regions = regions
        pa, pb, preg, vals = [], [], [], []
        for ri, reg in enumerate(regions):
            f = self._w_integrand(reg)
            for p in adaptive_panels(f, reg.wa, reg.wb, n_integrands, required, rtol=rtol):
                pa.append(p.a)
                pb.append(p.b)
                preg.append(ri)
                vals.append(p.values)
        self.pa = np.array(pa)
        self.pb = np.array(pb)
        self.preg = np.array(preg, dtype=int)
        vals = np.array(vals).T  # (n_integrands, n_panels)
        self.cum = np.concatenate([np.zeros((self.n, 1)), np.cumsum(vals, axis=1)], axis=1)
        self.x_start = np.array([regions[r].to_x(a) for r, a in zip(preg, pa)])
        self.x_start[0] = lo

    def _w_integrand(self, reg: _Region):
        def f(w):
            x = reg.to_x(w)
            jac = reg.dx_dw(w)
            return np.stack([g(x) * jac for g in self.integrands])

        return f

    def _partial(self, k: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Integrals from panel start pa[k] to w, shape (n, len(w))."""
        out = np.empty((self.n, w.size))
        for ri, reg in enumerate(self.regions):
            sel = self.preg[k] == ri
            if not np.any(sel):
                continue
            f = self._w_integrand(reg)
            with np.errstate(all="ignore"):
                out[:, sel] = gauss_legendre(f, self.pa[k[sel]], w[sel])
        # a zero-width rule may sample a singular endpoint (0 * inf)
        out[:, w == self.pa[k]] = 0.0
        return out

    def panel_of(self, x: np.ndarray) -> np.ndarray:
        return np.clip(np.searchsorted(self.x_start, x, side="right") - 1, 0, self.pa.size - 1)

    def w_of(self, k: np.ndarray, x: np.ndarray) -> np.ndarray:
        w = np.empty_like(x)
        for ri, reg in enumerate(self.regions):
            sel = self.preg[k] == ri
            w[sel] = reg.to_w(x[sel])
        return np.clip(w, self.pa[k], self.pb[k])

    def __call__(self, x) -> np.ndarray:
        """All cumulative integrals from ``lo`` to x; shape (n, *x.shape)."""
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        k = self.panel_of(flat)
        w = self.w_of(k, flat)
        vals = self.cum[:, k] + self._partial(k, w)
        return vals.reshape((self.n,) + x.shape)

    def total(self) -> np.ndarray:
        return self.cum[:, -1]

    def invert(self, target, component: int = 0, xtol: float = 0.0) -> np.ndarray:
        """x with integral_k(lo..x) = target, by bracketed root finding in w."""
        t = np.asarray(target, dtype=float)
        flat = t.ravel()
        cum = self.cum[component]
        k = np.clip(np.searchsorted(cum, flat, side="right") - 1, 0, self.pa.size - 1)

        def F(w, idx):
            return cum[k[idx]] + self._partial(k[idx], w)[component]

        def dF(w, idx):
            out = np.empty_like(w)
            for ri, reg in enumerate(self.regions):
                sel = self.preg[k[idx]] == ri
                with np.errstate(all="ignore"):
                    out[sel] = self._w_integrand(reg)(w[sel])[component]
            return out

        w = bracketed_solve(F, flat, self.pa[k], self.pb[k], xtol=xtol, dF=dF, indexed=True)
        x = np.empty_like(w)
        for ri, reg in enumerate(self.regions):
            sel = self.preg[k] == ri
            x[sel] = reg.to_x(w[sel])
        return x.reshape(t.shape)


@dataclass
class MonotoneTable:
    """Strictly monotone samples (x, f) of a function, optionally with f itself."""

    x: np.ndarray
    f: np.ndarray
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.f = np.asarray(self.f, dtype=float)
        if self.x.size < 2 or self.x.shape != self.f.shape:
            raise ValueError("table needs at least two (x, f) pairs of equal length")
        dx, df = np.diff(self.x), np.diff(self.f)
        if not np.all(dx > 0):
            raise ValueError("table abscissae must be strictly increasing")
        if not (np.all(df > 0) or np.all(df < 0)):
            raise ValueError("table is not strictly monotone")

    @property
    def increasing(self) -> bool:
        return bool(self.f[-1] > self.f[0])


class MonotoneInverse:
    """Inverse of a monotone table, refined on the underlying function."""

    def __init__(self, table: MonotoneTable, target_tol: float = 1e-10):
        self.table = table
        self.target_tol = target_tol
        sgn = 1.0 if table.increasing else -1.0
        self._sgn = sgn
        self._fs = sgn * table.f
        from scipy.interpolate import PchipInterpolator

        self._interp = PchipInterpolator(self._fs, table.x)

    @property
    def range(self) -> tuple[float, float]:
        return float(np.min(self.table.f)), float(np.max(self.table.f))

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        ys = self._sgn * y.ravel()
        lo, hi = self._fs[0], self._fs[-1]
        if np.any(ys < lo - 1e-12 * (1 + abs(lo))) or np.any(ys > hi + 1e-12 * (1 + abs(hi))):
            raise ValueError("value outside the tabulated range")
        if self.table.func is None:
            return self._interp(ys).reshape(y.shape)
        i = np.clip(np.searchsorted(self._fs, ys, side="right") - 1, 0, self._fs.size - 2)
        F = lambda x: self._sgn * np.asarray(self.table.func(x), dtype=float)
        x = bracketed_solve(F, ys, self.table.x[i], self.table.x[i + 1], xtol=self.target_tol * 1e-3)
        return x.reshape(y.shape)


def invert_monotone(table: MonotoneTable, target_tol: float = 1e-10) -> MonotoneInverse:
    """Inverse function of a strictly monotone table."""
    return MonotoneInverse(table, target_tol)


# -- kappa(rho) pipeline -----------------------------------------------------


@dataclass
class ArcTable:
    """s(rho) and nu(rho) on one interval, anchored at a reference point.

    ``s_of_rho`` increases with rho. When the reference point is a turning
    point (simple radicand zero with rho > 0), nu is anchored there too.
    """

    request: SolveRequest
    interval: Interval
    table: CumulativeTable
    rho_ref: float
    s_ref_raw: float
    nu_ref_raw: float
    ref_side: str  # "lo", "hi" or "mid"

    @property
    def rho(self) -> np.ndarray:
        return np.append(self.table.x_start, self.interval.hi)

    @property
    def s(self) -> np.ndarray:
        return self.table.cum[0] - self.s_ref_raw

    def s_of_rho(self, rho):
        return self.table(rho)[0] - self.s_ref_raw

    def nu_of_rho(self, rho):
        return self.table(rho)[1] - self.nu_ref_raw

    def rho_of_s(self, s):
        return self.table.invert(np.asarray(s, dtype=float) + self.s_ref_raw)

    @property
    def s_span(self) -> tuple[float, float]:
        return -self.s_ref_raw, float(self.table.total()[0]) - self.s_ref_raw

    def as_monotone_table(self) -> MonotoneTable:
        rho = self.rho
        return MonotoneTable(rho, self.s, func=self.s_of_rho)


def _rho_integrands(request: SolveRequest):
    K = request.momentum.K

    def ds(r):
        R = request.radicand(r)
        return r / np.sqrt(np.maximum(R, 0.0))

    def dnu(r):
        R = request.radicand(r)
        return K(r) / (r * np.sqrt(np.maximum(R, 0.0)))

    return ds, dnu


def arc_from_rho(request: SolveRequest, interval: Interval) -> ArcTable:
    """Tabulate s(rho) = int rho drho / sqrt(K^2 +/- eps rho^2) on ``interval``.

    Raises:
        NonIntegrableSingularity: if an end is a double zero of the radicand.
    """
    if request.variable is not Variable.RHO:
        raise ValueError("arc_from_rho needs a momentum of rho")
    for end, double in ((interval.lo, interval.lo_double), (interval.hi, interval.hi_double)):
        if double:
            raise NonIntegrableSingularity(end, f"double zero of the radicand at rho={end!r}: "
                                                f"equilibrium pseudocircle, not integrable")
    sub_lo = interval.lo_singular or interval.lo <= 0
    sub_hi = interval.hi_singular
    table = CumulativeTable(_rho_integrands(request), interval.lo, interval.hi,
                            sub_lo, sub_hi, n_integrands=2, required=1)
    s_total = table.total()[0]
    if not np.isfinite(s_total):
        raise NonIntegrableSingularity(interval.lo, "arc-length integral diverges on the interval")
    anchor = request.anchor
    if anchor.point is not None:
        if not interval.contains(anchor.point):
            raise ValueError("anchor point outside the interval")
        rho_ref, side = float(anchor.point), "mid"
    elif interval.lo_turning:
        rho_ref, side = interval.lo, "lo"
    elif interval.hi_turning:
        rho_ref, side = interval.hi, "hi"
    elif interval.lo_singular:
        rho_ref, side = interval.lo, "lo"
    else:
        rho_ref, side = 0.5 * (interval.lo + interval.hi), "mid"
    s_raw = float(table(np.array(rho_ref))[0]) - anchor.s
    if side == "lo" and not interval.lo_turning:
        # origin: nu diverges there, anchor nu at the midpoint instead
        nu_point = 0.5 * (interval.lo + interval.hi)
    else:
        nu_point = rho_ref
    nu_raw = float(table(np.array(nu_point))[1]) - anchor.value
    if side == "lo" and not interval.lo_turning:
        side = "origin"
    return ArcTable(request, interval, table, rho_ref, s_raw, nu_raw, side)


def nu_from_s(request: SolveRequest, arc: ArcTable, s) -> np.ndarray:
    """Orthochrone angle nu(s) = int K(rho(s)) / rho(s)^2 ds.

    The ds integral is evaluated through the change of variables
    ds = rho drho / sqrt(radicand), on the same panels as s(rho), and the
    branch structure of the curve (reflection at turning points) is applied.
    """
    rho, nu = _rho_nu_at(arc, np.asarray(s, dtype=float))
    return nu


def _rho_nu_at(arc: ArcTable, s: np.ndarray):
    iv = arc.interval
    s0, s1 = arc.s_span
    shift = arc.request.anchor.s
    rel = s - shift
    if arc.ref_side in ("lo", "hi") and (iv.lo_turning if arc.ref_side == "lo" else iv.hi_turning):
        base = 1.0 if arc.ref_side == "lo" else -1.0
        half = (s1 - shift) if base > 0 else -(s0 - shift)
        periodic = iv.lo_turning and iv.hi_turning
        if periodic:
            period = 2.0 * half
            m = np.floor((rel + half) / period)
            r = rel - m * period
            turn = 2.0 * float(arc.table.total()[1])
        else:
            if np.any(np.abs(rel) > half * (1 + 1e-12) + 1e-12):
                raise ValueError("requested s outside the solution domain")
            m = np.zeros_like(rel)
            r = rel
            turn = 0.0
        on_base = np.sign(r) == base
        rho = arc.rho_of_s(base * np.abs(r) + shift)
        nu_base = arc.nu_of_rho(rho) - arc.request.anchor.value
        nu = np.where(on_base | (r == 0), nu_base, -nu_base) + arc.request.anchor.value + m * turn
        return rho, nu
    if np.any(s < s0 - 1e-12 * (1 + abs(s0))) or np.any(s > s1 + 1e-12 * (1 + abs(s1))):
        raise ValueError("requested s outside the solution domain")
    rho = arc.rho_of_s(np.clip(s, s0, s1))
    if np.any(rho <= 0):
        raise NumericFailure("rho reaches 0 inside the sampled range; nu is singular there")
    return rho, arc.nu_of_rho(rho)


def _default_s_range(arc: ArcTable, guard: float) -> tuple[float, float]:
    iv = arc.interval
    s0, s1 = arc.s_span
    shift = arc.request.anchor.s
    if arc.ref_side == "lo" and iv.lo_turning:
        half = s1 - shift
        if iv.hi_turning:
            return shift - half, shift + half
        return shift - half * (1 - guard), shift + half * (1 - guard)
    if arc.ref_side == "hi" and iv.hi_turning:
        half = shift - s0
        return shift - half * (1 - guard), shift + half * (1 - guard)
    # the guard is taken in rho so that a divergent s(rho) keeps the samples
    # on the part of the curve where rho actually varies
    g = guard * (iv.hi - iv.lo)
    s_lo = float(arc.s_of_rho(np.array(iv.lo if iv.lo_turning else iv.lo + g)))
    s_hi = float(arc.s_of_rho(np.array(iv.hi if iv.hi_turning else iv.hi - g)))
    return min(s_lo, s_hi), max(s_lo, s_hi)


def _report(progress: Optional[ProgressSink], stage: str, fraction: float) -> None:
    if progress is not None:
        progress(stage, fraction)


def solve_kappa_rho(request: SolveRequest, progress: Optional[ProgressSink] = None) -> CurveSamples:
    """Unit-speed samples of the curve with angular momentum K(rho).

    The radial part uses radicand K^2 + eps rho^2 on the PLUS branch and
    K^2 - eps rho^2 on the MINUS branch; points are (rho sinh nu, rho cosh nu)
    on PLUS and (rho cosh nu, rho sinh nu) on MINUS, times the overall sign.
    """
    if request.variable is not Variable.RHO:
        raise ValueError("solve_kappa_rho needs a momentum of rho")
    iv = _hinted_interval(request)
    _report(progress, "domain", 1.0)
    arc = arc_from_rho(request, iv)
    _report(progress, "arc", 1.0)
    a, b = request.sampling.s_range or _default_s_range(arc, request.sampling.guard)
    s = np.linspace(a, b, request.sampling.count)
    rho, nu = _rho_nu_at(arc, s)
    _report(progress, "invert", 1.0)
    x, y = pseudopolar_point(rho, nu, request.branch, request.sign)
    kappa_fn = request.momentum.kappa
    kappa = None if kappa_fn is None else np.asarray(kappa_fn(rho), dtype=float) * np.ones_like(rho)
    meta = {"rho": rho, "nu": nu, "interval": iv, "ref": arc.ref_side}
    return CurveSamples(s, x, y, request.epsilon, kappa, meta=meta, source=_rho_source(arc))


def _tail(ds: Callable, cut: float, beyond: float) -> float:
    """Arc length from a cut of the data to the next singularity past it.

    The integral runs over the finite stretch [cut, beyond] and ignores
    points past a turning point, where the chart ends but the curve is
    regular. Both make it a lower bound, which is the safe side.
    """
    def f(t):
        with np.errstate(all="ignore"):
            val = float(ds(np.array(t)))
        return abs(val) if math.isfinite(val) else 0.0

    a, b = (cut, beyond) if beyond > cut else (beyond, cut)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            val = quad(f, a, b, limit=200)[0]
    except (ValueError, ZeroDivisionError, OverflowError):
        return 0.0
    return min(val, _TAIL_CAP) if math.isfinite(val) else _TAIL_CAP


def _rho_source(arc: ArcTable) -> CurveSource:
    """Position at arbitrary s, on the s-domain of the solution."""
    iv = arc.interval
    s0, s1 = arc.s_span
    shift = arc.request.anchor.s
    ds = _rho_integrands(arc.request)[0]
    # window and hint cuts leave room up to the next real singularity
    lo_tail = 0.0 if iv.lo_singular or iv.lo <= 0.0 else _tail(ds, iv.lo, 0.0)
    hi_tail = 0.0 if iv.hi_singular else _tail(ds, iv.hi, iv.hi + max(iv.hi, iv.width))
    if arc.ref_side == "lo" and iv.lo_turning:
        half = s1 - shift
        lo, hi = (-math.inf, math.inf) if iv.hi_turning else (shift - half, shift + half)
        lo_tail = hi_tail
    elif arc.ref_side == "hi" and iv.hi_turning:
        half = shift - s0
        lo, hi = shift - half, shift + half
        hi_tail = lo_tail
    else:
        lo, hi = s0, s1
    req = arc.request

    def position(s):
        rho, nu = _rho_nu_at(arc, s)
        return pseudopolar_point(rho, nu, req.branch, req.sign)

    def null(s):
        rho, nu = _rho_nu_at(arc, s)
        return pseudopolar_null(rho, nu, req.branch, req.sign)

    kappa = None
    if req.momentum.kappa is not None:
        law = req.momentum.kappa
        kappa = lambda s: law(_rho_nu_at(arc, np.asarray(s, dtype=float))[0])
    return CurveSource(position, lo, hi, kappa, lo_tail, hi_tail, null)


def degenerate_solutions(request: SolveRequest, s_range: tuple[float, float] = (-1.0, 1.0)) -> list[CurveSamples]:
    """Constant-rho orbits at double zeros of the radicand.

    Such rho0 satisfy K(rho0)^2 = -sigma eps rho0^2 and d/drho(radicand) = 0;
    the curve is rho = rho0, nu = K(rho0)/rho0^2 * s.
    """
    found = set()
    for iv in domain_scan(request):
        if iv.lo_double:
            found.add(iv.lo)
        if iv.hi_double:
            found.add(iv.hi)
    out = []
    s = np.linspace(s_range[0], s_range[1], request.sampling.count)
    for rho0 in sorted(found):
        K0 = float(request.momentum.K(np.array(rho0)))
        nu = K0 / rho0**2 * s
        x, y = pseudopolar_point(np.full_like(s, rho0), nu, request.branch, request.sign)
        kappa = k_fn = None
        if request.momentum.kappa is not None:
            k0 = float(request.momentum.kappa(np.array(rho0)))
            kappa = np.full_like(s, k0)
            k_fn = lambda q, k0=k0: np.full_like(np.asarray(q, dtype=float), k0)
        rate = K0 / rho0**2

        def position(q, rho0=rho0, rate=rate):
            q = np.asarray(q, dtype=float)
            return pseudopolar_point(np.full_like(q, rho0), rate * q, request.branch, request.sign)

        def null(q, rho0=rho0, rate=rate):
            q = np.asarray(q, dtype=float)
            return pseudopolar_null(np.full_like(q, rho0), rate * q, request.branch, request.sign)

        out.append(CurveSamples(s, x, y, request.epsilon, kappa, meta={"rho0": rho0},
                                source=CurveSource(position, kappa=k_fn, null=null)))
    return out


# -- kappa(v) pipeline -------------------------------------------------------


@dataclass
class VTable:
    request: SolveRequest
    interval: Interval
    table: CumulativeTable
    lo: float
    hi: float
    direction: float  # +1 if s increases with v
    s_ref_raw: float
    u_ref_raw: float

    def s_of_v(self, v):
        return self.request.epsilon * self.table(v)[0] - self.s_ref_raw

    def u_of_v(self, v):
        return self.request.epsilon * self.table(v)[1] - self.u_ref_raw

    def v_of_s(self, s):
        raw = (np.asarray(s, dtype=float) + self.s_ref_raw) * self.request.epsilon
        # table component 0 is int K dv; monotone with sign of K
        if self.direction * self.request.epsilon > 0:
            return self.table.invert(raw, component=0)
        return self.table.invert(-raw, component=2)

    @property
    def s_span(self) -> tuple[float, float]:
        a = float(self.s_of_v(np.array(self.lo)))
        b = float(self.s_of_v(np.array(self.hi)))
        return (a, b) if a < b else (b, a)


def arc_from_v(request: SolveRequest, interval: Interval) -> VTable:
    """Tabulate s(v) = eps int K dv and u(v) = eps int K^2 dv."""
    K = request.momentum.K
    span = interval.width
    lo = interval.lo + (1e-9 * span if interval.lo_singular else 0.0)
    hi = interval.hi - (1e-9 * span if interval.hi_singular else 0.0)
    with np.errstate(all="ignore"):
        k_mid = float(K(np.array(0.5 * (lo + hi))))
    sgn = 1.0 if k_mid > 0 else -1.0
    integrands = (lambda v: K(v), lambda v: K(v) ** 2, lambda v: -K(v))
    table = CumulativeTable(integrands, lo, hi, False, False, n_integrands=3, required=3)
    anchor = request.anchor
    v_ref = 0.5 * (lo + hi) if anchor.point is None else float(anchor.point)
    if not lo <= v_ref <= hi:
        raise ValueError("anchor point outside the interval")
    vals = table(np.array(v_ref))
    eps = request.epsilon
    return VTable(request, interval, table, lo, hi, sgn * eps,
                  eps * float(vals[0]) - anchor.s, eps * float(vals[1]) - anchor.value)


def _v_tails(vt: VTable) -> tuple[float, float]:
    """Tails of the (low s, high s) ends of a v-table; ds = |K| dv."""
    iv = vt.interval
    K = vt.request.momentum.K
    reach = max(abs(iv.lo), abs(iv.hi), iv.width)
    lo_tail = 0.0 if iv.lo_singular else _tail(K, iv.lo, iv.lo - reach)
    hi_tail = 0.0 if iv.hi_singular else _tail(K, iv.hi, iv.hi + reach)
    at_lo = float(vt.s_of_v(np.array(vt.lo))) <= float(vt.s_of_v(np.array(vt.hi)))
    return (lo_tail, hi_tail) if at_lo else (hi_tail, lo_tail)


def solve_kappa_v(request: SolveRequest, progress: Optional[ProgressSink] = None) -> CurveSamples:
    """Unit-speed samples (u(s), v(s)) of the curve with linear momentum K(v)."""
    if request.variable is not Variable.V:
        raise ValueError("solve_kappa_v needs a momentum of v")
    iv = _hinted_interval(request)
    _report(progress, "domain", 1.0)
    vt = arc_from_v(request, iv)
    _report(progress, "arc", 1.0)
    s0, s1 = vt.s_span
    if request.sampling.s_range is not None:
        a, b = request.sampling.s_range
        if a < s0 - 1e-9 * (1 + abs(s0)) or b > s1 + 1e-9 * (1 + abs(s1)):
            raise ValueError(f"s-range [{a}, {b}] exceeds the solution domain [{s0}, {s1}]")
    else:
        g = request.sampling.guard * (vt.hi - vt.lo)
        ends = vt.s_of_v(np.array([vt.lo + g, vt.hi - g]))
        a, b = float(ends.min()), float(ends.max())
    s = np.linspace(a, b, request.sampling.count)
    v = vt.v_of_s(s)
    u = vt.u_of_v(v)
    _report(progress, "invert", 1.0)
    x, y = xy_from_uv(u, v)
    kappa_fn = request.momentum.kappa
    kappa = None if kappa_fn is None else np.asarray(kappa_fn(v), dtype=float) * np.ones_like(v)
    def null(q):
        vq = vt.v_of_s(q)
        return vt.u_of_v(vq), vq

    kappa_s = None if kappa_fn is None else (lambda q: kappa_fn(vt.v_of_s(q)))
    return CurveSamples(s, x, y, request.epsilon, kappa, meta={"interval": iv},
                        source=CurveSource(lambda q: xy_from_uv(*null(q)), s0, s1, kappa_s, *_v_tails(vt), null))


def solve(request: SolveRequest, progress: Optional[ProgressSink] = None) -> CurveSamples:
    if request.variable is Variable.RHO:
        return solve_kappa_rho(request, progress)
    return solve_kappa_v(request, progress)
