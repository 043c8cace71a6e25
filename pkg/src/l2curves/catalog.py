"""Closed-form curves with prescribed curvature, used as ground truth.

Each family is described by a :class:`FamilyDescriptor` (identifier,
parameters, causal sign, pseudopolar branch and sign) and evaluates to a
:class:`ClosedForm`: position as a function of arc length (or of an
auxiliary parameter t with ds = rho dt), the intrinsic equation kappa(s),
and the conserved momentum that generates it.

Pseudopolar families distinguish two radial types. The radicand of the
arc-length integral is K^2 + sigma*eps*rho^2 (sigma = +1 on the PLUS
branch), so the "plus" closed forms apply when sigma*eps = +1 and the
"minus" closed forms when sigma*eps = -1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping, Optional

import numpy as np

from .core import (Branch, CurveSamples, CurveSource, Sign, check_epsilon, null_points, orthochrone,
                   pseudopolar_null, pseudopolar_point, xy_from_uv)
from .panels import bracketed_solve
from .quadrature import CumulativeTable, Interval, MomentumSpec, SamplingPolicy, SolveRequest, Variable

ArrayFn = Callable[[np.ndarray], np.ndarray]


class FamilyId(enum.Enum):
    GEODESIC = "geodesic"
    PSEUDOCIRCLE_ORIGIN = "pseudocircle_origin"
    PSEUDOCIRCLE_V = "pseudocircle_v"
    NORWICH = "norwich"
    STURM_EXTENDED = "sturm_extended"
    SINUSOIDAL = "sinusoidal"
    ELASTIC = "elastic"
    ENNEPER = "enneper"
    ENNEPER_C = "enneper_c"
    GRIM_REAPER = "grim_reaper"
    EXP_C = "exp_c"


class Parameterization(enum.Enum):
    ARC_LENGTH = "arc_length"
    AUX_T = "aux_t"


class PseudopolarOnly(ValueError):
    """The family has no closed-form intrinsic equation kappa(s)."""


class FamilyDomainError(ValueError):
    """Parameters or sample positions outside a family's domain."""


@dataclass(frozen=True)
class ParamSpec:
    name: str
    default: float
    doc: str
    constraint: str = "any real"


@dataclass(frozen=True)
class FamilyInfo:
    id: FamilyId
    variable: Variable
    summary: str
    params: tuple[ParamSpec, ...]
    parameterization: Parameterization = Parameterization.ARC_LENGTH
    uses_branch: bool = False

    def schema(self) -> dict:
        """Machine-readable description of the family and its parameters."""
        return {
            "id": self.id.value,
            "variable": self.variable.value,
            "summary": self.summary,
            "parameterization": self.parameterization.value,
            "uses_branch": self.uses_branch,
            "params": [
                {"name": p.name, "type": "number", "default": p.default, "doc": p.doc, "constraint": p.constraint}
                for p in self.params
            ],
        }


_REGISTRY: dict[FamilyId, FamilyInfo] = {
    info.id: info
    for info in (
        FamilyInfo(FamilyId.GEODESIC, Variable.RHO, "geodesic R_phi0(c, s) (spacelike) or R_phi0(s, c) (timelike)",
                   (ParamSpec("phi0", 0.0, "orthochrone angle of the line"),
                    ParamSpec("c", 0.0, "pseudodistance of the line from the origin; K = c"))),
        FamilyInfo(FamilyId.PSEUDOCIRCLE_ORIGIN, Variable.RHO, "pseudocircle through the origin, kappa = 2 k0, K = k0 rho^2",
                   (ParamSpec("k0", 0.5, "half the curvature", "k0 > 0"),), uses_branch=True),
        FamilyInfo(FamilyId.PSEUDOCIRCLE_V, Variable.V, "pseudocircle kappa = k0 with K(v) = -eps/(c + k0 v)",
                   (ParamSpec("k0", 1.0, "curvature", "k0 > 0"), ParamSpec("c", 0.0, "integration constant"))),
        FamilyInfo(FamilyId.NORWICH, Variable.RHO, "Norwich spiral kappa = 1/rho with K = rho + c, in t with ds = rho dt",
                   (ParamSpec("c", 1.0, "integration constant (dilation)", "c != 0; c > 0 on the plus radial type"),),
                   Parameterization.AUX_T, uses_branch=True),
        FamilyInfo(FamilyId.STURM_EXTENDED, Variable.RHO, "kappa = 2 + mu/rho with K = rho^2 + mu rho",
                   (ParamSpec("mu", 1.0, "curvature offset", "mu != 0"),
                    ParamSpec("trivial", 0.0, "1 selects the constant solution rho = (1 - mu)/2 (mu < 1)", "0 or 1")),
                   uses_branch=True),
        FamilyInfo(FamilyId.SINUSOIDAL, Variable.RHO, "sinusoidal spiral kappa = lam rho^(n-1), K = lam rho^(n+1)/(n+1)",
                   (ParamSpec("n", 2.0, "exponent", "n not in {0, -1}"),
                    ParamSpec("lam", 3.0, "scale", "lam != 0; lam (n+1) > 0 on the minus radial type")),
                   uses_branch=True),
        FamilyInfo(FamilyId.ELASTIC, Variable.V, "elastica kappa = 2v with K = -eps/(v^2 + c)",
                   (ParamSpec("c", 0.0, "integration constant; tension 4c"),)),
        FamilyInfo(FamilyId.ENNEPER, Variable.V, "Enneper generatrix u = eps v^3/3, kappa = 1/v^2, K = eps v", ()),
        FamilyInfo(FamilyId.ENNEPER_C, Variable.V, "kappa = 1/v^2 with K = -eps v/(c v - 1)",
                   (ParamSpec("c", 1.0, "integration constant", "c != 0"),)),
        FamilyInfo(FamilyId.GRIM_REAPER, Variable.V, "grim-reaper u = -eps e^(-2v)/2, kappa = e^v = 1/s", ()),
        FamilyInfo(FamilyId.EXP_C, Variable.V, "kappa = e^v with K = -eps/(e^v + c)",
                   (ParamSpec("c", 1.0, "integration constant", "c != 0"),)),
    )
}


def registry() -> list[FamilyInfo]:
    """All catalog families in declaration order."""
    return list(_REGISTRY.values())


def family_info(family) -> FamilyInfo:
    return _REGISTRY[FamilyId(family)]


@dataclass(frozen=True)
class FamilyDescriptor:
    """A catalog family with concrete parameters.

    Missing parameters take their registry defaults; unknown names are
    rejected.
    """

    id: FamilyId
    params: Mapping[str, float] = field(default_factory=dict)
    epsilon: int = 1
    branch: Branch = Branch.PLUS
    sign: Sign = Sign.POS

    def __post_init__(self):
        fid = FamilyId(self.id)
        object.__setattr__(self, "id", fid)
        check_epsilon(self.epsilon)
        info = _REGISTRY[fid]
        known = {p.name: p.default for p in info.params}
        unknown = set(self.params) - set(known)
        if unknown:
            raise FamilyDomainError(f"{fid.value}: unknown parameter(s) {sorted(unknown)}")
        merged = {**known, **{k: float(v) for k, v in self.params.items()}}
        object.__setattr__(self, "params", MappingProxyType(merged))
        _validate(self)

    def __getitem__(self, name: str) -> float:
        return self.params[name]

    @property
    def radial_plus(self) -> bool:
        """True when the 'plus' radial closed forms apply (sigma*eps = +1)."""
        return self.branch.sigma * self.epsilon == 1

    def to_dict(self) -> dict:
        return {"family": self.id.value, "params": dict(self.params), "epsilon": self.epsilon,
                "branch": self.branch.value, "sign": self.sign.value}


def _validate(d: FamilyDescriptor) -> None:
    p = d.params
    fid = d.id
    bad = None
    if fid in (FamilyId.PSEUDOCIRCLE_ORIGIN, FamilyId.PSEUDOCIRCLE_V) and not p["k0"] > 0:
        bad = "k0 must be positive"
    elif fid is FamilyId.NORWICH:
        if p["c"] == 0:
            bad = "c must be non-zero"
        elif d.radial_plus and p["c"] < 0:
            bad = "the plus radial type needs c > 0"
    elif fid is FamilyId.STURM_EXTENDED:
        if p["mu"] == 0:
            bad = "mu must be non-zero"
        elif p["trivial"] not in (0.0, 1.0):
            bad = "trivial must be 0 or 1"
        elif p["trivial"] == 1.0 and not p["mu"] < 1:
            bad = "the constant solution needs mu < 1"
        elif p["trivial"] == 1.0 and d.radial_plus:
            bad = "the constant solution lives on the minus radial type (sigma*eps = -1)"
    elif fid is FamilyId.SINUSOIDAL:
        n, lam = p["n"], p["lam"]
        if n in (0.0, -1.0):
            bad = "n must not be 0 or -1"
        elif lam == 0:
            bad = "lam must be non-zero"
        elif not d.radial_plus and lam * (n + 1) <= 0:
            bad = "the minus radial type needs lam*(n+1) > 0"
    elif fid in (FamilyId.ENNEPER_C, FamilyId.EXP_C) and p["c"] == 0:
        bad = "c must be non-zero (use the c = 0 family)"
    if bad:
        raise FamilyDomainError(f"{fid.value}: {bad}")


@dataclass(frozen=True)
class ClosedForm:
    """Closed-form description of one curve.

    ``position`` maps the family parameter (s, or t for AUX_T families) to
    (x, y) arrays. ``s_of_t`` is None for ARC_LENGTH families.
    ``kappa_dot``/``kappa_ddot`` are analytic derivatives in s when known.
    """

    descriptor: FamilyDescriptor
    position: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    intrinsic_kappa: Optional[ArrayFn]
    momentum: MomentumSpec
    domain: Interval
    default_range: tuple[float, float]
    parameterization: Parameterization = Parameterization.ARC_LENGTH
    s_of_t: Optional[ArrayFn] = None
    rho_of_t: Optional[ArrayFn] = None
    kappa_of_param: Optional[ArrayFn] = None
    kappa_dot: Optional[ArrayFn] = None
    kappa_ddot: Optional[ArrayFn] = None
    polar: Optional[Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]] = None
    uv: Optional[Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]] = None

    @property
    def epsilon(self) -> int:
        return self.descriptor.epsilon


def _const(value: float) -> ArrayFn:
    return lambda a: np.full_like(np.asarray(a, dtype=float), value)


def _in_domain(values: np.ndarray, dom: Interval, name: str) -> None:
    lo_ok = values > dom.lo if dom.lo_singular else values >= dom.lo
    hi_ok = values < dom.hi if dom.hi_singular else values <= dom.hi
    if not np.all(lo_ok & hi_ok):
        raise FamilyDomainError(f"{name} values outside the family domain ({dom.lo}, {dom.hi})")


def _rho_momentum(K: ArrayFn, kappa: ArrayFn, c: float = 0.0) -> MomentumSpec:
    return MomentumSpec(Variable.RHO, K, c, kappa)


def _pseudopolar_closed_form(d: FamilyDescriptor, rho_nu, **kw) -> ClosedForm:
    def position(s):
        rho, nu = rho_nu(np.asarray(s, dtype=float))
        return pseudopolar_point(rho, nu, d.branch, d.sign)

    return ClosedForm(d, position, polar=rho_nu, **kw)


def _uv_closed_form(d: FamilyDescriptor, uv, **kw) -> ClosedForm:
    def position(s):
        u, v = uv(np.asarray(s, dtype=float))
        return xy_from_uv(u, v)

    return ClosedForm(d, position, uv=uv, **kw)


# -- families of kappa(rho) ---------------------------------------------------


def _geodesic(d: FamilyDescriptor) -> ClosedForm:
    phi0, c = d["phi0"], d["c"]
    eps = d.epsilon

    def position(s):
        s = np.asarray(s, dtype=float)
        base = (np.full_like(s, c), s) if eps == 1 else (s, np.full_like(s, c))
        return orthochrone(phi0, base)

    zero = _const(0.0)
    rng = (-1.0, 1.0) if c == 0 else (-0.9 * abs(c), 0.9 * abs(c))
    return ClosedForm(d, position, zero, _rho_momentum(_const(c), zero, c),
                      Interval(-math.inf, math.inf), rng, kappa_of_param=zero,
                      kappa_dot=zero, kappa_ddot=zero)


def _pseudocircle_origin(d: FamilyDescriptor) -> ClosedForm:
    k0 = d["k0"]
    if d.radial_plus:
        rho_nu = lambda s: (np.sinh(k0 * s) / k0, k0 * s)
        dom, rng = Interval(0.0, math.inf, lo_singular=True), (0.1 / k0, 2.0 / k0)
    else:
        rho_nu = lambda s: (np.cosh(k0 * s) / k0, k0 * s)
        dom, rng = Interval(-math.inf, math.inf), (-2.0 / k0, 2.0 / k0)
    kap = _const(2 * k0)
    return _pseudopolar_closed_form(
        d, rho_nu, intrinsic_kappa=kap, momentum=_rho_momentum(lambda r: k0 * r * r, _const(2 * k0)),
        domain=dom, default_range=rng, kappa_of_param=kap, kappa_dot=_const(0.0), kappa_ddot=_const(0.0))


def _norwich(d: FamilyDescriptor) -> ClosedForm:
    c = d["c"]
    asinh1 = math.asinh(1.0)
    r2 = math.sqrt(2.0)
    if d.radial_plus:
        t0 = asinh1 / r2
        rho_t = lambda t: 0.5 * c * (np.sinh(r2 * t) - 1.0)
        nu_t = lambda t: t + np.log(np.sinh((r2 * t - asinh1) / 2) / np.cosh((r2 * t + asinh1) / 2))
        s_t = lambda t: 0.5 * c * (np.cosh(r2 * t) / r2 - t)
        dom, rng = Interval(t0, math.inf, lo_singular=True), (t0 + 0.2, t0 + 2.0)
    elif c < 0:
        a = -c
        rho_t = lambda t: 0.5 * a * (1.0 - t * t)
        nu_t = lambda t: t - 2.0 * np.arctanh(t)
        s_t = lambda t: 0.5 * a * (t - t**3 / 3.0)
        dom, rng = Interval(-1.0, 1.0, True, True), (-0.6, 0.6)
    else:
        rho_t = lambda t: 0.5 * c * (t * t - 1.0)
        nu_t = lambda t: t - 2.0 * np.arctanh(1.0 / t)
        s_t = lambda t: 0.5 * c * (t**3 / 3.0 - t)
        dom, rng = Interval(1.0, math.inf, lo_singular=True), (1.4, 2.5)

    def rho_nu(t):
        return rho_t(t), nu_t(t)

    kappa_t = lambda t: 1.0 / rho_t(t)
    return _pseudopolar_closed_form(
        d, rho_nu, intrinsic_kappa=None, momentum=_rho_momentum(lambda r: r + c, lambda r: 1.0 / r, c),
        domain=dom, default_range=rng, parameterization=Parameterization.AUX_T, s_of_t=s_t,
        rho_of_t=rho_t, kappa_of_param=kappa_t)


def sturm_rho_nu(mu: float, radial_plus: bool) -> Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Closed-form (rho(s), nu(s)) for K = rho^2 + mu rho, dispatched on mu."""
    if radial_plus:
        eta = math.asinh(mu)
        th = math.tanh(eta)
        return lambda s: (np.sinh(s) - mu, s + th * np.log(np.sinh((s - eta) / 2) / np.cosh((s + eta) / 2)))
    rho = lambda s: np.cosh(s) - mu
    if mu == 1.0:
        return lambda s: (rho(s), s - 1.0 / np.tanh(s / 2))
    if mu == -1.0:
        return lambda s: (rho(s), s - np.tanh(s / 2))
    if abs(mu) < 1.0:
        al = math.acos(mu)
        cot_a, cot_half = 1.0 / math.tan(al), 1.0 / math.tan(al / 2)
        return lambda s: (rho(s), s + 2.0 * cot_a * np.arctan(cot_half * np.tanh(s / 2)))
    if mu > 1.0:
        de = math.acosh(mu)
        cth = 1.0 / math.tanh(de)
        return lambda s: (rho(s), s + cth * np.log(np.sinh((s - de) / 2) / np.sinh((s + de) / 2)))
    tau = math.acosh(-mu)
    cth = 1.0 / math.tanh(tau)
    return lambda s: (rho(s), s + cth * np.log(np.cosh((s - tau) / 2) / np.cosh((s + tau) / 2)))


def _sturm_extended(d: FamilyDescriptor) -> ClosedForm:
    mu = d["mu"]
    if d["trivial"] == 1.0:
        rho0 = 0.5 * (1.0 - mu)
        c_triv = rho0 - rho0 * rho0 - mu * rho0
        kap = _const(2.0 + mu / rho0)
        rho_nu = lambda s: (np.full_like(s, rho0), s / rho0)
        return _pseudopolar_closed_form(
            d, rho_nu, intrinsic_kappa=kap,
            momentum=_rho_momentum(lambda r: r * r + mu * r + c_triv, lambda r: 2.0 + mu / r, c_triv),
            domain=Interval(-math.inf, math.inf), default_range=(-2.0, 2.0), kappa_of_param=kap,
            kappa_dot=_const(0.0), kappa_ddot=_const(0.0))
    rho_nu = sturm_rho_nu(mu, d.radial_plus)
    if d.radial_plus:
        eta = math.asinh(mu)
        dom, rng = Interval(eta, math.inf, lo_singular=True), (eta + 0.1, eta + 3.0)
    elif mu >= 1.0:
        de = math.acosh(mu)
        dom, rng = Interval(de, math.inf, lo_singular=True), (de + 0.5, de + 3.5)
    else:
        dom, rng = Interval(-math.inf, math.inf), (-3.0, 3.0)
    kap = lambda s: 2.0 + mu / rho_nu(np.asarray(s, dtype=float))[0]
    return _pseudopolar_closed_form(
        d, rho_nu, intrinsic_kappa=kap,
        momentum=_rho_momentum(lambda r: r * r + mu * r, lambda r: 2.0 + mu / r),
        domain=dom, default_range=rng, kappa_of_param=kap)


def sinusoidal_relation(n: float, lam: float, branch: Branch) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Residual of the pseudopolar equation of a sinusoidal spiral.

    ``branch`` names the radial type: PLUS gives lam rho^n - (n+1) sinh(n nu),
    MINUS gives lam rho^n - (n+1) cosh(n nu). For a curve on pseudopolar
    branch b with causal sign eps, the radial type is PLUS iff
    b.sigma * eps = +1.
    """
    if n in (0.0, -1.0):
        raise ValueError("n must not be 0 or -1")
    trig = np.sinh if branch is Branch.PLUS else np.cosh
    return lambda rho, nu: lam * np.asarray(rho, dtype=float) ** n - (n + 1) * trig(n * np.asarray(nu, dtype=float))


class _SinusoidalArc:
    """Arc length s(nu) = int rho^2/|K| dnu and its inverse for a sinusoidal spiral."""

    SPAN = 8.0  # |n nu| covered by the table

    def __init__(self, n: float, lam: float, radial_plus: bool):
        self.n, self.lam, self.plus = n, lam, radial_plus
        self.q = (n + 1) / lam
        self.orient = 1.0 if lam / (n + 1) > 0 else -1.0  # sign of K
        if radial_plus:
            side = 1.0 if self.q * n > 0 else -1.0  # sign of nu where sinh(n nu) q > 0
            if n > 0:
                lo, hi, sub = 0.0, self.SPAN / abs(n), True
                ref = 0.0
            else:
                lo, hi, sub = 1e-3 / abs(n), self.SPAN / abs(n), False
                ref = 1.0 / abs(n)
            if side < 0:
                lo, hi = -hi, -lo
                ref = -ref
            self.sub_lo, self.sub_hi = (sub, False) if side > 0 else (False, sub)
            self.nu_lo, self.nu_hi, self.nu_ref = lo, hi, ref
            self.nu_default = tuple(sorted((side * 0.2 / abs(n) if n > 0 else side * 0.3 / abs(n),
                                           side * 1.5 / abs(n))))
        else:
            self.nu_lo, self.nu_hi, self.nu_ref = -self.SPAN / abs(n), self.SPAN / abs(n), 0.0
            self.sub_lo = self.sub_hi = False
            self.nu_default = (-1.5 / abs(n), 1.5 / abs(n))
        # s is tabulated outward from nu_ref on each side, so values near the
        # reference keep full absolute precision even when the ends are far out
        lo, ref, hi = self.nu_lo, self.nu_ref, self.nu_hi
        self.right = None if hi <= ref else CumulativeTable(
            (self.ds_dnu,), ref, hi, self.sub_lo and ref == lo, self.sub_hi, 1)
        self.left = None if ref <= lo else CumulativeTable(
            (lambda w: self.ds_dnu(-w),), -ref, -lo, self.sub_hi and ref == hi, self.sub_lo, 1)

    def rho(self, nu):
        trig = np.sinh if self.plus else np.cosh
        return (self.q * trig(self.n * nu)) ** (1.0 / self.n)

    def ds_dnu(self, nu):
        rho = self.rho(nu)
        return np.abs((self.n + 1) / self.lam) * rho ** (1.0 - self.n)

    def _raw(self, nu):
        """Signed arc length from nu_ref to nu."""
        nu = np.asarray(nu, dtype=float)
        out = np.zeros(nu.shape)
        up = nu >= self.nu_ref
        if self.right is not None and np.any(up):
            out[up] = self.right(nu[up])[0]
        if self.left is not None and np.any(~up):
            out[~up] = -self.left(-nu[~up])[0]
        return out

    def s_of_nu(self, nu):
        return self.orient * self._raw(nu)

    def nu_of_s(self, s):
        raw = np.atleast_1d(self.orient * np.asarray(s, dtype=float))
        out = np.full(raw.shape, float(self.nu_ref))
        up, down = raw > 0, raw < 0
        if self.right is not None and np.any(up):
            out[up] = self.right.invert(raw[up])
        if self.left is not None and np.any(down):
            out[down] = -self.left.invert(-raw[down])
        return out.reshape(np.shape(s))

    def s_bounds(self) -> tuple[float, float]:
        a = 0.0 if self.left is None else -float(self.left.total()[0])
        b = 0.0 if self.right is None else float(self.right.total()[0])
        a, b = self.orient * a, self.orient * b
        return (a, b) if a < b else (b, a)


def _sinusoidal(d: FamilyDescriptor) -> ClosedForm:
    n, lam = d["n"], d["lam"]
    arc = _SinusoidalArc(n, lam, d.radial_plus)

    def rho_nu(s):
        nu = arc.nu_of_s(s)
        return arc.rho(nu), nu

    lo, hi = arc.s_bounds()
    rng = tuple(sorted(float(arc.s_of_nu(np.array(v))) for v in arc.nu_default))
    kap_rho = lambda r: lam * r ** (n - 1)
    return _pseudopolar_closed_form(
        d, rho_nu, intrinsic_kappa=None,
        momentum=_rho_momentum(lambda r: lam * r ** (n + 1) / (n + 1), kap_rho),
        domain=Interval(lo, hi, True, True), default_range=rng,
        kappa_of_param=lambda s: kap_rho(rho_nu(np.asarray(s, dtype=float))[0]))


# -- families of kappa(v) ----------------------------------------------------


def _v_momentum(K: ArrayFn, kappa: ArrayFn, c: float = 0.0) -> MomentumSpec:
    return MomentumSpec(Variable.V, K, c, kappa)


def _pseudocircle_v(d: FamilyDescriptor) -> ClosedForm:
    k0, c, eps = d["k0"], d["c"], d.epsilon
    uv = lambda s: (-eps * np.exp(k0 * s) / k0, (np.exp(-k0 * s) - c) / k0)
    kap = _const(k0)
    return _uv_closed_form(
        d, uv, intrinsic_kappa=kap, momentum=_v_momentum(lambda v: -eps / (c + k0 * v), kap, c),
        domain=Interval(-math.inf, math.inf), default_range=(-2.0 / k0, 2.0 / k0), kappa_of_param=kap,
        kappa_dot=_const(0.0), kappa_ddot=_const(0.0))


def _elastic(d: FamilyDescriptor) -> ClosedForm:
    c, eps = d["c"], d.epsilon
    if c == 0:
        uv = lambda s: (-eps * s**3 / 3.0, 1.0 / s)
        kap, kd, kdd = (lambda s: 2.0 / s), (lambda s: -2.0 / s**2), (lambda s: 4.0 / s**3)
        dom, rng = Interval(0.0, math.inf, lo_singular=True), (0.2, 3.0)
    elif c > 0:
        r = math.sqrt(c)
        uv = lambda s: (-(eps / c) * (s / 2 + np.sin(2 * r * s) / (4 * r)), -r * np.tan(r * s))
        sec2 = lambda s: 1.0 / np.cos(r * s) ** 2
        kap = lambda s: -2 * r * np.tan(r * s)
        kd = lambda s: -2 * r * r * sec2(s)
        kdd = lambda s: -4 * r**3 * sec2(s) * np.tan(r * s)
        half = math.pi / (2 * r)
        dom, rng = Interval(-half, half, True, True), (-0.8 * half, 0.8 * half)
    else:
        r = math.sqrt(-c)
        uv = lambda s: ((eps / c) * (-s / 2 + np.sinh(2 * r * s) / (4 * r)), r / np.tanh(r * s))
        csch2 = lambda s: 1.0 / np.sinh(r * s) ** 2
        kap = lambda s: 2 * r / np.tanh(r * s)
        kd = lambda s: -2 * r * r * csch2(s)
        kdd = lambda s: 4 * r**3 * csch2(s) / np.tanh(r * s)
        dom, rng = Interval(0.0, math.inf, lo_singular=True), (0.2 / r, 3.0 / r)
    return _uv_closed_form(
        d, uv, intrinsic_kappa=kap, momentum=_v_momentum(lambda v: -eps / (v * v + c), lambda v: 2.0 * v, c),
        domain=dom, default_range=rng, kappa_of_param=kap, kappa_dot=kd, kappa_ddot=kdd)


def elastic_constants(c: float) -> tuple[float, float]:
    """Tension and energy (sigma, E) of the kappa = 2v elastica with constant c."""
    return (0.0, 0.0) if c == 0 else (4.0 * c, 4.0 * c * c)


def _enneper(d: FamilyDescriptor) -> ClosedForm:
    eps = d.epsilon
    uv = lambda s: (2.0 * eps * math.sqrt(2.0) * s**1.5 / 3.0, np.sqrt(2.0 * s))
    kap = lambda s: 0.5 / s
    return _uv_closed_form(
        d, uv, intrinsic_kappa=kap, momentum=_v_momentum(lambda v: eps * v, lambda v: 1.0 / v**2),
        domain=Interval(0.0, math.inf, lo_singular=True), default_range=(0.1, 3.0), kappa_of_param=kap,
        kappa_dot=lambda s: -0.5 / s**2, kappa_ddot=lambda s: 1.0 / s**3)


def enneper_c_graph(c: float, epsilon: int) -> ArrayFn:
    """u(v) of the kappa = 1/v^2 curves with K = -eps v/(c v - 1)."""
    return lambda v: (epsilon / c**3) * (c * v - 1 - 1 / (c * v - 1) + 2 * np.log(c * v - 1))


def _enneper_c(d: FamilyDescriptor) -> ClosedForm:
    c, eps = d["c"], d.epsilon
    u_of_v = enneper_c_graph(c, eps)
    s_of_v = lambda v: -v / c - np.log(c * v - 1) / c**2
    # s increases with v when c < 0 (v < 1/c), decreases when c > 0 (v > 1/c)
    if c > 0:
        v_lo, v_hi = 1 / c, 1 / c + 50.0 / c
    else:
        v_lo, v_hi = 1 / c - 50.0 / abs(c), 1 / c
    # s runs to +inf at v = 1/c; the finite end comes from the far v limit
    s_edge = float(s_of_v(np.array(v_hi if c > 0 else v_lo)))
    dom = Interval(s_edge, math.inf, hi_singular=True)
    span = 1.0 / abs(c)
    v_a, v_b = (1 / c + 0.1 * span, 1 / c + 3.0 * span) if c > 0 else (1 / c - 3.0 * span, 1 / c - 0.1 * span)
    rng = tuple(sorted(float(s_of_v(np.array(v))) for v in (v_a, v_b)))

    def v_of_s(s):
        s = np.asarray(s, dtype=float)
        a = np.full_like(s, np.nextafter(v_lo, math.inf))
        b = np.full_like(s, np.nextafter(v_hi, -math.inf))
        # the bracket end next to 1/c may round onto the pole
        with np.errstate(divide="ignore"):
            if c > 0:  # decreasing: solve -s(v) = -s
                return bracketed_solve(lambda v: -s_of_v(v), -s, a, b)
            return bracketed_solve(s_of_v, s, a, b)

    def uv(s):
        v = v_of_s(s)
        return u_of_v(v), v

    return _uv_closed_form(
        d, uv, intrinsic_kappa=None,
        momentum=_v_momentum(lambda v: -eps * v / (c * v - 1), lambda v: 1.0 / v**2, c),
        domain=dom, default_range=rng, kappa_of_param=lambda s: 1.0 / v_of_s(s) ** 2)


def _grim_reaper(d: FamilyDescriptor) -> ClosedForm:
    eps = d.epsilon
    uv = lambda s: (-eps * s * s / 2.0, -np.log(s))
    kap = lambda s: 1.0 / s
    return _uv_closed_form(
        d, uv, intrinsic_kappa=kap, momentum=_v_momentum(lambda v: -eps * np.exp(-v), np.exp),
        domain=Interval(0.0, math.inf, lo_singular=True), default_range=(0.1, 10.0), kappa_of_param=kap,
        kappa_dot=lambda s: -1.0 / s**2, kappa_ddot=lambda s: 2.0 / s**3)


def _exp_c(d: FamilyDescriptor) -> ClosedForm:
    c, eps = d["c"], d.epsilon
    uv = lambda s: (-(eps / c) * (s + np.exp(-c * s) / c), np.log(c / np.expm1(c * s)))
    kap = lambda s: c / np.expm1(c * s)
    return _uv_closed_form(
        d, uv, intrinsic_kappa=kap, momentum=_v_momentum(lambda v: -eps / (np.exp(v) + c), np.exp, c),
        domain=Interval(0.0, math.inf, lo_singular=True), default_range=(0.1 / abs(c), 3.0 / abs(c)),
        kappa_of_param=kap)


_BUILDERS = {
    FamilyId.GEODESIC: _geodesic,
    FamilyId.PSEUDOCIRCLE_ORIGIN: _pseudocircle_origin,
    FamilyId.PSEUDOCIRCLE_V: _pseudocircle_v,
    FamilyId.NORWICH: _norwich,
    FamilyId.STURM_EXTENDED: _sturm_extended,
    FamilyId.SINUSOIDAL: _sinusoidal,
    FamilyId.ELASTIC: _elastic,
    FamilyId.ENNEPER: _enneper,
    FamilyId.ENNEPER_C: _enneper_c,
    FamilyId.GRIM_REAPER: _grim_reaper,
    FamilyId.EXP_C: _exp_c,
}


def closed_form(desc: FamilyDescriptor) -> ClosedForm:
    return _BUILDERS[desc.id](desc)


def intrinsic_equation(desc: FamilyDescriptor) -> ArrayFn:
    """Closed-form kappa(s) of the family.

    Raises:
        PseudopolarOnly: for families known only through a (rho, nu) or
            u(v) relation (sinusoidal spirals, the c != 0 Enneper graphs)
            or in an auxiliary parameter (Norwich).
    """
    cf = closed_form(desc)
    if cf.intrinsic_kappa is None:
        raise PseudopolarOnly(f"{desc.id.value}: pseudopolar-only, no closed-form kappa(s)")
    return cf.intrinsic_kappa


def _arc_length_from_t(cf: ClosedForm, t: np.ndarray, count: int):
    """Uniform-in-s samples of an AUX_T family, by quadrature of ds = rho dt.

    s(t) increases with t on every Norwich branch; the closed-form s(t) only
    fixes the origin of s.
    """
    lo, hi = float(t[0]), float(t[-1])
    table = CumulativeTable((lambda q: np.abs(cf.rho_of_t(q)),), lo, hi, False, False, 1)
    s_rel = np.linspace(0.0, float(table.total()[0]), count)
    t_uniform = table.invert(s_rel)
    t_uniform[0], t_uniform[-1] = lo, hi
    return float(cf.s_of_t(np.array(lo))) + s_rel, t_uniform


def _aux_source(cf: ClosedForm, t: np.ndarray, desc: FamilyDescriptor) -> CurveSource:
    """Position as a function of s for an AUX_T family, inverting s(t)."""
    dom = cf.domain
    pad = float(t[-1] - t[0])
    t_lo = max(float(t[0]) - pad, dom.lo)
    t_hi = min(float(t[-1]) + pad, dom.hi)

    def t_of_s(s):
        s = np.asarray(s, dtype=float)
        a = np.full_like(s, t_lo)
        b = np.full_like(s, t_hi)
        with np.errstate(all="ignore"):
            return bracketed_solve(cf.s_of_t, s, a, b)

    with np.errstate(all="ignore"):
        s_lo = float(cf.s_of_t(np.array(t_lo)))
        s_hi = float(cf.s_of_t(np.array(t_hi)))
    null = None
    if cf.polar is not None:
        null = lambda s: pseudopolar_null(*cf.polar(t_of_s(s)), desc.branch, desc.sign)
    return CurveSource(lambda s: cf.position(t_of_s(s)), s_lo, s_hi, lambda s: cf.kappa_of_param(t_of_s(s)),
                       null=null)


def evaluate_family(desc: FamilyDescriptor, t_values=None, count: int = 512) -> CurveSamples:
    """Samples of a catalog curve with its analytic curvature attached.

    For ARC_LENGTH families ``t_values`` are arc lengths and are used as
    given. For AUX_T families (Norwich) they are auxiliary parameters; the
    curve is resampled uniformly in arc length over the same t span, using
    the same number of points, and the t of each sample is kept in
    ``meta['t']``. With ``t_values=None`` the family's default range is
    sampled at ``count`` points.

    Raises:
        FamilyDomainError: if a value lies outside the family domain.
    """
    cf = closed_form(desc)
    if t_values is None:
        t_values = np.linspace(*cf.default_range, count)
    t = np.asarray(t_values, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
        raise ValueError("parameter values must be a strictly increasing 1-D array")
    _in_domain(t, cf.domain, "s" if cf.parameterization is Parameterization.ARC_LENGTH else "t")
    meta = {"family": desc.id.value, "params": dict(desc.params), "branch": desc.branch.value,
            "sign": desc.sign.value, "parameterization": cf.parameterization.value}
    if cf.parameterization is Parameterization.AUX_T:
        s, tt = _arc_length_from_t(cf, t, t.size)
        x, y = cf.position(tt)
        meta["t"] = tt
        kappa = cf.kappa_of_param(tt)
        return CurveSamples(s, x, y, desc.epsilon, kappa, meta=meta, source=_aux_source(cf, t, desc))
    x, y = cf.position(t)
    with np.errstate(all="ignore"):
        kappa = cf.kappa_of_param(t)
        kd = None if cf.kappa_dot is None else cf.kappa_dot(t)
        kdd = None if cf.kappa_ddot is None else cf.kappa_ddot(t)
    null = None
    if cf.uv is not None:
        null = cf.uv
    elif cf.polar is not None:
        null = lambda q: pseudopolar_null(*cf.polar(np.asarray(q, dtype=float)), desc.branch, desc.sign)
    source = CurveSource(cf.position, cf.domain.lo, cf.domain.hi, cf.kappa_of_param, null=null)
    return CurveSamples(t, np.asarray(x, float) * np.ones_like(t), np.asarray(y, float) * np.ones_like(t),
                        desc.epsilon, kappa, kd, kdd, meta=meta, source=source)


def pipeline_request(desc: FamilyDescriptor, samples: Optional[CurveSamples] = None,
                     count: int = 512) -> SolveRequest:
    """Quadrature request for the momentum of a catalog curve.

    The domain hint is the rho (or v) range covered by ``samples``
    (default: the family's default samples), so the numerical curve covers
    the same stretch of the same orbit.
    """
    cf = closed_form(desc)
    if samples is None:
        samples = evaluate_family(desc, count=count)
    u, v = null_points(samples)
    arg = np.sqrt(np.abs(u * v)) if cf.momentum.variable is Variable.RHO else v
    arg = arg[np.isfinite(arg)]
    branch, sign = desc.branch, desc.sign
    if cf.momentum.variable is Variable.RHO and not family_info(desc.id).uses_branch:
        # the pseudopolar chart is fixed by where the curve actually lies
        i = samples.s.size // 2
        x, y = samples.x[i], samples.y[i]
        branch = Branch.PLUS if y * y > x * x else Branch.MINUS
        lead = y if branch is Branch.PLUS else x
        sign = Sign.POS if lead > 0 else Sign.NEG
    return SolveRequest(cf.momentum, desc.epsilon, branch, sign,
                        domain_hint=Interval(float(arg.min()), float(arg.max())),
                        sampling=SamplingPolicy(count=count))
