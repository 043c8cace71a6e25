"""Adaptive Gauss-Legendre panels and vectorized bracketed root finding.

These are the numerical building blocks of the quadrature pipelines:
cumulative integrals that can be evaluated at arbitrary points to near
machine precision, and a bisection/secant hybrid that inverts them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

_GL_ORDER = 20
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)
# nodes and weights on [0, 1]
GL_NODES = (_GL_X + 1.0) / 2.0
GL_WEIGHTS = _GL_W / 2.0


def gauss_legendre(f: Callable[[np.ndarray], np.ndarray], a, b) -> np.ndarray:
    """Fixed-order Gauss-Legendre rule on [a, b], vectorized over a and b.

    ``f`` maps an array of nodes with trailing axis of length 20 to an
    array of shape ``(m, ..., 20)`` (m integrands) or ``(..., 20)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    width = b - a
    nodes = a[..., None] + width[..., None] * GL_NODES
    vals = f(nodes)
    return (vals * GL_WEIGHTS).sum(axis=-1) * width


@dataclass
class Panel:
    a: float
    b: float
    values: np.ndarray  # one integral per integrand


def adaptive_panels(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    n_integrands: int,
    required: int = 1,
    rtol: float = 1e-14,
    atol: float = 1e-15,
    n_init: int = 8,
    max_depth: int = 52,
    max_panels: int = 20000,
) -> list[Panel]:
    """Split [a, b] until each panel's integrals agree with their bisection.

    Only the first ``required`` integrands drive refinement to convergence;
    the rest are refined opportunistically (they may be divergent at an
    endpoint, in which case the outermost panel holds a meaningless value).
    Panels touching ``a`` or ``b`` are split only for the required
    integrands, so a divergent optional integrand cannot drive refinement
    into the rounding regime of the endpoint. Panels are returned in
    increasing order.
    """
    edges = np.linspace(a, b, n_init + 1)
    # (a, b, depth, parent error, levels without progress)
    work = [(edges[i], edges[i + 1], 0, np.inf, 0) for i in range(n_init)][::-1]
    done: list[Panel] = []
    tiny = 64 * np.finfo(float).eps
    with np.errstate(all="ignore"):
        while work:
            pa, pb, depth, parent_err, stall = work.pop()
            mid = 0.5 * (pa + pb)
            whole = gauss_legendre(f, np.array(pa), np.array(pb)).reshape(n_integrands)
            left = gauss_legendre(f, np.array(pa), np.array(mid)).reshape(n_integrands)
            right = gauss_legendre(f, np.array(mid), np.array(pb)).reshape(n_integrands)
            magnitude = gauss_legendre(lambda w: np.abs(f(w)), np.array(pa), np.array(pb))
            fine = left + right
            err = np.abs(fine - whole)
            # never ask for more than the rounding level of the panel sum
            bound = atol + rtol * np.abs(fine) + tiny * magnitude.reshape(n_integrands)
            ok_req = bool(np.all(err[:required] <= bound[:required]))
            ok_opt = pa == a or pb == b or bool(
                np.all((err[required:] <= bound[required:]) | ~np.isfinite(fine[required:]))
            )
            # an error that stops shrinking under bisection is noise in f
            req_err = float(np.max(err[:required]))
            # once the error is tiny, a lucky 4x drop is not progress either
            if not req_err < 0.25 * parent_err:
                stall += 1
            elif req_err > 1e-7 * float(np.max(magnitude.reshape(n_integrands)[:required])):
                stall = 0
            if (ok_req and ok_opt) or stall >= 3 or depth >= max_depth or len(done) > max_panels:
                done.append(Panel(pa, mid, left))
                done.append(Panel(mid, pb, right))
            else:
                work.append((mid, pb, depth + 1, req_err, stall))
                work.append((pa, mid, depth + 1, req_err, stall))
    done.sort(key=lambda p: p.a)
    return done


def bracketed_solve(
    F: Callable[..., np.ndarray],
    target: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    xtol: float = 0.0,
    maxiter: int = 200,
    dF: Optional[Callable[..., np.ndarray]] = None,
    indexed: bool = False,
) -> np.ndarray:
    """Solve F(x) = target for increasing F on brackets [a, b], elementwise.

    With a derivative ``dF`` each step is Newton from the best point so
    far; otherwise Illinois-modified regula falsi. A step that leaves the
    bracket, or fails to halve it over three iterations, becomes a
    bisection. Converges to ``xtol`` plus a few ulps of the bracket
    magnitude.

    Only unconverged entries are evaluated, so F must act elementwise;
    with ``indexed=True`` it is called as ``F(x, idx)`` with the flat
    indices of the entries being solved.
    """
    target = np.asarray(target, dtype=float).ravel()
    a = np.array(a, dtype=float, copy=True).ravel()
    b = np.array(b, dtype=float, copy=True).ravel()
    n = target.size
    all_idx = np.arange(n)
    call = (lambda fn, x, i: fn(x, i)) if indexed else (lambda fn, x, i: fn(x))
    fa = call(F, a, all_idx) - target
    fb = call(F, b, all_idx) - target
    x = np.where(np.abs(fa) <= np.abs(fb), a, b)
    fx = np.where(np.abs(fa) <= np.abs(fb), fa, fb)
    wa = np.ones(n)  # Illinois weights on the retained endpoint values
    wb = np.ones(n)
    width0 = b - a
    done = np.zeros(n, dtype=bool)
    for it in range(maxiter):
        tol = xtol + 4.0 * np.finfo(float).eps * np.maximum(np.abs(a), np.abs(b))
        act = np.flatnonzero(~done & ((b - a) > tol) & (fx != 0))
        if act.size == 0:
            break
        A, B, X, FX = a[act], b[act], x[act], fx[act]
        with np.errstate(all="ignore"):
            if dF is not None:
                cand = X - FX / call(dF, X, act)
            else:
                ga, gb = fa[act] * wa[act], fb[act] * wb[act]
                cand = B - gb * (B - A) / (gb - ga)
        if it % 3 == 2:
            slow = (B - A) > 0.5 * width0[act]
            width0[act] = B - A
        else:
            slow = np.zeros(act.size, dtype=bool)
        bis = slow | ~(cand > A) | ~(cand < B) | ~np.isfinite(cand)
        cand = np.where(bis, 0.5 * (A + B), cand)
        fc = call(F, cand, act) - target[act]
        right = fc < 0
        left = fc > 0
        wa[act] = np.where(left, wa[act] * 0.5, np.where(right, 1.0, wa[act]))
        wb[act] = np.where(right, wb[act] * 0.5, np.where(left, 1.0, wb[act]))
        a[act] = np.where(right, cand, A)
        fa[act] = np.where(right, fc, fa[act])
        b[act] = np.where(left, cand, B)
        fb[act] = np.where(left, fc, fb[act])
        # a converged Newton step stops even if the far bracket end lags
        if dF is not None:
            done[act] |= ~bis & (np.abs(cand - X) <= tol[act])
        better = (np.abs(fc) <= np.abs(FX)) | (fc == 0)
        x[act] = np.where(better, cand, X)
        fx[act] = np.where(better, fc, FX)
    return x
