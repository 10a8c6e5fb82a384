"""Variable-exponent modular, Luxemburg norm, and indicator-function norms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import (Arc, DyadicInterval, DomainError, ExponentFunction, NumericError,
                   PreconditionError, as_arc, interval_contains)

DEFAULT_REL_TOL = 1e-10
MAX_BISECTIONS = 60
MAX_WIDENINGS = 64


def modular(f, p: ExponentFunction, lam: float) -> float:
    """Riemann sum (1/N) sum_i (|f_i| / lam) ** p_i."""
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    a = np.abs(np.asarray(f))
    _check_lengths(a, p)
    nz = a > 0
    if not nz.any():
        return 0.0
    terms = np.exp(p.samples[nz] * (np.log(a[nz]) - math.log(lam)))
    return float(terms.sum() / len(a))


def _check_lengths(a, p):
    if a.shape != p.samples.shape:
        raise PreconditionError(f"signal has {a.shape} samples but exponent has {p.samples.shape}")


def _log_modular(log_u, p_nz, n, t):
    # log of the modular of u * exp(-t), with log_u the logs of the nonzero |u|
    e = p_nz * (log_u - t)
    top = e.max()
    return top + math.log(np.exp(e - top).sum() / n)


def luxemburg_norm(f, p: ExponentFunction, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """inf{lam > 0 : modular(f, p, lam) <= 1}, by bisection on log(lam).

    The signal is normalised by max|f| first, so the modular is evaluated as a
    log-sum-exp and cannot overflow for small exponents.
    """
    if not 0 < rel_tol <= 1e-2:
        raise PreconditionError("rel_tol must lie in (0, 1e-2]")
    a = np.abs(np.asarray(f))
    _check_lengths(a, p)
    top = float(a.max()) if a.size else 0.0
    if top == 0.0:
        return 0.0
    if np.all(a == top):
        return top
    n = len(a)
    nz = a > 0
    log_u = np.log(a[nz] / top)
    p_nz = p.samples[nz]

    def g(t):
        return _log_modular(log_u, p_nz, n, t)

    lo = math.log(0.5) - math.log(n) / p.p_minus
    hi = math.log(2.0)
    for _ in range(MAX_WIDENINGS):
        if g(lo) >= 0 and g(hi) <= 0:
            break
        width = hi - lo
        if g(lo) < 0:
            lo -= width
        if g(hi) > 0:
            hi += width
    else:
        raise NumericError("could not bracket the Luxemburg norm")

    tol = math.log1p(rel_tol)
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return top * math.exp(0.5 * (lo + hi))


def _newton_indicator(P: np.ndarray, n_total: int, t_lo: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """Solve (1/N) sum_i exp(-p_i t) = 1 for each row of P, starting left of the root.

    h(t) = log sum exp(-p_i t) - log N is convex and decreasing, so Newton
    iterates from the left increase monotonically to the root.
    """
    t = t_lo.astype(float).copy()
    log_n = math.log(n_total)
    active = np.ones(len(t), dtype=bool)
    for _ in range(100):
        if not active.any():
            break
        Pa = P[active]
        e = -Pa * t[active, None]
        top = e.max(axis=1, keepdims=True)
        w = np.exp(e - top)
        sw = w.sum(axis=1)
        h = top[:, 0] + np.log(sw) - log_n
        dh = -(Pa * w).sum(axis=1) / sw
        step = -h / dh
        t[active] += step
        idx = np.flatnonzero(active)
        active[idx[np.abs(step) <= tol * np.maximum(1.0, np.abs(t[idx]))]] = False
    else:
        raise NumericError("indicator-norm Newton iteration did not converge")
    return t


def indicator_norms(p: ExponentFunction, scale: int) -> np.ndarray:
    """||chi_Q||_{p(.)} for every dyadic Q of the given scale, cached on ``p``."""
    key = ("dyadic", scale)
    cached = p._cache.get(key)
    if cached is not None:
        return cached
    n = len(p.samples)
    count = n >> scale
    measure = count / n
    if p.is_constant:
        out = np.full(1 << scale, measure ** (1.0 / p.p_minus))
    elif count == n:
        out = np.ones(1)
    else:
        P = p.samples.reshape(1 << scale, count)
        t_lo = math.log(measure) / P.min(axis=1)
        out = np.exp(_newton_indicator(P, n, t_lo))
    out.setflags(write=False)
    p._cache[key] = out
    return out


def window_norms(p: ExponentFunction, count: int) -> np.ndarray:
    """||chi_W||_{p(.)} for the cyclic windows W_i = [i - count//2, i - count//2 + count)."""
    key = ("window", count)
    cached = p._cache.get(key)
    if cached is not None:
        return cached
    n = len(p.samples)
    if not 0 < count <= n:
        raise PreconditionError(f"window of {count} samples on a grid of {n}")
    measure = count / n
    if p.is_constant:
        out = np.full(n, measure ** (1.0 / p.p_minus))
    elif count == n:
        out = np.ones(n)
    else:
        ext = np.concatenate([p.samples, p.samples[:count]])
        P = sliding_window_view(ext, count)[:n]
        P = np.roll(P, count // 2, axis=0)
        t_lo = math.log(measure) / P.min(axis=1)
        out = np.exp(_newton_indicator(P, n, t_lo))
    out.setflags(write=False)
    p._cache[key] = out
    return out


def region_norm(p: ExponentFunction, region: DyadicInterval | Arc) -> float:
    if isinstance(region, DyadicInterval):
        return float(indicator_norms(p, region.scale)[region.position])
    arc = as_arc(region)
    return luxemburg_norm(arc.mask().astype(float), p)


@dataclass(frozen=True)
class CharRatioReport:
    ratios: np.ndarray
    max_ratio: float


def char_ratio_report(p: ExponentFunction, cases) -> CharRatioReport:
    """(||chi_B|| / ||chi_S||) * (|S| / |B|) for each nested pair (B, S)."""
    ratios = []
    for B, S in cases:
        if not interval_contains(B, S):
            raise PreconditionError(f"{S} is not contained in {B}")
        nb, ns = region_norm(p, B), region_norm(p, S)
        ratios.append(nb / ns * S.measure / B.measure)
    ratios = np.array(ratios)
    return CharRatioReport(ratios, float(ratios.max()) if ratios.size else 0.0)


def nested_pairs(log2_size: int, max_scale: int | None = None):
    """Every (B, S) with S a dyadic subinterval of B, scales up to ``max_scale``."""
    top = log2_size if max_scale is None else max_scale
    for jb in range(top + 1):
        for kb in range(1 << jb):
            B = DyadicInterval(jb, kb, log2_size)
            for js in range(jb, top + 1):
                span = 1 << (js - jb)
                for ks in range(kb * span, (kb + 1) * span):
                    yield B, DyadicInterval(js, ks, log2_size)


@dataclass(frozen=True)
class HolderReport:
    lhs: float
    rhs: float
    ratio: float


def holder_report(f, g, p1: ExponentFunction, p2: ExponentFunction) -> HolderReport:
    """Generalised Hoelder: ||f g||_p against ||f||_p1 ||g||_p2 with 1/p = 1/p1 + 1/p2."""
    p = p1.harmonic_with(p2)
    lhs = luxemburg_norm(np.asarray(f) * np.asarray(g), p)
    rhs = luxemburg_norm(f, p1) * luxemburg_norm(g, p2)
    ratio = lhs / rhs if rhs > 0 else 0.0
    return HolderReport(lhs, rhs, ratio)
