"""Hardy, Carleson (CMO), sequence, Campanato and Hoelder-Zygmund norms."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from numpy.polynomial import legendre as L
from numpy.polynomial import Legendre, Polynomial

from .core import Arc, CoeffField, DyadicInterval, ExponentFunction, PreconditionError, as_arc
from .littlewood_paley import KernelFamily, band_energies, discrete_square_function, freeze
from .luxemburg import indicator_norms, luxemburg_norm, window_norms

MEAN_ZERO_TOL = 1e-9


def check_mean_zero(f, what: str = "signal"):
    f = np.asarray(f)
    scale = max(1.0, float(np.max(np.abs(f)))) if f.size else 1.0
    if abs(np.mean(f)) > MEAN_ZERO_TOL * scale:
        raise PreconditionError(f"{what} must have zero mean (mean = {np.mean(f):.3e})")


def hardy_norm(f, p: ExponentFunction, fam: KernelFamily, probe: str = "left") -> float:
    """Luxemburg norm of the discrete square function."""
    fam.grid.check(f)
    check_mean_zero(f)
    return luxemburg_norm(discrete_square_function(f, fam, probe), p)


# Carleson sums

def carleson_sup(energy: dict, p: ExponentFunction, max_level: int, offset: int = 0) -> float:
    """sqrt of max_P (|P| / ||chi_P||**2) * sum of energy[s][Q] over Q inside P.

    ``energy`` maps an interval scale s to the per-interval weights at that
    scale. P runs over scales 0..max_level; an entry of scale s counts for P
    of scale t when s >= t and s - offset >= t.
    """
    best = 0.0
    for t in range(max_level + 1):
        totals = np.zeros(1 << t)
        for s, w in energy.items():
            if s >= t and s - offset >= t:
                totals += w.reshape(1 << t, -1).sum(axis=1)
        if not totals.any():
            continue
        chi = indicator_norms(p, t)
        best = max(best, float(np.max(2.0 ** -t / chi ** 2 * totals)))
    return float(np.sqrt(best))


def coefficient_energy(g, fam: KernelFamily, probe: str = "left") -> dict:
    """|Q| * (probe value of |phi_j * g|**2) per interval of scale j + shift."""
    fam.check_sampling()
    out = {}
    for j, e in band_energies(g, fam, "analysis").items():
        s = fam.level(j)
        out[s] = 2.0 ** -s * freeze(e, s, probe)
    return out


def cmo_norm(g, p: ExponentFunction, fam: KernelFamily, form: str = "discrete", probe: str = "left") -> float:
    """Carleson norm of g, sup over dyadic P with length at least 2**-j_max.

    ``integral`` counts every coefficient interval inside P; ``discrete``
    counts only bands j with 2**-j <= |P|, each sampled at the probe points.
    """
    fam.grid.check(g)
    if form == "integral":
        energy = coefficient_energy(g, fam, "left")
        return carleson_sup(energy, p, fam.j_max, offset=0)
    if form == "discrete":
        energy = coefficient_energy(g, fam, probe)
        return carleson_sup(energy, p, fam.j_max, offset=fam.shift)
    raise PreconditionError(f"form must be 'integral' or 'discrete', got {form!r}")


def cmo_integral_riemann(g, p: ExponentFunction, fam: KernelFamily) -> float:
    """Integral form evaluated literally: Riemann sum of sum_Q |Q|^-1 |<g, psi_Q>|^2 chi_Q over P."""
    from .phi_transform import analyze

    c = analyze(g, fam)
    n = fam.grid.size
    fields = {s: np.repeat(np.abs(a) ** 2 * 2.0 ** s, n >> s) for s, a in c.levels.items()}
    best = 0.0
    for t in range(fam.j_max + 1):
        dens = sum(v for s, v in fields.items() if s >= t)
        if isinstance(dens, int):
            continue
        integrals = dens.reshape(1 << t, -1).sum(axis=1) / n
        chi = indicator_norms(p, t)
        best = max(best, float(np.max(2.0 ** -t / chi ** 2 * integrals)))
    return float(np.sqrt(best))


def seq_s_norm(s: CoeffField, p: ExponentFunction) -> float:
    n = 1 << s.log2_size
    dens = np.zeros(n)
    for lev, a in s.levels.items():
        dens += np.repeat(np.abs(a) ** 2 * 2.0 ** lev, n >> lev)
    return luxemburg_norm(np.sqrt(dens), p)


def seq_c_norm(t: CoeffField, p: ExponentFunction) -> float:
    if t.is_zero():
        return 0.0
    energy = {lev: np.abs(a) ** 2 for lev, a in t.levels.items()}
    return carleson_sup(energy, p, max(t.levels), offset=0)


# Polynomial projection and the smoothness norms

@dataclass(frozen=True)
class PolyProjection:
    coefficients: np.ndarray  # monomial coefficients in (x - start of region)
    projection: np.ndarray
    residual: np.ndarray


def _legendre_basis(count: int, d: int) -> np.ndarray:
    """Orthonormal (discrete) basis of polynomials of degree <= d on ``count`` equispaced samples."""
    t = (2 * np.arange(count) + 1) / count - 1
    q, _ = np.linalg.qr(L.legvander(t, d))
    return q


def poly_project(f, Q: DyadicInterval | Arc, d: int) -> PolyProjection:
    """Discrete least-squares projection of f restricted to Q onto polynomials of degree <= d."""
    arc = as_arc(Q)
    if d < 0:
        raise PreconditionError("degree must be non-negative")
    if arc.count < d + 1:
        raise PreconditionError(f"{arc.count} samples cannot determine a degree-{d} polynomial")
    vals = np.asarray(f)[arc.indices()]
    t = (2 * np.arange(arc.count) + 1) / arc.count - 1
    V = L.legvander(t, d)
    c, *_ = np.linalg.lstsq(V, vals, rcond=None)
    proj = V @ c
    length = arc.measure
    x0 = 0.5 / (1 << arc.log2_size)
    leg = Legendre(c, domain=[-x0, length - x0])
    mono = leg.convert(kind=Polynomial).coef
    return PolyProjection(mono, proj, vals - proj)


def campanato_norm(f, p: ExponentFunction, q: float = 2.0, d: int = 0) -> float:
    """sup over dyadic Q of (|Q| / ||chi_Q||) * (mean over Q of |f - P_Q f|**q)**(1/q)."""
    if not 1 <= q < np.inf:
        raise PreconditionError(f"q must lie in [1, inf), got {q}")
    if d < 0:
        raise PreconditionError("degree must be non-negative")
    f = np.asarray(f)
    J = p.grid.log2_size
    p.grid.check(f)
    best = 0.0
    for s in range(J + 1):
        count = 1 << (J - s)
        if count < d + 1:
            break
        blocks = f.reshape(1 << s, count)
        B = _legendre_basis(count, d)
        res = blocks - (blocks @ B) @ B.T
        osc = np.mean(np.abs(res) ** q, axis=1) ** (1.0 / q)
        best = max(best, float(np.max(2.0 ** -s / indicator_norms(p, s) * osc)))
    return best


def finite_difference(f, h: int, order: int) -> np.ndarray:
    """Periodic forward difference of the given order with step h samples."""
    f = np.asarray(f)
    out = np.zeros_like(f, dtype=np.result_type(f, float))
    for k in range(order + 1):
        out = out + comb(order, k) * (-1) ** (order - k) * np.roll(f, -k * h)
    return out


def zygmund_norm(f, p: ExponentFunction, d: int = 0, periodic: bool = True) -> float:
    """sup over x and steps h of (|Q| / ||chi_Q||) |Delta_h^{d+1} f(x)| with Q centred at x of radius |h|.

    With ``periodic=False`` only stencils that do not wrap around the torus count.
    """
    f = np.asarray(f)
    p.grid.check(f)
    n = len(f)
    best = 0.0
    idx = np.arange(n)
    for h in range(1, n // 2 + 1):
        diff = np.abs(finite_difference(f, h, d + 1))
        if not periodic:
            diff = np.where(idx + (d + 1) * h < n, diff, 0.0)
        count = min(2 * h, n)
        weight = (count / n) / window_norms(p, count)
        best = max(best, float(np.max(weight * diff)))
    return best
