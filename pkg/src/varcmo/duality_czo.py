"""Duality pairing, multiplier Calderon-Zygmund operators and weak-density partial sums."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import ConfigError, ExponentFunction, Grid, PreconditionError, RangeError, _smooth_unit_step
from .littlewood_paley import KernelFamily, apply_multiplier, band_project
from .phi_transform import analyze, synthesize
from .signals import band_noise, make_rng, sparse_field, sparse_signal, trial_map
from .space_norms import check_mean_zero, cmo_norm, hardy_norm

CZO_KINDS = ("hilbert_smooth", "hilbert_sharp", "identity_band", "zero", "custom")


def l2_inner(f, g) -> complex:
    """(1/N) sum_i f_i conj(g_i)."""
    return complex(np.mean(np.asarray(f) * np.conj(np.asarray(g))))


def _synthesis_coefficients(g, fam: KernelFamily):
    """<g, psi_Q> for every Q of the coefficient lattice."""
    if fam.analysis_hat is fam.synthesis_hat:
        return analyze(g, fam)
    swapped = KernelFamily(fam.grid, fam.j_min, fam.j_max, fam.window_kind, fam.shift,
                           fam.synthesis_hat, fam.synthesis_hat)
    return analyze(g, swapped)


def pairing(f, g, fam: KernelFamily) -> complex:
    """sum_Q <f, phi_Q> conj(<g, psi_Q>), which equals <f_band, g>."""
    fam.grid.check(f)
    fam.grid.check(g)
    check_mean_zero(f, "f")
    check_mean_zero(g, "g")
    return analyze(f, fam).inner(_synthesis_coefficients(g, fam))


@dataclass(frozen=True)
class DualityReport:
    ratios: np.ndarray
    max_ratio: float
    trials_used: int
    insufficient: bool


def duality_pair(fam: KernelFamily, rng: np.random.Generator, noise: float = 0.1):
    """f = T(s), g = T(t) + noise with s and t sharing a random support of 1 to 4 cubes."""
    s = sparse_field(fam, rng, count=int(rng.integers(1, 5)))
    t = s.map(lambda a: np.where(a != 0, 1.0, 0.0) * rng.standard_t(3.0, a.shape))
    f = synthesize(s, fam).real
    g = synthesize(t, fam).real + noise * band_noise(fam, rng)
    return f, g


def duality_constant(p: ExponentFunction, fam: KernelFamily, trials: int, seed: int,
                     threads: int = 1) -> DualityReport:
    """max |L_g(f)| / (||f||_H ||g||_CMO) over seeded random pairs."""
    if p.p_plus > 1:
        raise PreconditionError(f"the duality bound needs p_plus <= 1, got {p.p_plus}")
    if trials < 1:
        raise RangeError("trials must be at least 1")

    def one(t):
        f, g = duality_pair(fam, make_rng(seed, 41, t))
        den = hardy_norm(f, p, fam) * cmo_norm(g, p, fam)
        if den == 0:
            return None
        return abs(pairing(f, g, fam)) / den

    vals = [r for r in trial_map(one, range(trials), threads) if r is not None]
    ratios = np.array(vals)
    if not vals:
        return DualityReport(ratios, float("nan"), 0, True)
    return DualityReport(ratios, float(ratios.max()), len(vals), False)


@dataclass(frozen=True, eq=False)
class MultiplierOperator:
    grid: Grid
    multiplier: np.ndarray
    gamma: float = 1.0
    kind: str = "custom"

    def __post_init__(self):
        m = np.asarray(self.multiplier, dtype=complex)
        if m.shape != (self.grid.size,):
            raise ConfigError(f"multiplier needs {self.grid.size} values, got shape {m.shape}")
        if m[0] != 0:
            raise ConfigError("multiplier must vanish at frequency 0")
        if not np.all(np.isfinite(m)):
            raise ConfigError("multiplier must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "multiplier", m)

    @cached_property
    def kernel_space(self) -> np.ndarray:
        """k(x_i) = sum_m m(xi) e^{2 pi i xi x_i}, so T f = k * f."""
        return self.grid.size * np.fft.ifft(self.multiplier)

    @property
    def l2_norm(self) -> float:
        return float(np.max(np.abs(self.multiplier)))

    def adjoint(self) -> "MultiplierOperator":
        return MultiplierOperator(self.grid, np.conj(self.multiplier), self.gamma, self.kind + "_adjoint")


def build_multiplier_czo(grid: Grid, kind: str = "hilbert_smooth", gamma: float = 1.0,
                         multiplier=None) -> MultiplierOperator:
    """hilbert_smooth: -i sign(xi) theta(|xi|) with theta rising over |xi| < 2 and
    rolled off between N/8 and 3N/8, so it vanishes well before Nyquist."""
    if not 0 < gamma <= 1:
        raise PreconditionError(f"gamma must lie in (0, 1], got {gamma}")
    m = grid.frequencies.astype(float)
    a = np.abs(m)
    n = grid.size
    if kind == "hilbert_smooth":
        theta = _smooth_unit_step(a / 2) * (1 - _smooth_unit_step((a - n / 8) / (n / 4)))
        mult = -1j * np.sign(m) * theta
    elif kind == "hilbert_sharp":
        mult = -1j * np.sign(m)
        mult[a == n // 2] = 0
    elif kind == "identity_band":
        mult = np.where(a > 0, 1.0, 0.0).astype(complex)
    elif kind == "zero":
        mult = np.zeros(n, dtype=complex)
    elif kind == "custom":
        if multiplier is None:
            raise ConfigError("custom operators need an explicit multiplier")
        mult = np.asarray(multiplier, dtype=complex)
    else:
        raise ConfigError(f"unknown operator kind {kind!r}; expected one of {CZO_KINDS}")
    return MultiplierOperator(grid, mult, gamma, kind)


def apply(op: MultiplierOperator, f) -> np.ndarray:
    op.grid.check(f)
    return apply_multiplier(f, op.multiplier)


@dataclass(frozen=True)
class StandardKernelReport:
    c_size: float
    c_smooth: float


def standard_kernel_report(op: MultiplierOperator) -> StandardKernelReport:
    """Grid-scale size and smoothness constants of the convolution kernel.

    c_size = max |x| |k(x)| over x != 0; c_smooth = max |k(u) - k(u - h)| |u|^{1+gamma} / |h|^gamma
    over u, h != 0 with |u| >= 2 |h|.
    """
    k = op.kernel_space
    n = op.grid.size
    dist = op.grid.periodic_distance
    c_size = float(np.max(dist[1:] * np.abs(k[1:])))
    g = op.gamma
    c_smooth = 0.0
    for h in range(1, n // 4 + 1):
        ok = dist >= 2 * h / n
        for sgn in (1, -1):
            diff = np.abs(k - np.roll(k, sgn * h))[ok]
            val = diff * dist[ok] ** (1 + g) / (h / n) ** g
            if val.size:
                c_smooth = max(c_smooth, float(val.max()))
    return StandardKernelReport(c_size, c_smooth)


@dataclass(frozen=True)
class CZOReport:
    ratios: np.ndarray
    max_ratio: float
    adjoint_error: float
    trials_used: int


def check_czo_hypothesis(op: MultiplierOperator, p: ExponentFunction):
    if op.multiplier[0] != 0:
        raise PreconditionError("operator must annihilate constants")
    if p.p_plus > 1:
        raise PreconditionError(f"hypothesis p_plus <= 1 fails: p_plus = {p.p_plus}")
    if not p.p_minus > 1 / (1 + op.gamma):
        raise PreconditionError(f"hypothesis p_minus > 1/(1 + gamma) = {1 / (1 + op.gamma):.4g} fails: "
                                f"p_minus = {p.p_minus}")


def czo_cmo_experiment(op: MultiplierOperator, p: ExponentFunction, fam: KernelFamily, trials: int, seed: int,
                       threads: int = 1) -> CZOReport:
    """max cmo_norm(T g) / cmo_norm(g) over heavy-tailed sparse g, plus the adjoint identity."""
    check_czo_hypothesis(op, p)
    if trials < 1:
        raise RangeError("trials must be at least 1")
    adj = op.adjoint()

    def one(t):
        rng = make_rng(seed, 53, t)
        g = sparse_signal(fam, rng)
        f = band_noise(fam, rng)
        lhs = l2_inner(apply(op, g), f)
        rhs = l2_inner(g, apply(adj, f))
        scale = max(1.0, abs(lhs))
        err = abs(lhs - rhs) / scale
        den = cmo_norm(g, p, fam)
        return (cmo_norm(apply(op, g).real, p, fam) / den if den > 0 else None), err

    results = trial_map(one, range(trials), threads)
    ratios = np.array([r for r, _ in results if r is not None])
    adjoint_error = max(e for _, e in results)
    max_ratio = float(ratios.max()) if ratios.size else float("nan")
    return CZOReport(ratios, max_ratio, adjoint_error, len(ratios))


def partial_sum(f, fam: KernelFamily, m: int) -> np.ndarray:
    """sum over family scales j <= m of psi_j * phi~_j * f."""
    fam.grid.check(f)
    if not 0 <= m <= fam.j_max:
        raise RangeError(f"m must lie in [0, {fam.j_max}], got {m}")
    mult = np.zeros(fam.grid.size)
    for j in fam.scales:
        if j <= m:
            mult = mult + np.conj(fam.analysis_hat[j]) * fam.synthesis_hat[j]
    return apply_multiplier(f, mult)


@dataclass(frozen=True)
class WeakDensityReport:
    m: np.ndarray
    cmo_ratio: np.ndarray
    pairing_gap: np.ndarray
    band_l2: np.ndarray
    full_range_error: float


def weak_density_sweep(f, g, p: ExponentFunction, fam: KernelFamily) -> WeakDensityReport:
    """cmo_norm(f_m) / cmo_norm(f), |<f - f_m, g>| and per-scale L2 norms over the m sweep."""
    base = cmo_norm(f, p, fam)
    ms = np.arange(0, fam.j_max + 1)
    ratios, gaps, l2 = [], [], []
    for m in ms:
        fm = partial_sum(f, fam, int(m))
        ratios.append(cmo_norm(fm, p, fam) / base if base > 0 else 0.0)
        gaps.append(abs(l2_inner(f - fm, g)))
        if fam.j_min <= m:
            l2.append(float(np.sqrt(np.mean(np.abs(partial_sum(f, fam, int(m)) - partial_sum(f, fam, int(m) - 1)) ** 2))))
        else:
            l2.append(0.0)
    full = partial_sum(f, fam, fam.j_max)
    band = band_project(f, fam)
    err = float(np.max(np.abs(full - band)) / max(1e-300, float(np.max(np.abs(band))))) if np.any(band) else 0.0
    return WeakDensityReport(ms, np.array(ratios), np.array(gaps), np.array(l2), err)
