"""Frequency-tiled kernel families, square functions and maximal operators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (ConfigError, ExponentFunction, Grid, PreconditionError, RangeError,
                   _smooth_unit_step, grid_of)
from .luxemburg import luxemburg_norm

WINDOW_KINDS = ("meyer_smooth", "shannon_sharp")
DEFAULT_SHIFT = {"meyer_smooth": 2, "shannon_sharp": 1}
PROBE_POLICIES = ("left", "center", "sup", "inf", "every")


@dataclass(frozen=True, eq=False)
class KernelFamily:
    """Per-scale Fourier multipliers phi_hat[j], psi_hat[j] in FFT order.

    Both windows built here are real and non-negative with phi_hat == psi_hat
    and sum_j psi_hat[j]**2 == 1 on covered frequencies, so the family is
    tiling-normalised and energy-normalised at once.
    """

    grid: Grid
    j_min: int
    j_max: int
    window_kind: str
    shift: int
    analysis_hat: dict = field(repr=False)
    synthesis_hat: dict = field(repr=False)

    @property
    def scales(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def multiplier(self, j: int, which: str = "synthesis") -> np.ndarray:
        self.check_scale(j)
        if which == "analysis":
            return self.analysis_hat[j]
        if which == "synthesis":
            return self.synthesis_hat[j]
        raise PreconditionError(f"which must be 'analysis' or 'synthesis', got {which!r}")

    def check_scale(self, j: int):
        if not self.j_min <= j <= self.j_max:
            raise RangeError(f"scale {j} outside [{self.j_min}, {self.j_max}]")

    def level(self, j: int) -> int:
        """Interval scale at which band j is sampled."""
        return j + self.shift

    def check_sampling(self):
        if self.j_max + self.shift > self.grid.log2_size:
            raise RangeError(
                f"scale {self.j_max} with shift {self.shift} exceeds the grid resolution 2**{self.grid.log2_size}")

    def tiling_sum(self) -> np.ndarray:
        return sum(np.conj(self.analysis_hat[j]) * self.synthesis_hat[j] for j in self.scales)

    def energy_sum(self) -> np.ndarray:
        return sum(np.abs(self.synthesis_hat[j]) ** 2 for j in self.scales)

    def covered(self) -> np.ndarray:
        """Boolean mask of frequencies on which the tiling sum is one."""
        return covered_mask(self.grid, self.j_min, self.j_max, self.shift)

    def core_mask(self, j: int) -> np.ndarray:
        """Frequencies on which |phi_hat[j]| is bounded below by ``core_lower_bound``."""
        self.check_scale(j)
        a = np.abs(self.grid.frequencies)
        with np.errstate(divide="ignore"):
            t = np.log2(np.where(a > 0, a, 1)).astype(float)
        t[a == 0] = -np.inf
        if self.window_kind == "meyer_smooth":
            core = np.abs(t - j) <= 0.5
        else:
            lo, hi = _shannon_edges(self.grid, j, self.j_max, self.shift)
            core = np.abs(t - 0.5 * (np.log2(lo) + np.log2(hi))) <= 0.25 * (np.log2(hi) - np.log2(lo))
        return core & self.covered()

    def core_lower_bound(self) -> float:
        return min(float(np.abs(self.analysis_hat[j][self.core_mask(j)]).min(initial=np.inf)) for j in self.scales)

    def alias_free(self, j: int | None = None) -> bool:
        """True when sampling band j at 2**(j + shift) points loses nothing."""
        scales = self.scales if j is None else [j]
        n = self.grid.size
        for s in scales:
            m = 1 << self.level(s)
            if m > n:
                return False
            support = (np.abs(self.analysis_hat[s]) > 0) | (np.abs(self.synthesis_hat[s]) > 0)
            if np.any(support.reshape(n // m, m).sum(axis=0) > 1):
                return False
        return True

    def kernel(self, j: int, which: str = "synthesis") -> np.ndarray:
        """Spatial kernel psi_j(x_i) = sum_m psi_hat_j(m) e^{2 pi i m x_i}."""
        return self.grid.size * np.fft.ifft(self.multiplier(j, which))


def _top_frequency(grid: Grid, j_max: int, shift: int) -> tuple[int, bool]:
    """Upper edge of the covered range and whether it is included.

    The top band reaches 2**(j_max + 1) only when it is kept at full
    resolution; sampled at 2**level points it must stay below 2**(level - 1)
    or its two edges alias onto each other.
    """
    level = j_max + shift
    if level >= grid.log2_size:
        return min(1 << (j_max + 1), grid.size // 2), True
    return min(1 << (j_max + 1), 1 << (level - 1)), False


def covered_mask(grid: Grid, j_min: int, j_max: int, shift: int = 0) -> np.ndarray:
    a = np.abs(grid.frequencies)
    top, inclusive = _top_frequency(grid, j_max, shift)
    upper = a <= top if inclusive else a < top
    return (a >= 1 << (j_min - 1)) & upper


def _shannon_edges(grid: Grid, j: int, j_max: int, shift: int) -> tuple[float, float]:
    if j < j_max:
        return float(1 << (j - 1)), float(1 << j)
    top, _ = _top_frequency(grid, j_max, shift)
    return float(1 << (j - 1)), float(max(top, 1 << j))


def _meyer_bumps(grid: Grid, j_min: int, j_max: int) -> dict:
    a = np.abs(grid.frequencies).astype(float)
    nz = a > 0
    t = np.full(grid.size, -np.inf)
    t[nz] = np.log2(a[nz])
    bumps = {}
    for j in range(j_min, j_max + 1):
        d = t - j
        b = np.where(np.abs(d) < 1, np.cos(0.5 * np.pi * _smooth_unit_step(np.abs(d))), 0.0)
        if j == j_min:
            b = np.where((d >= -1) & (d <= 0), 1.0, b)
        if j == j_max:
            b = np.where((d >= 0) & (d <= 1), 1.0, b)
        bumps[j] = b
    return bumps


def _shannon_bumps(grid: Grid, j_min: int, j_max: int, shift: int) -> dict:
    a = np.abs(grid.frequencies)
    bumps = {}
    for j in range(j_min, j_max + 1):
        lo, hi = _shannon_edges(grid, j, j_max, shift)
        band = (a >= lo) & (a < hi) if j < j_max else (a >= lo) & (a <= hi)
        bumps[j] = band.astype(float)
    return bumps


def build_family(grid: Grid, j_min: int = 1, j_max: int | None = None, window_kind: str = "meyer_smooth",
                 shift: int | None = None) -> KernelFamily:
    """Tile the covered annuli with per-scale windows normalised so sum_j window_j**2 == 1.

    ``shift`` defaults to the smallest alias-free value for the window (2 for
    meyer_smooth, 1 for shannon_sharp). The default scale range is the widest
    one compatible with that shift.
    """
    if window_kind not in WINDOW_KINDS:
        raise ConfigError(f"unknown window kind {window_kind!r}; expected one of {WINDOW_KINDS}")
    if shift is None:
        shift = DEFAULT_SHIFT[window_kind]
    if shift < 0:
        raise ConfigError("shift must be non-negative")
    J = grid.log2_size
    if j_max is None:
        j_max = J - max(shift, 1)
    if not 1 <= j_min <= j_max <= J - 1:
        raise ConfigError(f"scale range ({j_min}, {j_max}) must satisfy 1 <= j_min <= j_max <= {J - 1}")
    if window_kind == "meyer_smooth":
        bumps = _meyer_bumps(grid, j_min, j_max)
    else:
        bumps = _shannon_bumps(grid, j_min, j_max, shift)
    total = np.sqrt(sum(b ** 2 for b in bumps.values()))
    cov = covered_mask(grid, j_min, j_max, shift)
    if not cov.any():
        raise ConfigError("scale range covers no nonzero frequency")
    hats = {}
    for j, b in bumps.items():
        h = np.where(cov, b / np.where(total > 0, total, 1.0), 0.0)
        h.setflags(write=False)
        hats[j] = h
    return KernelFamily(grid, j_min, j_max, window_kind, shift, hats, hats)


def apply_multiplier(f, mult) -> np.ndarray:
    """Circular convolution with the kernel whose Fourier multiplier is ``mult``."""
    f = np.asarray(f)
    out = np.fft.ifft(np.fft.fft(f) * mult)
    if np.isrealobj(f) and np.allclose(mult, np.conj(mult[_reflect(len(mult))]), rtol=0, atol=0):
        return out.real
    return out


def _reflect(n: int) -> np.ndarray:
    return (-np.arange(n)) % n


def conv_scale(f, fam: KernelFamily, j: int, which: str = "synthesis") -> np.ndarray:
    fam.grid.check(f)
    return apply_multiplier(f, fam.multiplier(j, which))


def band_project(f, fam: KernelFamily) -> np.ndarray:
    """sum_j psi_j * phi~_j * f, the identity on covered frequencies."""
    fam.grid.check(f)
    return apply_multiplier(f, fam.tiling_sum())


def band_energies(f, fam: KernelFamily, which: str = "synthesis") -> dict:
    """|psi_j * f|**2 per scale, full resolution."""
    fam.grid.check(f)
    F = np.fft.fft(f)
    return {j: np.abs(np.fft.ifft(F * fam.multiplier(j, which))) ** 2 for j in fam.scales}


def freeze(values: np.ndarray, level: int, policy: str = "left") -> np.ndarray:
    """Per-interval value of ``values`` on the dyadic intervals of the given scale."""
    n = len(values)
    blocks = values.reshape(1 << level, n >> level)
    if policy == "left":
        return blocks[:, 0].copy()
    if policy == "center":
        return blocks[:, blocks.shape[1] // 2].copy()
    if policy == "sup":
        return blocks.max(axis=1)
    if policy == "inf":
        return blocks.min(axis=1)
    raise PreconditionError(f"unknown probe policy {policy!r}; expected one of {PROBE_POLICIES}")


def spread(per_interval: np.ndarray, n: int) -> np.ndarray:
    return np.repeat(per_interval, n // len(per_interval))


def square_function(f, fam: KernelFamily) -> np.ndarray:
    energies = band_energies(f, fam, "synthesis")
    return np.sqrt(sum(energies[j] for j in fam.scales))


def discrete_square_function(f, fam: KernelFamily, probe: str = "left", which: str = "synthesis") -> np.ndarray:
    """Band energies frozen at one probe per interval of scale j + shift, then summed."""
    if probe not in PROBE_POLICIES:
        raise PreconditionError(f"unknown probe policy {probe!r}; expected one of {PROBE_POLICIES}")
    fam.check_sampling()
    energies = band_energies(f, fam, which)
    n = fam.grid.size
    total = np.zeros(n)
    for j in fam.scales:
        if probe == "every":
            total += energies[j]
        else:
            total += spread(freeze(energies[j], fam.level(j), probe), n)
    return np.sqrt(total)


def maximal_square_function(f, fam: KernelFamily) -> np.ndarray:
    return discrete_square_function(f, fam, probe="sup", which="analysis")


def hl_maximal(f) -> np.ndarray:
    """Centred Hardy-Littlewood maximal function over all periodic radii, via prefix sums."""
    a = np.abs(np.asarray(f, dtype=complex if np.iscomplexobj(f) else float))
    n = len(a)
    grid_of(a)
    c = np.concatenate([[0.0], np.cumsum(np.concatenate([a, a, a]))])
    i = np.arange(n) + n
    best = a.copy()
    for r in range(1, n // 2 + 1):
        count = min(2 * r + 1, n)
        lo = i - r
        avg = (c[lo + count] - c[lo]) / count
        np.maximum(best, avg, out=best)
    return best


@dataclass(frozen=True)
class VectorMaximalReport:
    lhs: float
    rhs: float
    ratio: float
    degenerate: bool


def vector_maximal_report(fs, p: ExponentFunction, q: float) -> VectorMaximalReport:
    """||(sum_i |M f_i|**q)**(1/q)||_p against ||(sum_i |f_i|**q)**(1/q)||_p."""
    if not q > 1:
        raise PreconditionError(f"q must exceed 1, got {q}")
    fs = [np.asarray(f) for f in fs]
    mf = [hl_maximal(f) for f in fs]
    lhs_fn = np.sum([m ** q for m in mf], axis=0) ** (1.0 / q)
    rhs_fn = np.sum([np.abs(f) ** q for f in fs], axis=0) ** (1.0 / q)
    lhs = luxemburg_norm(lhs_fn, p)
    rhs = luxemburg_norm(rhs_fn, p)
    if rhs == 0:
        return VectorMaximalReport(lhs, rhs, 0.0, True)
    return VectorMaximalReport(lhs, rhs, lhs / rhs, False)


@dataclass(frozen=True)
class AlmostOrthogonalityTable:
    scales: tuple
    constants: np.ndarray
    max_constant: float


def almost_orthogonality_table(fam: KernelFamily, L: int = 1, M_decay: int = 1) -> AlmostOrthogonalityTable:
    """Smallest C(j, j') with |psi_j * phi_j'(x)| <= C 2^{-|j-j'| L} 2^{j^j'} / (1 + 2^{j^j'} |x|)^{1+M}."""
    if L < 1 or M_decay < 1:
        raise PreconditionError("L and M_decay must be at least 1")
    x = fam.grid.periodic_distance
    n = fam.grid.size
    scales = tuple(fam.scales)
    table = np.zeros((len(scales), len(scales)))
    for a, j in enumerate(scales):
        for b, k in enumerate(scales):
            cross = np.abs(n * np.fft.ifft(fam.synthesis_hat[j] * fam.analysis_hat[k]))
            lo = min(j, k)
            bound = 2.0 ** (-abs(j - k) * L) * 2.0 ** lo / (1 + 2.0 ** lo * x) ** (1 + M_decay)
            cross = np.where(cross > 1e-12 * n, cross, 0.0)
            table[a, b] = float(np.max(cross / bound))
    return AlmostOrthogonalityTable(scales, table, float(table.max()))
