"""Analysis and synthesis maps of the phi-transform, with dense-matrix oracles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CoeffField, ExponentFunction, Grid, RangeError, ResourceError
from .littlewood_paley import KernelFamily
from .signals import make_rng, sparse_field, sparse_signal, trial_map
from .space_norms import (carleson_sup, check_mean_zero, coefficient_energy, cmo_norm, hardy_norm,
                          seq_c_norm, seq_s_norm)

DENSE_LIMIT = 4096


def _probe_offset(fam: KernelFamily, s: int, probe: str) -> int:
    n = fam.grid.size
    if probe == "left":
        return 0
    if probe == "center":
        return (n >> s) // 2
    raise RangeError(f"coefficient probes must be 'left' or 'center', got {probe!r}")


def analyze(f, fam: KernelFamily, probe: str = "left") -> CoeffField:
    """<f, phi_Q> = |Q|^{1/2} (phi~_j * f)(x_Q) for each Q of scale j + shift."""
    f = fam.grid.check(f)
    check_mean_zero(f)
    fam.check_sampling()
    F = np.fft.fft(f)
    real = np.isrealobj(f)
    out = CoeffField(fam.grid.log2_size)
    for j in fam.scales:
        s = fam.level(j)
        conv = np.fft.ifft(F * np.conj(fam.analysis_hat[j]))
        if real:
            conv = conv.real
        step = fam.grid.size >> s
        out.levels[s] = (2.0 ** (-s / 2) * conv[_probe_offset(fam, s, probe)::step]).astype(complex)
    return out


def synthesize(s: CoeffField, fam: KernelFamily, probe: str = "left") -> np.ndarray:
    """sum_Q s_Q |Q|^{1/2} psi_j(. - x_Q), accumulated in the frequency domain."""
    n = fam.grid.size
    if s.log2_size != fam.grid.log2_size:
        raise RangeError("coefficient field lives on a different grid")
    total = np.zeros(n, dtype=complex)
    for lev, a in s.levels.items():
        j = lev - fam.shift
        if not np.any(a):
            continue
        fam.check_scale(j)
        d = np.zeros(n, dtype=complex)
        d[_probe_offset(fam, lev, probe)::n >> lev] = a * 2.0 ** (-lev / 2)
        total += np.fft.fft(d) * (n * fam.synthesis_hat[j])
    out = np.fft.ifft(total)
    if all(np.isrealobj(a) or not np.any(a.imag) for a in s.levels.values()):
        return out.real
    return out


def _coefficient_index(fam: KernelFamily):
    rows = []
    for j in fam.scales:
        s = fam.level(j)
        step = fam.grid.size >> s
        rows.extend((j, s, k * step) for k in range(1 << s))
    return rows


def dense_operators(grid: Grid, fam: KernelFamily) -> tuple[np.ndarray, np.ndarray]:
    """Explicit analysis (coefficients x samples) and synthesis (samples x coefficients) matrices."""
    n = grid.size
    if n > DENSE_LIMIT:
        raise ResourceError(f"dense operators are limited to {DENSE_LIMIT} samples")
    fam.check_sampling()
    idx = np.arange(n)
    rows = _coefficient_index(fam)
    A = np.zeros((len(rows), n), dtype=complex)
    S = np.zeros((n, len(rows)), dtype=complex)
    kernels = {j: (n * np.fft.ifft(fam.analysis_hat[j]), n * np.fft.ifft(fam.synthesis_hat[j])) for j in fam.scales}
    for r, (j, s, z) in enumerate(rows):
        phi, psi = kernels[j]
        w = 2.0 ** (-s / 2)
        # phi~_j(z - x_i) = conj(phi_j(x_i - z))
        A[r] = w * np.conj(phi[(idx - z) % n]) / n
        S[:, r] = w * psi[(idx - z) % n]
    return A, S


def band_projector(fam: KernelFamily) -> np.ndarray:
    n = fam.grid.size
    F = np.fft.fft(np.eye(n), axis=0)
    return np.fft.ifft(fam.tiling_sum()[:, None] * F, axis=0)


def projector_discrepancy(fam: KernelFamily) -> float:
    """Spectral norm of S_dense @ A_dense minus the band projector."""
    A, S = dense_operators(fam.grid, fam)
    return float(np.linalg.norm(S @ A - band_projector(fam), 2))


def reconstruction_error(f, fam: KernelFamily) -> float:
    """||f - T(S(f))||_2 / ||f||_2, zero for the zero signal."""
    f = np.asarray(f)
    norm = np.linalg.norm(f)
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(f - synthesize(analyze(f, fam), fam)) / norm)


@dataclass(frozen=True)
class OperatorNormReport:
    ratios: dict
    maxima: dict
    trials_used: int


def operator_norm_report(fam: KernelFamily, p: ExponentFunction, trials: int, seed: int,
                         threads: int = 1) -> OperatorNormReport:
    """Empirical ratios for S: H -> s, T: s -> H, S: CMO -> c and T: c -> CMO."""
    if trials < 1:
        raise RangeError("trials must be at least 1")

    def one(t):
        rng = make_rng(seed, 31, t)
        f = sparse_signal(fam, rng)
        f = f - f.mean()
        s = sparse_field(fam, rng)
        out = {}
        hf = hardy_norm(f, p, fam)
        if hf > 0:
            out["S_H_to_s"] = seq_s_norm(analyze(f, fam), p) / hf
        ss = seq_s_norm(s, p)
        if ss > 0:
            Ts = synthesize(s, fam)
            out["T_s_to_H"] = hardy_norm(Ts - Ts.mean(), p, fam) / ss
        cg = cmo_norm(f, p, fam)
        if cg > 0:
            out["S_CMO_to_c"] = seq_c_norm(analyze(f, fam), p) / cg
        cs = seq_c_norm(s, p)
        if cs > 0:
            out["T_c_to_CMO"] = cmo_norm(synthesize(s, fam), p, fam) / cs
        return out

    results = trial_map(one, range(trials), threads)
    names = ("S_H_to_s", "T_s_to_H", "S_CMO_to_c", "T_c_to_CMO")
    ratios = {k: np.array([r[k] for r in results if k in r]) for k in names}
    maxima = {k: float(v.max()) if v.size else float("nan") for k, v in ratios.items()}
    used = min(len(v) for v in ratios.values())
    return OperatorNormReport(ratios, maxima, used)


@dataclass(frozen=True)
class PPRatio:
    ratio: float
    numerator: float
    denominator: float
    degenerate: bool


def pp_ratio(f, p: ExponentFunction, fam_a: KernelFamily, fam_b: KernelFamily) -> PPRatio:
    """Sup-probe Carleson quantity with fam_a over the inf-probe one with fam_b."""
    if fam_a.grid != fam_b.grid or fam_a.j_min != fam_b.j_min or fam_a.j_max != fam_b.j_max:
        raise RangeError("kernel families must cover the same scales on the same grid")
    top = fam_a.j_max
    num = carleson_sup(coefficient_energy(f, fam_a, "sup"), p, top, offset=fam_a.shift)
    den = carleson_sup(coefficient_energy(f, fam_b, "inf"), p, top, offset=fam_b.shift)
    if den == 0:
        return PPRatio(float("nan"), num, den, True)
    return PPRatio(num / den, num, den, False)
