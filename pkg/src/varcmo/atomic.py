"""Stopping-time atomic decomposition driven by the maximal square function."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (Arc, CoeffField, DyadicInterval, ExponentFunction, PreconditionError, as_arc,
                   build_dyadic_tree, min_moment_degree)
from .littlewood_paley import KernelFamily, band_project, maximal_square_function
from .luxemburg import indicator_norms, luxemburg_norm, region_norm
from .phi_transform import analyze, synthesize
from .space_norms import check_mean_zero, hardy_norm, poly_project

MOMENT_TOL = 1e-8


@dataclass(frozen=True)
class LevelSets:
    levels: list  # (i, mask) with mask = gdf > 2**i, i increasing
    degenerate: bool

    @property
    def i_min(self) -> int | None:
        return self.levels[0][0] if self.levels else None


def level_sets(gdf) -> LevelSets:
    g = np.asarray(gdf, dtype=float)
    if np.any(g < 0):
        raise PreconditionError("level sets need a non-negative function")
    pos = g[g > 0]
    if pos.size == 0:
        return LevelSets([], True)
    lo = math.floor(math.log2(pos.min())) - 1
    hi = math.ceil(math.log2(pos.max()))
    out = []
    for i in range(lo, hi + 1):
        mask = g > 2.0 ** i
        if mask.any():
            out.append((i, mask))
    return LevelSets(out, False)


@dataclass(frozen=True)
class StoppingFamily:
    """Generation and owning maximal cube for every tree interval.

    ``generation[s][k]`` is the i with Q in B_i (``residual`` when no Omega_i
    covers more than half of Q); ``owner[s][k]`` is the scale of the coarsest
    ancestor of Q in the same B_i, which is Q's maximal cube.
    """

    log2_size: int
    generation: dict
    owner: dict
    residual: int
    maximal: list = field(default_factory=list)

    def owner_of(self, Q: DyadicInterval) -> DyadicInterval:
        t = int(self.owner[Q.scale][Q.position])
        return DyadicInterval(t, Q.position >> (Q.scale - t), self.log2_size)

    def generation_of(self, Q: DyadicInterval) -> int:
        return int(self.generation[Q.scale][Q.position])


def stopping_cubes(levels: LevelSets, tree) -> StoppingFamily:
    """Assign each tree interval to B_i and find the maximal cubes of every B_i."""
    tree = list(tree)
    if not tree:
        raise PreconditionError("empty tree")
    J = tree[0].log2_size
    n = 1 << J
    scales = sorted({Q.scale for Q in tree})
    residual = (levels.i_min if levels.levels else 0) - 1
    gen = {}
    for s in scales:
        g = np.full(1 << s, residual)
        half = (n >> s) / 2
        for i, mask in levels.levels:
            counts = mask.reshape(1 << s, -1).sum(axis=1)
            g = np.where(counts > half, i, g)
        gen[s] = g
    owner = {}
    for s in scales:
        own = np.full(1 << s, s)
        found = np.zeros(1 << s, dtype=bool)
        k = np.arange(1 << s)
        for t in scales:
            if t > s:
                break
            match = ~found & (gen[t][k >> (s - t)] == gen[s])
            own[match] = t
            found |= match
        owner[s] = own
    maximal = []
    for s in scales:
        for k in np.flatnonzero(owner[s] == s):
            maximal.append((DyadicInterval(s, int(k), J), int(gen[s][k])))
    return StoppingFamily(J, gen, owner, residual, maximal)


@dataclass
class AtomicDecomposition:
    stopping_cubes: list  # (Q~, generation)
    lambdas: dict  # Q~ -> lambda
    atoms: dict  # Q~ -> atom signal
    supports: dict  # Q~ -> Arc 5Q~
    vacuous: set  # Q~ whose dilate covers the torus
    tail: np.ndarray  # sum of the pieces cut off by truncation to 5Q~
    target: np.ndarray  # band-covered part of the input
    source_norm: float
    degree: int

    def reconstruct(self) -> np.ndarray:
        out = self.tail.copy()
        for Q, lam in self.lambdas.items():
            out = out + lam * self.atoms[Q]
        return out

    def reconstruction_error(self) -> float:
        norm = np.linalg.norm(self.target)
        if norm == 0:
            return 0.0
        return float(np.linalg.norm(self.target - self.reconstruct()) / norm)

    def tail_fraction(self) -> float:
        norm = np.linalg.norm(self.target)
        return 0.0 if norm == 0 else float(np.linalg.norm(self.tail) / norm)


def _truncate(u: np.ndarray, W: Arc, d: int) -> np.ndarray:
    """chi_W u minus its polynomial projection on W, so the result has d vanishing moments."""
    a = np.zeros_like(u)
    a[W.indices()] = poly_project(u, W, d).residual
    return a


def atomic_decompose(f, p: ExponentFunction, fam: KernelFamily, degree: int | None = None) -> AtomicDecomposition:
    """Group coefficients by stopping cube, synthesise each group and cut it to 5Q~.

    Each group u = sum over Q owned by Q~ of <f, phi_Q> psi_Q is band-limited,
    so it is truncated to the dilate and moment-corrected there; the cut-off
    remainders accumulate in ``tail`` and the decomposition reads
    f_band = sum lambda a + tail.
    """
    f = fam.grid.check(f)
    check_mean_zero(f)
    d = min_moment_degree(p) if degree is None else int(degree)
    J = fam.grid.log2_size
    target = band_project(f, fam)
    empty = AtomicDecomposition([], {}, {}, {}, set(), np.zeros(len(f)), target, 0.0, d)
    if not np.any(f):
        return empty
    gdf = maximal_square_function(f, fam)
    levels = level_sets(gdf)
    if levels.degenerate:
        return empty
    coeffs = analyze(f, fam)
    top = fam.level(fam.j_max)
    tree = build_dyadic_tree(fam.grid, 0, top)
    fam_stop = stopping_cubes(levels, tree)
    groups: dict = {}
    for s, a in coeffs.levels.items():
        own = fam_stop.owner[s]
        for k in np.flatnonzero(a):
            t = int(own[k])
            key = DyadicInterval(t, int(k) >> (s - t), J)
            groups.setdefault(key, []).append((s, int(k)))
    out = AtomicDecomposition([], {}, {}, {}, set(), np.zeros(len(f)), target, hardy_norm(f, p, fam), d)
    tail = np.zeros(len(f))
    for Q in sorted(groups):
        piece = CoeffField(J)
        for s, k in groups[Q]:
            piece.level(s)[k] = coeffs.levels[s][k]
        energy = sum(float(np.sum(np.abs(a) ** 2)) for a in piece.levels.values())
        lam = float(indicator_norms(p, Q.scale)[Q.position]) / math.sqrt(Q.measure) * math.sqrt(energy)
        if lam == 0:
            continue
        u = np.real(synthesize(piece, fam))
        W = Q.dilate(5)
        atom = _truncate(u / lam, W, d)
        out.stopping_cubes.append((Q, fam_stop.generation_of(Q)))
        out.lambdas[Q] = lam
        out.atoms[Q] = atom
        out.supports[Q] = W
        if W.covers_torus:
            out.vacuous.add(Q)
        tail += u - lam * atom
    out.tail = tail
    return out


@dataclass(frozen=True)
class AtomCheck:
    support: bool
    size_ratio: float
    size: bool
    moments: bool
    moment_max: float


def moments(a, region, d: int) -> np.ndarray:
    """(1/N) sum_x a(x) t(x)**alpha for alpha <= d, t the centred local coordinate scaled to [-1, 1]."""
    arc = as_arc(region)
    vals = np.asarray(a)[arc.indices()]
    t = (2 * np.arange(arc.count) + 1) / arc.count - 1
    return np.array([np.sum(vals * t ** k) for k in range(d + 1)]) / (1 << arc.log2_size)


def atom_check(a, Q, p: ExponentFunction, q: float = 2.0, d: int = 0, size_constant: float = 1.0) -> AtomCheck:
    """Support in Q, ||a||_q * ||chi_Q|| / |Q|^{1/q} against ``size_constant``, and d vanishing moments."""
    if not q > 1:
        raise PreconditionError(f"q must exceed 1, got {q}")
    a = np.asarray(a)
    arc = as_arc(Q)
    outside = ~arc.mask()
    support = not np.any(a[outside])
    norm_q = float(np.mean(np.abs(a) ** q) ** (1.0 / q))
    ratio = norm_q * region_norm(p, Q) / arc.measure ** (1.0 / q)
    top = float(np.max(np.abs(a))) if a.size else 0.0
    mom = float(np.max(np.abs(moments(a, arc, d)))) if d >= 0 else 0.0
    return AtomCheck(support, ratio, ratio <= size_constant * (1 + 1e-9), mom <= MOMENT_TOL * top, mom)


def a_quantity(lambdas, cubes, p: ExponentFunction) -> float:
    """|| (sum_j (|lambda_j| chi_{Q_j} / ||chi_{Q_j}||)^{p-})^{1/p-} ||_{p(.)}."""
    lambdas = list(lambdas)
    cubes = list(cubes)
    if len(lambdas) != len(cubes):
        raise PreconditionError("lambdas and cubes differ in length")
    if not lambdas:
        return 0.0
    pm = p.p_minus
    agg = np.zeros(len(p.samples))
    for lam, Q in zip(lambdas, cubes):
        if lam == 0:
            continue
        arc = as_arc(Q)
        agg[arc.indices()] += (abs(lam) / region_norm(p, Q)) ** pm
    return luxemburg_norm(agg ** (1.0 / pm), p)
