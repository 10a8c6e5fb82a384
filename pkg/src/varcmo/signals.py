"""Seeded random inputs and an order-preserving trial runner."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .core import CoeffField, Grid, PreconditionError

RNG_ALGORITHM = "philox4x64-10"


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator keyed by (seed, *stream)."""
    key = [int(seed), *map(int, stream)]
    if any(k < 0 for k in key):
        raise PreconditionError("seed and stream ids must be non-negative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def trial_map(fn, items, threads: int = 1) -> list:
    """map(fn, items) in input order, optionally on a thread pool."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def band_noise(fam, rng: np.random.Generator) -> np.ndarray:
    """White noise projected onto the covered bands, unit L2 norm."""
    from .littlewood_paley import band_project

    f = band_project(rng.standard_normal(fam.grid.size), fam)
    return f / np.sqrt(np.mean(f ** 2))


def sparse_field(fam, rng: np.random.Generator, count: int = 8, df: float = 3.0) -> CoeffField:
    """Student-t coefficients on ``count`` random cubes of the coefficient lattice.

    Each cube picks its band uniformly among the family scales, so the law of
    the field does not depend on the grid size beyond the scale range.
    """
    if count < 1:
        raise PreconditionError("count must be at least 1")
    out = CoeffField(fam.grid.log2_size)
    for _ in range(count):
        s = fam.level(int(rng.integers(fam.j_min, fam.j_max + 1)))
        out.level(s)[rng.integers(1 << s)] += rng.standard_t(df)
    if out.is_zero():
        out.level(fam.level(fam.j_min))[0] = 1.0
    return out


def sparse_signal(fam, rng: np.random.Generator, count: int = 8, df: float = 3.0) -> np.ndarray:
    from .phi_transform import synthesize

    return synthesize(sparse_field(fam, rng, count, df), fam).real


def smooth_function(grid: Grid, index: int, max_frequency: int = 4) -> np.ndarray:
    """A fixed mean-zero trigonometric polynomial; the same function for every grid."""
    rng = make_rng(index, 7919)
    k = np.arange(1, max_frequency + 1)
    amp = rng.standard_normal(max_frequency) / k ** 2
    phase = rng.uniform(0, 2 * np.pi, max_frequency)
    x = grid.points[:, None]
    return np.sum(amp * np.cos(2 * np.pi * k * x + phase), axis=1)
