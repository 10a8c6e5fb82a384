"""Grid, exponent functions and the dyadic interval tree on the periodic unit interval."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import numpy as np

MIN_LOG2_SIZE = 2


class VarCMOError(Exception):
    """Base class for all errors raised by this package."""


class RangeError(VarCMOError, ValueError):
    pass


class PreconditionError(VarCMOError, ValueError):
    pass


class DomainError(VarCMOError, ValueError):
    pass


class ConfigError(VarCMOError, ValueError):
    pass


class NumericError(VarCMOError, ArithmeticError):
    pass


class ResourceError(VarCMOError, RuntimeError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``2**log2_size`` samples on the torus [0, 1)."""

    log2_size: int

    def __post_init__(self):
        if not isinstance(self.log2_size, (int, np.integer)) or self.log2_size < MIN_LOG2_SIZE:
            raise RangeError(f"log2_size must be an integer >= {MIN_LOG2_SIZE}, got {self.log2_size!r}")
        if self.log2_size > 24:
            raise ResourceError("grids above 2**24 samples are not supported")

    @classmethod
    def for_length(cls, n: int) -> "Grid":
        if n < 1 or n & (n - 1):
            raise RangeError(f"signal length {n} is not a power of two")
        return cls(int(n).bit_length() - 1)

    @property
    def size(self) -> int:
        return 1 << self.log2_size

    @property
    def spacing(self) -> float:
        return 1.0 / self.size

    @cached_property
    def points(self) -> np.ndarray:
        x = np.arange(self.size) / self.size
        x.setflags(write=False)
        return x

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Integer frequencies in FFT order, Nyquist stored as -N/2."""
        m = np.fft.fftfreq(self.size, d=1.0 / self.size).round().astype(np.int64)
        m.setflags(write=False)
        return m

    @cached_property
    def periodic_distance(self) -> np.ndarray:
        """Distance from each sample to the origin on the torus."""
        d = np.minimum(self.points, 1.0 - self.points)
        d.setflags(write=False)
        return d

    def check(self, f) -> np.ndarray:
        f = np.asarray(f)
        if f.shape != (self.size,):
            raise RangeError(f"expected {self.size} samples, got shape {f.shape}")
        return f


def grid_of(f) -> Grid:
    return Grid.for_length(len(f))


def _smooth_unit_step(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1, and step(s) + step(1 - s) == 1."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True, eq=False)
class ExponentFunction:
    """Samples of a variable exponent p(x) > 0 on a grid.

    Instances hash by identity; derived quantities (indicator norms, the
    log-Hoelder constant) are cached per instance.
    """

    samples: np.ndarray
    p_minus: float = field(init=False)
    p_plus: float = field(init=False)
    _cache: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 1:
            raise PreconditionError("exponent samples must be one-dimensional")
        Grid.for_length(len(s))
        if not np.all(np.isfinite(s)) or np.any(s <= 0):
            raise PreconditionError("exponent samples must be finite and strictly positive")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "p_minus", float(s.min()))
        object.__setattr__(self, "p_plus", float(s.max()))

    @property
    def grid(self) -> Grid:
        return Grid.for_length(len(self.samples))

    @property
    def is_constant(self) -> bool:
        return self.p_minus == self.p_plus

    @cached_property
    def lh_constant(self) -> float:
        return lh_constant(self)

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "ExponentFunction":
        return cls(np.full(grid.size, float(value)))

    @classmethod
    def sinusoid(cls, grid: Grid, mean: float, amplitude: float, frequency: int = 1,
                 phase: float = 0.0) -> "ExponentFunction":
        x = grid.points
        return cls(mean + amplitude * np.sin(2 * np.pi * frequency * x + phase))

    @classmethod
    def smoothstep(cls, grid: Grid, low: float, high: float, width: float = 0.1) -> "ExponentFunction":
        """``low`` on [0, 1/2), ``high`` on [1/2, 1), with C-infinity ramps of the given width."""
        if not 0 < width <= 0.5:
            raise PreconditionError("smoothstep width must lie in (0, 1/2]")
        x = grid.points
        up = _smooth_unit_step((x - 0.5 + width / 2) / width)
        down = _smooth_unit_step((x - 1.0 + width / 2) / width) + _smooth_unit_step((x + width / 2) / width) - 1
        return cls(low + (high - low) * (up - down))

    def harmonic_with(self, other: "ExponentFunction") -> "ExponentFunction":
        """Pointwise exponent with 1/p = 1/p1 + 1/p2."""
        return ExponentFunction(1.0 / (1.0 / self.samples + 1.0 / other.samples))


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """The dyadic interval [k 2^-j, (k+1) 2^-j) on a grid of 2**log2_size samples."""

    scale: int
    position: int
    log2_size: int

    def __post_init__(self):
        if not 0 <= self.scale <= self.log2_size:
            raise RangeError(f"scale {self.scale} outside [0, {self.log2_size}]")
        if not 0 <= self.position < (1 << self.scale):
            raise RangeError(f"position {self.position} outside [0, 2**{self.scale})")

    @property
    def length(self) -> float:
        return 2.0 ** -self.scale

    @property
    def measure(self) -> float:
        return self.length

    @property
    def size(self) -> int:
        return 1 << (self.log2_size - self.scale)

    @property
    def start(self) -> int:
        return self.position * self.size

    @property
    def stop(self) -> int:
        return self.start + self.size

    @property
    def sample_range(self) -> range:
        return range(self.start, self.stop)

    @property
    def anchor(self) -> float:
        return self.position * self.length

    def probe(self, policy: str = "left") -> int:
        if policy == "left":
            return self.start
        if policy == "center":
            return self.start + self.size // 2
        raise PreconditionError(f"probe policy {policy!r} does not name a single sample")

    @property
    def parent(self) -> "DyadicInterval | None":
        if self.scale == 0:
            return None
        return DyadicInterval(self.scale - 1, self.position >> 1, self.log2_size)

    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        if self.scale == self.log2_size:
            raise RangeError("single-sample intervals have no children")
        j, k = self.scale + 1, 2 * self.position
        return DyadicInterval(j, k, self.log2_size), DyadicInterval(j, k + 1, self.log2_size)

    def contains(self, other: "DyadicInterval") -> bool:
        return interval_contains(self, other)

    def mask(self) -> np.ndarray:
        m = np.zeros(1 << self.log2_size, dtype=bool)
        m[self.start:self.stop] = True
        return m

    def arc(self) -> "Arc":
        return Arc(self.start, self.size, self.log2_size)

    def dilate(self, factor: int) -> "Arc":
        """Concentric dilate, wrapped on the torus and clipped to the full circle."""
        if factor < 1 or factor % 2 == 0:
            raise PreconditionError("dilation factor must be an odd positive integer")
        n = 1 << self.log2_size
        count = factor * self.size
        if count >= n:
            center = self.start + self.size // 2
            return Arc((center - n // 2) % n, n, self.log2_size)
        return Arc((self.start - (factor - 1) // 2 * self.size) % n, count, self.log2_size)


@dataclass(frozen=True)
class Arc:
    """A run of ``count`` consecutive samples starting at ``start``, wrapping periodically."""

    start: int
    count: int
    log2_size: int

    def __post_init__(self):
        n = 1 << self.log2_size
        if not 0 < self.count <= n or not 0 <= self.start < n:
            raise RangeError(f"invalid arc start={self.start} count={self.count} on {n} samples")

    @property
    def measure(self) -> float:
        return self.count / (1 << self.log2_size)

    @property
    def covers_torus(self) -> bool:
        return self.count == 1 << self.log2_size

    def indices(self) -> np.ndarray:
        return (self.start + np.arange(self.count)) % (1 << self.log2_size)

    def mask(self) -> np.ndarray:
        m = np.zeros(1 << self.log2_size, dtype=bool)
        m[self.indices()] = True
        return m

    def local_coordinates(self) -> np.ndarray:
        """Unwrapped positions of the arc samples, measured from the arc start."""
        return np.arange(self.count) / (1 << self.log2_size)


def as_arc(region) -> Arc:
    if isinstance(region, Arc):
        return region
    if isinstance(region, DyadicInterval):
        return region.arc()
    raise TypeError(f"expected a DyadicInterval or Arc, got {type(region).__name__}")


def build_dyadic_tree(grid: Grid, j_min: int, j_max: int) -> list[DyadicInterval]:
    """All dyadic intervals with scale in [j_min, j_max], ordered by (scale, position)."""
    if not 0 <= j_min <= j_max <= grid.log2_size:
        raise RangeError(f"need 0 <= j_min <= j_max <= {grid.log2_size}, got ({j_min}, {j_max})")
    return [DyadicInterval(j, k, grid.log2_size) for j in range(j_min, j_max + 1) for k in range(1 << j)]


def interval_contains(P: DyadicInterval, Q: DyadicInterval) -> bool:
    if P.log2_size != Q.log2_size:
        raise PreconditionError("intervals live on different grids")
    return P.start <= Q.start and Q.stop <= P.stop


def lh_constant(p: ExponentFunction) -> float:
    """Smallest C with |p(x) - p(y)| <= C / (-log d(x, y)) over all pairs at distance <= 1/2."""
    s = p.samples
    n = len(s)
    best = 0.0
    for shift in range(1, n // 2 + 1):
        gap = np.max(np.abs(s - np.roll(s, shift)))
        best = max(best, gap * -np.log(shift / n))
    return float(best)


def exponent_bounds(p: ExponentFunction) -> tuple[float, float]:
    return p.p_minus, p.p_plus


def min_moment_degree(p: ExponentFunction | float) -> int:
    """Smallest d >= 0 with p_minus * (d + 2) > 1 (dimension one)."""
    p_minus = p.p_minus if isinstance(p, ExponentFunction) else float(p)
    if p_minus <= 0:
        raise PreconditionError("p_minus must be positive")
    d = 0
    while not p_minus * (d + 2) > 1:
        d += 1
    return d


class CoeffField:
    """Complex coefficients indexed by dyadic intervals, stored densely per scale.

    ``levels[s]`` holds the 2**s coefficients of scale ``s``; missing scales
    and zero entries both stand for a zero coefficient.
    """

    def __init__(self, log2_size: int, levels: dict[int, np.ndarray] | None = None):
        self.log2_size = int(log2_size)
        self.levels: dict[int, np.ndarray] = {}
        for s, values in (levels or {}).items():
            values = np.asarray(values, dtype=complex)
            if not 0 <= s <= self.log2_size or values.shape != (1 << s,):
                raise RangeError(f"scale {s} needs {1 << s} coefficients, got shape {values.shape}")
            self.levels[int(s)] = values

    @classmethod
    def from_entries(cls, log2_size: int, entries: dict[DyadicInterval, complex]) -> "CoeffField":
        out = cls(log2_size)
        for Q, v in entries.items():
            if Q.log2_size != log2_size:
                raise PreconditionError("entry lives on a different grid")
            out.level(Q.scale)[Q.position] = v
        return out

    def level(self, s: int) -> np.ndarray:
        """Coefficient array of scale ``s``, created (zero) on first access."""
        if s not in self.levels:
            if not 0 <= s <= self.log2_size:
                raise RangeError(f"scale {s} outside [0, {self.log2_size}]")
            self.levels[s] = np.zeros(1 << s, dtype=complex)
        return self.levels[s]

    @property
    def scale_range(self) -> tuple[int, int] | None:
        if not self.levels:
            return None
        return min(self.levels), max(self.levels)

    def __getitem__(self, Q: DyadicInterval) -> complex:
        arr = self.levels.get(Q.scale)
        return 0j if arr is None else complex(arr[Q.position])

    def __setitem__(self, Q: DyadicInterval, value: complex):
        self.level(Q.scale)[Q.position] = value

    def items(self) -> Iterator[tuple[DyadicInterval, complex]]:
        for s in sorted(self.levels):
            arr = self.levels[s]
            for k in np.flatnonzero(arr):
                yield DyadicInterval(s, int(k), self.log2_size), complex(arr[k])

    @property
    def entries(self) -> dict[DyadicInterval, complex]:
        return dict(self.items())

    def nnz(self) -> int:
        return int(sum(np.count_nonzero(a) for a in self.levels.values()))

    def is_zero(self) -> bool:
        return self.nnz() == 0

    def copy(self) -> "CoeffField":
        return CoeffField(self.log2_size, {s: a.copy() for s, a in self.levels.items()})

    def map(self, fn) -> "CoeffField":
        return CoeffField(self.log2_size, {s: fn(a) for s, a in self.levels.items()})

    def __mul__(self, c) -> "CoeffField":
        return self.map(lambda a: a * c)

    __rmul__ = __mul__

    def __add__(self, other: "CoeffField") -> "CoeffField":
        out = self.copy()
        for s, a in other.levels.items():
            out.level(s)[:] += a
        return out

    def __sub__(self, other: "CoeffField") -> "CoeffField":
        return self + other * -1

    def inner(self, other: "CoeffField") -> complex:
        """sum_Q self_Q * conj(other_Q)."""
        total = 0j
        for s, a in self.levels.items():
            b = other.levels.get(s)
            if b is not None:
                total += complex(np.sum(a * np.conj(b)))
        return total

    def max_abs_difference(self, other: "CoeffField") -> float:
        diff = self - other
        return max((float(np.max(np.abs(a))) for a in diff.levels.values()), default=0.0)

    def __repr__(self):
        return f"CoeffField(log2_size={self.log2_size}, scales={sorted(self.levels)}, nnz={self.nnz()})"
