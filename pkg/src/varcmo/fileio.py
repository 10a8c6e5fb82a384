"""Signal files (CSV "index,re,im" or raw little-endian float64 pairs) and coefficient files ("j k re im")."""

from __future__ import annotations

import csv
import io

import numpy as np

from .core import CoeffField, ConfigError, Grid


def read_signal(path: str) -> np.ndarray:
    try:
        if path.endswith(".bin"):
            raw = np.fromfile(path, dtype="<f8")
            if raw.size % 2:
                raise ConfigError(f"{path}: odd number of float64 values")
            pairs = raw.reshape(-1, 2)
        else:
            with open(path) as fh:
                rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
            if rows and not _is_number(rows[0][0]):
                rows = rows[1:]
            data = np.array([[float(x) for x in r] for r in rows])
            if data.ndim != 2 or data.shape[1] != 3:
                raise ConfigError(f"{path}: expected rows 'index,re,im'")
            if not np.array_equal(data[:, 0], np.arange(len(data))):
                raise ConfigError(f"{path}: indices must run 0..N-1 in order")
            pairs = data[:, 1:]
    except OSError as exc:
        raise ConfigError(f"cannot read signal file: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    Grid.for_length(len(pairs))
    if not np.any(pairs[:, 1]):
        return pairs[:, 0].copy()
    return pairs[:, 0] + 1j * pairs[:, 1]


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def signal_csv(f) -> str:
    f = np.asarray(f)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "re", "im"])
    for i, v in enumerate(f):
        w.writerow([i, repr(float(np.real(v))), repr(float(np.imag(v)))])
    return buf.getvalue()


def write_signal(path: str, f):
    f = np.asarray(f)
    if path.endswith(".bin"):
        np.stack([f.real, np.imag(f)], axis=1).astype("<f8").tofile(path)
    else:
        with open(path, "w") as fh:
            fh.write(signal_csv(f))


def coeffs_text(c: CoeffField) -> str:
    lines = [f"# log2_size {c.log2_size}"]
    for s in sorted(c.levels):
        for k, v in enumerate(c.levels[s]):
            if v != 0:
                lines.append(f"{s} {k} {float(v.real)!r} {float(v.imag)!r}")
    return "\n".join(lines) + "\n"


def read_coeffs(path: str, log2_size: int | None = None) -> CoeffField:
    entries = []
    declared = None
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    parts = line[1:].split()
                    if len(parts) == 2 and parts[0] == "log2_size":
                        declared = int(parts[1])
                    continue
                j, k, re, im = line.split()
                entries.append((int(j), int(k), complex(float(re), float(im))))
    except OSError as exc:
        raise ConfigError(f"cannot read coefficient file: {exc}") from None
    except ValueError:
        raise ConfigError(f"{path}: expected lines 'j k re im'") from None
    J = log2_size if log2_size is not None else declared
    if J is None:
        raise ConfigError(f"{path}: grid size unknown; pass --grid or add a '# log2_size J' line")
    if declared is not None and log2_size is not None and declared != log2_size:
        raise ConfigError(f"{path}: file declares log2_size {declared} but --grid is {log2_size}")
    out = CoeffField(J)
    for j, k, v in entries:
        if not 0 <= j <= J or not 0 <= k < 1 << j:
            raise ConfigError(f"{path}: entry ({j}, {k}) outside the dyadic tree of 2**{J} samples")
        out.level(j)[k] += v
    return out
