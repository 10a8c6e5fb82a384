"""Exponent, kernel and run-config documents (JSON), validated before any computation."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .core import ConfigError, ExponentFunction, Grid
from .littlewood_paley import KernelFamily, WINDOW_KINDS, build_family

EXPONENT_FIELDS = {
    "constant": {"kind", "value"},
    "sinusoid": {"kind", "mean", "amplitude", "frequency", "phase"},
    "smoothstep": {"kind", "low", "high", "width"},
    "samples": {"kind", "values"},
}
KERNEL_FIELDS = {"window", "j_min", "j_max", "shift"}
RUN_FIELDS = {"grid", "exponent", "kernels", "operator", "seed", "trials", "threads", "out", "format"}


def load_document(text_or_path: str):
    """Parse inline JSON, or the JSON file it names."""
    if isinstance(text_or_path, (dict, list, int, float)):
        return text_or_path
    s = str(text_or_path).strip()
    if os.path.isfile(s):
        with open(s) as fh:
            s = fh.read()
    try:
        return json.loads(s)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not a JSON document or readable file: {text_or_path!r} ({exc.msg})") from None


def _number(doc, key, default=None):
    v = doc.get(key, default)
    if v is None:
        raise ConfigError(f"exponent field {key!r} is required")
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"exponent field {key!r} must be a number, got {v!r}")
    return float(v)


def normalize_exponent_spec(spec) -> dict:
    doc = load_document(spec)
    if isinstance(doc, (int, float)) and not isinstance(doc, bool):
        doc = {"kind": "constant", "value": float(doc)}
    if not isinstance(doc, dict):
        raise ConfigError("exponent spec must be a number or an object")
    kind = doc.get("kind")
    if kind not in EXPONENT_FIELDS:
        raise ConfigError(f"unknown exponent kind {kind!r}; expected one of {sorted(EXPONENT_FIELDS)}")
    extra = set(doc) - EXPONENT_FIELDS[kind]
    if extra:
        raise ConfigError(f"unknown exponent fields {sorted(extra)} for kind {kind!r}")
    return doc


def exponent_from_spec(spec, grid: Grid) -> ExponentFunction:
    doc = normalize_exponent_spec(spec)
    kind = doc["kind"]
    try:
        if kind == "constant":
            return ExponentFunction.constant(grid, _number(doc, "value"))
        if kind == "sinusoid":
            return ExponentFunction.sinusoid(grid, _number(doc, "mean"), _number(doc, "amplitude"),
                                             int(_number(doc, "frequency", 1)), _number(doc, "phase", 0.0))
        if kind == "smoothstep":
            return ExponentFunction.smoothstep(grid, _number(doc, "low"), _number(doc, "high"),
                                               _number(doc, "width", 0.1))
        values = np.asarray(doc.get("values"), dtype=float)
        if values.shape != (grid.size,):
            raise ConfigError(f"exponent samples need {grid.size} values, got shape {values.shape}")
        return ExponentFunction(values)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid exponent spec: {exc}") from None


def normalize_kernel_spec(spec) -> dict:
    if spec is None:
        return {"window": "meyer_smooth"}
    if isinstance(spec, str) and spec.strip() in WINDOW_KINDS:
        return {"window": spec.strip()}
    doc = load_document(spec)
    if not isinstance(doc, dict):
        raise ConfigError("kernel spec must be a window name or an object")
    extra = set(doc) - KERNEL_FIELDS
    if extra:
        raise ConfigError(f"unknown kernel fields {sorted(extra)}")
    if doc.get("window", "meyer_smooth") not in WINDOW_KINDS:
        raise ConfigError(f"unknown window {doc.get('window')!r}; expected one of {WINDOW_KINDS}")
    return {"window": "meyer_smooth", **doc}


def family_from_spec(spec, grid: Grid) -> KernelFamily:
    doc = normalize_kernel_spec(spec)
    fam = build_family(grid, int(doc.get("j_min", 1)), doc.get("j_max"), doc["window"], doc.get("shift"))
    try:
        fam.check_sampling()
    except Exception as exc:
        raise ConfigError(str(exc)) from None
    return fam


@dataclass
class RunConfig:
    grid: int | None = None
    exponent: object = None
    kernels: object = None
    operator: object = None
    seed: int = 0
    trials: int | None = None
    threads: int = 1
    out: str | None = None
    format: str = "structured"
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_document(cls, doc) -> "RunConfig":
        doc = load_document(doc)
        if not isinstance(doc, dict):
            raise ConfigError("run config must be an object")
        unknown = set(doc) - RUN_FIELDS
        if unknown:
            raise ConfigError(f"unknown config fields {sorted(unknown)}")
        return cls(**doc)

    def validate(self):
        if self.grid is not None and (not isinstance(self.grid, int) or not 2 <= self.grid <= 24):
            raise ConfigError(f"grid must be an integer in [2, 24], got {self.grid!r}")
        if not isinstance(self.seed, int) or self.seed < 0 or self.seed >= 1 << 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.trials is not None and (not isinstance(self.trials, int) or self.trials < 1):
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.threads, int) or self.threads < 1:
            raise ConfigError(f"threads must be a positive integer, got {self.threads!r}")
        if self.format not in ("csv", "structured"):
            raise ConfigError(f"format must be 'csv' or 'structured', got {self.format!r}")
        if self.exponent is not None:
            normalize_exponent_spec(self.exponent)
        normalize_kernel_spec(self.kernels)
        return self
