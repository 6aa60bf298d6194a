"""Two-parameter grid sweeps of steady-state and time-series observables.

Cells are independent pure evaluations. With ``jobs > 1`` they are fanned out
over a process pool, and results land in pre-indexed slots, so the output
never depends on scheduling.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InvalidParameter, TwoBathError
from .gaussian import log_negativity, partial_transpose, symplectic_spectrum, von_neumann_entropy
from .model import InitialState, SystemParams
from .propagator import AnalyticPropagator
from .steady import (
    MOMENT_NAMES,
    SteadyMoments,
    log_negativity_weak,
    steady_state_covariance,
    symplectic_weak,
)

__all__ = [
    "Axis",
    "SweepSpec",
    "SweepResult",
    "OBSERVABLES",
    "SOURCES",
    "evaluate_cell",
    "run_sweep",
    "write_sweep",
    "format_float",
]

PARAM_AXES = ("m", "omega0", "kappa", "gamma1", "gamma2", "T1", "T2", "s", "d")
# derived axes: T sets T1 = T2, gamma sets gamma1 = gamma2, alpha sets kappa
DERIVED_AXES = ("T", "gamma", "alpha")
OBSERVABLES = ("log_negativity", "entropy", "symplectic_min") + MOMENT_NAMES
SOURCES = ("steady", "closed", "time")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in PARAM_AXES + DERIVED_AXES:
            raise InvalidParameter(
                f"cannot sweep {self.name!r}; choose from {', '.join(PARAM_AXES + DERIVED_AXES)}"
            )
        if int(self.count) < 2:
            raise InvalidParameter(f"axis {self.name} needs count >= 2, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``name:start:stop:count``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise InvalidParameter(f"axis must be name:start:stop:count, got {text!r}")
        name, start, stop, count = parts
        try:
            return cls(name, float(start), float(stop), int(count))
        except ValueError:
            raise InvalidParameter(f"bad axis specification {text!r}") from None

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis
    params: SystemParams
    init: InitialState = field(default_factory=InitialState)
    observable: str = "log_negativity"
    source: str = "steady"
    time: float | None = None

    def __post_init__(self):
        if self.observable not in OBSERVABLES:
            raise InvalidParameter(
                f"unknown observable {self.observable!r}; choose from {', '.join(OBSERVABLES)}"
            )
        if self.source not in SOURCES:
            raise InvalidParameter(f"unknown source {self.source!r}; choose from {', '.join(SOURCES)}")
        if self.source == "time" and (self.time is None or self.time < 0):
            raise InvalidParameter("source 'time' needs a time >= 0")
        if self.axis1.name == self.axis2.name:
            raise InvalidParameter("the two sweep axes must differ")


def _cell_values(spec: SweepSpec, v1: float, v2: float) -> dict:
    values = spec.params.as_dict()
    values.update(s=spec.init.s, d=spec.init.d, alpha=None)
    for name, v in ((spec.axis1.name, v1), (spec.axis2.name, v2)):
        if name == "T":
            values["T1"] = values["T2"] = v
        elif name == "gamma":
            values["gamma1"] = values["gamma2"] = v
        elif name == "alpha":
            values["alpha"] = v
        else:
            values[name] = v
    if values["alpha"] is None:
        values["alpha"] = values["kappa"] / (values["m"] * values["omega0"] ** 2)
    else:
        values["kappa"] = values["alpha"] * values["m"] * values["omega0"] ** 2
    return values


def _observe(gamma: np.ndarray, observable: str) -> float:
    if observable == "log_negativity":
        return log_negativity(gamma)
    if observable == "entropy":
        return von_neumann_entropy(gamma)
    if observable == "symplectic_min":
        return symplectic_spectrum(partial_transpose(gamma)).min
    return getattr(SteadyMoments.from_covariance(gamma), observable)


def evaluate_cell(spec: SweepSpec, v1: float, v2: float) -> tuple[float, str]:
    """Return ``(value, status)``; status is ``"ok"`` or the error class name."""
    values = _cell_values(spec, v1, v2)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if spec.source == "closed":
                args = (values["omega0"], values["alpha"], values["T1"], values["T2"])
                if spec.observable == "log_negativity":
                    value = log_negativity_weak(*args)
                elif spec.observable == "symplectic_min":
                    value = min(symplectic_weak(*args))
                else:
                    return float("nan"), "Unsupported"
            else:
                params = SystemParams(
                    **{k: values[k] for k in ("m", "omega0", "kappa", "gamma1", "gamma2", "T1", "T2", "regime")}
                )
                if spec.source == "steady":
                    gamma = steady_state_covariance(params)
                else:
                    init = InitialState(values["s"], values["d"])
                    gamma = AnalyticPropagator(params, init).covariance(spec.time)
                value = _observe(gamma, spec.observable)
    except (TwoBathError, ValueError, ArithmeticError) as exc:
        return float("nan"), type(exc).__name__
    if not np.isfinite(value):
        return float("nan"), "NonFinite"
    return float(value), "ok"


def _evaluate_chunk(args):
    spec, cells = args
    return [evaluate_cell(spec, v1, v2) for v1, v2 in cells]


@dataclass
class SweepResult:
    spec: SweepSpec
    axis1_values: np.ndarray
    axis2_values: np.ndarray
    values: np.ndarray
    status: np.ndarray
    metadata: dict

    @property
    def n_ok(self) -> int:
        return int(np.sum(self.status == "ok"))

    def records(self):
        for i, v1 in enumerate(self.axis1_values):
            for j, v2 in enumerate(self.axis2_values):
                yield v1, v2, self.values[i, j], self.status[i, j]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([self.spec.axis1.name, self.spec.axis2.name, self.spec.observable, "status"])
        for v1, v2, value, status in self.records():
            writer.writerow(
                [
                    format_float(v1),
                    format_float(v2),
                    format_float(value) if status == "ok" else "",
                    status,
                ]
            )
        return buf.getvalue()


def run_sweep(spec: SweepSpec, jobs: int = 1, timestamp: str | None = None) -> SweepResult:
    if jobs < 1:
        raise InvalidParameter(f"jobs must be >= 1, got {jobs}")
    a1, a2 = spec.axis1.values(), spec.axis2.values()
    cells = [(v1, v2) for v1 in a1 for v2 in a2]

    if jobs == 1:
        flat = _evaluate_chunk((spec, cells))
    else:
        size = max(1, -(-len(cells) // (4 * jobs)))
        chunks = [cells[i : i + size] for i in range(0, len(cells), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            # map preserves input order, so slot assignment is deterministic
            flat = [r for part in pool.map(_evaluate_chunk, [(spec, c) for c in chunks]) for r in part]

    values = np.array([v for v, _ in flat]).reshape(len(a1), len(a2))
    status = np.array([s for _, s in flat], dtype=object).reshape(len(a1), len(a2))
    metadata = {
        "version": __version__,
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "regime": spec.params.regime.value,
        "params": spec.params.as_dict(),
        "initial_state": {"s": spec.init.s, "d": spec.init.d},
        "axis1": asdict(spec.axis1),
        "axis2": asdict(spec.axis2),
        "observable": spec.observable,
        "source": spec.source,
        "time": spec.time,
        "cells": len(cells),
        "failed": int(np.sum(status != "ok")),
        "failures": sorted({s for s in status.ravel() if s != "ok"}),
    }
    return SweepResult(spec, a1, a2, values, status, metadata)


def sidecar_path(csv_path: str | Path) -> Path:
    path = Path(csv_path)
    return path.with_suffix(".json")


def write_sweep(result: SweepResult, csv_path: str | Path) -> tuple[Path, Path]:
    """Write the CSV table and its JSON metadata sidecar; return both paths."""
    csv_path = Path(csv_path)
    csv_path.write_text(result.to_csv())
    meta = sidecar_path(csv_path)
    meta.write_text(json.dumps(result.metadata, indent=2, sort_keys=True) + "\n")
    return csv_path, meta
