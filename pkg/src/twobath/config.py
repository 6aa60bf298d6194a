"""Plain-text ``key = value`` configuration files.

Example::

    # coupled pair, cold second bath
    m = 2
    omega0 = 1
    kappa = -1
    gamma1 = 0.01
    gamma2 = 0.01
    T1 = 1
    T2 = 0.25
    regime = high-t
    s = 1
    d = 6

Missing keys fall back to :data:`DEFAULTS`.
"""

from __future__ import annotations

import warnings
from collections.abc import Mapping
from pathlib import Path

from .errors import InvalidParameter
from .model import InitialState, Regime, SystemParams

PARAM_KEYS = ("m", "omega0", "kappa", "gamma1", "gamma2", "T1", "T2", "regime", "s", "d")

DEFAULTS = {
    "m": 2.0,
    "omega0": 1.0,
    "kappa": -1.0,
    "gamma1": 0.01,
    "gamma2": 0.01,
    "T1": 1.0,
    "T2": 0.25,
    "regime": "high-t",
    "s": 1.0,
    "d": 6.0,
}


def parse_config(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise InvalidParameter(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        if key not in PARAM_KEYS:
            raise InvalidParameter(f"{source}:{lineno}: unknown key {key!r}")
        if key == "regime":
            values[key] = Regime.parse(value).value
        else:
            try:
                values[key] = float(value)
            except ValueError:
                raise InvalidParameter(
                    f"{source}:{lineno}: {key} must be a number, got {value!r}"
                ) from None
    return values


def read_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidParameter(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))


def build_model(values: Mapping, warn: bool = True) -> tuple[SystemParams, InitialState]:
    """Split a merged key/value mapping into model objects (defaults fill gaps)."""
    merged = {**DEFAULTS, **{k: v for k, v in values.items() if v is not None}}
    unknown = set(merged) - set(PARAM_KEYS)
    if unknown:
        raise InvalidParameter(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    with warnings.catch_warnings():
        if not warn:
            warnings.simplefilter("ignore")
        params = SystemParams(
            m=merged["m"],
            omega0=merged["omega0"],
            kappa=merged["kappa"],
            gamma1=merged["gamma1"],
            gamma2=merged["gamma2"],
            T1=merged["T1"],
            T2=merged["T2"],
            regime=merged["regime"],
        )
    return params, InitialState(s=merged["s"], d=merged["d"])


def dump_config(params: SystemParams, init: InitialState) -> str:
    lines = [f"{k} = {v}" for k, v in params.as_dict().items()]
    lines += [f"s = {init.s!r}", f"d = {init.d!r}"]
    return "\n".join(lines) + "\n"
