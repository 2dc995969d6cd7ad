"""Flat key=value scenario configs, trace CSV files and metrics sidecars."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Mapping, Union

import numpy as np

from .controller import CONTROLLER_KINDS, ControllerConfig, ReferenceSignal
from .plant import DISTURBANCE_KINDS, DisturbanceModel, PendulumParams
from .reaching import SWITCH_KINDS, ReachingParams
from .simulator import TRACE_COLUMNS, Scenario, Trace
from .surfaces import SurfaceGains


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


_PLANT_KEYS = {k: k for k in ("mass_m", "length_l", "inertia_I", "gravity_g", "g_min")}
_REACHING_KEYS = {k: k for k in ("k1", "k2", "eps1", "eps2", "alpha", "switch", "delta")}

# section -> {config key: dataclass field}
SECTIONS = {
    "plant": _PLANT_KEYS,
    "model": _PLANT_KEYS,
    "disturbance": {k: k for k in ("kind", "amplitude", "onset_time", "frequency")},
    "controller": {k: k for k in ("kind", "pd_weight", "u_max")},
    "surface": {"kp": "kp", "ki": "ki", "kd": "kd", "lambda": "lam"},
    "reaching1": _REACHING_KEYS,
    "reaching2": _REACHING_KEYS,
    "reference": {"kind": "kind", "theta_ref": "theta_ref"},
    "sim": {k: k for k in ("theta0", "theta_dot0", "dt", "t_final", "label")},
}

ENUMS = {
    "disturbance.kind": DISTURBANCE_KINDS,
    "controller.kind": CONTROLLER_KINDS,
    "reaching1.switch": SWITCH_KINDS,
    "reaching2.switch": SWITCH_KINDS,
    "reference.kind": ("constant",),
}
STRINGS = {"sim.label"}


def is_numeric_key(key: str) -> bool:
    section, _, name = key.partition(".")
    return name in SECTIONS.get(section, {}) and key not in ENUMS and key not in STRINGS


def _parse_value(key: str, raw: str) -> Any:
    if key in STRINGS:
        if not (len(raw) >= 2 and raw[0] == raw[-1] == '"'):
            raise ConfigError(key, f"expected a quoted string, got {raw!r}")
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(key, f"bad quoted string: {exc}") from None
    if key in ENUMS:
        if raw not in ENUMS[key]:
            raise ConfigError(key, f"expected one of {', '.join(ENUMS[key])}, got {raw!r}")
        return raw
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(key, f"expected a decimal number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(key, f"value must be finite, got {raw!r}")
    return value


def parse_config(text: str) -> Scenario:
    values: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = _strip_comment(line)
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        section, _, name = key.partition(".")
        if name not in SECTIONS.get(section, {}):
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "duplicate key")
        values[key] = _parse_value(key, raw)
    return scenario_from_values(values)


def _strip_comment(line: str) -> str:
    # a '#' inside a quoted value is not a comment
    in_quote = escaped = False
    for i, ch in enumerate(line):
        if escaped:
            escaped = False
        elif ch == "\\" and in_quote:
            escaped = True
        elif ch == '"':
            in_quote = not in_quote
        elif ch == "#" and not in_quote:
            return line[:i].strip()
    return line.strip()


def _section(values: Mapping[str, Any], section: str) -> dict:
    fields = SECTIONS[section]
    return {fields[k.split(".", 1)[1]]: v for k, v in values.items()
            if k.split(".", 1)[0] == section}


def _build(section: str, cls, kwargs: dict):
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(section, str(exc)) from None


def scenario_from_values(values: Mapping[str, Any]) -> Scenario:
    """Build a Scenario from a flat {key: parsed value} mapping; absent keys take defaults."""
    for key in values:
        section, _, name = key.partition(".")
        if name not in SECTIONS.get(section, {}):
            raise ConfigError(key, "unknown key")
    plant = _build("plant", PendulumParams, _section(values, "plant"))
    model_kw = _section(values, "model")
    model = _build("model", PendulumParams, model_kw) if model_kw else None
    ctrl_kw = _section(values, "controller")
    ctrl_kw["surface_gains"] = _build("surface", SurfaceGains, _section(values, "surface"))
    ctrl_kw["reaching_first"] = _build("reaching1", ReachingParams, _section(values, "reaching1"))
    ctrl_kw["reaching_second"] = _build("reaching2", ReachingParams, _section(values, "reaching2"))
    return _build("sim", Scenario, dict(
        plant=plant,
        model=model,
        disturbance=_build("disturbance", DisturbanceModel, _section(values, "disturbance")),
        controller=_build("controller", ControllerConfig, ctrl_kw),
        reference=_build("reference", ReferenceSignal, _section(values, "reference")),
        **_section(values, "sim"),
    ))


def scenario_values(scenario: Scenario) -> dict[str, Any]:
    """Flatten a Scenario into {key: value}; inverse of `scenario_from_values`."""
    ctrl = scenario.controller
    objects = {
        "plant": scenario.plant,
        "model": scenario.model,
        "disturbance": scenario.disturbance,
        "controller": ctrl,
        "surface": ctrl.surface_gains,
        "reaching1": ctrl.reaching_first,
        "reaching2": ctrl.reaching_second,
        "reference": scenario.reference,
        "sim": scenario,
    }
    out = {}
    for section, fields in SECTIONS.items():
        obj = objects[section]
        if obj is None:
            continue
        for key, attr in fields.items():
            out[f"{section}.{key}"] = getattr(obj, attr)
    return out


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    return value


def dump_config(scenario: Scenario) -> str:
    lines = []
    for key, value in scenario_values(scenario).items():
        text = json.dumps(value) if key in STRINGS else format_value(value)
        lines.append(f"{key}={text}")
    return "\n".join(lines) + "\n"


def load_config(path: Union[str, Path]) -> Scenario:
    return parse_config(Path(path).read_text())


def write_key_values(path: Union[str, Path], items: Mapping[str, Any]) -> None:
    text = "".join(f"{k}={format_value(v)}\n" for k, v in items.items())
    Path(path).write_text(text)


def read_key_values(path: Union[str, Path]) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def write_trace_csv(trace: Trace, path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row in trace.data.tolist():
            w.writerow([repr(v) for v in row[:-1]] + [int(row[-1])])


def read_trace_csv(path: Union[str, Path], scenario: Scenario | None = None) -> Trace:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if tuple(header) != TRACE_COLUMNS:
            raise ValueError(f"unexpected trace header {header!r}")
        rows = [[float(v) for v in row] for row in r]
    return Trace(scenario if scenario is not None else Scenario(), np.array(rows, dtype=float))


def scenario_replace(scenario: Scenario, key: str, value: Any) -> Scenario:
    """Return a copy of ``scenario`` with one config key changed."""
    values = scenario_values(scenario)
    values[key] = value
    return scenario_from_values(values)


__all__ = [
    "ConfigError", "parse_config", "load_config", "dump_config", "scenario_values",
    "scenario_from_values", "scenario_replace", "write_trace_csv", "read_trace_csv",
    "write_key_values", "read_key_values", "is_numeric_key",
]
