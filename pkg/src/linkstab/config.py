"""Scenario and experiment configuration files (YAML or JSON)."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .channel import (
    ChannelModel,
    DeploymentScenario,
    Encoding,
    HardwareVariability,
    MEASURED_HW_COV,
    RadioModel,
    preset,
)

DEFAULT_SEED = 2010

SCENARIO_KEYS = ("pl_d0_db", "d0_m", "eta", "sigma_ch_db", "pt_dbm", "pn_dbm",
                 "payload_bytes", "encoding", "hw_enabled", "hw_cov")
_REQUIRED_SCENARIO_KEYS = SCENARIO_KEYS[:7]

KINDS = ("prr-sweep", "node-compare", "region", "relay-sweep", "entropy", "route-stability")

_DEFAULT_GRID = {"start": 1.0, "stop": 40.0, "step": 0.5}

# Per kind: parameter -> default; REQUIRED marks parameters without a default.
REQUIRED = object()
KIND_PARAMS = {
    "prr-sweep": {"distances": _DEFAULT_GRID, "sims": 1000, "nodes": 1, "confidence_level": 0.95},
    "node-compare": {"distances": _DEFAULT_GRID, "sims": 1000, "nodes": 10,
                     "confidence_level": 0.95},
    "region": {"upper": 0.8, "lower": 0.2, "d_max": 1000.0, "tol": 1e-3},
    "relay-sweep": {"l_sd": 40.0, "relay_distances": {"start": 1.0, "stop": 39.0, "step": 1.0},
                    "max_retx": 7, "fail_value": 8, "sims": 100, "confidence_level": 0.95},
    "entropy": {"trace": REQUIRED, "radio_range_m": REQUIRED, "feature": "mobility",
                "horizon_s": None},
    "route-stability": {"trace": REQUIRED, "radio_range_m": REQUIRED, "feature": "mobility",
                        "horizon_s": None, "routes": REQUIRED},
}
_TOP_LEVEL = ("kind", "seed", "out", "preset", "deployment")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _number(mapping, key, kind=float):
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return int(value)
    return float(value)


def scenario_from_mapping(mapping: dict, base: DeploymentScenario | None = None,
                          name: str | None = None) -> DeploymentScenario:
    """Build a scenario; keys override ``base`` and are all required without one."""
    unknown = sorted(set(mapping) - set(SCENARIO_KEYS) - {"preset", "name"})
    if unknown:
        raise ConfigError(unknown[0], "unknown scenario key")
    if base is None and "preset" in mapping:
        base = _preset_or_error(mapping["preset"], "preset")
    if base is None:
        for key in _REQUIRED_SCENARIO_KEYS:
            if key not in mapping:
                raise ConfigError(key, "missing required scenario field")
        base = DeploymentScenario(hardware=HardwareVariability(MEASURED_HW_COV, enabled=False))
    ch, radio, hw = base.channel, base.radio, base.hardware

    def pick(key, current, kind=float):
        return _number(mapping, key, kind) if key in mapping else current

    encoding = radio.encoding
    if "encoding" in mapping:
        try:
            encoding = Encoding(str(mapping["encoding"]).lower())
        except ValueError:
            raise ConfigError("encoding", f"unknown encoding {mapping['encoding']!r}") from None
    payload_bits = radio.payload_bits
    if "payload_bytes" in mapping:
        payload_bits = 8 * pick("payload_bytes", None, int)
    enabled = hw.enabled
    if "hw_enabled" in mapping:
        if not isinstance(mapping["hw_enabled"], bool):
            raise ConfigError("hw_enabled", "expected true or false")
        enabled = mapping["hw_enabled"]
    cov = hw.cov
    if "hw_cov" in mapping:
        try:
            cov = np.asarray(mapping["hw_cov"], dtype=float)
        except (TypeError, ValueError):
            raise ConfigError("hw_cov", "expected a 2x2 numeric matrix") from None
    try:
        return DeploymentScenario(
            channel=ChannelModel(pick("pl_d0_db", ch.pl_d0), pick("d0_m", ch.d0),
                                 pick("eta", ch.eta), pick("sigma_ch_db", ch.sigma_ch)),
            radio=RadioModel(pick("pt_dbm", radio.pt_nominal), pick("pn_dbm", radio.pn_nominal),
                             payload_bits, encoding, radio.modulation),
            hardware=_hardware(cov, enabled),
            name=str(mapping.get("name", name or base.name)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(_field_from_message(str(exc)), str(exc)) from None


def _hardware(cov, enabled):
    try:
        return HardwareVariability(cov, enabled)
    except ValueError as exc:
        raise ConfigError("hw_cov", str(exc)) from None


_MESSAGE_FIELDS = {"pl_d0": "pl_d0_db", "d0": "d0_m", "eta": "eta", "sigma_ch": "sigma_ch_db",
                   "payload_bits": "payload_bytes"}


def _field_from_message(message: str) -> str:
    head = message.split()[0]
    return _MESSAGE_FIELDS.get(head, head)


def _preset_or_error(name, field_name):
    try:
        return preset(str(name))
    except ValueError as exc:
        raise ConfigError(field_name, str(exc)) from None


def scenario_to_mapping(scenario: DeploymentScenario) -> dict:
    ch, radio, hw = scenario.channel, scenario.radio, scenario.hardware
    return {
        "pl_d0_db": ch.pl_d0, "d0_m": ch.d0, "eta": ch.eta, "sigma_ch_db": ch.sigma_ch,
        "pt_dbm": radio.pt_nominal, "pn_dbm": radio.pn_nominal,
        "payload_bytes": radio.payload_bits / 8, "encoding": radio.encoding.value,
        "hw_enabled": hw.enabled, "hw_cov": [list(r) for r in hw.cov],
    }


def read_mapping(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"cannot parse {path}: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must contain a mapping")
    return data


def load_scenario(path) -> DeploymentScenario:
    return scenario_from_mapping(read_mapping(path), name=Path(path).stem)


def parse_grid(value, key) -> tuple:
    """A list of distances or ``{start, stop, step}`` with an inclusive stop."""
    if isinstance(value, dict):
        missing = [k for k in ("start", "stop", "step") if k not in value]
        if missing:
            raise ConfigError(key, f"grid needs {', '.join(missing)}")
        start, stop, step = (_number(value, k) for k in ("start", "stop", "step"))
        if step <= 0 or stop < start:
            raise ConfigError(key, "grid needs step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + step * i for i in range(count))
    if isinstance(value, (list, tuple)) and value:
        try:
            return tuple(float(v) for v in value)
        except (TypeError, ValueError):
            raise ConfigError(key, "grid entries must be numbers") from None
    raise ConfigError(key, "expected a list of distances or a start/stop/step mapping")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    deployment: DeploymentScenario
    params: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    out: str | None = None

    def canonical(self) -> dict:
        return {"kind": self.kind, "seed": self.seed,
                "deployment": scenario_to_mapping(self.deployment),
                "params": _jsonable(self.params)}

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return value


def resolve_config(data: dict, *, kind=None, seed=None, out=None, preset_name=None,
                   base_dir=None) -> ExperimentConfig:
    """Merge file contents with command-line overrides (flag > file > preset)."""
    base_dir = Path(base_dir or ".")
    kind = kind or data.get("kind")
    if kind is None:
        raise ConfigError("kind", f"missing experiment kind; choose from {', '.join(KINDS)}")
    if kind not in KINDS:
        raise ConfigError("kind", f"unknown experiment kind {kind!r}")

    if seed is None:
        seed = data.get("seed", DEFAULT_SEED)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("seed", f"expected an unsigned 64-bit integer, got {seed!r}")

    dep_data = data.get("deployment", {})
    if isinstance(dep_data, str):
        dep_path = base_dir / dep_data
        dep_data = read_mapping(dep_path)
    if not isinstance(dep_data, dict):
        raise ConfigError("deployment", "expected a mapping or a scenario file path")
    preset_name = preset_name or data.get("preset") or dep_data.get("preset")
    if preset_name is None and not dep_data:
        preset_name = "indoor"
    base = _preset_or_error(preset_name, "preset") if preset_name else None
    deployment = scenario_from_mapping({k: v for k, v in dep_data.items() if k != "preset"},
                                       base=base)

    allowed = KIND_PARAMS[kind]
    extra = sorted(set(data) - set(_TOP_LEVEL) - set(allowed))
    if extra:
        raise ConfigError(extra[0], f"unknown parameter for kind {kind!r}")
    params = {}
    for key, default in allowed.items():
        if key in data:
            params[key] = data[key]
        elif default is REQUIRED:
            raise ConfigError(key, f"missing required parameter for kind {kind!r}")
        else:
            params[key] = default
    params = _validate_params(kind, params, base_dir)
    return ExperimentConfig(kind, deployment, params, int(seed), out or data.get("out"))


def _validate_params(kind, params, base_dir):
    out = dict(params)
    for key in ("distances", "relay_distances"):
        if key in out:
            out[key] = parse_grid(out[key], key)
    for key in ("sims", "nodes", "max_retx", "fail_value"):
        if key in out:
            out[key] = _number(out, key, int)
            if out[key] < 1:
                raise ConfigError(key, "must be at least 1")
    for key in ("confidence_level", "upper", "lower", "d_max", "tol", "l_sd", "radio_range_m"):
        if key in out:
            out[key] = _number(out, key)
    if out.get("horizon_s") is not None:
        out["horizon_s"] = _number(out, "horizon_s")
    if "feature" in out and out["feature"] not in ("mobility", "speed"):
        raise ConfigError("feature", "expected 'mobility' or 'speed'")
    if "trace" in out:
        out["trace"] = str(base_dir / str(out["trace"]))
    if "routes" in out:
        routes = out["routes"]
        if not isinstance(routes, list) or not all(isinstance(r, list) for r in routes):
            raise ConfigError("routes", "expected a list of node-id lists")
        out["routes"] = [list(r) for r in routes]
    return out


def trace_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]
