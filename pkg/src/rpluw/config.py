"""Scenario configuration: Table-3 defaults, TOML loading and validation."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .channel import ChannelDomainError, EnvironmentProfile, SOUND_SPEED_PRESETS
from .protocol import PROTOCOLS, DodagConfig, NodeTimers, ProtocolError, TrickleParams


class ConfigError(ValueError):
    """A scenario file or override failed validation."""


# The published simulation conditions, verbatim.
TABLE3 = {
    "network_topology": "random position",
    "frequency_khz": 30.5,
    "deployment_area_m": (1000.0, 1000.0, 500.0),
    "channel": "underwater",
    "initial_node_energy_j": 50.0,
    "max_bandwidth_bps": 30000.0,
    "initial_sink_energy_j": 50000.0,
    "packet_size_bytes": 50,
    "number_of_nodes": (50, 100, 200),
    "dio_packet_bytes": 4,
    "node_speed_mps": (1.0, 5.0),
    "dao_packet_bytes": 4,
    "mobility_model": "random",
    "dao_ack_packet_bytes": 4,
    "mobile_fraction": 0.40,
    "dis_packet_bytes": 4,
    "tx_long_w": 1.3,
    "traffic_rate_pkt_s": (0.1, 0.2),
    "tx_short_w": 0.8,
    "memory_bytes": 12 * 1024 * 1024,
    "rx_w": 0.7,
    "sink_position_m": (500.0, 500.0, 0.0),
    "idle_w": 0.008,
    "antenna": "omni-directional",
    "aggregation_w": 0.22,
    "simulation_time_s": 600.0,
    "asn_comm_range_m": 150.0,
    "iterations": 10,
    "acoustic_range_m": 200.0,
    "channel_band_khz": (30.511, 30.581),
    "spreading_factor": 1.3,
}


@dataclass(frozen=True)
class EnergyConfig:
    node_initial_j: float = 50.0
    sink_initial_j: float = 50_000.0
    tx_long_w: float = 1.3
    tx_short_w: float = 0.8
    rx_w: float = 0.7
    idle_w: float = 0.008
    aggregation_w: float = 0.22
    long_tx_threshold_m: float = 100.0


@dataclass(frozen=True)
class RadioConfig:
    frequency_khz: float = 30.5
    band_khz: tuple = (30.511, 30.581)
    bandwidth_bps: float = 30000.0
    spreading_factor: float = 1.3
    acoustic_range_m: float = 200.0
    comm_range_m: float = 150.0
    snr_threshold_db: float = 10.0
    data_packet_bytes: int = 50
    control_packet_bytes: int = 4
    forced_loss: float = 0.0
    link_capacity_gate: bool = True
    # time-overlap collisions at the receiver; off only for oracle checks
    collisions: bool = True
    sound_speed_preset: str = "mackenzie-standard"
    processing_delay_s: float = 0.001
    queue_capacity: int = 16
    antenna: str = "omni-directional"
    memory_bytes: int = 12 * 1024 * 1024


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "table3-default"
    topology: str = "random position"
    area_m: tuple = (1000.0, 1000.0, 500.0)
    node_count: int = 50
    mobile_fraction: float = 0.40
    speed_range_mps: tuple = (1.0, 5.0)
    mobility_model: str = "random-waypoint"
    mobility_step_s: float = 1.0
    traffic_rate_lambda: float = 0.1
    traffic_start_s: float = 0.0
    sim_duration_s: float = 600.0
    iterations: int = 10
    sink_position: tuple = (500.0, 500.0, 0.0)
    rng_seed: int = 1
    protocol: str = "rpluw-swara"
    # "auto", a preset name, or a path to an assessment file
    weights: str = "auto"
    # explicit sensor positions; overrides random placement when given
    positions: tuple = ()
    # explicit mobile sensor ids; overrides mobile_fraction when given
    mobile_ids: tuple | None = None
    environment: EnvironmentProfile = field(default_factory=EnvironmentProfile)
    energy: EnergyConfig = field(default_factory=EnergyConfig)
    radio: RadioConfig = field(default_factory=RadioConfig)
    dodag: DodagConfig = field(default_factory=DodagConfig)

    def __post_init__(self):
        validate(self)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def _fail(field_name, msg):
    raise ConfigError(f"{field_name}: {msg}")


def validate(cfg: ScenarioConfig):
    if cfg.node_count < 1:
        _fail("node_count", "must be >= 1")
    if cfg.positions and len(cfg.positions) != cfg.node_count:
        _fail("positions", f"has {len(cfg.positions)} entries for node_count={cfg.node_count}")
    if not 0.0 <= cfg.mobile_fraction <= 1.0:
        _fail("mobile_fraction", "must lie in [0, 1]")
    lo, hi = cfg.speed_range_mps
    if not 0 < lo <= hi:
        _fail("speed_range_mps", "needs 0 < min <= max")
    if not cfg.traffic_rate_lambda > 0:
        _fail("traffic_rate_lambda", "must be > 0")
    if not cfg.sim_duration_s > 0:
        _fail("sim_duration_s", "must be > 0")
    if cfg.iterations < 1:
        _fail("iterations", "must be >= 1")
    if len(cfg.area_m) != 3 or min(cfg.area_m) <= 0:
        _fail("area_m", "needs three positive extents")
    if not cfg.mobility_step_s > 0:
        _fail("mobility_step_s", "must be > 0")
    if cfg.protocol not in PROTOCOLS:
        _fail("protocol", f"unknown variant {cfg.protocol!r}; choose from {', '.join(PROTOCOLS)}")
    if not isinstance(cfg.weights, str) or not cfg.weights:
        _fail("weights", "must be a preset name or a file path")
    if cfg.rng_seed < 0:
        _fail("rng_seed", "must be >= 0")
    if not _inside(cfg.sink_position, cfg.area_m):
        _fail("sink_position", "lies outside the deployment box")
    for i, p in enumerate(cfg.positions):
        if len(p) != 3 or not _inside(p, cfg.area_m):
            _fail(f"positions[{i}]", "lies outside the deployment box")
    r = cfg.radio
    if not 0.0 <= r.forced_loss <= 1.0:
        _fail("radio.forced_loss", "must lie in [0, 1]")
    if r.sound_speed_preset not in SOUND_SPEED_PRESETS:
        _fail("radio.sound_speed_preset", f"unknown preset {r.sound_speed_preset!r}")
    if not r.bandwidth_bps > 0:
        _fail("radio.bandwidth_bps", "must be > 0")
    if r.queue_capacity < 1:
        _fail("radio.queue_capacity", "must be >= 1")
    if not 1.0 <= r.spreading_factor <= 2.0:
        _fail("radio.spreading_factor", "must lie in [1, 2]")
    e = cfg.energy
    for name in ("node_initial_j", "sink_initial_j"):
        if not getattr(e, name) > 0:
            _fail(f"energy.{name}", "must be > 0")
    for name in ("tx_long_w", "tx_short_w", "rx_w", "idle_w", "aggregation_w"):
        if getattr(e, name) < 0:
            _fail(f"energy.{name}", "must be >= 0")


def _inside(p, box):
    return all(0.0 <= x <= b for x, b in zip(p, box))


def table3_default(**overrides) -> ScenarioConfig:
    return ScenarioConfig(**overrides)


PRESETS = {
    "table3-default": lambda: table3_default(),
    "table3-50": lambda: table3_default(name="table3-50", node_count=50),
    "table3-100": lambda: table3_default(name="table3-100", node_count=100),
    "table3-200": lambda: table3_default(name="table3-200", node_count=200),
}


def preset(name: str) -> ScenarioConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None


# ---------------------------------------------------------------- file loading

_SECTIONS = {
    "environment": EnvironmentProfile,
    "energy": EnergyConfig,
    "radio": RadioConfig,
    "dodag": DodagConfig,
}
_DODAG_SUB = {"trickle": TrickleParams, "timers": NodeTimers}


def _coerce(value, current, where):
    if isinstance(current, tuple) or (current is None and isinstance(value, list)):
        if not isinstance(value, list):
            _fail(where, f"expected a list, got {value!r}")
        return tuple(tuple(v) if isinstance(v, list) else v for v in value)
    if isinstance(current, bool):
        if not isinstance(value, bool):
            _fail(where, f"expected true/false, got {value!r}")
        return value
    if isinstance(current, float):
        if isinstance(value, str) and value.lower() in ("inf", "infinity"):
            return math.inf
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            _fail(where, f"expected a number, got {value!r}")
        return float(value)
    if isinstance(current, int):
        if not isinstance(value, int) or isinstance(value, bool):
            _fail(where, f"expected an integer, got {value!r}")
        return value
    if isinstance(current, str):
        if not isinstance(value, str):
            _fail(where, f"expected a string, got {value!r}")
        return value
    return value


def _build(cls, base, data: dict, where: str, nested=None):
    nested = nested or {}
    names = {f.name for f in dataclasses.fields(cls)}
    changes = {}
    for key, value in data.items():
        path = f"{where}.{key}" if where else key
        if key not in names:
            _fail(path, "unknown key")
        current = getattr(base, key)
        if key in nested:
            if not isinstance(value, dict):
                _fail(path, "expected a table")
            changes[key] = _build(nested[key], current, value, path)
        else:
            changes[key] = _coerce(value, current, path)
    try:
        return dataclasses.replace(base, **changes)
    except (ChannelDomainError, ProtocolError) as exc:
        _fail(where or "scenario", str(exc))


def from_mapping(data: dict, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Build a config from nested key/value data on top of ``base`` (Table 3 by default)."""
    data = dict(data)
    if base is None:
        base = preset(data.pop("preset")) if "preset" in data else table3_default()
    elif "preset" in data:
        data.pop("preset")
    scenario = dict(data.pop("scenario", {}))
    for key in list(data):
        if key not in _SECTIONS:
            scenario[key] = data.pop(key)
    section_changes = {}
    for key, value in data.items():
        if not isinstance(value, dict):
            _fail(key, "expected a table")
        nested = _DODAG_SUB if key == "dodag" else None
        section_changes[key] = _build(_SECTIONS[key], getattr(base, key), value, key, nested)
    cfg = dataclasses.replace(base, **section_changes) if section_changes else base
    return _build(ScenarioConfig, cfg, scenario, "")


def load(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    raw = path.read_text()  # OSError is an I/O failure, not a config one
    try:
        data = tomllib.loads(raw)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return from_mapping(data)


def dumps(cfg: ScenarioConfig) -> str:
    """Render a config as TOML that :func:`load` reads back to an equal object."""
    lines = ["[scenario]"]
    sections = []
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if f.name in _SECTIONS:
            sections.append((f.name, v))
        elif v is None:
            continue
        else:
            lines.append(f"{f.name} = {_toml_value(v)}")
    for name, obj in sections:
        sub = []
        lines.append("")
        lines.append(f"[{name}]")
        for f in dataclasses.fields(obj):
            v = getattr(obj, f.name)
            if dataclasses.is_dataclass(v):
                sub.append((f"{name}.{f.name}", v))
            else:
                lines.append(f"{f.name} = {_toml_value(v)}")
        for subname, subobj in sub:
            lines.append("")
            lines.append(f"[{subname}]")
            for f in dataclasses.fields(subobj):
                lines.append(f"{f.name} = {_toml_value(getattr(subobj, f.name))}")
    return "\n".join(lines) + "\n"


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return '"inf"'
        return repr(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (tuple, list)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot render {v!r}")
