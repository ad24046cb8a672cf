"""Scenario files: one YAML section per module, strict keys, printable defaults."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields
from typing import Any

import yaml

from .errors import ConfigError
from .radio import DEFAULT_MCS_TABLE, DEFAULT_PATHLOSS


@dataclass
class DeploymentSection:
    n_cells: int = 7
    k_dl: int = 5
    k_ul: int = 5
    isd_m: float = 500.0
    wrap_around: bool = False
    shadowing_db: float = 8.0
    min_distance_m: float = 35.0


@dataclass
class FrameSection:
    frame_len: int = 20
    sss_positions: list = field(default_factory=lambda: list(range(8)))
    sss_slots: str = "DDDDUUUU"
    dss_ratios: list = field(default_factory=lambda: [[2, 10], [3, 9], [4, 8], [5, 7],
                                                      [6, 6], [7, 5], [8, 4]])
    shifts_per_group: int = 8
    guard_at_switch: bool = False


@dataclass
class RadioSection:
    n_tx: int = 8
    n_rx: int = 2
    n_prb: int = 24
    scs_khz: float = 30.0
    p_dl_dbm: float = 46.0
    p_max_ue_dbm: float = 23.0
    alpha: float = 1.0
    p0_dbm: float = -103.0
    noise_figure_ue_db: float = 9.0
    noise_figure_bs_db: float = 5.0
    pathloss: dict = field(default_factory=lambda: {k: list(v) for k, v in DEFAULT_PATHLOSS.items()})
    mcs_table: list = field(default_factory=lambda: [list(e) for e in DEFAULT_MCS_TABLE])
    cqi_backoff_db: float = 1.0
    irc_covariance: str = "mean"


@dataclass
class TrafficSection:
    lambda_dl: float = 167.0
    lambda_ul: float = 334.0
    f_dl_bits: int = 400
    f_ul_bits: int = 400
    epsilon_ms: float = 10.0


@dataclass
class CoordinationSection:
    cli_range_dbm: list = field(default_factory=lambda: [-100.0, -60.0])
    hold_range_ms: list = field(default_factory=lambda: [0.0, 64.0])
    rho_dbm: float = -90.0
    xi_form: str = "literal"
    xn_delay_ms: float = 0.0
    scc_omega: int = 3
    est_rate_smoothing: float = 0.05


@dataclass
class SchedulerSection:
    pf_smoothing: float = 0.01
    pf_floor_bits: float = 1.0
    harq_rtt_slots: int = 4
    harq_max_tx: int = 4
    harq_processes: int = 8
    sss_preemption: bool = True


@dataclass
class EngineSection:
    horizon_tti: int = 200_000
    warmup_fraction: float = 0.01
    seed: int = 1
    seeds: list = field(default_factory=lambda: [1, 2, 3, 4, 5])
    scheme: str = "HFCS"
    schemes: list = field(default_factory=lambda: ["CFC", "HFCS", "NC", "SCC", "STATIC"])
    static_pattern: str = "DDDGUUUUUUDDDGUUUUUU"
    ue_window_tti: int = 200


SECTIONS = {
    "deployment": DeploymentSection,
    "frame": FrameSection,
    "radio": RadioSection,
    "traffic": TrafficSection,
    "coordination": CoordinationSection,
    "scheduler": SchedulerSection,
    "engine": EngineSection,
}

SCHEMES = ("HFCS", "NC", "SCC", "CFC", "STATIC")


@dataclass
class Scenario:
    deployment: DeploymentSection = field(default_factory=DeploymentSection)
    frame: FrameSection = field(default_factory=FrameSection)
    radio: RadioSection = field(default_factory=RadioSection)
    traffic: TrafficSection = field(default_factory=TrafficSection)
    coordination: CoordinationSection = field(default_factory=CoordinationSection)
    scheduler: SchedulerSection = field(default_factory=SchedulerSection)
    engine: EngineSection = field(default_factory=EngineSection)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    def replace(self, **sections) -> "Scenario":
        """Copy with some fields overridden, e.g. ``replace(engine={"horizon_tti": 100})``."""
        d = self.to_dict()
        for name, vals in sections.items():
            if name not in d:
                raise ConfigError(f"unknown section {name!r}")
            d[name].update(vals)
        return from_dict(d)


def _coerce(section: str, key: str, value: Any, default: Any):
    where = f"{section}.{key}"
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list, got {value!r}")
        return value
    if isinstance(default, dict):
        if not isinstance(value, dict):
            raise ConfigError(f"{where}: expected a mapping, got {value!r}")
        unknown = set(value) - set(default)
        if unknown:
            raise ConfigError(f"{where}: unknown key {sorted(unknown)[0]!r}")
        merged = dict(default)
        merged.update(value)
        return merged
    return value


def from_dict(data: dict | None) -> Scenario:
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a mapping of sections")
    for name in data:
        if name not in SECTIONS:
            raise ConfigError(f"unknown section {name!r}")
    built = {}
    for name, cls in SECTIONS.items():
        raw = data.get(name) or {}
        if not isinstance(raw, dict):
            raise ConfigError(f"section {name!r} must be a mapping")
        defaults = cls()
        known = {f.name for f in fields(cls)}
        for key in raw:
            if key not in known:
                raise ConfigError(f"unknown key {name}.{key}")
        kwargs = {k: _coerce(name, k, v, getattr(defaults, k)) for k, v in raw.items()}
        built[name] = cls(**kwargs)
    sc = Scenario(**built)
    validate(sc)
    return sc


def validate(sc: Scenario):
    d, f, r, t, c, s, e = (sc.deployment, sc.frame, sc.radio, sc.traffic,
                           sc.coordination, sc.scheduler, sc.engine)
    if d.n_cells < 1 or d.k_dl < 0 or d.k_ul < 0:
        raise ConfigError("deployment: n_cells must be >= 1 and UE counts >= 0")
    if len(f.sss_positions) != len(f.sss_slots):
        raise ConfigError("frame.sss_positions and frame.sss_slots differ in length")
    if r.irc_covariance not in ("mean",):
        raise ConfigError(f"radio.irc_covariance: unsupported value {r.irc_covariance!r}")
    if c.xi_form not in ("literal", "conventional"):
        raise ConfigError(f"coordination.xi_form: expected literal or conventional")
    if t.lambda_dl < 0 or t.lambda_ul < 0 or t.f_dl_bits <= 0 or t.f_ul_bits <= 0:
        raise ConfigError("traffic: rates must be >= 0 and packet sizes > 0")
    if e.horizon_tti <= 0 or not 0.0 <= e.warmup_fraction < 1.0:
        raise ConfigError("engine: horizon must be positive and warmup in [0, 1)")
    for name in [e.scheme, *e.schemes]:
        if name.upper() not in SCHEMES:
            raise ConfigError(f"engine: unknown scheme {name!r}")
    if s.harq_max_tx < 1 or s.harq_rtt_slots < 1 or s.harq_processes < 1:
        raise ConfigError("scheduler: HARQ parameters must be >= 1")
    n_dss = f.frame_len - len(f.sss_positions)
    if not 0 <= c.scc_omega <= n_dss:
        raise ConfigError(f"coordination.scc_omega must lie in [0, {n_dss}]")
    if len(e.static_pattern) != f.frame_len:
        raise ConfigError("engine.static_pattern length differs from frame.frame_len")
    if c.xn_delay_ms < 0:
        raise ConfigError("coordination.xn_delay_ms must be >= 0")
    for key in ("bs_ue", "ue_ue", "bs_bs"):
        if key not in r.pathloss or len(r.pathloss[key]) != 2:
            raise ConfigError(f"radio.pathloss.{key} must be [intercept_db, slope_db]")


def load(path) -> Scenario:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from None
    return from_dict(data)


def loads(text: str) -> Scenario:
    try:
        return from_dict(yaml.safe_load(text))
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from None
