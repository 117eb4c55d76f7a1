"""Scenario config files: flat key=value pairs under section headers.

Sections and keys are documented in the README; every command reads the
same file format and ignores sections it does not need.  Parse errors
carry line numbers where the underlying parser reports them.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

SWEEP_AXES = ("p_e", "distance", "time")


class ConfigError(ValueError):
    """Bad scenario config: unparseable text or invalid values."""


@dataclass
class ScenarioConfig:
    profile_variant: str = "g_legacy"
    t_p_s: float = 0.00144
    ack_rate_bps: float = 1e6
    t_rt_s: float = 0.0
    backoff_stages: int = 6
    backoff_growth: str = "linear"
    p_ack: float = 0.0
    n_packets: int = 10
    modes: list[str] = field(default_factory=list)
    sweep_axis: str | None = None
    sweep_start: float | None = None
    sweep_stop: float | None = None
    sweep_step: float | None = None
    scheme: str = "bpsk_rayleigh"
    packet_bits: int = 8000
    pathloss_c: float = 100000.0
    pathloss_exp: float = 2.0
    two_ap_mirror: bool = False
    ap1: tuple[float, float] = (0.0, 0.0)
    ap2: tuple[float, float] = (25.0, 0.0)
    path_kind: str = "linear_y_eq_x"
    waypoints: list[tuple[float, float]] = field(default_factory=list)
    velocity: float = 2.0
    tau: float = 10.0
    t1: float = 0.0
    t2: float = 25.0
    rate_mode: str = "shannon"
    n_c: int = 10
    grid_points: int = 1000
    seed: int = 1
    mc_trials: int = 20000
    gf_trials: int = 20000
    inject_fault: str | None = None


def _get(parser, section, key, cast, current):
    if not parser.has_option(section, key):
        return current
    raw = parser.get(section, key)
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc


def _point(raw: str) -> tuple[float, float]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 2:
        raise ValueError("expected 'x,y'")
    return (float(parts[0]), float(parts[1]))


def _points(raw: str) -> list[tuple[float, float]]:
    return [_point(chunk) for chunk in raw.split(";") if chunk.strip()]


def _bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _modes(raw: str) -> list[str]:
    return [m.strip() for m in raw.split(",") if m.strip()]


def parse_config(path: str | Path) -> ScenarioConfig:
    """Read a scenario config file into a ScenarioConfig."""
    text_path = Path(path)
    if not text_path.exists():
        raise ConfigError(f"config file not found: {text_path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text_path.read_text(), source=str(text_path))
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc

    cfg = ScenarioConfig()
    cfg.profile_variant = _get(parser, "profile", "variant", str, cfg.profile_variant)
    cfg.t_p_s = _get(parser, "profile", "t_p_s", float, cfg.t_p_s)
    cfg.ack_rate_bps = _get(parser, "profile", "ack_rate_bps", float, cfg.ack_rate_bps)
    cfg.t_rt_s = _get(parser, "profile", "t_rt_s", float, cfg.t_rt_s)

    cfg.backoff_stages = _get(parser, "backoff", "stages", int, cfg.backoff_stages)
    cfg.backoff_growth = _get(parser, "backoff", "growth", str, cfg.backoff_growth)

    cfg.p_ack = _get(parser, "link", "p_ack", float, cfg.p_ack)

    cfg.n_packets = _get(parser, "packets", "n", int, cfg.n_packets)
    cfg.modes = _get(parser, "modes", "list", _modes, cfg.modes)

    cfg.sweep_axis = _get(parser, "sweep", "axis", str, cfg.sweep_axis)
    cfg.sweep_start = _get(parser, "sweep", "start", float, cfg.sweep_start)
    cfg.sweep_stop = _get(parser, "sweep", "stop", float, cfg.sweep_stop)
    cfg.sweep_step = _get(parser, "sweep", "step", float, cfg.sweep_step)

    cfg.scheme = _get(parser, "channel", "scheme", str, cfg.scheme)
    cfg.packet_bits = _get(parser, "channel", "packet_bits", int, cfg.packet_bits)
    cfg.pathloss_c = _get(parser, "channel", "pathloss_c", float, cfg.pathloss_c)
    cfg.pathloss_exp = _get(parser, "channel", "pathloss_exp", float, cfg.pathloss_exp)
    cfg.two_ap_mirror = _get(
        parser, "channel", "two_ap_mirror", _bool, cfg.two_ap_mirror
    )

    cfg.ap1 = _get(parser, "handover", "ap1", _point, cfg.ap1)
    cfg.ap2 = _get(parser, "handover", "ap2", _point, cfg.ap2)
    cfg.path_kind = _get(parser, "handover", "path", str, cfg.path_kind)
    cfg.waypoints = _get(parser, "handover", "waypoints", _points, cfg.waypoints)
    cfg.velocity = _get(parser, "handover", "velocity", float, cfg.velocity)
    cfg.tau = _get(parser, "handover", "tau", float, cfg.tau)
    cfg.t1 = _get(parser, "handover", "t1", float, cfg.t1)
    cfg.t2 = _get(parser, "handover", "t2", float, cfg.t2)
    cfg.rate_mode = _get(parser, "handover", "rate_mode", str, cfg.rate_mode)
    cfg.n_c = _get(parser, "handover", "n_c", int, cfg.n_c)
    cfg.grid_points = _get(parser, "handover", "grid_points", int, cfg.grid_points)

    cfg.seed = _get(parser, "output", "seed", int, cfg.seed)
    cfg.mc_trials = _get(parser, "validate", "mc_trials", int, cfg.mc_trials)
    cfg.gf_trials = _get(parser, "validate", "gf_trials", int, cfg.gf_trials)
    cfg.inject_fault = _get(parser, "validate", "inject_fault", str, cfg.inject_fault)

    if cfg.sweep_axis is not None and cfg.sweep_axis not in SWEEP_AXES:
        raise ConfigError(
            f"[sweep] axis must be one of {SWEEP_AXES}, got {cfg.sweep_axis!r}"
        )
    return cfg


def require_sweep(cfg: ScenarioConfig, axis: str) -> tuple[float, float, float]:
    """Check the config carries exactly the requested sweep axis with a range."""
    if cfg.sweep_axis != axis:
        raise ConfigError(
            f"this command sweeps over {axis!r}; config has axis = {cfg.sweep_axis!r}"
        )
    if cfg.sweep_start is None or cfg.sweep_stop is None or cfg.sweep_step is None:
        raise ConfigError("[sweep] needs start, stop and step")
    if cfg.sweep_step <= 0:
        raise ConfigError("[sweep] step must be > 0")
    if cfg.sweep_stop < cfg.sweep_start:
        raise ConfigError("[sweep] stop must be >= start")
    return cfg.sweep_start, cfg.sweep_stop, cfg.sweep_step


def delay_sweep_payload(cfg: ScenarioConfig) -> dict:
    start, stop, step = require_sweep(cfg, "p_e")
    if not cfg.modes:
        raise ConfigError("[modes] list must not be empty")
    return {
        "profile": {
            "variant": cfg.profile_variant,
            "t_p_s": cfg.t_p_s,
            "ack_rate_bps": cfg.ack_rate_bps,
            "t_rt_s": cfg.t_rt_s,
        },
        "backoff": {"stages": cfg.backoff_stages, "growth": cfg.backoff_growth},
        "p_ack": cfg.p_ack,
        "n_packets": cfg.n_packets,
        "modes": cfg.modes,
        "sweep": {"start": start, "stop": stop, "step": step},
        "seed": cfg.seed,
    }


def distance_sweep_payload(cfg: ScenarioConfig) -> dict:
    start, stop, step = require_sweep(cfg, "distance")
    if not cfg.modes:
        raise ConfigError("[modes] list must not be empty")
    payload = delay_sweep_payload_base(cfg)
    payload["channel"] = {
        "scheme": cfg.scheme,
        "packet_bits": cfg.packet_bits,
        "pathloss_c": cfg.pathloss_c,
        "pathloss_exp": cfg.pathloss_exp,
    }
    payload["sweep"] = {"start": start, "stop": stop, "step": step}
    payload["two_ap_mirror"] = cfg.two_ap_mirror
    return payload


def delay_sweep_payload_base(cfg: ScenarioConfig) -> dict:
    return {
        "profile": {
            "variant": cfg.profile_variant,
            "t_p_s": cfg.t_p_s,
            "ack_rate_bps": cfg.ack_rate_bps,
            "t_rt_s": cfg.t_rt_s,
        },
        "backoff": {"stages": cfg.backoff_stages, "growth": cfg.backoff_growth},
        "p_ack": cfg.p_ack,
        "n_packets": cfg.n_packets,
        "modes": cfg.modes,
        "seed": cfg.seed,
    }


def handover_payload(cfg: ScenarioConfig) -> dict:
    if cfg.tau >= cfg.t2 - cfg.t1:
        raise ConfigError(
            f"tau = {cfg.tau} leaves no switch window inside [{cfg.t1}, {cfg.t2}]"
        )
    return {
        "ap1": list(cfg.ap1),
        "ap2": list(cfg.ap2),
        "path": {
            "kind": cfg.path_kind,
            "velocity": cfg.velocity,
            "t1": cfg.t1,
            "t2": cfg.t2,
            "waypoints": [list(p) for p in cfg.waypoints],
        },
        "tau": cfg.tau,
        "channel": {
            "scheme": cfg.scheme,
            "packet_bits": cfg.packet_bits,
            "pathloss_c": cfg.pathloss_c,
            "pathloss_exp": cfg.pathloss_exp,
        },
        "rate_mode": cfg.rate_mode,
        "n_c": cfg.n_c,
        "p_ack": cfg.p_ack,
        "profile": {
            "variant": cfg.profile_variant,
            "t_p_s": cfg.t_p_s,
            "ack_rate_bps": cfg.ack_rate_bps,
            "t_rt_s": cfg.t_rt_s,
        },
        "backoff": {"stages": cfg.backoff_stages, "growth": cfg.backoff_growth},
        "grid_points": cfg.grid_points,
        "seed": cfg.seed,
    }


def validate_payload(cfg: ScenarioConfig) -> dict:
    payload = {
        "seed": cfg.seed,
        "mc_trials": cfg.mc_trials,
        "gf_trials": cfg.gf_trials,
    }
    if cfg.inject_fault is not None:
        payload["inject_fault"] = cfg.inject_fault
    return payload
