"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

Variant = Literal["b", "a", "g", "g_legacy"]
Growth = Literal["linear", "binary_exponential"]
Scheme = Literal["bpsk_awgn", "bpsk_rayleigh", "conv_bpsk_rayleigh"]
Mode = Literal["unicast", "unicast_frag", "broadcast", "broadcast_ack", "nc_broadcast"]


class ProfileSpec(BaseModel):
    variant: Variant = "g_legacy"
    t_p_s: float = Field(default=0.00144, gt=0)
    ack_rate_bps: float = Field(default=1e6, gt=0)
    t_rt_s: float = Field(default=0.0, ge=0)


class TimingProfileModel(BaseModel):
    t_slot: float
    sifs: float
    difs: float
    ack_bytes: int
    ack_rate: float
    t_p: float
    cw_min: int
    cw_max: int
    t_rt: float


class BackoffSpec(BaseModel):
    stages: int = Field(default=6, ge=1)
    growth: Growth = "linear"


class SweepRange(BaseModel):
    start: float
    stop: float
    step: float = Field(gt=0)


class ChannelSpec(BaseModel):
    scheme: Scheme = "bpsk_rayleigh"
    packet_bits: int = Field(default=8000, ge=1)
    pathloss_c: float = Field(default=100000.0, gt=0)
    pathloss_exp: float = Field(default=2.0, gt=0)


class DelaySweepRequest(BaseModel):
    profile: ProfileSpec = ProfileSpec()
    backoff: BackoffSpec = BackoffSpec()
    p_ack: float = Field(default=0.0, ge=0, le=1)
    n_packets: int = Field(default=10, ge=1)
    modes: list[Mode] = Field(min_length=1)
    sweep: SweepRange
    seed: int = 1


class DelayRow(BaseModel):
    p_e: float
    mode: str
    expected_time_s: Optional[float] = None  # None when the mode diverges
    throughput_pps: float


class DelaySweepResponse(BaseModel):
    rows: list[DelayRow]


class DistanceSweepRequest(BaseModel):
    profile: ProfileSpec = ProfileSpec()
    backoff: BackoffSpec = BackoffSpec()
    channel: ChannelSpec = ChannelSpec()
    p_ack: float = Field(default=0.0, ge=0, le=1)
    n_packets: int = Field(default=10, ge=1)
    modes: list[Mode] = Field(min_length=1)
    sweep: SweepRange
    two_ap_mirror: bool = False
    seed: int = 1


class DistanceRow(BaseModel):
    d_m: float
    snr_db: float
    p_e: float
    mode: str
    expected_time_s: Optional[float] = None
    throughput_pps: float


class DistanceSweepResponse(BaseModel):
    rows: list[DistanceRow]


class PathSpec(BaseModel):
    kind: Literal["linear_y_eq_x", "waypoint_list"] = "linear_y_eq_x"
    velocity: float = Field(gt=0)
    t1: float
    t2: float
    origin: tuple[float, float] = (0.0, 0.0)
    waypoints: list[tuple[float, float]] = []


class HandoverRequest(BaseModel):
    ap1: tuple[float, float]
    ap2: tuple[float, float]
    path: PathSpec
    tau: float = Field(default=0.0, ge=0)
    channel: ChannelSpec = ChannelSpec()
    rate_mode: Literal["shannon", "nc_throughput"] = "shannon"
    n_c: int = Field(default=10, ge=1)
    p_ack: float = Field(default=0.0, ge=0, le=1)
    profile: ProfileSpec = ProfileSpec()
    backoff: BackoffSpec = BackoffSpec()
    grid_points: int = Field(default=1000, ge=10)
    seed: int = 1


class CurvePoint(BaseModel):
    t_switch_s: float
    objective: float


class HandoverResponse(BaseModel):
    t_star_s: float
    d1_m: float
    d2_m: float
    objective: float
    coded_tx_start_distance_m: float
    near_optimal_times_s: list[float]
    curve: list[CurvePoint]


class ValidateRequest(BaseModel):
    seed: int = 1
    mc_trials: int = Field(default=20000, ge=100)
    gf_trials: int = Field(default=20000, ge=100)
    inject_fault: Optional[str] = None


class CheckModel(BaseModel):
    name: str
    passed: bool
    detail: str


class ValidateResponse(BaseModel):
    all_passed: bool
    checks: list[CheckModel]
    report_text: str
