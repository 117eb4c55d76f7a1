"""Grid sweeps behind the service endpoints and the CLI subcommands."""

from __future__ import annotations

import math

from . import delay
from .channel import ChannelModel, link_from_distance, snr_from_distance
from .handover import HandoverScenario, SwitchOptimum, optimize_switch_time
from .timing import BackoffPolicy, TimingProfile


def _grid(start: float, stop: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("step must be > 0")
    if stop < start:
        raise ValueError("stop must be >= start")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [start + k * step for k in range(n + 1)]


def delay_sweep_rows(
    profile: TimingProfile,
    policy: BackoffPolicy,
    p_ack: float,
    n_packets: int,
    modes: list[str],
    start: float,
    stop: float,
    step: float,
) -> list[dict]:
    """One row per (erasure grid point, mode); divergent cells carry inf."""
    if not modes:
        raise ValueError("mode list must not be empty")
    for mode in modes:
        if mode not in delay.MODES:
            raise ValueError(f"unknown mode {mode!r}; expected one of {delay.MODES}")
    rows = []
    for p_e in _grid(start, stop, step):
        link = delay.LinkReliability(p_e=p_e, p_ack=p_ack)
        for mode in modes:
            try:
                t = delay.expected_time(
                    mode, profile, policy, link, n_packets,
                    nc_optimized=(mode == delay.MODE_NC_BROADCAST),
                )
                thr = delay.throughput(n_packets, t)
            except delay.DelayDivergesError:
                t, thr = math.inf, 0.0
            rows.append(
                {
                    "p_e": p_e,
                    "mode": mode,
                    "expected_time_s": t,
                    "throughput_pps": thr,
                }
            )
    return rows


def distance_sweep_rows(
    profile: TimingProfile,
    policy: BackoffPolicy,
    channel: ChannelModel,
    p_ack: float,
    n_packets: int,
    modes: list[str],
    start: float,
    stop: float,
    step: float,
    two_ap_mirror: bool = False,
) -> list[dict]:
    """Delay/throughput vs distance; mirrored negative rows map to the second AP."""
    if not modes:
        raise ValueError("mode list must not be empty")
    if start <= 0:
        raise ValueError("distance grid must start above 0 (path loss diverges)")
    rows = []
    distances = _grid(start, stop, step)
    signed: list[tuple[float, float]] = [(d, d) for d in distances]
    if two_ap_mirror:
        signed = [(-d, d) for d in reversed(distances)] + signed
    for d_signed, d in signed:
        snr = snr_from_distance(channel, d)
        link = link_from_distance(channel, d, p_ack)
        for mode in modes:
            try:
                t = delay.expected_time(
                    mode, profile, policy, link, n_packets,
                    nc_optimized=(mode == delay.MODE_NC_BROADCAST),
                )
                thr = delay.throughput(n_packets, t)
            except delay.DelayDivergesError:
                t, thr = math.inf, 0.0
            rows.append(
                {
                    "d_m": d_signed,
                    "snr_db": 10 * math.log10(snr),
                    "p_e": link.p_e,
                    "mode": mode,
                    "expected_time_s": t,
                    "throughput_pps": thr,
                }
            )
    return rows


def handover_rows(
    scenario: HandoverScenario, grid_points: int = 1000
) -> tuple[dict, list[dict], SwitchOptimum]:
    """Optimize the switch time; return the decision row and objective curve."""
    result = optimize_switch_time(scenario, grid_points=grid_points)
    d = result.decision
    decision_row = {
        "t_star_s": d.t_star,
        "d1_m": d.d1_at_t_star,
        "d2_m": d.d2_at_t_star,
        "objective": d.objective_value,
        "coded_tx_start_distance_m": d.coded_tx_start_distance,
    }
    curve = [
        {"t_switch_s": t, "objective": v}
        for t, v in zip(result.grid_times, result.grid_objectives)
    ]
    return decision_row, curve, result
