"""Closed-form expected delivery times for the five DCF transmission modes.

Modes: per-packet unicast (full contention per packet), fragmented unicast
(contention only on loss), plain broadcast (no ACK), acknowledged batch
broadcast, and network-coded broadcast.  Each closed form has a matching
chain constructor so the absorbing-chain engine can serve as an
independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import AbsorbingChain
from .timing import BackoffPolicy, TimingProfile, first_window_time, mean_frame_cycle

MODE_UNICAST = "unicast"
MODE_UNICAST_FRAG = "unicast_frag"
MODE_BROADCAST = "broadcast"
MODE_BROADCAST_ACK = "broadcast_ack"
MODE_NC_BROADCAST = "nc_broadcast"
MODES = (
    MODE_UNICAST,
    MODE_UNICAST_FRAG,
    MODE_BROADCAST,
    MODE_BROADCAST_ACK,
    MODE_NC_BROADCAST,
)


class DelayDivergesError(ValueError):
    """The success probability is zero, so the expected time is infinite."""


@dataclass(frozen=True)
class LinkReliability:
    """Packet erasure probability and ACK loss probability."""

    p_e: float
    p_ack: float = 0.0

    def __post_init__(self):
        if not 0 <= self.p_e <= 1:
            raise ValueError("p_e must lie in [0, 1]")
        if not 0 <= self.p_ack <= 1:
            raise ValueError("p_ack must lie in [0, 1]")

    @property
    def p_s(self) -> float:
        """Probability one packet and its ACK both get through."""
        return (1 - self.p_e) * (1 - self.p_ack)


@dataclass(frozen=True)
class DeliveryEstimate:
    mode: str
    n_packets: int
    expected_time: float
    throughput: float


def _stage_attempt_times(profile: TimingProfile, policy: BackoffPolicy) -> list[float]:
    """Per-stage attempt duration: frame cycle plus the stage's mean backoff."""
    tbar = mean_frame_cycle(profile)
    return [
        tbar + policy.mean_backoff_time(i, profile)
        for i in range(1, policy.max_stage + 1)
    ]


def time_first_packet(
    profile: TimingProfile, policy: BackoffPolicy, link: LinkReliability
) -> float:
    """Expected time to deliver one packet through the staged backoff.

    Sums the attempt cost over retry stages weighted by the failure
    probability, with the last stage retried geometrically.
    """
    p_s = link.p_s
    if p_s == 0:
        raise DelayDivergesError("p_s = 0: the packet is never delivered")
    ell = policy.max_stage
    q = 1 - p_s
    tbar = mean_frame_cycle(profile)
    total = 0.0
    for i in range(ell - 1):
        w = policy.mean_backoff_time(i + 1, profile)
        total += (tbar + w) * q**i
    total += (q ** (ell - 1) / p_s) * (
        tbar + policy.mean_backoff_time(ell, profile)
    )
    return total


def time_unicast(
    profile: TimingProfile, policy: BackoffPolicy, link: LinkReliability, n: int
) -> float:
    """Expected time for n packets, each paying the full contention cycle."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return n * time_first_packet(profile, policy, link)


def time_second_packet_frag(
    profile: TimingProfile, policy: BackoffPolicy, link: LinkReliability
) -> float:
    """Expected time per follow-up fragment.

    On success a fragment costs only SIFS + ACK + SIFS + payload; a loss
    drops the station back into the backoff ladder, shifting the failure
    sums up by one stage relative to the first packet.
    """
    p_s = link.p_s
    if p_s == 0:
        raise DelayDivergesError("p_s = 0: the fragment is never delivered")
    ell = policy.max_stage
    q = 1 - p_s
    tbar = mean_frame_cycle(profile)
    total = 2 * profile.sifs + profile.t_p + profile.ack_duration
    for i in range(1, ell):
        w = policy.mean_backoff_time(i, profile)
        total += (tbar + w) * q**i
    total += (q**ell / p_s) * (tbar + policy.mean_backoff_time(ell, profile))
    return total


def time_unicast_frag(
    profile: TimingProfile, policy: BackoffPolicy, link: LinkReliability, n: int
) -> float:
    """First packet at full cost plus n-1 fragments at the reduced cycle."""
    if n < 1:
        raise ValueError("n must be >= 1")
    first = time_first_packet(profile, policy, link)
    if n == 1:
        return first
    return first + (n - 1) * time_second_packet_frag(profile, policy, link)


def time_broadcast(profile: TimingProfile, link: LinkReliability, n: int) -> float:
    """Expected time for n broadcast packets (no ACK; per-packet success 1-p_e)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if link.p_e >= 1:
        raise DelayDivergesError("p_e = 1: broadcast never completes")
    num = (
        n * profile.t_p
        + (n - 1) * profile.sifs
        + profile.difs
        + first_window_time(profile)
    )
    return num / (1 - link.p_e)


def time_broadcast_ack(profile: TimingProfile, link: LinkReliability, n: int) -> float:
    """Expected time for an acknowledged batch of n broadcast packets.

    The whole batch is retried until at least one packet gets through and
    the batch ACK returns; the per-try success is (1-p_e^n)(1-p_ack).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    p = (1 - link.p_e**n) * (1 - link.p_ack)
    if p == 0:
        raise DelayDivergesError("batch success probability is 0")
    num = (
        n * profile.t_p
        + n * profile.sifs
        + profile.difs
        + first_window_time(profile)
        + profile.t_w
    )
    return num / p


def best_case_times(profile: TimingProfile, n: int) -> dict[str, float]:
    """Erasure-free delivery times for a station that already won the medium.

    One DIFS + first contention window, then n payloads with the
    mode-specific inter-frame spacing.  The unicast-broadcast gap is
    exactly n*ACK + SIFS; fragmentation adds another (n-1)*SIFS.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    base = n * profile.t_p + profile.difs + first_window_time(profile)
    ack = profile.ack_duration
    return {
        MODE_BROADCAST: base + (n - 1) * profile.sifs,
        MODE_UNICAST: base + n * profile.sifs + n * ack,
        MODE_UNICAST_FRAG: base + (2 * n - 1) * profile.sifs + n * ack,
    }


def throughput(n_packets: int, expected_time: float) -> float:
    """Delivered packets per second of expected completion time."""
    if expected_time <= 0:
        raise ValueError("expected_time must be > 0")
    return n_packets / expected_time


def expected_time(
    mode: str,
    profile: TimingProfile,
    policy: BackoffPolicy,
    link: LinkReliability,
    n: int,
    nc_optimized: bool = False,
) -> float:
    """Dispatch to the closed form for a transmission mode."""
    if mode == MODE_UNICAST:
        return time_unicast(profile, policy, link, n)
    if mode == MODE_UNICAST_FRAG:
        return time_unicast_frag(profile, policy, link, n)
    if mode == MODE_BROADCAST:
        return time_broadcast(profile, link, n)
    if mode == MODE_BROADCAST_ACK:
        return time_broadcast_ack(profile, link, n)
    if mode == MODE_NC_BROADCAST:
        from . import nc

        if nc_optimized:
            _, t = nc.optimize_batch_sizes(n, profile, link)
            return t
        plan = nc.CodedPlan.from_rule(n, nc.default_batch_rule)
        return nc.expected_time_coded(plan, profile, link)
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def estimate(
    mode: str,
    profile: TimingProfile,
    policy: BackoffPolicy,
    link: LinkReliability,
    n: int,
    nc_optimized: bool = False,
) -> DeliveryEstimate:
    t = expected_time(mode, profile, policy, link, n, nc_optimized=nc_optimized)
    return DeliveryEstimate(
        mode=mode, n_packets=n, expected_time=t, throughput=throughput(n, t)
    )


def _unicast_stage_chain(
    profile: TimingProfile, policy: BackoffPolicy, p_s: float
) -> tuple[np.ndarray, list[float]]:
    """One packet's backoff ladder: stage i fails forward, last self-loops."""
    ell = policy.max_stage
    attempt = _stage_attempt_times(profile, policy)
    rows = np.zeros((ell, ell + 1))
    for i in range(ell):
        rows[i, ell] = p_s
        if i < ell - 1:
            rows[i, i + 1] = 1 - p_s
        else:
            rows[i, i] = 1 - p_s
    return rows, attempt


def build_mode_chain(
    mode: str,
    profile: TimingProfile,
    policy: BackoffPolicy,
    link: LinkReliability,
    n: int,
) -> AbsorbingChain:
    """Build the absorbing chain whose exact solve equals the mode's closed form."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p_s = link.p_s
    ell = policy.max_stage

    if mode == MODE_UNICAST:
        # n copies of the backoff ladder in sequence.
        stage, attempt = _unicast_stage_chain(profile, policy, p_s)
        total = n * ell
        trans = np.zeros((total, total + 1))
        sojourn = np.zeros(total)
        for k in range(n):
            off = k * ell
            nxt = off + ell if k < n - 1 else total
            block = stage.copy()
            trans[off : off + ell, off : off + ell] = block[:, :ell]
            trans[off : off + ell, nxt] = block[:, ell]
            sojourn[off : off + ell] = attempt
        return AbsorbingChain(trans, sojourn, start_state=0)

    if mode == MODE_UNICAST_FRAG:
        # First packet: full ladder. Fragments 2..n: a direct-send state that
        # falls into the ladder only on loss.
        stage, attempt = _unicast_stage_chain(profile, policy, p_s)
        per_frag = ell + 1
        total = ell + (n - 1) * per_frag
        trans = np.zeros((total, total + 1))
        sojourn = np.zeros(total)
        nxt = ell if n > 1 else total
        trans[0:ell, 0:ell] = stage[:, :ell]
        trans[0:ell, nxt] = stage[:, ell]
        sojourn[0:ell] = attempt
        direct = 2 * profile.sifs + profile.t_p + profile.ack_duration
        for k in range(1, n):
            off = ell + (k - 1) * per_frag
            nxt = off + per_frag if k < n - 1 else total
            sojourn[off] = direct
            trans[off, nxt] = p_s
            trans[off, off + 1] = 1 - p_s
            ladder = off + 1
            trans[ladder : ladder + ell, ladder : ladder + ell] = stage[:, :ell]
            trans[ladder : ladder + ell, nxt] = stage[:, ell]
            sojourn[ladder : ladder + ell] = attempt
        return AbsorbingChain(trans, sojourn, start_state=0)

    if mode == MODE_BROADCAST:
        # One state per packet with a self-loop of p_e; the initial DIFS and
        # contention window ride on the first packet's sojourn.
        p_e = link.p_e
        if p_e >= 1:
            raise DelayDivergesError("p_e = 1: broadcast never completes")
        trans = np.zeros((n, n + 1))
        sojourn = np.zeros(n)
        for i in range(n):
            trans[i, i] = p_e
            trans[i, i + 1] = 1 - p_e
            sojourn[i] = profile.t_p + (
                profile.difs + first_window_time(profile) if i == 0 else profile.sifs
            )
        return AbsorbingChain(trans, sojourn, start_state=0)

    if mode == MODE_BROADCAST_ACK:
        p = (1 - link.p_e**n) * (1 - link.p_ack)
        if p == 0:
            raise DelayDivergesError("batch success probability is 0")
        num = (
            n * profile.t_p
            + n * profile.sifs
            + profile.difs
            + first_window_time(profile)
            + profile.t_w
        )
        trans = np.array([[1 - p, p]])
        return AbsorbingChain(trans, np.array([num]), start_state=0)

    if mode == MODE_NC_BROADCAST:
        from . import nc

        plan = nc.CodedPlan.from_rule(n, nc.default_batch_rule)
        return nc.build_nc_chain(plan, profile, link)

    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
