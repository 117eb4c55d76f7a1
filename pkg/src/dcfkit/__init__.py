"""dcfkit: delay/throughput models for 802.11 DCF modes and handover planning."""

from .chain import AbsorbingChain, expected_absorption_time, simulate_absorption
from .channel import (
    ChannelModel,
    DistanceSpectrum,
    WIFI_HALF_RATE_SPECTRUM,
    link_from_distance,
    snr_from_distance,
)
from .delay import (
    DeliveryEstimate,
    LinkReliability,
    MODES,
    best_case_times,
    build_mode_chain,
    estimate,
    expected_time,
    throughput,
)
from .handover import (
    HandoverDecision,
    HandoverScenario,
    MobilityPath,
    optimize_switch_time,
    sum_rate_objective,
)
from .nc import CodedPlan, build_nc_chain, gf_rank_oracle, optimize_batch_sizes
from .timing import BackoffPolicy, TimingProfile, load_profile

__version__ = "0.1.0"

__all__ = [
    "AbsorbingChain",
    "BackoffPolicy",
    "ChannelModel",
    "CodedPlan",
    "DeliveryEstimate",
    "DistanceSpectrum",
    "HandoverDecision",
    "HandoverScenario",
    "LinkReliability",
    "MODES",
    "MobilityPath",
    "TimingProfile",
    "WIFI_HALF_RATE_SPECTRUM",
    "best_case_times",
    "build_mode_chain",
    "build_nc_chain",
    "estimate",
    "expected_absorption_time",
    "expected_time",
    "gf_rank_oracle",
    "link_from_distance",
    "load_profile",
    "optimize_batch_sizes",
    "optimize_switch_time",
    "simulate_absorption",
    "snr_from_distance",
    "sum_rate_objective",
    "throughput",
]
