"""MAC-layer timing constants and backoff arithmetic for 802.11 DCF models.

All durations are stored in seconds.  The preset profiles carry the
per-variant slot/SIFS/DIFS times and contention window bounds of the
802.11 MAC; the ACK is specified in bytes and converted to a duration
through a configurable control rate (default 1 Mb/s legacy rate).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

US = 1e-6  # microseconds -> seconds

GROWTH_LINEAR = "linear"
GROWTH_BINARY = "binary_exponential"
GROWTHS = (GROWTH_LINEAR, GROWTH_BINARY)

#: Default payload transmission time (seconds) used by the presets.
DEFAULT_T_P = 0.00144
#: Default rate (bits/s) at which the 14-byte ACK frame is sent.
DEFAULT_ACK_RATE = 1e6


@dataclass(frozen=True)
class TimingProfile:
    """MAC timing constants for one 802.11 variant.

    Durations are seconds; ``cw_min``/``cw_max`` are contention window
    bounds in slot units; ``ack_bytes`` is converted into a duration via
    ``ack_rate`` (bits/s).  ``t_rt`` is the round-trip component added to
    the post-batch wait of acknowledged broadcast.
    """

    t_slot: float
    sifs: float
    difs: float
    ack_bytes: int
    ack_rate: float
    t_p: float
    cw_min: int
    cw_max: int
    t_rt: float = 0.0

    def __post_init__(self):
        for name in ("t_slot", "sifs", "difs", "t_p", "t_rt"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.ack_bytes < 0:
            raise ValueError("ack_bytes must be >= 0")
        if self.ack_rate <= 0:
            raise ValueError("ack_rate must be > 0")
        if not 0 <= self.cw_min <= self.cw_max:
            raise ValueError("need 0 <= cw_min <= cw_max")

    @property
    def ack_duration(self) -> float:
        """Time to transmit the ACK frame, seconds."""
        return self.ack_bytes * 8 / self.ack_rate

    @property
    def t_w(self) -> float:
        """Acknowledgment-plus-round-trip wait after a broadcast batch."""
        return self.ack_duration + self.t_rt

    def with_overrides(self, **kwargs) -> "TimingProfile":
        return replace(self, **kwargs)

    def to_dict(self) -> dict:
        return {
            "t_slot": self.t_slot,
            "sifs": self.sifs,
            "difs": self.difs,
            "ack_bytes": self.ack_bytes,
            "ack_rate": self.ack_rate,
            "t_p": self.t_p,
            "cw_min": self.cw_min,
            "cw_max": self.cw_max,
            "t_rt": self.t_rt,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TimingProfile":
        return cls(**data)


# Slot/SIFS/DIFS in microseconds, ACK in bytes, CW bounds in slots.
_PRESETS = {
    "b":        dict(t_slot=20, sifs=10, difs=50, cw_min=31, cw_max=1023),
    "a":        dict(t_slot=9,  sifs=16, difs=34, cw_min=15, cw_max=1023),
    "g":        dict(t_slot=9,  sifs=10, difs=28, cw_min=15, cw_max=1023),
    "g_legacy": dict(t_slot=20, sifs=10, difs=50, cw_min=15, cw_max=1023),
}

PROFILE_VARIANTS = tuple(_PRESETS)


def load_profile(
    variant: str,
    *,
    t_p: float = DEFAULT_T_P,
    ack_rate: float = DEFAULT_ACK_RATE,
    t_rt: float = 0.0,
) -> TimingProfile:
    """Return the preset profile for an 802.11 variant (b, a, g, g_legacy)."""
    try:
        row = _PRESETS[variant]
    except KeyError:
        raise ValueError(
            f"unknown 802.11 variant {variant!r}; expected one of {PROFILE_VARIANTS}"
        ) from None
    return TimingProfile(
        t_slot=row["t_slot"] * US,
        sifs=row["sifs"] * US,
        difs=row["difs"] * US,
        ack_bytes=14,
        ack_rate=ack_rate,
        t_p=t_p,
        cw_min=row["cw_min"],
        cw_max=row["cw_max"],
        t_rt=t_rt,
    )


def expected_backoff_slots(window_max: int) -> float:
    """Mean of a uniform backoff draw from {0, ..., window_max}, in slots.

    Equals window_max / 2 exactly.
    """
    if window_max < 0:
        raise ValueError("window_max must be >= 0")
    return window_max / 2


def mean_frame_cycle(profile: TimingProfile) -> float:
    """DIFS + payload + SIFS + ACK: the full cycle of one acknowledged frame."""
    return profile.difs + profile.t_p + profile.sifs + profile.ack_duration


def first_window_time(profile: TimingProfile) -> float:
    """Mean duration of the first contention window (cw_min/2 slots)."""
    return expected_backoff_slots(profile.cw_min) * profile.t_slot


@dataclass(frozen=True)
class BackoffPolicy:
    """Contention window growth across retry stages 1..max_stage.

    Linear growth sets stage i's window to i*cw_min; binary-exponential
    doubles it as 2^(i-1)*(cw_min+1)-1.  Both are capped at cw_max.
    """

    max_stage: int
    growth: str = GROWTH_LINEAR

    def __post_init__(self):
        if self.max_stage < 1:
            raise ValueError("max_stage must be >= 1")
        if self.growth not in GROWTHS:
            raise ValueError(f"growth must be one of {GROWTHS}")

    def window_of(self, stage: int, profile: TimingProfile) -> int:
        """Contention window bound (slots) applied at a given retry stage."""
        if not 1 <= stage <= self.max_stage:
            raise ValueError(f"stage must be in 1..{self.max_stage}")
        if self.growth == GROWTH_LINEAR:
            window = stage * profile.cw_min
        else:
            window = 2 ** (stage - 1) * (profile.cw_min + 1) - 1
        return min(window, profile.cw_max)

    def mean_backoff_slots(self, stage: int, profile: TimingProfile) -> float:
        return expected_backoff_slots(self.window_of(stage, profile))

    def mean_backoff_time(self, stage: int, profile: TimingProfile) -> float:
        return self.mean_backoff_slots(stage, profile) * profile.t_slot
