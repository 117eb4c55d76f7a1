"""Bit-error and packet-erasure models tying SNR and distance to link quality.

Covers coherent BPSK over AWGN and flat Rayleigh fading, the truncated
union bound for the rate-1/2 convolutional code used by 802.11 (distance
spectrum driven), the packet erasure probability for B-bit packets, and
the power-law path loss snr = c * d^-eta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .delay import LinkReliability

SCHEME_BPSK_AWGN = "bpsk_awgn"
SCHEME_BPSK_RAYLEIGH = "bpsk_rayleigh"
SCHEME_CONV_BPSK_RAYLEIGH = "conv_bpsk_rayleigh"
SCHEMES = (SCHEME_BPSK_AWGN, SCHEME_BPSK_RAYLEIGH, SCHEME_CONV_BPSK_RAYLEIGH)


@dataclass(frozen=True)
class DistanceSpectrum:
    """Distance spectrum of a convolutional code, indexed from d_free.

    ``a[k]`` counts the error events at Hamming distance d_free+k and
    ``c[k]`` their total information-bit error weight.
    """

    d_free: int
    constraint_length: int
    k_c: int
    n_c: int
    a: tuple[float, ...]
    c: tuple[float, ...]

    def __post_init__(self):
        if self.d_free < 1 or self.constraint_length < 1:
            raise ValueError("d_free and constraint_length must be >= 1")
        if self.k_c < 1 or self.n_c < 1:
            raise ValueError("k_c and n_c must be >= 1")
        if len(self.a) != len(self.c):
            raise ValueError("a and c must have equal length")
        if any(x < 0 for x in self.a) or any(x < 0 for x in self.c):
            raise ValueError("spectrum weights must be >= 0")
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))

    @property
    def code_rate(self) -> float:
        return self.k_c / self.n_c


#: Rate-1/2, constraint length 7 convolutional code with generators
#: [133, 171] octal, as used by 802.11 OFDM PHYs.
WIFI_HALF_RATE_SPECTRUM = DistanceSpectrum(
    d_free=10,
    constraint_length=7,
    k_c=1,
    n_c=2,
    a=(11, 0, 38, 0, 193, 0, 1331, 0),
    c=(36, 0, 211, 0, 1404, 0, 11633, 0),
)


def load_spectrum(
    path: str | Path, d_free: int, constraint_length: int, k_c: int = 1, n_c: int = 2
) -> DistanceSpectrum:
    """Read a plain-text spectrum table with one ``delta a c`` row per line.

    Lines starting with ``#`` are skipped.  Rows must be consecutive in
    delta starting at d_free.
    """
    a: list[float] = []
    c: list[float] = []
    expect = d_free
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'delta a c', got {line!r}")
        delta = int(parts[0])
        if delta != expect:
            raise ValueError(
                f"{path}:{lineno}: delta {delta} out of order (expected {expect})"
            )
        a.append(float(parts[1]))
        c.append(float(parts[2]))
        expect += 1
    if not a:
        raise ValueError(f"{path}: no spectrum rows found")
    return DistanceSpectrum(
        d_free=d_free, constraint_length=constraint_length, k_c=k_c, n_c=n_c,
        a=tuple(a), c=tuple(c),
    )


@dataclass(frozen=True)
class ChannelModel:
    """Modulation/coding scheme plus packet length and path-loss law."""

    scheme: str
    packet_bits: int
    pathloss_c: float
    pathloss_exp: float = 2.0
    spectrum: DistanceSpectrum | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.packet_bits < 1:
            raise ValueError("packet_bits must be >= 1")
        if self.pathloss_c <= 0 or self.pathloss_exp <= 0:
            raise ValueError("pathloss_c and pathloss_exp must be > 0")
        if self.scheme == SCHEME_CONV_BPSK_RAYLEIGH and self.spectrum is None:
            object.__setattr__(self, "spectrum", WIFI_HALF_RATE_SPECTRUM)


def q_function(x: float) -> float:
    """Gaussian tail probability P[Z > x] via the complementary error function."""
    return 0.5 * math.erfc(x / math.sqrt(2))


def ber_bpsk_awgn(snr: float) -> float:
    """Coherent BPSK bit error rate without fading: Q(sqrt(2 snr))."""
    if snr < 0:
        raise ValueError("snr must be >= 0")
    return q_function(math.sqrt(2 * snr))


def ber_bpsk_rayleigh(snr: float) -> float:
    """Coherent BPSK bit error rate averaged over flat Rayleigh fading."""
    if snr < 0:
        raise ValueError("snr must be >= 0")
    return 0.5 * (1 - math.sqrt(snr / (1 + snr)))


def pairwise_error_rayleigh(delta: int, snr: float) -> float:
    """Error-event probability at Hamming distance delta under Rayleigh fading."""
    if delta < 1:
        raise ValueError("delta must be >= 1")
    if snr < 0:
        raise ValueError("snr must be >= 0")
    x = delta * snr
    return 0.5 * (1 - math.sqrt(x / (1 + x)))


def ber_conv_rayleigh(snr: float, spectrum: DistanceSpectrum) -> float:
    """Union-bound BER of a convolutional code under Rayleigh fading.

    Sums c(delta)/k_c * p2(delta) for delta from d_free to
    d_free + constraint_length, clamped to 1/2 since the bound is vacuous
    above that.
    """
    terms = min(len(spectrum.c), spectrum.constraint_length + 1)
    total = 0.0
    for k in range(terms):
        weight = spectrum.c[k]
        if weight == 0:
            continue
        total += weight / spectrum.k_c * pairwise_error_rayleigh(
            spectrum.d_free + k, snr
        )
    return min(0.5, total)


def per_from_ber(p_b: float, bits: int) -> float:
    """Packet erasure probability 1 - (1 - p_b)^B, computed in log space."""
    if not 0 <= p_b <= 1:
        raise ValueError("p_b must lie in [0, 1]")
    if bits < 1:
        raise ValueError("bits must be >= 1")
    if p_b == 1:
        return 1.0
    return -math.expm1(bits * math.log1p(-p_b))


def snr_from_distance(model: ChannelModel, d: float) -> float:
    """Average received SNR at distance d: c * d^-eta."""
    if d <= 0:
        raise ValueError("distance must be > 0")
    return model.pathloss_c * d**-model.pathloss_exp


def bit_error_rate(model: ChannelModel, snr: float) -> float:
    """Scheme-dispatched bit error rate at a given linear SNR."""
    if model.scheme == SCHEME_BPSK_AWGN:
        return ber_bpsk_awgn(snr)
    if model.scheme == SCHEME_BPSK_RAYLEIGH:
        return ber_bpsk_rayleigh(snr)
    return ber_conv_rayleigh(snr, model.spectrum)


def link_from_distance(
    model: ChannelModel, d: float, p_ack: float = 0.0
) -> LinkReliability:
    """Chain path loss -> BER -> packet erasure into a LinkReliability."""
    snr = snr_from_distance(model, d)
    p_b = bit_error_rate(model, snr)
    return LinkReliability(p_e=per_from_ber(p_b, model.packet_bits), p_ack=p_ack)
