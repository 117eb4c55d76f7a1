"""Network-coded broadcast: dof chain, batch-size optimization, GF oracle.

The receiver's state is the number of degrees of freedom (dof) it still
needs; each round broadcasts a batch of coded packets sized by a per-state
policy.  Receiving k packets moves the state down by k, the batch ACK can
be lost, and absorption happens once the needed dof arrive.  A GF(2^8)
rank experiment backs the assumption that every received coded packet is
innovative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Callable, Mapping

import numpy as np

from .chain import AbsorbingChain
from .delay import DelayDivergesError, LinkReliability
from .timing import TimingProfile, first_window_time

BatchRule = Callable[[int], int] | Mapping[int, int]


def default_batch_rule(dof_needed: int) -> int:
    """Send exactly the missing dof (adaptive retransmission)."""
    return dof_needed


def _batch_for(rule: BatchRule, dof: int) -> int:
    n = rule[dof] if isinstance(rule, Mapping) else rule(dof)
    if n < 1:
        raise ValueError(f"batch size for dof state {dof} must be >= 1, got {n}")
    return int(n)


@dataclass(frozen=True)
class CodedPlan:
    """Per-dof-state batch sizes for delivering n_c degrees of freedom.

    ``batch_sizes[i-1]`` is the number of coded packets broadcast while the
    receiver still needs i dof.  When ``constrained_total`` is set the
    sizes must sum to it.
    """

    n_c: int
    batch_sizes: tuple[int, ...]
    constrained_total: int | None = None

    def __post_init__(self):
        if self.n_c < 1:
            raise ValueError("n_c must be >= 1")
        if len(self.batch_sizes) != self.n_c:
            raise ValueError("need one batch size per dof state 1..n_c")
        if any(n < 1 for n in self.batch_sizes):
            raise ValueError("batch sizes must be >= 1")
        if (
            self.constrained_total is not None
            and sum(self.batch_sizes) != self.constrained_total
        ):
            raise ValueError("batch sizes must sum to constrained_total")
        object.__setattr__(self, "batch_sizes", tuple(int(n) for n in self.batch_sizes))

    @classmethod
    def from_rule(cls, n_c: int, rule: BatchRule) -> "CodedPlan":
        return cls(n_c=n_c, batch_sizes=tuple(_batch_for(rule, i) for i in range(1, n_c + 1)))

    def batch_for(self, dof_needed: int) -> int:
        return self.batch_sizes[dof_needed - 1]


@dataclass(frozen=True)
class DofState:
    """A transient state of the coded chain: dof still needed and its batch."""

    dof_needed: int
    batch_for_state: int

    def __post_init__(self):
        if self.dof_needed < 1:
            raise ValueError("dof_needed must be >= 1")
        if self.batch_for_state < 1:
            raise ValueError("batch_for_state must be >= 1")


def batch_success_prob(n_batch: int, link: LinkReliability) -> float:
    """Probability a batch of n coded packets is delivered and acknowledged.

    Closed form (1 - p_e^n)(1 - p_ack); identical to summing the binomial
    over at least one packet getting through.
    """
    if n_batch < 1:
        raise ValueError("n_batch must be >= 1")
    return (1 - link.p_e**n_batch) * (1 - link.p_ack)


def batch_success_prob_sum(n_batch: int, link: LinkReliability) -> float:
    """Binomial-sum form of batch_success_prob, kept as a test identity."""
    if n_batch < 1:
        raise ValueError("n_batch must be >= 1")
    return sum(
        math.comb(n_batch, j) * (1 - link.p_e) ** j * link.p_e ** (n_batch - j)
        for j in range(1, n_batch + 1)
    ) * (1 - link.p_ack)


def dof_transition_prob(i: int, j: int, n_i: int, link: LinkReliability) -> float:
    """Probability the receiver drops from needing i dof to needing j.

    Exactly i-j of the n_i packets arrive and the ACK reporting it returns.
    Zero whenever more packets would be needed than were sent.
    """
    if j >= i:
        raise ValueError("transitions must reduce the needed dof (j < i)")
    if j < 1:
        raise ValueError("j must be >= 1")
    if n_i < 1:
        raise ValueError("n_i must be >= 1")
    k = i - j
    if k > n_i:
        return 0.0
    return (
        math.comb(n_i, k)
        * (1 - link.p_e) ** k
        * link.p_e ** (n_i - k)
        * (1 - link.p_ack)
    )


def dof_selfloop_prob(n_i: int, link: LinkReliability) -> float:
    """Probability a round makes no acknowledged progress."""
    if n_i < 1:
        raise ValueError("n_i must be >= 1")
    return (1 - link.p_ack) * link.p_e**n_i + link.p_ack


def dof_absorb_prob(i: int, n_i: int, link: LinkReliability) -> float:
    """Probability a round delivers all remaining dof (k >= i arrivals, ACK ok)."""
    if i < 1 or n_i < 1:
        raise ValueError("i and n_i must be >= 1")
    total = sum(
        math.comb(n_i, k) * (1 - link.p_e) ** k * link.p_e ** (n_i - k)
        for k in range(i, n_i + 1)
    )
    return total * (1 - link.p_ack)


def round_time(n_batch: int, profile: TimingProfile) -> float:
    """Airtime of one coded round: batch payloads, spacing, contention, wait."""
    return (
        n_batch * profile.t_p
        + first_window_time(profile)
        + profile.difs
        + profile.t_w
        + n_batch * profile.sifs
    )


def build_nc_chain(
    plan: CodedPlan,
    profile: TimingProfile,
    link: LinkReliability,
    batch_rule: BatchRule | None = None,
) -> AbsorbingChain:
    """Absorbing chain over dof states n_c..1.

    State index s holds dof level i = n_c - s, so the start state is index
    0 at dof n_c.  An optional batch_rule overrides the plan's sizes.
    """
    n_c = plan.n_c
    batches = (
        [_batch_for(batch_rule, i) for i in range(1, n_c + 1)]
        if batch_rule is not None
        else list(plan.batch_sizes)
    )
    trans = np.zeros((n_c, n_c + 1))
    sojourn = np.zeros(n_c)
    for i in range(1, n_c + 1):
        s = n_c - i
        n_i = batches[i - 1]
        sojourn[s] = round_time(n_i, profile)
        trans[s, s] = dof_selfloop_prob(n_i, link)
        for j in range(1, i):
            trans[s, n_c - j] = dof_transition_prob(i, j, n_i, link)
        trans[s, n_c] = dof_absorb_prob(i, n_i, link)
    return AbsorbingChain(trans, sojourn, start_state=0)


def _expected_times_by_state(
    batches: list[int], profile: TimingProfile, link: LinkReliability
) -> list[float]:
    """First-step recursion for E[T from dof state i], i = 1..len(batches).

    T_i = (round_i + sum_{j<i} p_{i->j} T_j) / (1 - p_{i->i}); equals the
    chain solve because transitions only move downward.
    """
    times = [0.0]
    for i in range(1, len(batches) + 1):
        n_i = batches[i - 1]
        stay = dof_selfloop_prob(n_i, link)
        if stay >= 1:
            raise DelayDivergesError(f"dof state {i} never makes progress")
        acc = round_time(n_i, profile)
        for j in range(1, i):
            acc += dof_transition_prob(i, j, n_i, link) * times[j]
        times.append(acc / (1 - stay))
    return times


def expected_time_coded(
    plan: CodedPlan, profile: TimingProfile, link: LinkReliability
) -> float:
    """Chain-exact expected time to deliver all n_c dof, via the recursion."""
    return _expected_times_by_state(list(plan.batch_sizes), profile, link)[plan.n_c]


def expected_time_coded_literal(
    plan: CodedPlan, profile: TimingProfile, link: LinkReliability
) -> float:
    """Single-lookahead evaluation of the coded delivery time, as printed.

    Computes T_i + sum_j p'_{i->j} T_j / batch_success for the start state,
    where the transition weight uses the erasure exponent n_i + i - j.  This
    is not the chain-exact value; see literal_vs_chain_report.
    """
    i = plan.n_c
    n_i = plan.batch_for(i)
    denom = batch_success_prob(n_i, link)
    if denom == 0:
        raise DelayDivergesError("batch success probability is 0")

    def t_state(j: int) -> float:
        n_j = plan.batch_for(j)
        d = batch_success_prob(n_j, link)
        if d == 0:
            raise DelayDivergesError("batch success probability is 0")
        return round_time(n_j, profile) / d

    total = t_state(i)
    cross = 0.0
    for j in range(1, i):
        cross += (
            math.comb(n_i, i - j)
            * (1 - link.p_e) ** (i - j)
            * link.p_e ** (n_i + i - j)
            * t_state(j)
        )
    return total + cross / denom


def literal_vs_chain_report(
    plan: CodedPlan, profile: TimingProfile, link: LinkReliability
) -> dict:
    """Report the literal evaluator against the chain-exact ground truth."""
    from .chain import expected_absorption_time

    exact = expected_absorption_time(build_nc_chain(plan, profile, link))
    literal = expected_time_coded_literal(plan, profile, link)
    return {
        "chain_exact": exact,
        "literal": literal,
        "abs_deviation": abs(literal - exact),
        "rel_deviation": abs(literal - exact) / exact if exact else 0.0,
    }


def optimize_batch_sizes(
    n_c: int,
    profile: TimingProfile,
    link: LinkReliability,
    constraint: int | None = None,
    n_max: int | None = None,
) -> tuple[CodedPlan, float]:
    """Pick per-state batch sizes minimizing the expected completion time.

    Unconstrained: exact dynamic programming from dof state 1 upward (state
    i's time depends only on its own batch and the already-optimal lower
    states), ties broken toward the smaller batch.  With a total-packet
    constraint: exhaustive search over compositions for n_c <= 6, otherwise
    a marginal-gain greedy.
    """
    if n_c < 1:
        raise ValueError("n_c must be >= 1")
    if n_max is None:
        n_max = 4 * n_c

    if constraint is None:
        times = [0.0]
        batches: list[int] = []
        for i in range(1, n_c + 1):
            best_t, best_n = math.inf, None
            for n_i in range(1, n_max + 1):
                stay = dof_selfloop_prob(n_i, link)
                if stay >= 1:
                    continue
                acc = round_time(n_i, profile)
                for j in range(1, i):
                    acc += dof_transition_prob(i, j, n_i, link) * times[j]
                t = acc / (1 - stay)
                if t < best_t - 1e-15:
                    best_t, best_n = t, n_i
            if best_n is None:
                raise DelayDivergesError(f"no feasible batch size for dof state {i}")
            times.append(best_t)
            batches.append(best_n)
        plan = CodedPlan(n_c=n_c, batch_sizes=tuple(batches))
        return plan, times[n_c]

    if constraint < n_c:
        raise ValueError(
            f"total of {constraint} packets cannot cover {n_c} states at >= 1 each"
        )

    def completion(batches: tuple[int, ...]) -> float:
        return _expected_times_by_state(list(batches), profile, link)[n_c]

    if n_c <= 6:
        best = None
        spare = constraint - n_c
        for extra in product(range(spare + 1), repeat=n_c):
            if sum(extra) != spare:
                continue
            batches = tuple(1 + e for e in extra)
            t = completion(batches)
            if best is None or t < best[0] - 1e-15:
                best = (t, batches)
        t, batches = best
    else:
        sizes = [1] * n_c
        t = completion(tuple(sizes))
        for _ in range(constraint - n_c):
            best = None
            for s in range(n_c):
                sizes[s] += 1
                cand = completion(tuple(sizes))
                sizes[s] -= 1
                if best is None or cand < best[0] - 1e-15:
                    best = (cand, s)
            t, s = best[0], best[1]
            sizes[s] += 1
        batches = tuple(sizes)
    plan = CodedPlan(n_c=n_c, batch_sizes=batches, constrained_total=constraint)
    return plan, t


# --- GF(2^8) rank oracle -----------------------------------------------------

_GF_POLY = 0x11D  # x^8 + x^4 + x^3 + x^2 + 1


def _gf256_tables() -> tuple[np.ndarray, np.ndarray]:
    exp = np.zeros(510, dtype=np.int32)
    log = np.zeros(256, dtype=np.int32)
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & 0x100:
            x ^= _GF_POLY
    exp[255:510] = exp[0:255]
    return exp, log


_GF_EXP, _GF_LOG = _gf256_tables()


def _gf256_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = _GF_EXP[_GF_LOG[a] + _GF_LOG[b]]
    return np.where((a == 0) | (b == 0), 0, out).astype(np.int32)


def _batch_rank_gf256(mats: np.ndarray) -> np.ndarray:
    """Rank of each matrix in a (trials, rows, cols) batch over GF(2^8)."""
    a = mats.astype(np.int32).copy()
    trials, rows, cols = a.shape
    rank = np.zeros(trials, dtype=np.intp)
    row_idx = np.arange(rows)
    for col in range(cols):
        nz = (a[:, :, col] != 0) & (row_idx[None, :] >= rank[:, None])
        has = nz.any(axis=1)
        t = np.flatnonzero(has)
        if t.size == 0:
            continue
        pos = np.argmax(nz[t], axis=1)
        top = rank[t]
        swap_a = a[t, pos, :].copy()
        a[t, pos, :] = a[t, top, :]
        a[t, top, :] = swap_a
        pivot = a[t, top, :]
        inv = _GF_EXP[255 - _GF_LOG[pivot[:, col]]]
        factor = _gf256_mul(a[t][:, :, col], inv[:, None])
        factor[row_idx[None, :] <= top[:, None]] = 0
        a[t] ^= _gf256_mul(factor[:, :, None], pivot[:, None, :])
        rank[t] += 1
    return rank


def _batch_rank_gf2(mats: np.ndarray) -> np.ndarray:
    a = (mats & 1).astype(np.int8).copy()
    trials, rows, cols = a.shape
    rank = np.zeros(trials, dtype=np.intp)
    row_idx = np.arange(rows)
    for col in range(cols):
        nz = (a[:, :, col] != 0) & (row_idx[None, :] >= rank[:, None])
        has = nz.any(axis=1)
        t = np.flatnonzero(has)
        if t.size == 0:
            continue
        pos = np.argmax(nz[t], axis=1)
        top = rank[t]
        swap_a = a[t, pos, :].copy()
        a[t, pos, :] = a[t, top, :]
        a[t, top, :] = swap_a
        pivot = a[t, top, :]
        factor = a[t][:, :, col]
        factor = factor.copy()
        factor[row_idx[None, :] <= top[:, None]] = 0
        a[t] ^= factor[:, :, None] & pivot[:, None, :]
        rank[t] += 1
    return rank


def gf_rank_oracle(
    n_c: int,
    n_sent: int,
    trials: int,
    seed: int,
    field_order: int = 256,
    block: int = 8192,
) -> float:
    """Empirical probability that n_sent random coefficient vectors span n_c dof.

    Draws uniformly random n_sent x n_c coefficient matrices over the field
    and Gaussian-eliminates each; deterministic per seed.  n_c = 0 is the
    empty system and always decodable.
    """
    if n_c < 0:
        raise ValueError("n_c must be >= 0")
    if n_c == 0:
        return 1.0
    if n_sent < n_c:
        raise ValueError("need n_sent >= n_c")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if field_order not in (2, 256):
        raise ValueError("field_order must be 2 or 256")
    rank_fn = _batch_rank_gf256 if field_order == 256 else _batch_rank_gf2
    full = 0
    done = 0
    b = 0
    while done < trials:
        size = min(block, trials - done)
        rng = np.random.default_rng(np.random.SeedSequence((seed, b)))
        mats = rng.integers(0, field_order, size=(size, n_sent, n_c), dtype=np.int32)
        full += int((rank_fn(mats) == n_c).sum())
        done += size
        b += 1
    return full / trials
