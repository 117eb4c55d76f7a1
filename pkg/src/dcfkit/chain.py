"""Absorbing Markov chain engine.

Provides the exact expected time to absorption through the fundamental
matrix (a dense linear solve over the transient submatrix), plus a
vectorized Monte-Carlo sampler.  Every closed-form delay expression in
this package is cross-checked against this engine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ROW_SUM_TOL = 1e-12

#: Trials are simulated in fixed-size blocks; each block draws from its own
#: RNG stream derived from (seed, block index), so results do not depend on
#: how blocks are scheduled.
SIM_BLOCK = 4096


class ChainError(ValueError):
    """Invalid chain definition."""


class NonAbsorbingChainError(ChainError):
    """Absorption is not reachable from every transient state."""


class SingularChainError(ChainError):
    """The fundamental-matrix system is singular (absorption unreachable)."""


class SimulationAbortError(RuntimeError):
    """A simulated trial exceeded the max-step bound."""


@dataclass(frozen=True)
class AbsorbingChain:
    """Transient states of an absorbing chain.

    ``transition`` has shape (n, n+1): column j < n is the probability of
    moving to transient state j, the last column is the absorption mass.
    ``sojourn`` holds the expected time spent per visit to each state.
    Rows must sum to 1 within ROW_SUM_TOL.
    """

    transition: np.ndarray
    sojourn: np.ndarray
    start_state: int = 0
    allow_non_absorbing: bool = False

    def __post_init__(self):
        trans = np.atleast_2d(np.asarray(self.transition, dtype=float))
        soj = np.atleast_1d(np.asarray(self.sojourn, dtype=float))
        n = soj.shape[0]
        if trans.shape != (n, n + 1):
            raise ChainError(
                f"transition must be ({n}, {n + 1}) for {n} sojourn entries, "
                f"got {trans.shape}"
            )
        if np.any(trans < 0) or np.any(trans > 1):
            raise ChainError("transition probabilities must lie in [0, 1]")
        row_err = np.abs(trans.sum(axis=1) - 1.0)
        if row_err.max() > ROW_SUM_TOL:
            raise ChainError(
                f"row sums deviate from 1 by up to {row_err.max():.3e} "
                f"(tolerance {ROW_SUM_TOL:.0e})"
            )
        if np.any(soj < 0):
            raise ChainError("sojourn times must be >= 0")
        if not 0 <= self.start_state < n:
            raise ChainError("start_state out of range")
        trans.setflags(write=False)
        soj.setflags(write=False)
        object.__setattr__(self, "transition", trans)
        object.__setattr__(self, "sojourn", soj)
        if not self.allow_non_absorbing:
            self._check_absorbing()

    @property
    def n_transient(self) -> int:
        return self.sojourn.shape[0]

    def _check_absorbing(self):
        # BFS over reversed edges from states with direct absorption mass:
        # every transient state must reach absorption with positive prob.
        n = self.n_transient
        reach = self.transition[:, n] > 0
        edges = self.transition[:, :n] > 0
        frontier = np.flatnonzero(reach)
        while frontier.size:
            preds = np.flatnonzero(edges[:, frontier].any(axis=1) & ~reach)
            reach[preds] = True
            frontier = preds
        if not reach.all():
            bad = np.flatnonzero(~reach)
            raise NonAbsorbingChainError(
                f"absorption unreachable from transient state(s) {bad.tolist()}"
            )


def expected_absorption_time(chain: AbsorbingChain) -> float:
    """Exact expected total sojourn until absorption from the start state.

    Solves (I - Q) t = s where Q is the transient submatrix and s the
    sojourn vector.
    """
    n = chain.n_transient
    q = chain.transition[:, :n]
    try:
        t = np.linalg.solve(np.eye(n) - q, chain.sojourn)
    except np.linalg.LinAlgError as exc:
        raise SingularChainError(f"fundamental-matrix solve failed: {exc}") from exc
    return float(t[chain.start_state])


@dataclass(frozen=True)
class SimulationResult:
    mean: float
    std_err: float
    trials: int


def simulate_absorption(
    chain: AbsorbingChain,
    trials: int,
    seed: int,
    max_steps: int = 10**7,
    block: int = SIM_BLOCK,
) -> SimulationResult:
    """Monte-Carlo estimate of the expected absorption time.

    Deterministic for a fixed seed: trials run in fixed-size blocks whose
    RNG streams are derived from (seed, block index).  Raises
    SimulationAbortError if any trial is still unabsorbed after
    ``max_steps`` transitions.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = chain.n_transient
    cum = np.cumsum(chain.transition, axis=1)
    sojourn = chain.sojourn

    total = 0.0
    total_sq = 0.0
    n_blocks = (trials + block - 1) // block
    for b in range(n_blocks):
        size = min(block, trials - b * block)
        rng = np.random.default_rng(np.random.SeedSequence((seed, b)))
        state = np.full(size, chain.start_state, dtype=np.intp)
        times = np.zeros(size)
        alive = np.arange(size)
        steps = 0
        while alive.size:
            if steps >= max_steps:
                raise SimulationAbortError(
                    f"{alive.size} trial(s) unabsorbed after {max_steps} steps"
                )
            cur = state[alive]
            times[alive] += sojourn[cur]
            u = rng.random(alive.size)
            nxt = (cum[cur] < u[:, None]).sum(axis=1)
            absorbed = nxt == n
            state[alive] = np.where(absorbed, state[alive], nxt)
            alive = alive[~absorbed]
            steps += 1
        total += times.sum()
        total_sq += (times * times).sum()

    mean = total / trials
    if trials > 1:
        var = max(0.0, (total_sq - trials * mean * mean) / (trials - 1))
    else:
        var = 0.0
    return SimulationResult(
        mean=mean, std_err=float(np.sqrt(var / trials)), trials=trials
    )
