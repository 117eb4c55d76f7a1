"""Two-AP mobility geometry, sum-rate switch-time optimization, and the
coded-handover protocol state machine.

The station moves along a known path at constant speed; each AP's rate at
time t follows from the station-AP distance through the channel model.
The switch time maximizes the cumulative rate received from AP1 before
the switch plus AP2 after a re-association gap of tau seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .channel import ChannelModel, link_from_distance, snr_from_distance
from .timing import BackoffPolicy, TimingProfile

PATH_LINEAR_DIAGONAL = "linear_y_eq_x"
PATH_WAYPOINTS = "waypoint_list"
PATH_PARAMETRIC = "parametric"

RATE_SHANNON = "shannon"
RATE_NC_THROUGHPUT = "nc_throughput"
RATE_MODES = (RATE_SHANNON, RATE_NC_THROUGHPUT)

#: Distances are floored here to keep the path-loss law finite at d = 0.
D_MIN = 0.1


@dataclass(frozen=True)
class MobilityPath:
    """Station trajectory at constant speed over an observation window.

    ``linear_y_eq_x`` advances along the diagonal from ``origin`` so that
    arc length equals velocity * t.  ``waypoint_list`` walks the polyline
    at the same constant speed, clamping at its ends.  ``parametric``
    delegates to ``position_fn(t)`` (the caller guarantees constant speed).
    """

    kind: str
    velocity: float
    t1: float
    t2: float
    origin: tuple[float, float] = (0.0, 0.0)
    waypoints: tuple[tuple[float, float], ...] = ()
    position_fn: Callable[[float], tuple[float, float]] | None = None

    def __post_init__(self):
        if self.kind not in (PATH_LINEAR_DIAGONAL, PATH_WAYPOINTS, PATH_PARAMETRIC):
            raise ValueError(f"unknown path kind {self.kind!r}")
        if self.velocity <= 0:
            raise ValueError("velocity must be > 0")
        if not self.t1 < self.t2:
            raise ValueError("need t1 < t2")
        if self.kind == PATH_WAYPOINTS and len(self.waypoints) < 2:
            raise ValueError("waypoint_list needs at least two waypoints")
        if self.kind == PATH_PARAMETRIC and self.position_fn is None:
            raise ValueError("parametric path needs position_fn")

    def position(self, t: float) -> tuple[float, float]:
        if self.kind == PATH_LINEAR_DIAGONAL:
            step = self.velocity * t / math.sqrt(2)
            return (self.origin[0] + step, self.origin[1] + step)
        if self.kind == PATH_PARAMETRIC:
            return self.position_fn(t)
        arc = self.velocity * t
        if arc <= 0:
            return self.waypoints[0]
        for (x0, y0), (x1, y1) in zip(self.waypoints, self.waypoints[1:]):
            seg = math.hypot(x1 - x0, y1 - y0)
            if arc <= seg:
                f = arc / seg
                return (x0 + f * (x1 - x0), y0 + f * (y1 - y0))
            arc -= seg
        return self.waypoints[-1]


def distance_to_ap(
    ap_pos: tuple[float, float], path: MobilityPath, t: float
) -> float:
    """Euclidean station-AP distance at time t within the observation window."""
    if not path.t1 <= t <= path.t2:
        raise ValueError(f"t = {t} outside observation window [{path.t1}, {path.t2}]")
    x, y = path.position(t)
    return math.hypot(ap_pos[0] - x, ap_pos[1] - y)


@dataclass(frozen=True)
class HandoverScenario:
    """Two AP positions, a mobility path, and the rate model to optimize."""

    ap1_pos: tuple[float, float]
    ap2_pos: tuple[float, float]
    path: MobilityPath
    tau: float
    channel: ChannelModel
    rate_mode: str = RATE_SHANNON
    n_c: int = 10
    p_ack: float = 0.0
    profile: TimingProfile | None = None
    policy: BackoffPolicy | None = None
    d_min: float = D_MIN

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.ap1_pos == self.ap2_pos:
            raise ValueError("AP positions must be distinct")
        if not self.path.t1 + self.tau < self.path.t2:
            raise ValueError("re-association delay leaves no feasible switch window")
        if self.rate_mode not in RATE_MODES:
            raise ValueError(f"rate_mode must be one of {RATE_MODES}")
        if self.rate_mode == RATE_NC_THROUGHPUT and self.profile is None:
            raise ValueError("nc_throughput rate needs a timing profile")


@dataclass(frozen=True)
class HandoverDecision:
    t_star: float
    d1_at_t_star: float
    d2_at_t_star: float
    coded_tx_start_distance: float
    objective_value: float


@dataclass(frozen=True)
class SwitchOptimum:
    """Optimizer output: the decision plus the coarse objective curve."""

    decision: HandoverDecision
    grid_times: tuple[float, ...]
    grid_objectives: tuple[float, ...]
    near_optimal_times: tuple[float, ...] = ()


def rate_at(scenario: HandoverScenario, ap_index: int, t: float) -> float:
    """Instantaneous rate from AP 1 or 2 at time t under the scenario's model."""
    if ap_index not in (1, 2):
        raise ValueError("ap_index must be 1 or 2")
    ap = scenario.ap1_pos if ap_index == 1 else scenario.ap2_pos
    d = max(scenario.d_min, distance_to_ap(ap, scenario.path, t))
    if scenario.rate_mode == RATE_SHANNON:
        return math.log1p(snr_from_distance(scenario.channel, d))
    from . import nc

    link = link_from_distance(scenario.channel, d, scenario.p_ack)
    plan = nc.CodedPlan.from_rule(scenario.n_c, nc.default_batch_rule)
    return scenario.n_c / nc.expected_time_coded(plan, scenario.profile, link)


def simpson_integrate(
    f: Callable[[float], float], a: float, b: float, rtol: float = 1e-8
) -> float:
    """Composite Simpson with interval doubling and Richardson acceptance."""
    if b <= a:
        return 0.0
    n = 16
    fa, fb = f(a), f(b)
    h = (b - a) / n
    xs = [a + i * h for i in range(1, n)]
    odd = sum(f(x) for x in xs[0::2])
    even = sum(f(x) for x in xs[1::2])
    prev = (h / 3) * (fa + fb + 4 * odd + 2 * even)
    for _ in range(22):
        # refine: old odd+even interior points all become "even" at 2n
        interior = odd + even
        n *= 2
        h = (b - a) / n
        odd = sum(f(a + i * h) for i in range(1, n, 2))
        cur = (h / 3) * (fa + fb + 4 * odd + 2 * interior)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300) + 1e-15:
            return cur
        even = interior
        prev = cur
    return prev


def sum_rate_objective(
    scenario: HandoverScenario, t_switch: float, rtol: float = 1e-8
) -> float:
    """Cumulative rate: AP1 over [t1, t_switch] plus AP2 over [t_switch+tau, t2]."""
    t1, t2 = scenario.path.t1, scenario.path.t2
    if not t1 <= t_switch <= t2 - scenario.tau:
        raise ValueError(
            f"t_switch must lie in [{t1}, {t2 - scenario.tau}], got {t_switch}"
        )
    part1 = simpson_integrate(lambda t: rate_at(scenario, 1, t), t1, t_switch, rtol)
    part2 = simpson_integrate(
        lambda t: rate_at(scenario, 2, t), t_switch + scenario.tau, t2, rtol
    )
    return part1 + part2


_INV_PHI = (math.sqrt(5) - 1) / 2


def _golden_max(f, a: float, b: float, tol: float) -> tuple[float, float]:
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _objective_on_grid(
    scenario: HandoverScenario, times: list[float], rtol: float
) -> list[float]:
    """Objective at every grid time via cumulative per-cell integration.

    Integrating each cell once keeps the grid pass linear in the number of
    points; both rates are positive, so per-cell relative tolerances bound
    the total relative error by the same rtol.
    """
    t1, t2 = scenario.path.t1, scenario.path.t2
    tau = scenario.tau
    r1 = lambda t: rate_at(scenario, 1, t)
    r2 = lambda t: rate_at(scenario, 2, t)

    cum1 = [0.0]
    for lo, hi in zip(times, times[1:]):
        cum1.append(cum1[-1] + simpson_integrate(r1, lo, hi, rtol))

    # cumulative integral of R2 on the shifted knots t_k + tau, up to t2
    shifted = [min(t + tau, t2) for t in times]
    cum2 = [0.0]
    for lo, hi in zip(shifted, shifted[1:]):
        cum2.append(cum2[-1] + simpson_integrate(r2, lo, hi, rtol))
    tail = simpson_integrate(r2, shifted[-1], t2, rtol)
    total2 = cum2[-1] + tail

    return [c1 + (total2 - c2) for c1, c2 in zip(cum1, cum2)]


def optimize_switch_time(
    scenario: HandoverScenario,
    grid_points: int = 1000,
    refine_tol: float = 1e-4,
    near_optimal_frac: float = 0.01,
    rtol: float = 1e-8,
) -> SwitchOptimum:
    """Grid search over feasible switch times, refined by golden section.

    The grid spans [t1, t2 - tau] at resolution (t2 - t1) / grid_points;
    the best bracket is then refined to ``refine_tol`` seconds with the
    exact objective.  Boundary optima are valid outcomes.  Also reports
    every grid time whose objective is within ``near_optimal_frac`` of the
    optimum, and the along-path distance v*(t_star - tau) at which coded
    transmissions would start (floored at zero).
    """
    t1, t2 = scenario.path.t1, scenario.path.t2
    hi = t2 - scenario.tau
    step = (t2 - t1) / grid_points
    n_cells = max(1, int(round((hi - t1) / step)))
    times = [t1 + k * (hi - t1) / n_cells for k in range(n_cells + 1)]

    values = _objective_on_grid(scenario, times, rtol)
    best = max(range(len(times)), key=values.__getitem__)

    obj = lambda t: sum_rate_objective(scenario, t, rtol)
    lo_b = times[max(0, best - 1)]
    hi_b = times[min(len(times) - 1, best + 1)]
    t_ref, v_ref = _golden_max(obj, lo_b, hi_b, refine_tol)
    v_grid_best = obj(times[best])

    if v_ref >= v_grid_best:
        t_star, v_star = t_ref, v_ref
    else:
        t_star, v_star = times[best], v_grid_best

    v = scenario.path.velocity
    decision = HandoverDecision(
        t_star=t_star,
        d1_at_t_star=distance_to_ap(scenario.ap1_pos, scenario.path, t_star),
        d2_at_t_star=distance_to_ap(scenario.ap2_pos, scenario.path, t_star),
        coded_tx_start_distance=max(0.0, v * t_star - v * scenario.tau),
        objective_value=v_star,
    )
    cutoff = v_star - near_optimal_frac * abs(v_star)
    near = tuple(t for t, val in zip(times, values) if val >= cutoff)
    return SwitchOptimum(
        decision=decision,
        grid_times=tuple(times),
        grid_objectives=tuple(values),
        near_optimal_times=near,
    )


def stationarity_residual(scenario: HandoverScenario, t: float) -> float:
    """|R1(t) - R2(t + tau)|: zero at interior optima of the objective."""
    return abs(rate_at(scenario, 1, t) - rate_at(scenario, 2, t + scenario.tau))


# --- coded-handover protocol state machine -----------------------------------

STATE_ASSOCIATED_AP1 = "associated_ap1"
STATE_PROBING = "probing"
STATE_DUAL_CODED = "dual_coded"
STATE_REASSOCIATING = "reassociating"
STATE_ASSOCIATED_AP2 = "associated_ap2"
PROTOCOL_STATES = (
    STATE_ASSOCIATED_AP1,
    STATE_PROBING,
    STATE_DUAL_CODED,
    STATE_REASSOCIATING,
    STATE_ASSOCIATED_AP2,
)

#: Which APs the station is associated with in each state.  Every state
#: keeps at least one association; dual_coded is the only state with two.
ASSOCIATIONS = {
    STATE_ASSOCIATED_AP1: frozenset({1}),
    STATE_PROBING: frozenset({1}),
    STATE_DUAL_CODED: frozenset({1, 2}),
    STATE_REASSOCIATING: frozenset({2}),
    STATE_ASSOCIATED_AP2: frozenset({2}),
}

EVENT_SIGNAL_PARITY = "signal_parity"
EVENT_DOF_REPORT = "dof_report"
EVENT_REASSOCIATION_START = "reassociation_start"
EVENT_ASSOCIATION_COMPLETE = "association_complete"


@dataclass(frozen=True)
class ProtocolEvent:
    name: str
    dof_needed: int | None = None


@dataclass(frozen=True)
class ProtocolAction:
    name: str
    ap: int | None = None
    dof: int | None = None


def protocol_step(
    state: str, event: ProtocolEvent
) -> tuple[str, tuple[ProtocolAction, ...]]:
    """Advance the handover protocol by one event.

    Signal parity starts probing; the dof report acknowledges the needed
    dof to both APs and enters the dual-coded phase (AP1 starts coded
    broadcast, AP2 pre-associates); completing the association hands the
    station to AP2 and detaches AP1.  Unknown transitions leave the state
    unchanged and emit an error action.
    """
    if state not in PROTOCOL_STATES:
        raise ValueError(f"unknown protocol state {state!r}")

    if state == STATE_ASSOCIATED_AP1 and event.name == EVENT_SIGNAL_PARITY:
        return STATE_PROBING, (ProtocolAction("send_probes", ap=2),)

    if state == STATE_PROBING and event.name == EVENT_DOF_REPORT:
        dof = event.dof_needed if event.dof_needed is not None else 0
        return STATE_DUAL_CODED, (
            ProtocolAction("ack_dof", ap=1, dof=dof),
            ProtocolAction("ack_dof", ap=2, dof=dof),
            ProtocolAction("activate_coded_broadcast", ap=1, dof=dof),
            ProtocolAction("pre_associate", ap=2),
        )

    if state == STATE_DUAL_CODED and event.name == EVENT_DOF_REPORT:
        dof = event.dof_needed if event.dof_needed is not None else 0
        return STATE_DUAL_CODED, (
            ProtocolAction("ack_dof", ap=1, dof=dof),
            ProtocolAction("ack_dof", ap=2, dof=dof),
        )

    if state == STATE_DUAL_CODED and event.name == EVENT_REASSOCIATION_START:
        return STATE_REASSOCIATING, (ProtocolAction("detach", ap=1),)

    if state in (STATE_DUAL_CODED, STATE_REASSOCIATING) and (
        event.name == EVENT_ASSOCIATION_COMPLETE
    ):
        actions = (
            (ProtocolAction("detach", ap=1),) if state == STATE_DUAL_CODED else ()
        )
        return STATE_ASSOCIATED_AP2, actions

    return state, (ProtocolAction("error_invalid_event"),)
