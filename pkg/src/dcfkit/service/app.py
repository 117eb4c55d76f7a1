"""FastAPI application exposing the toolkit as a small compute service."""

from __future__ import annotations

import math

from fastapi import FastAPI, HTTPException

from .. import sweeps, validate
from ..channel import ChannelModel
from ..handover import HandoverScenario, MobilityPath
from ..timing import BackoffPolicy, TimingProfile, load_profile
from . import schemas


def _profile(spec: schemas.ProfileSpec) -> TimingProfile:
    return load_profile(
        spec.variant, t_p=spec.t_p_s, ack_rate=spec.ack_rate_bps, t_rt=spec.t_rt_s
    )


def _policy(spec: schemas.BackoffSpec) -> BackoffPolicy:
    return BackoffPolicy(max_stage=spec.stages, growth=spec.growth)


def _channel(spec: schemas.ChannelSpec) -> ChannelModel:
    return ChannelModel(
        scheme=spec.scheme,
        packet_bits=spec.packet_bits,
        pathloss_c=spec.pathloss_c,
        pathloss_exp=spec.pathloss_exp,
    )


def _finite(rows: list[dict]) -> list[dict]:
    # JSON has no Infinity; divergent cells travel as null.
    out = []
    for row in rows:
        row = dict(row)
        if math.isinf(row["expected_time_s"]):
            row["expected_time_s"] = None
        out.append(row)
    return out


def create_app() -> FastAPI:
    app = FastAPI(
        title="dcfkit",
        description=(
            "Expected delivery delay and throughput for 802.11 DCF "
            "transmission modes, plus handover switch-time optimization."
        ),
        version="0.1.0",
    )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/profiles/{variant}", response_model=schemas.TimingProfileModel)
    def get_profile(variant: str):
        try:
            profile = load_profile(variant)
        except ValueError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return schemas.TimingProfileModel(**profile.to_dict())

    @app.post("/sweeps/delay", response_model=schemas.DelaySweepResponse)
    def delay_sweep(req: schemas.DelaySweepRequest):
        try:
            rows = sweeps.delay_sweep_rows(
                profile=_profile(req.profile),
                policy=_policy(req.backoff),
                p_ack=req.p_ack,
                n_packets=req.n_packets,
                modes=list(req.modes),
                start=req.sweep.start,
                stop=req.sweep.stop,
                step=req.sweep.step,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"rows": _finite(rows)}

    @app.post("/sweeps/distance", response_model=schemas.DistanceSweepResponse)
    def distance_sweep(req: schemas.DistanceSweepRequest):
        try:
            rows = sweeps.distance_sweep_rows(
                profile=_profile(req.profile),
                policy=_policy(req.backoff),
                channel=_channel(req.channel),
                p_ack=req.p_ack,
                n_packets=req.n_packets,
                modes=list(req.modes),
                start=req.sweep.start,
                stop=req.sweep.stop,
                step=req.sweep.step,
                two_ap_mirror=req.two_ap_mirror,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"rows": _finite(rows)}

    @app.post("/handover", response_model=schemas.HandoverResponse)
    def handover(req: schemas.HandoverRequest):
        try:
            path = MobilityPath(
                kind=req.path.kind,
                velocity=req.path.velocity,
                t1=req.path.t1,
                t2=req.path.t2,
                origin=tuple(req.path.origin),
                waypoints=tuple(tuple(p) for p in req.path.waypoints),
            )
            scenario = HandoverScenario(
                ap1_pos=tuple(req.ap1),
                ap2_pos=tuple(req.ap2),
                path=path,
                tau=req.tau,
                channel=_channel(req.channel),
                rate_mode=req.rate_mode,
                n_c=req.n_c,
                p_ack=req.p_ack,
                profile=_profile(req.profile),
                policy=_policy(req.backoff),
            )
            decision_row, curve, result = sweeps.handover_rows(
                scenario, grid_points=req.grid_points
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "t_star_s": decision_row["t_star_s"],
            "d1_m": decision_row["d1_m"],
            "d2_m": decision_row["d2_m"],
            "objective": decision_row["objective"],
            "coded_tx_start_distance_m": decision_row["coded_tx_start_distance_m"],
            "near_optimal_times_s": list(result.near_optimal_times),
            "curve": curve,
        }

    @app.post("/validate", response_model=schemas.ValidateResponse)
    def run_validate(req: schemas.ValidateRequest):
        try:
            report = validate.run_validation(
                seed=req.seed,
                mc_trials=req.mc_trials,
                gf_trials=req.gf_trials,
                fault=req.inject_fault,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "all_passed": report.all_passed,
            "checks": [c.__dict__ for c in report.checks],
            "report_text": report.render(),
        }

    return app


app = create_app()
