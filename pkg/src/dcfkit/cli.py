"""Command-line client for the dcfkit service.

Each subcommand turns a scenario config file into an API request, posts
it (against an in-process app by default, or a remote server with
``--server``), and writes the response as CSV.  Exit codes: 0 success,
1 validation failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import sys
from pathlib import Path

import httpx

from . import config as cfgmod

DELAY_HEADER = ["p_e", "mode", "expected_time_s", "throughput_pps"]
DISTANCE_HEADER = ["d_m", "snr_db", "p_e", "mode", "expected_time_s", "throughput_pps"]
HANDOVER_HEADER = [
    "t_star_s",
    "d1_m",
    "d2_m",
    "objective",
    "coded_tx_start_distance_m",
]
CURVE_HEADER = ["t_switch_s", "objective"]


def _fmt(value) -> str:
    if value is None:
        return "inf"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: str, header: list[str], rows: list[dict]) -> None:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[key]) for key in header])


def _post(server: str | None, path: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            return client.post(path, json=payload)

    from .service import create_app

    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://dcfkit", timeout=600.0
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def _load_config(args) -> cfgmod.ScenarioConfig:
    cfg = cfgmod.parse_config(args.config) if args.config else cfgmod.ScenarioConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _check_response(resp: httpx.Response) -> int | None:
    if resp.status_code == 200:
        return None
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    return _fail(f"service returned {resp.status_code}: {detail}")


def cmd_delay_sweep(args) -> int:
    try:
        cfg = _load_config(args)
        payload = cfgmod.delay_sweep_payload(cfg)
    except cfgmod.ConfigError as exc:
        return _fail(str(exc))
    resp = _post(args.server, "/sweeps/delay", payload)
    code = _check_response(resp)
    if code is not None:
        return code
    _write_csv(args.out, DELAY_HEADER, resp.json()["rows"])
    return 0


def cmd_distance_sweep(args) -> int:
    try:
        cfg = _load_config(args)
        payload = cfgmod.distance_sweep_payload(cfg)
    except cfgmod.ConfigError as exc:
        return _fail(str(exc))
    resp = _post(args.server, "/sweeps/distance", payload)
    code = _check_response(resp)
    if code is not None:
        return code
    _write_csv(args.out, DISTANCE_HEADER, resp.json()["rows"])
    return 0


def cmd_handover(args) -> int:
    try:
        cfg = _load_config(args)
        payload = cfgmod.handover_payload(cfg)
    except cfgmod.ConfigError as exc:
        return _fail(str(exc))
    resp = _post(args.server, "/handover", payload)
    code = _check_response(resp)
    if code is not None:
        return code
    body = resp.json()
    _write_csv(args.out, HANDOVER_HEADER, [body])
    curve_path = str(Path(args.out).with_suffix("")) + "_curve.csv"
    _write_csv(curve_path, CURVE_HEADER, body["curve"])
    return 0


def cmd_validate(args) -> int:
    try:
        cfg = _load_config(args)
        payload = cfgmod.validate_payload(cfg)
    except cfgmod.ConfigError as exc:
        return _fail(str(exc))
    resp = _post(args.server, "/validate", payload)
    code = _check_response(resp)
    if code is not None:
        return code
    body = resp.json()
    sys.stdout.write(body["report_text"])
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(body["report_text"])
    return 0 if body["all_passed"] else 1


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("dcfkit.service:app", host=args.host, port=args.port)
    return 0


def _add_common(parser, config_required: bool, needs_out: bool) -> None:
    parser.add_argument(
        "--config", required=config_required, help="scenario config file"
    )
    if needs_out:
        parser.add_argument("--out", required=True, help="output CSV path")
    else:
        parser.add_argument("--out", default=None, help="optional report path")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument(
        "--server", default=None, help="base URL of a running service (default: in-process)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcfkit",
        description="Delay, throughput and handover analysis for 802.11 DCF modes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("delay-sweep", help="expected time vs erasure probability")
    _add_common(p, config_required=True, needs_out=True)
    p.set_defaults(func=cmd_delay_sweep)

    p = sub.add_parser("distance-sweep", help="expected time vs station distance")
    _add_common(p, config_required=True, needs_out=True)
    p.set_defaults(func=cmd_distance_sweep)

    p = sub.add_parser("handover", help="optimal AP switch time for a scenario")
    _add_common(p, config_required=True, needs_out=True)
    p.set_defaults(func=cmd_handover)

    p = sub.add_parser("validate", help="run the self-validation suites")
    _add_common(p, config_required=False, needs_out=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
