"""Command line: a thin client over the service handlers.

Each subcommand builds the same typed request the HTTP API accepts, runs it
in process (or against a remote server via --server), and writes the response
out as CSV or JSON plus a run-manifest sidecar.  Re-running a manifest with
--config reproduces the outputs byte for byte.

Exit codes: 0 success, 1 I/O or transport failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import urllib.error
import urllib.request
from typing import Sequence

from pydantic import ValidationError

from . import __version__, svgplot
from .output import rows_to_csv, to_json, write_files_atomic
from .service import handlers
from .service.models import (
    AnalyticRequest,
    AnalyticResponse,
    CriticalRequest,
    CriticalResponse,
    FiniteNRequest,
    FiniteNResponse,
    LandscapeRequest,
    LandscapeResponse,
    NoiseRequest,
    TrajectoryRequest,
    TrajectoryResponse,
)

_SUBCOMMANDS = {
    "analytic": (AnalyticRequest, AnalyticResponse, handlers.handle_analytic),
    "critical": (CriticalRequest, CriticalResponse, handlers.handle_critical),
    "finite-n": (FiniteNRequest, FiniteNResponse, handlers.handle_finite_n),
    "landscape": (LandscapeRequest, LandscapeResponse, handlers.handle_landscape),
    "noise": (NoiseRequest, LandscapeResponse, handlers.handle_noise),
    "trajectory": (TrajectoryRequest, TrajectoryResponse, handlers.handle_trajectory),
}

_CSV_HEADERS = {
    "analytic": ("c_or_alpha", "phase", "amplitude_re", "amplitude_im", "bracket"),
    "critical": ("winding", "index", "c_crit", "jump"),
    "finite-n": ("n_steps", "c", "alpha", "phase"),
    "landscape": ("n_steps", "c", "phase", "postselect_prob", "validity", "stability"),
    "noise": ("n_steps", "c", "phase", "postselect_prob", "validity", "stability"),
    "trajectory": ("sample_index", "readouts", "probability", "pancharatnam_phase"),
}


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def _grid(text: str) -> dict:
    m = re.fullmatch(
        r"(\d+):(\d+):(\d+),([0-9.eE+-]+):([0-9.eE+-]+):([0-9.eE+-]+)", text.strip()
    )
    if not m:
        raise argparse.ArgumentTypeError(
            "grid must look like N0:N1:NSTEP,C0:C1:CSTEP (e.g. 100:500:25,0.5:9.5:0.5)"
        )
    return {
        "n_start": int(m.group(1)),
        "n_stop": int(m.group(2)),
        "n_step": int(m.group(3)),
        "c_start": float(m.group(4)),
        "c_stop": float(m.group(5)),
        "c_step": float(m.group(6)),
    }


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geophase",
        description="Weak-measurement-induced geometric phase computations",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", help="output path (CSV or JSON)")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--plot", action="store_true", default=None,
                       help="also emit an SVG rendering next to the data file")
        p.add_argument("--config", help="JSON config or manifest; flags override it")
        p.add_argument("--server", help="base URL of a running geophase service")

    p = subs.add_parser("analytic", help="closed-form phase sweep (quasicontinuous limit)")
    p.add_argument("--winding", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--sweep", choices=["c", "alpha"])
    p.add_argument("--c", type=float, help="fixed strength for alpha sweeps")
    p.add_argument("--c-max", dest="c_max", type=float)
    p.add_argument("--c-step", dest="c_step", type=float)
    p.add_argument("--alpha-step", dest="alpha_step", type=float)
    common(p)

    p = subs.add_parser("critical", help="critical measurement strengths for a winding")
    p.add_argument("--winding", type=float)
    p.add_argument("--resolution", type=float)
    p.add_argument("--refine-tol", dest="refine_tol", type=float)
    common(p)

    p = subs.add_parser("finite-n", help="finite-N phase curves per (N, c) pair")
    p.add_argument("--n-steps", dest="n_steps", type=_int_list, help="comma list, e.g. 10,8,6,4")
    p.add_argument("--c", dest="c_values", type=_float_list, help="comma list, e.g. 1.5,3.0")
    p.add_argument("--winding", type=float)
    p.add_argument("--sweep", choices=["alpha", "c"])
    p.add_argument("--alpha-step", dest="alpha_step", type=float)
    p.add_argument("--c-max", dest="c_max", type=float)
    p.add_argument("--c-step", dest="c_step", type=float)
    p.add_argument("--allow-analytic-continuation", dest="allow_analytic_continuation",
                   action="store_true", default=None,
                   help="evaluate eta > 1 cells anyway; outputs are non-physical")
    common(p)

    p = subs.add_parser("landscape", help="noiseless N-c grid sweep")
    p.add_argument("--grid", type=_grid, help="N0:N1:NSTEP,C0:C1:CSTEP")
    p.add_argument("--winding", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--allow-analytic-continuation", dest="allow_analytic_continuation",
                   action="store_true", default=None)
    common(p)

    p = subs.add_parser("noise", help="phase-noise Monte Carlo ensemble over a grid")
    p.add_argument("--grid", type=_grid)
    p.add_argument("--winding", type=float)
    p.add_argument("--spread", type=float, help="relative noise spread, e.g. 0.05")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--noise-mode", dest="noise_mode", choices=["winding", "per-step"])
    p.add_argument("--workers", type=int)
    p.add_argument("--allow-analytic-continuation", dest="allow_analytic_continuation",
                   action="store_true", default=None)
    common(p)

    p = subs.add_parser("trajectory", help="stochastic readout records by Born sampling")
    p.add_argument("--n-steps", dest="n_steps", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--winding", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--include-exact", dest="include_exact", action="store_true", default=None,
                   help="add exhaustive record probabilities to the summary (N <= 12)")
    common(p)

    p = subs.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _merge_params(args: argparse.Namespace) -> dict:
    """Config-file values overridden by explicitly passed flags."""
    params: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
        if isinstance(cfg, dict) and "params" in cfg:
            manifest_sub = cfg.get("subcommand")
            if manifest_sub is not None and manifest_sub != args.subcommand:
                raise ValueError(
                    f"config is a manifest for {manifest_sub!r},"
                    f" but the {args.subcommand!r} subcommand was invoked"
                )
            params.update(cfg["params"])
        elif isinstance(cfg, dict):
            params.update(cfg)
        else:
            raise ValueError("config must be a JSON object")
    skip = {"subcommand", "out", "format", "plot", "config", "server"}
    if "grid" in vars(args) and args.grid is not None:
        params.update(args.grid)
    skip.add("grid")
    for key, value in vars(args).items():
        if key not in skip and value is not None:
            params[key] = value
    return params


def _run_remote(server: str, subcommand: str, request, response_cls):
    url = server.rstrip("/") + "/v1/" + subcommand
    req = urllib.request.Request(
        url,
        data=request.model_dump_json().encode("utf-8"),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    with urllib.request.urlopen(req) as resp:
        return response_cls.model_validate_json(resp.read())


def _csv_rows(subcommand: str, response) -> list[tuple]:
    header = _CSV_HEADERS[subcommand]
    return [tuple(getattr(row, col) for col in header) for row in response.data]


def _plot_svg(subcommand: str, response) -> str | None:
    if subcommand == "analytic":
        xs = [r.c_or_alpha for r in response.data]
        ys = [r.phase for r in response.data]
        return svgplot.line_plot({"phase": (xs, ys)}, "geometric phase", "c or alpha", "phase [rad]")
    if subcommand == "finite-n":
        sweep_in_alpha = len({r.alpha for r in response.data}) > 1
        series: dict = {}
        for r in response.data:
            xs, ys = series.setdefault(f"N={r.n_steps}, c={r.c:g}", ([], []))
            xs.append(r.alpha if sweep_in_alpha else r.c)
            ys.append(r.phase)
        xlabel = "alpha [rad]" if sweep_in_alpha else "c"
        return svgplot.line_plot(series, "finite-N geometric phase", xlabel, "phase [rad]")
    if subcommand in ("landscape", "noise"):
        ns = sorted({r.n_steps for r in response.data})
        cs = sorted({r.c for r in response.data})
        vals = {(r.n_steps, r.c): r.phase for r in response.data}
        return svgplot.heatmap(ns, cs, vals, "phase over the N-c landscape", "N", "c")
    if subcommand == "trajectory":
        phases = sorted(
            r.pancharatnam_phase for r in response.data if r.pancharatnam_phase is not None
        )
        if not phases:
            return None
        xs = list(range(len(phases)))
        return svgplot.line_plot(
            {"sorted samples": (xs, phases)},
            "sampled Pancharatnam phases",
            "sample rank",
            "phase [rad]",
        )
    return None


def _output_files(subcommand: str, args, response) -> dict[str, str]:
    out = args.out
    if not out:
        raise ValueError("--out is required")
    fmt = args.format or ("json" if out.endswith(".json") else "csv")
    base = re.sub(r"\.(csv|json)$", "", out)
    files: dict[str, str] = {}

    payload = response.model_dump()
    if fmt == "json":
        files[out] = to_json(payload)
    else:
        files[out] = rows_to_csv(_CSV_HEADERS[subcommand], _csv_rows(subcommand, response))
        if subcommand == "analytic":
            files[base + ".criticals.json"] = to_json(payload["criticals"])
        if subcommand == "noise" and payload.get("report") is not None:
            files[base + ".report.json"] = to_json(payload["report"])
        if subcommand == "trajectory":
            files[base + ".summary.json"] = to_json(payload["summary"])
    files[base + ".manifest.json"] = to_json(payload["manifest"])

    if args.plot:
        svg = _plot_svg(subcommand, response)
        if svg is not None:
            files[base + ".svg"] = svg
    return files


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.subcommand == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    request_cls, response_cls, handler = _SUBCOMMANDS[args.subcommand]
    try:
        params = _merge_params(args)
        request = request_cls.model_validate(params)
    except (ValidationError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"geophase: invalid configuration: {exc}", file=sys.stderr)
        return 2

    try:
        if args.server:
            response = _run_remote(args.server, args.subcommand, request, response_cls)
        else:
            response = handler(request)
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode("utf-8", errors="replace")
        print(f"geophase: server rejected the request ({exc.code}): {detail}", file=sys.stderr)
        return 2 if exc.code == 422 else 1
    except urllib.error.URLError as exc:
        print(f"geophase: cannot reach server: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"geophase: invalid configuration: {exc}", file=sys.stderr)
        return 2

    try:
        write_files_atomic(_output_files(args.subcommand, args, response))
    except ValueError as exc:
        print(f"geophase: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"geophase: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
