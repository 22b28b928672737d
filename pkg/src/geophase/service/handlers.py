"""Pure computation handlers mapping requests to responses.

The FastAPI endpoints and the command line both call these; neither adds any
computation of its own, so local and remote runs produce identical payloads.
"""

from __future__ import annotations

import math

from .. import __version__, analytic, landscape, trajectory
from ..qmat import arg_unwrap
from .models import (
    AnalyticRequest,
    AnalyticResponse,
    AnalyticRow,
    CriticalRequest,
    CriticalResponse,
    CriticalRow,
    FiniteNRequest,
    FiniteNResponse,
    FiniteNRow,
    LandscapeRequest,
    LandscapeResponse,
    LandscapeRow,
    Manifest,
    NoiseRequest,
    TrajectoryRequest,
    TrajectoryResponse,
    TrajectoryRow,
)


def _manifest(subcommand: str, req) -> Manifest:
    return Manifest(version=__version__, subcommand=subcommand, params=req.model_dump())


def _endpoint_grid(stop: float, step: float, include_zero: bool) -> list[float]:
    """Uniform grid with exact 0 and stop endpoints."""
    n = max(1, int(math.ceil(stop / step)))
    start = 0 if include_zero else 1
    return [stop * i / n for i in range(start, n + 1)]


def _critical_rows(
    alpha: float,
    resolution: float = 1e-3,
    refine_tol: float = 1e-10,
    c_max: float | None = None,
) -> list[CriticalRow]:
    return [
        CriticalRow(winding=p.winding, index=p.index, c_crit=p.c_crit, jump=p.jump)
        for p in analytic.find_critical(alpha, resolution, refine_tol)
        if c_max is None or p.c_crit <= c_max
    ]


def handle_analytic(req: AnalyticRequest) -> AnalyticResponse:
    alpha = req.alpha_total
    rows: list[AnalyticRow] = []
    if req.sweep == "c":
        grid = _endpoint_grid(req.c_max, req.c_step, include_zero=True)
        phases = analytic.phase_curve(alpha, grid)
        for c, ph in zip(grid, phases):
            a = analytic.amplitude(c, alpha)
            rows.append(
                AnalyticRow(
                    c_or_alpha=c,
                    phase=ph,
                    amplitude_re=a.real,
                    amplitude_im=a.imag,
                    bracket=analytic.bracket(c, alpha),
                )
            )
    else:
        grid = _endpoint_grid(alpha, req.alpha_step, include_zero=False)
        phases = analytic.sweep_alpha(req.c, grid)
        for a_val, ph in zip(grid, phases):
            a = analytic.amplitude(req.c, a_val)
            rows.append(
                AnalyticRow(
                    c_or_alpha=a_val,
                    phase=ph,
                    amplitude_re=a.real,
                    amplitude_im=a.imag,
                    bracket=analytic.bracket(req.c, a_val),
                )
            )
    return AnalyticResponse(
        manifest=_manifest("analytic", req),
        data=rows,
        criticals=_critical_rows(alpha, c_max=req.c_max if req.sweep == "c" else None),
    )


def handle_critical(req: CriticalRequest) -> CriticalResponse:
    return CriticalResponse(
        manifest=_manifest("critical", req),
        data=_critical_rows(req.winding * math.pi, req.resolution, req.refine_tol),
    )


def handle_finite_n(req: FiniteNRequest) -> FiniteNResponse:
    alpha = req.winding * math.pi
    rows: list[FiniteNRow] = []
    for n in req.n_steps:
        if req.sweep == "alpha":
            for c in req.c_values or []:
                grid = _endpoint_grid(alpha, req.alpha_step, include_zero=False)
                amps = [
                    trajectory.postselected_amplitude(
                        trajectory.ProtocolParams(
                            n, c, a, allow_continuation=req.allow_analytic_continuation
                        )
                    ).amplitude
                    for a in grid
                ]
                phases = arg_unwrap(amps)
                rows.extend(
                    FiniteNRow(n_steps=n, c=c, alpha=a, phase=ph)
                    for a, ph in zip(grid, phases)
                )
        else:
            grid = _endpoint_grid(req.c_max, req.c_step, include_zero=False)
            p = trajectory.ProtocolParams(
                n, 0.0, alpha, allow_continuation=req.allow_analytic_continuation
            )
            phases = trajectory.finite_n_phase_curve(p, grid)
            rows.extend(
                FiniteNRow(n_steps=n, c=cv, alpha=alpha, phase=ph)
                for cv, ph in zip(grid, phases)
            )
    return FiniteNResponse(manifest=_manifest("finite-n", req), data=rows)


def _grid_spec(req: LandscapeRequest) -> landscape.GridSpec:
    return landscape.GridSpec(
        n_start=req.n_start,
        n_stop=req.n_stop,
        n_step=req.n_step,
        c_start=req.c_start,
        c_stop=req.c_stop,
        c_step=req.c_step,
        winding=req.winding,
    )


def _landscape_rows(result: landscape.LandscapeResult) -> list[LandscapeRow]:
    return [
        LandscapeRow(
            n_steps=cell.n_steps,
            c=cell.c,
            phase=cell.phase,
            postselect_prob=cell.postselect_prob,
            validity=cell.validity,
            stability=cell.stability,
        )
        for cell in result.cells
    ]


def handle_landscape(req: LandscapeRequest) -> LandscapeResponse:
    result = landscape.grid_sweep(
        _grid_spec(req),
        workers=req.workers,
        allow_continuation=req.allow_analytic_continuation,
    )
    return LandscapeResponse(
        manifest=_manifest("landscape", req), data=_landscape_rows(result)
    )


def handle_noise(req: NoiseRequest) -> LandscapeResponse:
    noise = landscape.NoiseModel(
        spread_fraction=req.spread,
        master_seed=req.seed,
        samples_per_cell=req.samples,
        mode=req.noise_mode,
    )
    result = landscape.noise_ensemble(
        _grid_spec(req),
        noise,
        workers=req.workers,
        allow_continuation=req.allow_analytic_continuation,
    )
    report = landscape.stability_report(
        result, quantization_tol=req.quantization_tol, stability_threshold=req.stability_threshold
    )
    return LandscapeResponse(
        manifest=_manifest("noise", req),
        data=_landscape_rows(result),
        report=report.as_dict(),
    )


def handle_trajectory(req: TrajectoryRequest) -> TrajectoryResponse:
    p = trajectory.ProtocolParams(req.n_steps, req.c, req.winding * math.pi)
    records = trajectory.sample_many(p, req.samples, req.seed)
    rows = [
        TrajectoryRow(
            sample_index=i,
            readouts=r.readouts,
            probability=r.probability,
            pancharatnam_phase=r.pancharatnam_phase,
        )
        for i, r in enumerate(records)
    ]
    exact = trajectory.all_plus_record(p)
    amp = trajectory.postselected_amplitude(p)
    summary: dict = {
        "samples": req.samples,
        "all_plus_frequency": sum(r.readouts == exact.readouts for r in records) / req.samples,
        "all_plus_record_probability": exact.probability,
        "postselect_prob": amp.postselect_prob,
        "phase": amp.phase,
    }
    if req.include_exact:
        summary["exact_record_probabilities"] = {
            r.readouts: r.probability for r in trajectory.enumerate_records(p)
        }
    return TrajectoryResponse(
        manifest=_manifest("trajectory", req), data=rows, summary=summary
    )
