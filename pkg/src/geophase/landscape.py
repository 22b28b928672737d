"""N-c landscape sweeps, phase-noise ensembles, and stability statistics.

Cells of an (N, c) grid are independent work units.  Each cell evaluates the
finite-N post-selected amplitude (optionally under noise), reports the phase
folded onto the {0, -pi} presentation branch, the post-selection probability,
a validity flag, and - for noise ensembles - the circular standard deviation
of the sampled phases as a stability metric.

Noise models
------------
"winding"  (default): each sample draws the total half-winding angle from
    Normal(alpha0, spread * alpha0) and evaluates the whole sequence with it.
    This is noise on the closure of the trajectory, and it is the model that
    actually blurs the phase: the sampled phase acquires a linear shift of
    minus the winding error on top of the quantized value.
"per-step": each sample perturbs every step's orientation angle independently,
    phi_k -> phi_k + xi_k with xi_k ~ Normal(0, spread * pi).  Because the
    step factors depend only on angle differences, the perturbations telescope:
    all that survives is the final step's residual (about half the winding
    model's jitter) plus sign flips of the amplitude near a transition.
    Provided for sensitivity comparison.

Reproducibility: every cell derives its own random substream from the master
seed, the cell coordinates, and the winding, so sweeping a sub-grid yields
bit-identical records for the shared cells and parallel execution order never
affects the output.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analytic

VALID_OK = "ok"
VALID_INVALID = "invalid-regime"
VALID_NONPHYSICAL = "non-physical"

NOISE_WINDING = "winding"
NOISE_PER_STEP = "per-step"


class MissingStabilityError(ValueError):
    """A stability aggregate was requested for a sweep without noise samples."""


@dataclass(frozen=True)
class GridSpec:
    """Inclusive (N, c) grid: start/stop/step per axis plus the winding."""

    n_start: int
    n_stop: int
    n_step: int
    c_start: float
    c_stop: float
    c_step: float
    winding: float = 1.0

    def __post_init__(self) -> None:
        if self.n_step <= 0 or self.c_step <= 0:
            raise ValueError("grid steps must be positive")
        if self.n_start < 1 or self.n_stop < self.n_start:
            raise ValueError("need 1 <= n_start <= n_stop")
        if self.c_start < 0 or self.c_stop < self.c_start:
            raise ValueError("need 0 <= c_start <= c_stop")
        if self.winding <= 0:
            raise ValueError("winding must be positive")
        if not self.n_values() or not self.c_values():
            raise ValueError("grid is empty")

    def n_values(self) -> list[int]:
        return list(range(self.n_start, self.n_stop + 1, self.n_step))

    def c_values(self) -> list[float]:
        out = []
        k = 0
        while True:
            c = self.c_start + k * self.c_step
            if c > self.c_stop + 1e-12 * max(1.0, abs(self.c_stop)):
                break
            out.append(c)
            k += 1
        return out

    @property
    def alpha(self) -> float:
        return self.winding * math.pi


@dataclass(frozen=True)
class NoiseModel:
    """Uncorrelated phase noise: relative spread, seeding, and sample count."""

    spread_fraction: float
    master_seed: int = 0
    samples_per_cell: int = 100
    mode: str = NOISE_WINDING

    def __post_init__(self) -> None:
        if self.spread_fraction < 0:
            raise ValueError("spread_fraction must be >= 0")
        if self.samples_per_cell < 1:
            raise ValueError("samples_per_cell must be >= 1")
        if self.mode not in (NOISE_WINDING, NOISE_PER_STEP):
            raise ValueError(f"unknown noise mode {self.mode!r}")
        if self.master_seed < 0:
            raise ValueError("master_seed must be >= 0")


@dataclass(frozen=True)
class CellRecord:
    n_steps: int
    c: float
    phase: float | None
    postselect_prob: float | None
    validity: str
    stability: float | None = None


@dataclass(frozen=True)
class LandscapeResult:
    grid: GridSpec
    noise: NoiseModel | None
    cells: tuple[CellRecord, ...]

    @property
    def has_stability(self) -> bool:
        return self.noise is not None

    def serialize(self) -> str:
        """Canonical JSON for determinism checks and file output."""
        payload = {
            "grid": dict(vars(self.grid)),
            "noise": None if self.noise is None else dict(vars(self.noise)),
            "cells": [
                {
                    "n_steps": c.n_steps,
                    "c": c.c,
                    "phase": c.phase,
                    "postselect_prob": c.postselect_prob,
                    "validity": c.validity,
                    "stability": c.stability,
                }
                for c in self.cells
            ],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _fold(phi: float) -> float:
    """Map a principal-branch angle onto the {0, -pi} presentation branch."""
    return phi - 2.0 * math.pi if phi > math.pi / 2.0 else phi


def _cell_rng(master_seed: int, n: int, c: float, alpha: float) -> np.random.Generator:
    c_bits = int(np.float64(c).view(np.uint64))
    a_bits = int(np.float64(alpha).view(np.uint64))
    return np.random.default_rng(np.random.SeedSequence([master_seed, n, c_bits, a_bits]))


def _batch_amplitudes(n: int, etas: np.ndarray, deltas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Post-selected amplitudes for a batch of protocols with common N.

    etas: (B,) per-protocol strength; deltas: (B, N) per-step angle increments.
    Returns (scaled amplitude, log_scale) with periodic max-magnitude rescaling
    so continued (eta > 1) protocols cannot overflow.
    """
    m = np.sqrt((1.0 - etas).astype(np.complex128))
    u0 = np.ones(etas.shape, dtype=np.complex128)
    u1 = np.zeros(etas.shape, dtype=np.complex128)
    log_scale = np.zeros(etas.shape)
    for k in range(n - 1):
        e = np.exp(-1j * deltas[:, k])
        a = 0.5 * (1.0 + e)
        b = 0.5 * (1.0 - e)
        u0, u1 = a * u0 + b * u1, (b * u0 + a * u1) * m
        if k % 16 == 15:
            s = np.maximum(np.abs(u0), np.abs(u1))
            s[s == 0.0] = 1.0
            u0 /= s
            u1 /= s
            log_scale += np.log(s)
    e = np.exp(-1j * deltas[:, n - 1])
    a = 0.5 * (1.0 + e)
    b = 0.5 * (1.0 - e)
    return a * u0 + b * u1, log_scale


def _compute_row(args: tuple) -> list[CellRecord]:
    (n, c_list, alpha, noisy, spread, samples, master_seed, mode, allow_continuation) = args
    records: list[CellRecord] = []
    todo: list[tuple[float, str]] = []
    for c in c_list:
        eta = 4.0 * c / n
        if eta > 1.0 and not allow_continuation:
            records.append(CellRecord(n, c, None, None, VALID_INVALID, None))
        else:
            todo.append((c, VALID_OK if eta <= 1.0 else VALID_NONPHYSICAL))

    if not todo:
        return records

    s = samples if noisy else 1
    batch = len(todo) * s
    etas = np.empty(batch)
    deltas = np.empty((batch, n))
    eps0 = 2.0 * alpha / n
    for j, (c, _) in enumerate(todo):
        sl = slice(j * s, (j + 1) * s)
        etas[sl] = 4.0 * c / n
        if not noisy or spread == 0.0:
            deltas[sl, :] = eps0
        elif mode == NOISE_WINDING:
            rng = _cell_rng(master_seed, n, c, alpha)
            alphas = rng.normal(alpha, spread * alpha, size=s)
            deltas[sl, :] = (2.0 * alphas / n)[:, None]
        else:
            rng = _cell_rng(master_seed, n, c, alpha)
            xi = rng.normal(0.0, spread * math.pi, size=(s, n))
            xi_prev = np.concatenate([np.zeros((s, 1)), xi[:, :-1]], axis=1)
            deltas[sl, :] = eps0 + xi - xi_prev

    amps, log_scale = _batch_amplitudes(n, etas, deltas)
    phases = np.angle(amps)
    with np.errstate(divide="ignore"):
        log_mag = np.log(np.abs(amps))
    probs = np.exp(2.0 * (log_scale + log_mag))

    for j, (c, validity) in enumerate(todo):
        sl = slice(j * s, (j + 1) * s)
        ph = phases[sl]
        z = np.exp(1j * ph).mean()
        mean_phase = _fold(math.atan2(z.imag, z.real))
        prob = float(np.clip(probs[sl].mean(), 0.0, 1.0))
        if noisy:
            r = min(1.0, max(abs(z), 1e-300))
            stability = math.sqrt(max(0.0, -2.0 * math.log(r)))
        else:
            stability = None
        records.append(CellRecord(n, c, mean_phase, prob, validity, stability))

    records.sort(key=lambda r: r.c)
    return records


def _sweep(
    grid: GridSpec,
    noise: NoiseModel | None,
    workers: int,
    allow_continuation: bool,
) -> LandscapeResult:
    noisy = noise is not None
    row_args = [
        (
            n,
            grid.c_values(),
            grid.alpha,
            noisy,
            noise.spread_fraction if noisy else 0.0,
            noise.samples_per_cell if noisy else 1,
            noise.master_seed if noisy else 0,
            noise.mode if noisy else NOISE_WINDING,
            allow_continuation,
        )
        for n in grid.n_values()
    ]
    if workers > 1 and len(row_args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_compute_row, row_args))
    else:
        rows = [_compute_row(a) for a in row_args]
    cells = tuple(rec for row in rows for rec in row)
    return LandscapeResult(grid=grid, noise=noise, cells=cells)


def grid_sweep(
    grid: GridSpec,
    workers: int = 1,
    allow_continuation: bool = False,
) -> LandscapeResult:
    """Noiseless finite-N phase over the grid; eta > 1 cells flagged, not computed."""
    return _sweep(grid, None, workers, allow_continuation)


def noise_ensemble(
    grid: GridSpec,
    noise: NoiseModel,
    workers: int = 1,
    allow_continuation: bool = False,
) -> LandscapeResult:
    """Per-cell noisy ensembles; phase is the circular mean, stability the circular std."""
    return _sweep(grid, noise, workers, allow_continuation)


@dataclass(frozen=True)
class StabilityReport:
    """Aggregates over a landscape result.

    quantized_fraction uses computed (valid) cells as the denominator and is
    None when there are none.  quantized_fraction_of_grid uses every grid
    cell as the denominator, so invalid-regime cells count against it; that
    is the statistic that reflects how much of a region is usable at all.
    """

    n_cells: int
    n_valid: int
    n_quantized: int
    n_unstable: int
    quantized_fraction: float | None
    quantized_fraction_of_grid: float | None
    unstable_fraction: float | None
    boundary_by_n: dict[int, float | None] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n_cells": self.n_cells,
            "n_valid": self.n_valid,
            "n_quantized": self.n_quantized,
            "n_unstable": self.n_unstable,
            "quantized_fraction": self.quantized_fraction,
            "quantized_fraction_of_grid": self.quantized_fraction_of_grid,
            "unstable_fraction": self.unstable_fraction,
            "boundary_by_n": {str(k): v for k, v in self.boundary_by_n.items()},
        }


def _dist_to_quantized(phase: float) -> float:
    d0 = abs((phase + math.pi) % (2.0 * math.pi) - math.pi)
    dpi = abs(phase % (2.0 * math.pi) - math.pi)
    return min(d0, dpi)


def stability_report(
    result: LandscapeResult,
    quantization_tol: float,
    stability_threshold: float = 0.1,
    critical_band: float = 0.0,
) -> StabilityReport:
    """Quantization and stability aggregates for a noise-ensemble result.

    critical_band > 0 drops cells within that distance in c of an analytic
    critical strength from the quantization counts (transition cells are
    legitimately unquantized).  Requires a result carrying stability values.
    """
    if not result.has_stability:
        raise MissingStabilityError(
            "stability_report needs a noise-ensemble result; run noise_ensemble"
            " (a spread of 0 reproduces the noiseless sweep)"
        )
    criticals = (
        [p.c_crit for p in analytic.find_critical(result.grid.alpha)]
        if critical_band > 0.0
        else []
    )

    def in_band(c: float) -> bool:
        return any(abs(c - r) <= critical_band for r in criticals)

    n_cells = len(result.cells)
    valid = [r for r in result.cells if r.phase is not None]
    countable = [r for r in valid if not in_band(r.c)]
    quantized = [r for r in countable if _dist_to_quantized(r.phase) <= quantization_tol]
    unstable = [r for r in valid if r.stability is not None and r.stability > stability_threshold]
    grid_countable = n_cells - (len(valid) - len(countable))

    boundary: dict[int, float | None] = {}
    for n in result.grid.n_values():
        row = sorted((r for r in valid if r.n_steps == n), key=lambda r: r.c)
        boundary[n] = next(
            (r.c for r in row if abs(r.phase % (2.0 * math.pi) - math.pi) < math.pi / 2.0),
            None,
        )

    return StabilityReport(
        n_cells=n_cells,
        n_valid=len(valid),
        n_quantized=len(quantized),
        n_unstable=len(unstable),
        quantized_fraction=(len(quantized) / len(countable)) if countable else None,
        quantized_fraction_of_grid=(len(quantized) / grid_countable) if grid_countable else None,
        unstable_fraction=(len(unstable) / len(valid)) if valid else None,
        boundary_by_n=boundary,
    )
