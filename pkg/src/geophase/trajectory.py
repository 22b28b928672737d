"""Finite-step simulation of the measurement-induced geometric phase.

The post-selected amplitude after N equatorial measurement steps is the
matrix element

    <up| delta_r(eps) (M(z,+) delta_r(eps))^(N-1) |up>

with per-step strength eta = 4c/N and angle increment eps = 2 alpha / N.
This module evaluates that product directly (with per-step rescaling so that
extreme parameters cannot underflow), provides the equivalent step-by-step
construction from individually rotated Kraus operators as a cross-validation
path, and samples stochastic readout records by Born's rule.

The physical regime requires eta <= 1, i.e. c <= N/4.  Larger c at fixed N is
an error by default; ``allow_continuation=True`` opts into evaluating the
same expressions with sqrt(1 - eta) continued to the imaginary axis, which is
useful for exploring the large-c landscape but is explicitly non-physical.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import measurement
from .qmat import Mat2, Vec2, arg_unwrap, mat_vec


class InvalidEtaError(ValueError):
    """Per-step strength eta = 4c/N above 1 without analytic continuation."""


@dataclass(frozen=True)
class ProtocolParams:
    """One measurement sequence: N steps, strength c, half-winding alpha.

    eta = 4c/N and eps = 2 alpha/N are derived; eps * N = 2 alpha exactly, so
    the noiseless sequence closes after winding the polar angle by 2 alpha.
    theta is the fixed polar tilt of every measurement axis (pi/2: equator);
    the initial state sits on the measurement cone at zero azimuth, which for
    the default tilt is (|up> + |down>)/sqrt(2).
    """

    n_steps: int
    c: float
    alpha: float
    theta: float = math.pi / 2.0
    allow_continuation: bool = False

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.c < 0:
            raise ValueError(f"c must be >= 0, got {self.c!r}")
        if self.eta > 1.0 and not self.allow_continuation:
            raise InvalidEtaError(
                f"eta = 4c/N = {self.eta:.6g} > 1 (c={self.c!r}, N={self.n_steps});"
                " physical protocols need c <= N/4"
            )

    @property
    def eta(self) -> float:
        return 4.0 * self.c / self.n_steps

    @property
    def epsilon(self) -> float:
        return 2.0 * self.alpha / self.n_steps

    @property
    def winding(self) -> float:
        return self.alpha / math.pi


@dataclass(frozen=True)
class GeophaseResult:
    """Post-selected amplitude, its phase, and the post-selection probability.

    log_scale is the accumulated log-magnitude factored out of the running
    product; the reported amplitude already includes it.  postselect_prob is
    |amplitude|^2, clamped into [0, 1] against float rounding.
    """

    amplitude: complex
    phase: float
    postselect_prob: float
    log_scale: float


@dataclass(frozen=True)
class TrajectoryRecord:
    """One stochastic readout record and its Born probability."""

    readouts: str
    final_state: Vec2
    probability: float
    pancharatnam_phase: float | None


def initial_state(theta: float = math.pi / 2.0) -> Vec2:
    """Start state on the measurement cone at zero azimuth.

    (cos(theta/2), sin(theta/2)); the equatorial default is
    (|up> + |down>) / sqrt(2).
    """
    return Vec2(math.cos(theta / 2.0), math.sin(theta / 2.0))


def _damping(p: ProtocolParams) -> complex:
    """sqrt(1 - eta); continued to the imaginary axis when eta > 1."""
    if p.eta <= 1.0:
        return complex(math.sqrt(1.0 - p.eta))
    return cmath.sqrt(complex(1.0 - p.eta, 0.0))


def _step_coefficients(p: ProtocolParams) -> tuple[complex, complex, complex]:
    """Entries (a, b, d) of the orientation step matrix ((a, b), (b, d)).

    One azimuth increment eps on the cone at tilt theta; at theta = pi/2 this
    is the delta_r matrix, where a = d.
    """
    e = cmath.exp(-1j * p.epsilon)
    c2 = math.cos(p.theta / 2.0) ** 2
    s2 = 1.0 - c2
    cs = math.cos(p.theta / 2.0) * math.sin(p.theta / 2.0)
    return c2 * e + s2, cs * (1.0 - e), s2 * e + c2


def postselected_amplitude(p: ProtocolParams) -> GeophaseResult:
    """Post-selected amplitude via the collapsed step-matrix product.

    Applies (M(z,+) step)^(N-1) then a final step matrix to |up>, rescaling
    by the largest component magnitude as it goes; the scale is reaccumulated
    in log space so the product cannot underflow at large c * N.
    """
    m = _damping(p)
    a, b, d = _step_coefficients(p)

    u0: complex = 1.0
    u1: complex = 0.0
    log_scale = 0.0
    for _ in range(p.n_steps - 1):
        u0, u1 = a * u0 + b * u1, (b * u0 + d * u1) * m
        s = max(abs(u0), abs(u1))
        if s == 0.0:
            return GeophaseResult(0.0, 0.0, 0.0, log_scale)
        u0 /= s
        u1 /= s
        log_scale += math.log(s)
    amp_scaled = a * u0 + b * u1

    amp = amp_scaled * math.exp(log_scale)
    if amp_scaled == 0.0:
        prob = 0.0
    else:
        exponent = 2.0 * (log_scale + math.log(abs(amp_scaled)))
        # exponent > 0 only in continued (eta > 1) regimes, where the value
        # clamps to 1 anyway; skipping exp avoids overflow there
        prob = 1.0 if exponent > 0.0 else math.exp(exponent)
    return GeophaseResult(
        amplitude=amp,
        phase=cmath.phase(amp_scaled),
        postselect_prob=min(1.0, max(0.0, prob)),
        log_scale=log_scale,
    )


def postselection_probability(p: ProtocolParams) -> float:
    """Squared modulus of the post-selected amplitude."""
    return postselected_amplitude(p).postselect_prob


def stepwise_amplitude(p: ProtocolParams) -> complex:
    """<psi0| M(n_{N-1},+) ... M(n_1,+) |psi0> from per-step rotated Kraus operators.

    Slow validation path: builds every oriented Kraus operator explicitly
    instead of using the collapsed step-matrix form.  For integer windings the
    two constructions agree identically.
    """
    if p.eta > 1.0:
        raise InvalidEtaError("stepwise construction requires eta <= 1")
    psi0 = initial_state(p.theta)
    v = psi0
    for k in range(1, p.n_steps):
        op = measurement.kraus_oriented(
            p.eta, measurement.Orientation(p.theta, p.epsilon * k), "+"
        )
        v = mat_vec(op, v)
    return psi0.dot(v)


def _step_kraus(p: ProtocolParams) -> list[tuple[Mat2, Mat2]]:
    """Oriented Kraus pairs for steps k = 1..N."""
    pairs = []
    for k in range(1, p.n_steps + 1):
        n = measurement.Orientation(p.theta, p.epsilon * k)
        pairs.append(
            (
                measurement.kraus_oriented(p.eta, n, "+"),
                measurement.kraus_oriented(p.eta, n, "-"),
            )
        )
    return pairs


def _pancharatnam(psi0: Vec2, v: Vec2) -> float | None:
    overlap = psi0.dot(v)
    if abs(overlap) < 1e-12:
        return None
    return cmath.phase(overlap)


def sample_trajectory(p: ProtocolParams, seed: int) -> TrajectoryRecord:
    """Draw one N-step readout record by Born's rule, deterministically in seed.

    The state is renormalized after every step; the record probability is the
    product of the per-step outcome probabilities, which telescopes to the
    squared norm of the unnormalized final state.
    """
    return _sample_one(p, _step_kraus(p), np.random.default_rng(seed))


def sample_many(p: ProtocolParams, n_samples: int, master_seed: int) -> list[TrajectoryRecord]:
    """Independent records with per-trajectory substreams (master_seed, index)."""
    pairs = _step_kraus(p)
    out = []
    for i in range(n_samples):
        rng = np.random.default_rng(np.random.SeedSequence([master_seed, i]))
        out.append(_sample_one(p, pairs, rng))
    return out


def _sample_one(
    p: ProtocolParams,
    pairs: list[tuple[Mat2, Mat2]],
    rng: np.random.Generator,
) -> TrajectoryRecord:
    if p.eta > 1.0:
        raise InvalidEtaError("sampling requires eta <= 1")
    psi0 = initial_state(p.theta)
    v = psi0
    prob = 1.0
    readouts = []
    for m_plus, m_minus in pairs:
        w_plus = mat_vec(m_plus, v)
        p_plus = min(1.0, w_plus.norm2())
        if rng.random() < p_plus:
            readouts.append("+")
            v = w_plus
            step_p = p_plus
        else:
            readouts.append("-")
            v = mat_vec(m_minus, v)
            step_p = 1.0 - p_plus
        prob *= step_p
        n = v.norm()
        if n == 0.0:
            # zero-probability branch was drawn only through rounding; stop
            prob = 0.0
            break
        v = v.scaled(1.0 / n)
    return TrajectoryRecord(
        readouts="".join(readouts),
        final_state=v,
        probability=prob,
        pancharatnam_phase=_pancharatnam(psi0, v),
    )


def all_plus_record(p: ProtocolParams) -> TrajectoryRecord:
    """The record with every readout +, built deterministically.

    Its probability is the Born weight of that record (the squared norm of
    the unnormalized post-selected state), which is what sampled frequencies
    converge to.  This differs at finite N from |postselected amplitude|^2,
    which projects the final state back onto the initial one.
    """
    if p.eta > 1.0:
        raise InvalidEtaError("record construction requires eta <= 1")
    psi0 = initial_state(p.theta)
    v = psi0
    for m_plus, _ in _step_kraus(p):
        v = mat_vec(m_plus, v)
    norm2 = v.norm2()
    final = v.scaled(1.0 / math.sqrt(norm2)) if norm2 > 0 else v
    return TrajectoryRecord(
        readouts="+" * p.n_steps,
        final_state=final,
        probability=norm2,
        pancharatnam_phase=_pancharatnam(psi0, final),
    )


def enumerate_records(p: ProtocolParams) -> list[TrajectoryRecord]:
    """All 2^N readout records with exact Born probabilities (small N only).

    Walks the binary outcome tree reusing prefix states, so the cost is
    O(2^N) state updates rather than O(N 2^N).
    """
    if p.eta > 1.0:
        raise InvalidEtaError("enumeration requires eta <= 1")
    if p.n_steps > 20:
        raise ValueError("enumeration over 2^N records is limited to N <= 20")
    pairs = _step_kraus(p)
    psi0 = initial_state(p.theta)
    out: list[TrajectoryRecord] = []

    def walk(step: int, v: Vec2, prob: float, readouts: str) -> None:
        if step == p.n_steps:
            final = v.scaled(1.0 / v.norm()) if prob > 0 else v
            out.append(
                TrajectoryRecord(
                    readouts=readouts,
                    final_state=final,
                    probability=prob,
                    pancharatnam_phase=_pancharatnam(psi0, final) if prob > 0 else None,
                )
            )
            return
        m_plus, m_minus = pairs[step]
        w = mat_vec(m_plus, v)
        walk(step + 1, w, prob * w.norm2() / v.norm2() if v.norm2() > 0 else 0.0, readouts + "+")
        w = mat_vec(m_minus, v)
        walk(step + 1, w, prob * w.norm2() / v.norm2() if v.norm2() > 0 else 0.0, readouts + "-")

    walk(0, psi0, 1.0, "")
    return out


def finite_n_phase_curve(p: ProtocolParams, c_grid: Sequence[float]) -> list[float]:
    """Unwrapped finite-N phase along an ascending c grid, c = 0 baseline.

    Every grid point must satisfy eta <= 1 unless the protocol opts into
    analytic continuation; offenders are reported before any computation.
    """
    cs = list(c_grid)
    if not cs:
        raise ValueError("c_grid is empty")
    if any(b < a for a, b in zip(cs, cs[1:])) or cs[0] < 0:
        raise ValueError("c_grid must be ascending and nonnegative")
    if not p.allow_continuation:
        bad = [c for c in cs if 4.0 * c / p.n_steps > 1.0]
        if bad:
            raise InvalidEtaError(
                f"eta = 4c/N > 1 at c = {bad[:5]}{'...' if len(bad) > 5 else ''}"
                f" for N = {p.n_steps}; pass allow_continuation=True to evaluate"
            )

    step = min(0.01, min((b - a for a, b in zip(cs, cs[1:])), default=0.01))
    ext: list[float] = []
    if cs[0] > 0:
        n = max(1, int(math.ceil(cs[0] / max(step, 1e-9))))
        ext = [cs[0] * i / n for i in range(n)]

    amps = [
        postselected_amplitude(
            ProtocolParams(p.n_steps, c, p.alpha, p.theta, p.allow_continuation)
        ).amplitude
        for c in ext + cs
    ]
    phases = arg_unwrap(amps)
    base = phases[0]
    return [ph - base for ph in phases[len(ext):]]


def max_phase_jump(phases: Sequence[float]) -> float:
    """Largest single-step change of an unwrapped phase curve."""
    return max((abs(b - a) for a, b in zip(phases, phases[1:])), default=0.0)
