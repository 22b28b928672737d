"""Closed-form geometric phase in the quasicontinuous measurement limit.

For an equatorial trajectory with total half-winding angle ``alpha`` (winding
number W = alpha / pi) and measurement-strength parameter ``c`` (per-step
strength eta = 4c/N), the post-selected amplitude in the limit of infinitely
many steps is

    A(c, alpha) = e^{-i alpha - c} * [cosh(tau) + c * sinh(tau) / tau]

with tau = sqrt(c^2 - alpha^2).  The bracket is real for all real c, alpha:
for c < alpha it equals cos(s) + c sin(s)/s with s = sqrt(alpha^2 - c^2).
The geometric phase is the argument of A, reported relative to the c = 0
baseline so that a sweep in c starts at 0 and drops by pi at every critical
strength where the bracket changes sign.

Critical strengths are located as sign changes of the real bracket rather
than minima of |A|: the exponential prefactor never vanishes, and bracketing
a sign change is robust.  All roots lie strictly inside (0, alpha); above
c = alpha the bracket is >= 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

from .qmat import arg_unwrap

# below this |tau| the removable singularity of sinh(tau)/tau is evaluated by
# series: 1 + tau^2/6 + tau^4/120
_SERIES_CUTOFF = 1e-4

JUMP_DOWN = "0->-pi"
JUMP_UP = "-pi->0"


class EmptyGridError(ValueError):
    """A sweep was requested on an empty grid."""


@dataclass(frozen=True)
class AnalyticParams:
    """Strength parameter c >= 0 and half-winding angle alpha (W = alpha/pi)."""

    c: float
    alpha: float

    def __post_init__(self) -> None:
        if self.c < 0:
            raise ValueError(f"c must be >= 0, got {self.c!r}")

    @property
    def winding(self) -> float:
        return self.alpha / math.pi


@dataclass(frozen=True)
class CriticalPoint:
    """A strength value where the amplitude vanishes and the phase jumps by pi."""

    c_crit: float
    winding: float
    index: int
    jump: str


def tau(c: float, alpha: float) -> complex:
    """Principal square root of c^2 - alpha^2 (pure imaginary for c < alpha)."""
    return cmath.sqrt(complex(c * c - alpha * alpha, 0.0))


def bracket(c: float, alpha: float) -> float:
    """Real value of cosh(tau) + c sinh(tau)/tau, series-evaluated near tau = 0."""
    t2 = c * c - alpha * alpha
    t = cmath.sqrt(complex(t2, 0.0))
    if abs(t) < _SERIES_CUTOFF:
        sinhc = 1.0 + t2 / 6.0 + t2 * t2 / 120.0
    else:
        sinhc = cmath.sinh(t) / t
    return (cmath.cosh(t) + c * sinhc).real


def amplitude(c: float, alpha: float) -> complex:
    """Quasicontinuous post-selected amplitude A(c, alpha)."""
    if c < 0:
        raise ValueError(f"c must be >= 0, got {c!r}")
    return cmath.exp(complex(-c, -alpha)) * bracket(c, alpha)


def phase_curve(alpha: float, c_grid: Sequence[float]) -> list[float]:
    """Unwrapped phase of A along an ascending c grid, relative to c = 0.

    The curve starts at 0 and steps by -pi at each critical strength.  When
    the grid does not start at 0 the baseline is recovered by extending the
    evaluation down to c = 0 internally, so a grid lying entirely beyond the
    first root still reports -pi rather than 0.
    """
    cs = list(c_grid)
    if not cs:
        raise EmptyGridError("c_grid is empty")
    if any(b < a for a, b in zip(cs, cs[1:])) or cs[0] < 0:
        raise ValueError("c_grid must be ascending and nonnegative")

    ext = _extension_grid(cs[0])
    vals = [amplitude(c, alpha) for c in ext + cs]
    phases = arg_unwrap(vals)
    base = phases[0]
    return [p - base for p in phases[len(ext):]]


def _extension_grid(c_first: float, step: float = 1e-3) -> list[float]:
    """Dense grid on [0, c_first) used to anchor the c = 0 baseline."""
    if c_first <= 0:
        return []
    n = int(math.ceil(c_first / step))
    return [c_first * i / n for i in range(n)]


def find_critical(
    alpha: float,
    resolution: float = 1e-3,
    refine_tol: float = 1e-12,
) -> list[CriticalPoint]:
    """All critical strengths for the given alpha, ascending in c.

    Scans the real bracket on (0, alpha) at the given resolution, brackets
    every sign change and refines each by bisection until the enclosing
    interval is narrower than refine_tol.  The default refinement keeps the
    bracket residual at every root below 1e-9 even where the bracket is
    steep (high windings).  Jump labels alternate starting with the
    0 -> -pi transition: the bracket changes sign at each simple root,
    shifting the argument by pi every time.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if resolution > 0.01:
        raise ValueError("resolution must be <= 0.01")
    if refine_tol > 1e-9:
        raise ValueError("refine_tol must be <= 1e-9")

    roots: list[float] = []
    n = int(math.ceil(alpha / resolution))
    prev_c = alpha * 1.0 / n
    prev_f = bracket(prev_c, alpha)
    if prev_f == 0.0:
        roots.append(prev_c)
    for i in range(2, n):
        ci = alpha * i / n
        fi = bracket(ci, alpha)
        if fi == 0.0:
            roots.append(ci)
        elif prev_f * fi < 0.0:
            roots.append(_bisect(alpha, prev_c, ci, prev_f, refine_tol))
        prev_c, prev_f = ci, fi

    return [
        CriticalPoint(
            c_crit=r,
            winding=alpha / math.pi,
            index=i,
            jump=JUMP_DOWN if i % 2 == 0 else JUMP_UP,
        )
        for i, r in enumerate(roots)
    ]


def _bisect(alpha: float, lo: float, hi: float, f_lo: float, tol: float) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = bracket(mid, alpha)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sweep_alpha(c: float, alpha_grid: Sequence[float]) -> list[float]:
    """Unwrapped phase of A(c, alpha) along an ascending alpha grid."""
    al = list(alpha_grid)
    if not al:
        raise EmptyGridError("alpha_grid is empty")
    if any(b < a for a, b in zip(al, al[1:])) or al[0] <= 0:
        raise ValueError("alpha_grid must be ascending and positive")
    return arg_unwrap([amplitude(c, a) for a in al])


def transition_count(c: float, alpha_grid: Sequence[float]) -> int:
    """Number of bracket sign changes along an alpha grid at fixed c.

    Summary statistic for winding sweeps: each sign change is one 0 <-> -pi
    transition of the quantized phase, so higher windings show more of them.
    """
    al = list(alpha_grid)
    if not al:
        raise EmptyGridError("alpha_grid is empty")
    vals = [bracket(c, a) for a in al]
    return sum(1 for a, b in zip(vals, vals[1:]) if a * b < 0.0)
