"""Exact 2x2 complex linear algebra and phase unwrapping.

Everything downstream (Kraus operators, rotations, step matrices, amplitude
products) lives in a two-dimensional Hilbert space, so all matrix work is done
in closed form on immutable 2x2 values.  No iterative solvers, no external
linear-algebra dependency.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence


class EmptySequenceError(ValueError):
    """Raised when a phase-unwrap is requested for an empty sequence."""


@dataclass(frozen=True)
class Vec2:
    """Spinor (up, down) on the basis {|up>, |down>}."""

    up: complex
    down: complex

    def norm2(self) -> float:
        return abs(self.up) ** 2 + abs(self.down) ** 2

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def dot(self, other: "Vec2") -> complex:
        """Inner product <self|other> (conjugates the left argument)."""
        return self.up.conjugate() * other.up + self.down.conjugate() * other.down

    def scaled(self, factor: complex) -> "Vec2":
        return Vec2(self.up * factor, self.down * factor)

    def normalized(self) -> "Vec2":
        n = self.norm()
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return self.scaled(1.0 / n)


@dataclass(frozen=True)
class Mat2:
    """Row-major 2x2 complex matrix."""

    m00: complex
    m01: complex
    m10: complex
    m11: complex

    @staticmethod
    def identity() -> "Mat2":
        return Mat2(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def zero() -> "Mat2":
        return Mat2(0.0, 0.0, 0.0, 0.0)

    @staticmethod
    def diag(a: complex, b: complex) -> "Mat2":
        return Mat2(a, 0.0, 0.0, b)

    def entries(self) -> tuple[complex, complex, complex, complex]:
        return (self.m00, self.m01, self.m10, self.m11)

    def trace(self) -> complex:
        return self.m00 + self.m11

    def det(self) -> complex:
        return self.m00 * self.m11 - self.m01 * self.m10

    def max_abs(self) -> float:
        return max(abs(e) for e in self.entries())

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return mat_mul(self, other)


def mat_mul(a: Mat2, b: Mat2) -> Mat2:
    """Exact row-by-column product a @ b."""
    return Mat2(
        a.m00 * b.m00 + a.m01 * b.m10,
        a.m00 * b.m01 + a.m01 * b.m11,
        a.m10 * b.m00 + a.m11 * b.m10,
        a.m10 * b.m01 + a.m11 * b.m11,
    )


def mat_vec(m: Mat2, v: Vec2) -> Vec2:
    return Vec2(m.m00 * v.up + m.m01 * v.down, m.m10 * v.up + m.m11 * v.down)


def dagger(m: Mat2) -> Mat2:
    """Conjugate transpose."""
    return Mat2(
        m.m00.conjugate(),
        m.m10.conjugate(),
        m.m01.conjugate(),
        m.m11.conjugate(),
    )


def is_unitary(m: Mat2, tol: float) -> bool:
    """True iff the largest entry of (m^dagger m - I) has modulus <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = mat_mul(dagger(m), m)
    dev = Mat2(p.m00 - 1.0, p.m01, p.m10, p.m11 - 1.0)
    return dev.max_abs() <= tol


def eigvals(m: Mat2) -> tuple[complex, complex]:
    """Closed-form eigenvalues from the quadratic characteristic polynomial."""
    t = m.trace()
    s = cmath.sqrt(t * t - 4.0 * m.det())
    return ((t + s) / 2.0, (t - s) / 2.0)


def arg_unwrap(values: Sequence[complex], tie_tol: float = 1e-9) -> list[float]:
    """Continuous phases of an ordered sequence of complex samples.

    The first phase is the principal argument of the first value; each later
    phase is picked on the branch minimizing the step from its predecessor.
    Steps of exactly pi (the amplitude crossing zero between samples) are kept
    as genuine jumps, resolved downward: a step within ``tie_tol`` of +pi is
    reported as -pi.  That convention makes a transition read 0 -> -pi rather
    than 0 -> +pi, matching how the transitions are presented everywhere else
    in this package.

    Zero-modulus samples carry no phase of their own; their phase is linearly
    interpolated between the neighboring nonzero samples, which attributes the
    pi jump to the interval containing the zero.
    """
    if len(values) == 0:
        raise EmptySequenceError("arg_unwrap needs at least one value")

    out: list[float | None] = [None] * len(values)
    prev = None  # (index, unwrapped phase) of last nonzero sample
    for i, z in enumerate(values):
        if z == 0:
            continue
        p = cmath.phase(z)
        if prev is None:
            out[i] = p
        else:
            d = (p - out[prev]) % (2.0 * math.pi)
            if d > math.pi + tie_tol:
                d -= 2.0 * math.pi
            elif d >= math.pi - tie_tol:
                d = -math.pi
            out[i] = out[prev] + d
        prev = i

    if prev is None:
        # every sample has zero modulus; phase is undefined, report zeros
        return [0.0] * len(values)

    # fill zero-modulus gaps: leading/trailing copy the nearest anchor,
    # interior gaps interpolate linearly between anchors
    anchors = [i for i, p in enumerate(out) if p is not None]
    first, last = anchors[0], anchors[-1]
    for i in range(first):
        out[i] = out[first]
    for i in range(last + 1, len(out)):
        out[i] = out[last]
    for a, b in zip(anchors, anchors[1:]):
        for i in range(a + 1, b):
            frac = (i - a) / (b - a)
            out[i] = out[a] + frac * (out[b] - out[a])
    return out  # type: ignore[return-value]
