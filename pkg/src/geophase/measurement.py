"""Null-type weak-measurement POVM on a qubit.

A single measurement of strength ``eta`` along the z axis is the Kraus pair

    M(z, +) = diag(1, sqrt(1 - eta))      M(z, -) = diag(0, sqrt(eta))

which is complete: M+^dag M+ + M-^dag M- = I.  Measurements along a generic
orientation n = (theta, phi) are obtained by conjugation with the unitary

    R(n) = ( e^{-i phi} cos(theta/2)    sin(theta/2) )
           ( -e^{-i phi} sin(theta/2)   cos(theta/2) )

via M(n, r) = R^{-1}(n) M(z, r) R(n).  That phase convention is fixed by the
requirement that two successive equatorial orientations compose to the
orientation-independent step matrix

    delta_r(eps) = 1/2 ( 1 + e^{-i eps}   1 - e^{-i eps} )
                       ( 1 - e^{-i eps}   1 + e^{-i eps} )

through delta_r(eps) = R(pi/2, phi + eps) R^{-1}(pi/2, phi) for every phi,
which is what collapses an equatorial measurement sequence into a repeated
product of identical factors.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .qmat import Mat2, dagger, mat_mul


class EtaOutOfRangeError(ValueError):
    """Measurement strength outside [0, 1]."""


@dataclass(frozen=True)
class Orientation:
    """Measurement direction (theta, phi) in radians.

    theta is canonicalized into [0, pi].  phi is left unreduced: windings of
    the polar angle are meaningful and must survive, so phi is never taken
    mod 2 pi.
    """

    theta: float
    phi: float

    def __post_init__(self) -> None:
        t = self.theta % (2.0 * math.pi)
        p = self.phi
        if t > math.pi:
            # mirror through the pole; shift phi additively to keep windings
            t = 2.0 * math.pi - t
            p = p + math.pi
        object.__setattr__(self, "theta", t)
        object.__setattr__(self, "phi", p)


@dataclass(frozen=True)
class KrausPair:
    """The two measurement operators {M(n, +), M(n, -)} for one step."""

    eta: float
    plus: Mat2
    minus: Mat2


def _check_eta(eta: float) -> None:
    if not 0.0 <= eta <= 1.0:
        raise EtaOutOfRangeError(f"measurement strength eta={eta!r} not in [0, 1]")


def kraus_z(eta: float) -> KrausPair:
    """Kraus pair for a z-oriented measurement of strength eta."""
    _check_eta(eta)
    return KrausPair(
        eta=eta,
        plus=Mat2.diag(1.0, math.sqrt(1.0 - eta)),
        minus=Mat2.diag(0.0, math.sqrt(eta)),
    )


def rotation(n: Orientation) -> Mat2:
    """Unitary mapping the +n measurement axis onto +z (see module docstring)."""
    c = math.cos(n.theta / 2.0)
    s = math.sin(n.theta / 2.0)
    e = cmath.exp(-1j * n.phi)
    return Mat2(e * c, s, -e * s, c)


def kraus_oriented(eta: float, n: Orientation, readout: str) -> Mat2:
    """Kraus operator M(n, readout) = R^{-1}(n) M(z, readout) R(n).

    readout is "+" or "-".
    """
    _check_eta(eta)
    pair = kraus_z(eta)
    if readout == "+":
        mz = pair.plus
    elif readout == "-":
        mz = pair.minus
    else:
        raise ValueError(f"readout must be '+' or '-', got {readout!r}")
    r = rotation(n)
    return mat_mul(dagger(r), mat_mul(mz, r))


def delta_r(epsilon: float) -> Mat2:
    """Orientation step matrix for an equatorial increment of epsilon."""
    e = cmath.exp(-1j * epsilon)
    a = 0.5 * (1.0 + e)
    b = 0.5 * (1.0 - e)
    return Mat2(a, b, b, a)
