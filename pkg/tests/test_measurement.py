"""POVM construction: completeness, rotations, and the step matrix."""

import cmath
import math

import numpy as np
import pytest

from geophase.measurement import (
    EtaOutOfRangeError,
    Orientation,
    delta_r,
    kraus_oriented,
    kraus_z,
    rotation,
)
from geophase.qmat import Mat2, Vec2, dagger, eigvals, is_unitary, mat_mul, mat_vec

I2 = Mat2.identity()


def completeness_defect(plus: Mat2, minus: Mat2) -> float:
    s_plus = mat_mul(dagger(plus), plus)
    s_minus = mat_mul(dagger(minus), minus)
    total = Mat2(
        s_plus.m00 + s_minus.m00 - 1.0,
        s_plus.m01 + s_minus.m01,
        s_plus.m10 + s_minus.m10,
        s_plus.m11 + s_minus.m11 - 1.0,
    )
    return total.max_abs()


class TestKrausZ:
    def test_eta_zero_is_no_measurement(self):
        pair = kraus_z(0.0)
        assert pair.plus == I2
        assert pair.minus == Mat2.zero()

    def test_eta_one_is_projective(self):
        pair = kraus_z(1.0)
        assert pair.plus == Mat2.diag(1.0, 0.0)
        assert pair.minus == Mat2.diag(0.0, 1.0)

    def test_eta_half_completeness(self):
        pair = kraus_z(0.5)
        assert pair.plus.m11 == pytest.approx(math.sqrt(0.5), abs=1e-15)
        assert completeness_defect(pair.plus, pair.minus) <= 1e-15

    @pytest.mark.parametrize("eta", [-0.1, 1.1, 2.0])
    def test_eta_out_of_range(self, eta):
        with pytest.raises(EtaOutOfRangeError):
            kraus_z(eta)


class TestRotation:
    def test_theta_zero_phi_zero_is_identity(self):
        assert rotation(Orientation(0.0, 0.0)) == I2

    def test_theta_zero_any_phi_acts_as_identity_on_kraus(self):
        # at the pole the azimuth is a gauge: the oriented Kraus operator is
        # exactly the z-axis one for every phi
        for phi in (0.7, 2.0, -5.0):
            op = kraus_oriented(0.4, Orientation(0.0, phi), "+")
            expect = kraus_z(0.4).plus
            assert max(abs(a - b) for a, b in zip(op.entries(), expect.entries())) <= 1e-15

    def test_equatorial_phi_zero(self):
        r = rotation(Orientation(math.pi / 2, 0.0))
        s = math.sqrt(0.5)
        expect = Mat2(s, s, -s, s)
        assert max(abs(a - b) for a, b in zip(r.entries(), expect.entries())) <= 1e-15

    def test_unitary_at_random_angles(self):
        rng = np.random.default_rng(41)
        for _ in range(1000):
            n = Orientation(rng.uniform(0, math.pi), rng.uniform(-30, 30))
            assert is_unitary(rotation(n), 1e-10)

    def test_step_factorization_anchor(self):
        # successive equatorial rotations must compose to the step matrix:
        # delta_r(eps) = R(pi/2, phi+eps) R^dagger(pi/2, phi) for every phi
        rng = np.random.default_rng(42)
        for _ in range(200):
            phi = rng.uniform(-20, 20)
            eps = rng.uniform(-3, 3)
            lhs = mat_mul(
                rotation(Orientation(math.pi / 2, phi + eps)),
                dagger(rotation(Orientation(math.pi / 2, phi))),
            )
            rhs = delta_r(eps)
            assert max(abs(a - b) for a, b in zip(lhs.entries(), rhs.entries())) <= 1e-12

    def test_theta_canonicalized(self):
        n = Orientation(-0.3, 1.0)
        assert 0.0 <= n.theta <= math.pi

    def test_winding_preserved(self):
        # phi is never reduced mod 2 pi
        n = Orientation(math.pi / 2, 7 * math.pi)
        assert n.phi == 7 * math.pi


class TestKrausOriented:
    def test_pole_orientation_reduces_to_z(self):
        op = kraus_oriented(0.37, Orientation(0.0, 0.0), "+")
        assert op == kraus_z(0.37).plus

    def test_completeness_oriented(self):
        plus = kraus_oriented(0.3, Orientation(math.pi / 2, 1.0), "+")
        minus = kraus_oriented(0.3, Orientation(math.pi / 2, 1.0), "-")
        assert completeness_defect(plus, minus) <= 1e-12

    def test_projective_equatorial_projector(self):
        # eta = 1 along +x projects onto (|up> + |down>)/sqrt(2)
        op = kraus_oriented(1.0, Orientation(math.pi / 2, 0.0), "+")
        expect = Mat2(0.5, 0.5, 0.5, 0.5)
        assert max(abs(a - b) for a, b in zip(op.entries(), expect.entries())) <= 1e-15

    def test_completeness_sweep(self):
        rng = np.random.default_rng(43)
        orientations = [
            Orientation(rng.uniform(0, math.pi), rng.uniform(-10, 10)) for _ in range(100)
        ]
        for eta in np.linspace(0.0, 1.0, 11):
            for n in orientations[:10]:
                plus = kraus_oriented(eta, n, "+")
                minus = kraus_oriented(eta, n, "-")
                assert completeness_defect(plus, minus) <= 1e-12

    def test_norm_conservation(self):
        rng = np.random.default_rng(44)
        for _ in range(50):
            raw = Vec2(
                complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
            )
            psi = raw.normalized()
            n = Orientation(rng.uniform(0, math.pi), rng.uniform(-10, 10))
            eta = rng.uniform(0, 1)
            total = sum(
                mat_vec(kraus_oriented(eta, n, r), psi).norm2() for r in ("+", "-")
            )
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_bad_readout(self):
        with pytest.raises(ValueError):
            kraus_oriented(0.5, Orientation(0.0, 0.0), "x")

    def test_eta_out_of_range(self):
        with pytest.raises(EtaOutOfRangeError):
            kraus_oriented(1.5, Orientation(0.0, 0.0), "+")


class TestDeltaR:
    def test_zero_increment_is_identity(self):
        assert max(abs(a - b) for a, b in zip(delta_r(0.0).entries(), I2.entries())) == 0.0

    def test_half_turn_swaps_basis(self):
        d = delta_r(math.pi)
        expect = Mat2(0.0, 1.0, 1.0, 0.0)
        assert max(abs(a - b) for a, b in zip(d.entries(), expect.entries())) <= 1e-15

    def test_small_increment_unitary_and_spectrum(self):
        eps = 2 * math.pi / 100
        d = delta_r(eps)
        assert is_unitary(d, 1e-12)
        l1, l2 = sorted(eigvals(d), key=lambda z: -z.real)
        assert abs(l1 - 1.0) <= 1e-12
        assert abs(l2 - cmath.exp(-1j * eps)) <= 1e-12

    def test_inverse_pairing(self):
        for eps in (0.3, 1.7, -2.2):
            prod = mat_mul(delta_r(eps), delta_r(-eps))
            assert max(abs(a - b) for a, b in zip(prod.entries(), I2.entries())) <= 1e-12

    def test_one_parameter_group(self):
        prod = mat_mul(delta_r(0.4), delta_r(1.1))
        expect = delta_r(1.5)
        assert max(abs(a - b) for a, b in zip(prod.entries(), expect.entries())) <= 1e-12
