import math

import numpy as np
import pytest

from decolab.core import DensityMatrix, ParameterError, sample_bath
from decolab.realclock import (ClockChannel, damp_density, damped_log_factor,
                               damped_z, damping_exponent, damping_factor,
                               revival_kill_threshold, revival_killed, theta)
from decolab.zurek import z_factor

CH = ClockChannel()  # physical Planck time, exponent 1/3


class TestClockChannel:
    def test_defaults(self):
        assert CH.t_planck == pytest.approx(5.39e-44)
        assert CH.clock_exponent == pytest.approx(1.0 / 3.0)

    def test_validation(self):
        with pytest.raises(ParameterError):
            ClockChannel(t_planck=0.0)
        with pytest.raises(ParameterError):
            ClockChannel(clock_exponent=1.0)
        with pytest.raises(ParameterError):
            ClockChannel(clock_exponent=0.0)


class TestDamping:
    def test_exponent_formula(self):
        ch = ClockChannel(t_planck=0.1, clock_exponent=0.25)
        omega, t = 3.0, 2.0
        expect = omega ** 2 * 0.1 ** 1.5 * t ** 0.5
        assert damping_exponent(omega, t, ch) == pytest.approx(expect, rel=1e-14)

    def test_factor_bounds(self):
        assert damping_factor(2.0, 0.0, CH) == 1.0
        assert damping_factor(0.0, 5.0, CH) == 1.0
        f = damping_factor(1e28, 1.0, CH)
        assert 0.0 < f < 1.0

    def test_monotone_in_time(self):
        ch = ClockChannel(t_planck=1e-3)
        vals = [damping_factor(5.0, t, ch) for t in (0.5, 1.0, 2.0, 4.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_validation(self):
        with pytest.raises(ParameterError):
            damping_exponent(-1.0, 1.0, CH)
        with pytest.raises(ParameterError):
            damping_exponent(1.0, -1.0, CH)


class TestTheta:
    def test_default_exponent_value(self):
        tau = 2e-5
        expect = 1.5 * CH.t_planck ** (4.0 / 3.0) * tau ** (2.0 / 3.0)
        assert theta(tau, CH) == pytest.approx(expect, rel=1e-14)

    def test_one_second_magnitude(self):
        # ~3e-58 s^2 for a one-second flight at the physical Planck time
        val = theta(1.0, CH)
        assert 1e-58 < val < 1e-57

    def test_zero_time(self):
        assert theta(0.0, CH) == 0.0


class TestDampDensity:
    def setup_method(self):
        psi = np.array([0.6, 0.8j])
        self.rho = DensityMatrix.from_state(psi)
        self.bohr = np.array([[0.0, 2.0], [2.0, 0.0]])

    def test_offdiagonal_shrinks_diagonal_fixed(self):
        out = damp_density(self.rho, self.bohr, theta_val=0.5)
        factor = math.exp(-4.0 * 0.5)
        assert np.allclose(np.diag(out.entries), np.diag(self.rho.entries))
        assert out.entries[0, 1] == pytest.approx(
            self.rho.entries[0, 1] * factor)

    def test_identity_at_zero_theta(self):
        out = damp_density(self.rho, self.bohr, theta_val=0.0)
        assert np.max(np.abs(out.entries - self.rho.entries)) == 0.0

    def test_validation(self):
        with pytest.raises(ParameterError):
            damp_density(self.rho, self.bohr, theta_val=-1.0)
        with pytest.raises(ParameterError):
            damp_density(self.rho, np.zeros((3, 3)), theta_val=0.1)
        with pytest.raises(ParameterError):
            damp_density(self.rho, np.array([[0.0, 1.0], [2.0, 0.0]]), 0.1)


class TestDampedZ:
    def test_envelope_is_negative_log_factor(self):
        bath = sample_bath(5, (0.5, 2.0), seed=3)
        ch = ClockChannel(t_planck=1e-3)
        t = 1.7
        expect = -sum((2.0 * s.coupling) ** 2 * 1e-3 ** (4.0 / 3.0)
                      * t ** (2.0 / 3.0) for s in bath.spins)
        assert damped_log_factor(bath, t, ch) == pytest.approx(expect, rel=1e-12)

    def test_strictly_below_unitary_z(self):
        bath = sample_bath(5, (0.5, 2.0), seed=3)
        ch = ClockChannel(t_planck=1e-3)
        t = 1.7
        z = z_factor(bath, t)
        zd = damped_z(bath, t, ch)
        assert zd.log_mag < z.log_mag
        assert zd.phase == z.phase

    def test_equal_at_t_zero(self):
        bath = sample_bath(5, (0.5, 2.0), seed=3)
        assert damped_z(bath, 0.0, CH).to_complex() == pytest.approx(1.0)


class TestRevivalKilled:
    def test_small_n_survives_huge_n_killed(self):
        g = 1e9
        assert not revival_killed(1, g, CH).killed
        assert revival_killed(500, g, CH).killed

    def test_margin_sign_matches_verdict(self):
        for n in (1, 10, 52, 100):
            v = revival_killed(n, 1e9, CH)
            assert v.killed == (v.margin > 0.0)
            assert v.n == n

    def test_threshold_order_hundred(self):
        n_star = revival_kill_threshold(1e9, CH)
        assert 50 <= n_star <= 5000
        assert not revival_killed(n_star - 1, 1e9, CH).killed
        assert revival_killed(n_star, 1e9, CH).killed

    def test_threshold_unreachable_raises(self):
        with pytest.raises(ParameterError):
            revival_kill_threshold(1e9, CH, n_max=3)

    def test_validation(self):
        with pytest.raises(ParameterError):
            revival_killed(0, 1e9, CH)
        with pytest.raises(ParameterError):
            revival_killed(5, 0.0, CH)
