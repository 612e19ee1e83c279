"""Gravitational real-clock decoherence channel: damping exponents,
elementwise-dephased density matrices, the damped z(t) envelope, and the
revival-suppression verdict.

The damping exponent is omega^2 * T_P^(2-2a) * t^(2a) with clock
exponent a (default 1/3).  A variant convention linear in omega and with
t^(1/3) is dimensionally inconsistent with the squared-frequency theta
matrix and is not used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import Bath, DensityMatrix, LogComplex, ParameterError
from .zurek import z_factor

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ClockChannel:
    t_planck: float = 5.39e-44
    clock_exponent: float = 1.0 / 3.0

    def __post_init__(self):
        if self.t_planck <= 0:
            raise ParameterError("t_planck must be positive")
        if not 0.0 < self.clock_exponent < 1.0:
            raise ParameterError("clock_exponent must lie in (0, 1)")


def damping_exponent(omega: float, t: float, ch: ClockChannel) -> float:
    """omega^2 * T_P^(2-2a) * t^(2a); the log of 1/damping_factor."""
    if omega < 0 or t < 0:
        raise ParameterError("omega and t must be >= 0")
    if t == 0.0 or omega == 0.0:
        return 0.0
    a = ch.clock_exponent
    return omega * omega * ch.t_planck ** (2.0 - 2.0 * a) * t ** (2.0 * a)


def damping_factor(omega: float, t: float, ch: ClockChannel) -> float:
    """exp(-omega^2 T_P^(2-2a) t^(2a)) in (0, 1]; 1 at t=0 or omega=0.

    Not a semigroup in t: the t^(2a) law makes the channel
    non-Markovian for a != 1/2.
    """
    return math.exp(-damping_exponent(omega, t, ch))


def theta(tau: float, ch: ClockChannel) -> float:
    """Damping parameter 3/2 * T_P^(2-2a) * tau^(2a) (units s^2 at a=1/3)."""
    if tau < 0:
        raise ParameterError("tau must be >= 0")
    if tau == 0.0:
        return 0.0
    a = ch.clock_exponent
    return 1.5 * ch.t_planck ** (2.0 - 2.0 * a) * tau ** (2.0 * a)


def damp_density(rho: DensityMatrix, bohr: np.ndarray,
                 theta_val: float) -> DensityMatrix:
    """Multiply every off-diagonal entry (m, n) by exp(-omega_mn^2 theta).

    bohr holds the Bohr frequencies omega_mn in rad/s; only their squares
    enter, so the sign convention omega_mn = -omega_nm is immaterial.
    The diagonal is untouched and the result stays a valid density
    matrix (symmetric shrinking of off-diagonals of a PSD matrix).
    """
    if theta_val < 0:
        raise ParameterError("theta must be >= 0")
    bohr = np.asarray(bohr, dtype=float)
    if bohr.shape != (rho.dim, rho.dim):
        raise ParameterError("Bohr matrix shape does not match density matrix")
    if np.max(np.abs(np.abs(bohr) - np.abs(bohr).T)) > 0:
        raise ParameterError("|omega_mn| must be symmetric")
    factors = np.exp(-bohr ** 2 * theta_val)
    np.fill_diagonal(factors, 1.0)
    return DensityMatrix(rho.entries * factors)


def damped_log_factor(bath: Bath, t: float, ch: ClockChannel) -> float:
    """ln of the real-clock envelope: -sum_k (2 g_k)^2 T_P^(2-2a) t^(2a)."""
    return -math.fsum(
        damping_exponent(2.0 * s.coupling, t, ch) for s in bath.spins)


def damped_z(bath: Bath, t: float, ch: ClockChannel) -> LogComplex:
    """z(t) multiplied by the strictly-decreasing real-clock envelope;
    the off-diagonal factor is no longer multiperiodic."""
    return z_factor(bath, t).scaled(damped_log_factor(bath, t, ch))


@dataclass(frozen=True)
class RevivalVerdict:
    killed: bool
    margin: float          # log(damping exponent) - log(floor exponent)
    log_revival_time: float
    n: int


def revival_killed(n: int, g: float, ch: ClockChannel) -> RevivalVerdict:
    """Is the first revival already below the interference floor?

    Killed iff N (2g)^2 T_P^(2-2a) t_r^(2a) > (N/2) ln 2 with the revival
    time t_r = N!/g.  Everything is evaluated in the log domain, so the
    verdict is overflow-safe at any N.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    if g <= 0:
        raise ParameterError("g must be positive")
    a = ch.clock_exponent
    log_tr = float(gammaln(n + 1)) - math.log(g)
    log_damp = (math.log(n) + 2.0 * math.log(2.0 * g)
                + (2.0 - 2.0 * a) * math.log(ch.t_planck) + 2.0 * a * log_tr)
    log_floor = math.log(n) - LN2 + math.log(LN2)
    margin = log_damp - log_floor
    return RevivalVerdict(killed=margin > 0.0, margin=margin,
                          log_revival_time=log_tr, n=n)


def revival_kill_threshold(g: float, ch: ClockChannel,
                           n_max: int = 100000) -> int:
    """Smallest N whose revival is killed; ParameterError if none <= n_max.

    Monotone: both sides of the criterion grow with N but the damping
    side grows factorially through t_r.
    """
    for n in range(1, n_max + 1):
        if revival_killed(n, g, ch).killed:
            return n
    raise ParameterError(f"no killed revival up to N = {n_max}")
