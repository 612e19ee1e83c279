"""Shared domain types: qubit amplitudes, spin baths, SI constants,
log-domain complex arithmetic and density-matrix utilities.

All values are immutable after construction; every operation here is a
pure function.  Randomness enters only through an explicit seed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class RegimeError(ValueError):
    """Inputs fall outside the validity regime of an approximation."""


class CapacityError(ValueError):
    """Requested problem size exceeds the dense-simulation cap."""


class DegenerateBranchError(ValueError):
    """Branch construction requires both needle amplitudes nonzero."""


def wrap_phase(phi: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    w = math.remainder(phi, 2.0 * math.pi)
    if w <= -math.pi:
        w += 2.0 * math.pi
    return w


@dataclass(frozen=True)
class LogComplex:
    """A complex number stored as (ln|z|, arg z).

    Exact zero is represented by ``log_mag = -inf``.  Stable under
    products of thousands of unit-scale factors where plain doubles
    would under/overflow.
    """

    log_mag: float
    phase: float

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        z = complex(z)
        if z == 0:
            return cls(-math.inf, 0.0)
        return cls(math.log(abs(z)), wrap_phase(cmath.phase(z)))

    def to_complex(self) -> complex:
        if self.log_mag == -math.inf:
            return 0j
        return cmath.rect(math.exp(self.log_mag), self.phase)

    @property
    def magnitude(self) -> float:
        return math.exp(self.log_mag) if self.log_mag != -math.inf else 0.0

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.log_mag == -math.inf or other.log_mag == -math.inf:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(self.log_mag + other.log_mag,
                          wrap_phase(self.phase + other.phase))

    def conj(self) -> "LogComplex":
        return LogComplex(self.log_mag, wrap_phase(-self.phase))

    def scaled(self, factor_log: float) -> "LogComplex":
        """Multiply by a positive real factor given as its natural log."""
        if self.log_mag == -math.inf:
            return self
        return LogComplex(self.log_mag + factor_log, self.phase)


def log_product(factors: Iterable[complex]) -> LogComplex:
    """Product of complex factors accumulated in the log domain.

    An exactly-zero factor short-circuits to the log-domain zero.
    """
    logs: list[float] = []
    phases: list[float] = []
    for z in factors:
        z = complex(z)
        if z == 0:
            return LogComplex(-math.inf, 0.0)
        logs.append(math.log(abs(z)))
        phases.append(cmath.phase(z))
    return LogComplex(math.fsum(logs), wrap_phase(math.fsum(phases)))


@dataclass(frozen=True)
class QubitAmplitudes:
    """Normalized complex pair (a, b) for a single spin-1/2 state."""

    a: complex
    b: complex

    def __post_init__(self):
        n = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(n - 1.0) > NORM_TOL:
            raise ParameterError(f"amplitudes not normalized: |a|^2+|b|^2 = {n!r}")


@dataclass(frozen=True)
class BathSpin:
    """One environment spin: state amplitudes plus its coupling frequency."""

    alpha: complex
    beta: complex
    coupling: float  # rad/s

    def __post_init__(self):
        n = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(n - 1.0) > NORM_TOL:
            raise ParameterError(f"bath spin not normalized: {n!r}")
        if self.coupling < 0:
            raise ParameterError("coupling must be >= 0")

    @property
    def population_imbalance(self) -> float:
        """|alpha|^2 - |beta|^2, the weight that sets the z-factor phase."""
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2


@dataclass(frozen=True)
class Bath:
    """Ordered collection of environment spins."""

    spins: tuple[BathSpin, ...]

    def __post_init__(self):
        if len(self.spins) < 1:
            raise ParameterError("bath must contain at least one spin")

    @property
    def n(self) -> int:
        return len(self.spins)

    def couplings(self) -> np.ndarray:
        return np.array([s.coupling for s in self.spins])


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants plus the clock-error exponent."""

    hbar: float = 1.054571e-34     # J s
    mu0: float = 1.256637e-6       # T m / A
    t_planck: float = 5.39e-44     # s
    clock_exponent: float = 1.0 / 3.0

    def __post_init__(self):
        for name in ("hbar", "mu0", "t_planck"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")
        if not 0.0 < self.clock_exponent < 1.0:
            raise ParameterError("clock_exponent must lie in (0, 1)")


@dataclass(frozen=True)
class PhysicalScenario:
    """SI-unit bundle describing one cavity experiment."""

    mass: float     # kg, environment particle
    gamma1: float   # J/T, needle magnetic moment
    gamma2: float   # J/T, environment magnetic moment
    B: float        # T
    d: float        # m, impact parameter
    L: float        # m, half cavity length
    v: float        # m/s
    tau: float      # s, time of flight
    N: int
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        for name in ("mass", "gamma1", "gamma2", "B", "d", "L", "v", "tau"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")
        if self.N < 1:
            raise ParameterError("N must be >= 1")

    @property
    def gamma_plus(self) -> float:
        return self.gamma1 + self.gamma2

    @property
    def gamma_minus(self) -> float:
        return self.gamma1 - self.gamma2


def _check_density(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ParameterError("density matrix must be square")
    dim = m.shape[0]
    if dim < 1 or dim & (dim - 1) != 0:
        raise ParameterError(f"dimension {dim} is not a power of two")
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise ParameterError("matrix is not Hermitian")
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ParameterError(f"trace is {tr!r}, expected 1")
    if np.min(np.linalg.eigvalsh(m)) < -PSD_TOL:
        raise ParameterError("matrix has a negative eigenvalue")
    return m


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, PSD complex matrix of power-of-two dimension."""

    entries: np.ndarray

    def __post_init__(self):
        m = _check_density(self.entries)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_state(cls, psi: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        return cls(np.outer(psi, psi.conj()))


def sample_bath(n: int, coupling_law, seed: int) -> Bath:
    """Draw n Haar-random environment spins with couplings per coupling_law.

    coupling_law is either a single frequency (every spin identical) or a
    (low, high) pair sampled uniformly.  Deterministic for a fixed seed.
    """
    if n < 1:
        raise ParameterError("need at least one bath spin")
    if np.isscalar(coupling_law):
        g_fixed = float(coupling_law)
        if g_fixed < 0:
            raise ParameterError("coupling must be >= 0")
        law = ("fixed", g_fixed)
    else:
        lo, hi = (float(x) for x in coupling_law)
        if not (0 <= lo <= hi):
            raise ParameterError(f"invalid coupling range ({lo}, {hi})")
        law = ("uniform", lo, hi)

    rng = np.random.default_rng(seed)
    spins = []
    for _ in range(n):
        # Four real Gaussians normalized: Haar measure on pure qubit states.
        x = rng.normal(size=4)
        x /= math.sqrt(float(np.dot(x, x)))
        alpha = complex(x[0], x[1])
        beta = complex(x[2], x[3])
        if law[0] == "fixed":
            g = law[1]
        else:
            g = rng.uniform(law[1], law[2])
        spins.append(BathSpin(alpha, beta, g))
    return Bath(tuple(spins))


def partial_trace(rho: np.ndarray | DensityMatrix,
                  keep: Sequence[int],
                  dims: Sequence[int]) -> DensityMatrix:
    """Trace out every tensor factor not listed in keep.

    dims gives the dimension of each factor in order; their product must
    equal the matrix dimension.  Trace and Hermiticity are preserved.
    """
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    dims = tuple(int(d) for d in dims)
    nfac = len(dims)
    if math.prod(dims) != m.shape[0]:
        raise ParameterError(f"dims {dims} do not factor dimension {m.shape[0]}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= nfac for k in keep):
        raise ParameterError(f"keep indices {keep} out of range for {nfac} factors")

    t = m.reshape(dims + dims)
    traced = [i for i in range(nfac) if i not in keep]
    for i in sorted(traced, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + t.ndim // 2)
    d_keep = math.prod(dims[k] for k in keep) if keep else 1
    return DensityMatrix(t.reshape(d_keep, d_keep))


def trace_distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Half the sum of absolute eigenvalues of rho1 - rho2."""
    if rho1.dim != rho2.dim:
        raise ParameterError("dimension mismatch")
    eig = np.linalg.eigvalsh(rho1.entries - rho2.entries)
    return 0.5 * float(np.sum(np.abs(eig)))
