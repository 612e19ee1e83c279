"""Single-pass and N-pass dynamics of the cavity model: 4x4 pass
Hamiltonian, closed-form and RK4 single-pass evolution, branch-state
products, inner products in the log domain, and the needle's reduced
density matrix.

Unit convention: magnetic energies B*Gamma are divided by hbar once at
PassParams construction, so every Hamiltonian entry and every frequency
below is in rad/s.  That keeps the weak-coupling comparison
f_k << B*Gamma_- dimensionally coherent.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import (Bath, BathSpin, DegenerateBranchError, DensityMatrix,
                   LogComplex, ParameterError, PhysicalScenario,
                   QubitAmplitudes, RegimeError, log_product)

HBAR_SI = 1.054571e-34
WEAK_COUPLING_RATIO = 0.1


@dataclass(frozen=True)
class PassParams:
    """Parameters of one cavity pass.

    f is the nominal spin-spin coupling in rad/s; per-spin couplings from
    a Bath override it where noted.  B carries units of Tesla and the
    gammas J/T; the derived bg_plus/bg_minus are angular frequencies.
    """

    f: float
    B: float
    gamma1: float
    gamma2: float
    tau: float
    hbar: float = HBAR_SI

    def __post_init__(self):
        if self.tau < 0:
            raise ParameterError("tau must be >= 0")
        if self.hbar <= 0:
            raise ParameterError("hbar must be positive")

    @property
    def bg_plus(self) -> float:
        """B (gamma1 + gamma2) / hbar, rad/s."""
        return self.B * (self.gamma1 + self.gamma2) / self.hbar

    @property
    def bg_minus(self) -> float:
        """B (gamma1 - gamma2) / hbar, rad/s."""
        return self.B * (self.gamma1 - self.gamma2) / self.hbar

    def omega(self, f: float | None = None) -> float:
        """Mixing frequency sqrt(4 f^2 + (B Gamma_-/hbar)^2)."""
        fk = self.f if f is None else f
        return math.sqrt(4.0 * fk * fk + self.bg_minus ** 2)


@dataclass(frozen=True)
class PassCoefficients:
    """Coefficients (R, T, U, V) of |++>, |+->, |-+>, |--> after a pass."""

    R: complex
    T: complex
    U: complex
    V: complex

    @property
    def norm_sq(self) -> float:
        return (abs(self.R) ** 2 + abs(self.T) ** 2
                + abs(self.U) ** 2 + abs(self.V) ** 2)

    def as_vector(self) -> np.ndarray:
        return np.array([self.R, self.T, self.U, self.V], dtype=complex)


@dataclass(frozen=True)
class BranchVectors:
    """Per-spin 2-vectors whose tensor products form the |A> and |B>
    branches of the N-pass product state.  Not individually normalized."""

    a_plus: tuple[complex, ...]
    a_minus: tuple[complex, ...]
    b_plus: tuple[complex, ...]
    b_minus: tuple[complex, ...]

    @property
    def n(self) -> int:
        return len(self.a_plus)


def pass_hamiltonian(p: PassParams, f: float | None = None) -> np.ndarray:
    """4x4 Hermitian pass Hamiltonian in rad/s, basis (++, +-, -+, --)."""
    fk = p.f if f is None else f
    bgp, bgm = p.bg_plus, p.bg_minus
    return np.array([
        [fk + bgp, 0.0, 0.0, 0.0],
        [0.0, -fk + bgm, 2.0 * fk, 0.0],
        [0.0, 2.0 * fk, -fk - bgm, 0.0],
        [0.0, 0.0, 0.0, fk - bgp],
    ], dtype=complex)


def single_pass_closed(sys: QubitAmplitudes, spin: BathSpin,
                       p: PassParams) -> PassCoefficients:
    """Closed-form pass coefficients after time tau.

    The diagonal entries give pure phases on R and V; the central block
    mixes T and U through Omega = sqrt(4 f^2 + (B Gamma_-/hbar)^2).
    The spin's own coupling is used as f.
    """
    a, b = sys.a, sys.b
    alpha, beta = spin.alpha, spin.beta
    f, tau = spin.coupling, p.tau
    bgp, bgm = p.bg_plus, p.bg_minus
    omega = p.omega(f)
    if omega == 0.0:
        c, snc = 1.0, tau
    else:
        c = math.cos(omega * tau)
        snc = math.sin(omega * tau) / omega
    ph = cmath.exp(1j * f * tau)
    r = a * alpha * cmath.exp(-1j * (f + bgp) * tau)
    v = b * beta * cmath.exp(-1j * (f - bgp) * tau)
    t = a * beta * ph * (c - 1j * bgm * snc) - 2j * b * alpha * f * snc * ph
    u = b * alpha * ph * (c + 1j * bgm * snc) - 2j * a * beta * f * snc * ph
    return PassCoefficients(r, t, u, v)


def single_pass_numeric(sys: QubitAmplitudes, spin: BathSpin, p: PassParams,
                        steps: int = 1000) -> PassCoefficients:
    """Fixed-step RK4 integration of the four coupled pass ODEs.

    Cross-check oracle for the closed form; independent of it apart from
    sharing the Hamiltonian definition.
    """
    if steps < 100:
        raise ParameterError("steps must be >= 100")
    h = pass_hamiltonian(p, f=spin.coupling)
    y = np.array([sys.a * spin.alpha, sys.a * spin.beta,
                  sys.b * spin.alpha, sys.b * spin.beta], dtype=complex)
    dt = p.tau / steps

    def deriv(v):
        return -1j * (h @ v)

    for _ in range(steps):
        k1 = deriv(y)
        k2 = deriv(y + 0.5 * dt * k1)
        k3 = deriv(y + 0.5 * dt * k2)
        k4 = deriv(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return PassCoefficients(*y)


def branch_vectors(sys: QubitAmplitudes, bath: Bath,
                   p_common: PassParams) -> BranchVectors:
    """Per-spin branch 2-vectors of the N-pass product state.

    Built by regrouping the single-pass solution: |A>_k = (R/a, T/a),
    |B>_k = (U/b, V/b), with each spin's own coupling.  The |B> minus
    component follows the V solution, so its phase is -(f - B Gamma_+) tau
    as the diagonal Hamiltonian entry dictates.
    """
    if sys.a == 0 or sys.b == 0:
        raise DegenerateBranchError(
            "branch products contain b/a and a/b; compose single passes "
            "directly for a collapsed needle")
    ap, am, bp, bm = [], [], [], []
    for spin in bath.spins:
        coeff = single_pass_closed(sys, spin, p_common)
        ap.append(coeff.R / sys.a)
        am.append(coeff.T / sys.a)
        bp.append(coeff.U / sys.b)
        bm.append(coeff.V / sys.b)
    return BranchVectors(tuple(ap), tuple(am), tuple(bp), tuple(bm))


def inner_aa(bv: BranchVectors) -> float:
    """ln <A|A>: sum of logs of the positive per-spin norms."""
    return math.fsum(
        math.log(abs(bv.a_plus[k]) ** 2 + abs(bv.a_minus[k]) ** 2)
        for k in range(bv.n))


def inner_bb(bv: BranchVectors) -> float:
    """ln <B|B>."""
    return math.fsum(
        math.log(abs(bv.b_plus[k]) ** 2 + abs(bv.b_minus[k]) ** 2)
        for k in range(bv.n))


def inner_ab(bv: BranchVectors) -> LogComplex:
    """<A|B> as an exact log-domain product of per-spin overlaps."""
    return log_product(
        bv.a_plus[k].conjugate() * bv.b_plus[k]
        + bv.a_minus[k].conjugate() * bv.b_minus[k]
        for k in range(bv.n))


def weak_coupling_ratio(bath: Bath, p: PassParams) -> float:
    """max_k f_k / |B Gamma_-/hbar|, the regime gate for approximations."""
    bgm = abs(p.bg_minus)
    if bgm == 0.0:
        return math.inf
    return max(s.coupling for s in bath.spins) / bgm


def inner_ab_approx(bath: Bath, p: PassParams,
                    tol: float = WEAK_COUPLING_RATIO) -> LogComplex:
    """Weak-coupling <A|B>: prod_k e^(2i Omega_k tau)
    [cos(2 f_k tau) + i (|alpha_k|^2 - |beta_k|^2) sin(2 f_k tau)].

    Valid only for f_k << |B Gamma_-|; outside that regime the leading
    Omega_k ~ B Gamma_- expansion does not hold.
    """
    ratio = weak_coupling_ratio(bath, p)
    if not ratio < tol:
        raise RegimeError(
            f"f/(B Gamma_-) = {ratio:.3g} exceeds weak-coupling gate {tol}")
    tau = p.tau

    def factor(s: BathSpin) -> complex:
        om = p.omega(s.coupling)
        return cmath.exp(2j * om * tau) * complex(
            math.cos(2.0 * s.coupling * tau),
            s.population_imbalance * math.sin(2.0 * s.coupling * tau))

    return log_product(factor(s) for s in bath.spins)


def reduced_density_needle(sys: QubitAmplitudes,
                           bv: BranchVectors) -> DensityMatrix:
    """Needle 2x2 state [[|a|^2 <A|A>, a b* <B|A>], [a* b <A|B>, |b|^2 <B|B>]],
    normalized by its trace (the product-form norm is 1 only to leading
    order for N >= 2)."""
    a, b = sys.a, sys.b
    paa = math.exp(inner_aa(bv))
    pbb = math.exp(inner_bb(bv))
    ab = inner_ab(bv).to_complex()
    m = np.array([[abs(a) ** 2 * paa, a * b.conjugate() * ab.conjugate()],
                  [a.conjugate() * b * ab, abs(b) ** 2 * pbb]], dtype=complex)
    return DensityMatrix(m / np.trace(m).real)


def offdiagonal_log_magnitude(sys: QubitAmplitudes, bv: BranchVectors) -> float:
    """ln |a* b <A|B>| without leaving the log domain (safe at N >> 1)."""
    mag_ab = abs(sys.a.conjugate() * sys.b)
    if mag_ab == 0.0:
        return -math.inf
    return inner_ab(bv).log_mag + math.log(mag_ab)


def integrated_coupling(s: PhysicalScenario) -> float:
    """Accumulated coupling phase of one straight-line pass:
    (2 mu gamma1 gamma2 / (hbar v d^2)) / sqrt(1 + d^2/L^2)."""
    c = s.constants
    return (2.0 * c.mu0 * s.gamma1 * s.gamma2 / (c.hbar * s.v * s.d ** 2)
            / math.sqrt(1.0 + (s.d / s.L) ** 2))
