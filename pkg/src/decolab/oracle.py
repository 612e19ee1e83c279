"""Brute-force dense Hilbert-space simulator.

Keeps all 2^(N+1) amplitudes explicitly and serves as the independent
ground truth for every analytic product formula.  Capped at N = 12
environment spins so the full cross-validation suite stays fast.

Index convention: the needle is the most significant qubit; environment
spins follow in bath order.  Bit value 0 means |+>, 1 means |->.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Bath, CapacityError, ParameterError, QubitAmplitudes
from .cavity import PassParams

MAX_ENV_SPINS = 12


@dataclass(frozen=True)
class DenseState:
    n_env: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amps.size != 2 ** (self.n_env + 1):
            raise ParameterError("amplitude count does not match spin count")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


def dense_from_product(sys: QubitAmplitudes, bath: Bath) -> DenseState:
    """Kronecker assembly of (a|+> + b|->) (x) each bath spin."""
    if bath.n > MAX_ENV_SPINS:
        raise CapacityError(f"dense simulation capped at {MAX_ENV_SPINS} spins")
    psi = np.array([sys.a, sys.b], dtype=complex)
    for spin in bath.spins:
        psi = np.kron(psi, np.array([spin.alpha, spin.beta], dtype=complex))
    return DenseState(bath.n, psi)


def _spin_signs(n_env: int) -> np.ndarray:
    """Per-basis-state sigma_z values, shape (n_env + 1, 2^(n_env+1))."""
    dim = 2 ** (n_env + 1)
    idx = np.arange(dim)
    signs = np.empty((n_env + 1, dim))
    for q in range(n_env + 1):
        bit = (idx >> (n_env - q)) & 1
        signs[q] = 1.0 - 2.0 * bit
    return signs


def dense_evolve_zurek(st: DenseState, bath: Bath, t: float) -> DenseState:
    """Exact evolution under the diagonal sigma_z (x) sigma_z coupling.

    Each basis state picks up the phase exp(i t sum_k g_k s0 s_k), the
    sign convention that reproduces the analytic z(t).
    """
    if bath.n != st.n_env:
        raise ParameterError("bath size does not match state")
    signs = _spin_signs(st.n_env)
    phase = np.zeros(st.amplitudes.size)
    for k, spin in enumerate(bath.spins):
        phase += spin.coupling * signs[0] * signs[k + 1]
    return DenseState(st.n_env, st.amplitudes * np.exp(1j * t * phase))


def pass_propagator(f: float, p: PassParams) -> np.ndarray:
    """Exact 4x4 propagator exp(-i H tau) for one cavity pass.

    The central 2x2 block is diagonalized analytically through the
    frequency Omega = sqrt(4 f^2 + (B Gamma_- / hbar)^2); no general
    eigensolver is involved.
    """
    tau = p.tau
    bgp, bgm = p.bg_plus, p.bg_minus
    omega = math.sqrt(4.0 * f * f + bgm * bgm)
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = np.exp(-1j * (f + bgp) * tau)
    u[3, 3] = np.exp(-1j * (f - bgp) * tau)
    if omega == 0.0:
        c, snc = 1.0, tau  # sin(x)/x -> tau as omega -> 0
    else:
        c = math.cos(omega * tau)
        snc = math.sin(omega * tau) / omega
    ph = np.exp(1j * f * tau)
    u[1, 1] = ph * (c - 1j * bgm * snc)
    u[2, 2] = ph * (c + 1j * bgm * snc)
    u[1, 2] = ph * (-2j * f * snc)
    u[2, 1] = ph * (-2j * f * snc)
    return u


def _apply_pair_unitary(amps: np.ndarray, n_env: int, k: int,
                        u: np.ndarray) -> np.ndarray:
    """Apply a 4x4 unitary to the (needle, spin k) pair, k is 1-based."""
    mid = 2 ** (k - 1)
    rest = 2 ** (n_env - k)
    t = amps.reshape(2, mid, 2, rest)
    out = np.einsum("acbd,bmdr->amcr", u.reshape(2, 2, 2, 2), t)
    return out.reshape(-1)


def dense_evolve_cavity(st: DenseState, bath: Bath, p_common: PassParams) -> DenseState:
    """Sequential exact passes: spin k = 1..N interacts with the needle
    for time tau under the 4x4 pass Hamiltonian, one spin at a time."""
    if bath.n != st.n_env:
        raise ParameterError("bath size does not match state")
    amps = np.array(st.amplitudes)
    for k, spin in enumerate(bath.spins, start=1):
        u = pass_propagator(spin.coupling, p_common)
        amps = _apply_pair_unitary(amps, st.n_env, k, u)
    return DenseState(st.n_env, amps)


def dense_m_expect(st: DenseState) -> float:
    """<Psi| X (x) X ... X |Psi>: global bit flip, real by Hermiticity."""
    amps = st.amplitudes
    flipped = amps[::-1]  # i -> (dim-1-i) is exactly the all-bit flip
    return float(np.vdot(amps, flipped).real)
