"""Event formalism for small dense systems: branch projection,
projection mixtures, the essential-property compatibility algebra, and
the quantitative undecidability margin under pointer dephasing.

Dense representation only; intended for pedagogical systems of a dozen
spins or fewer.  Large-N undecidability is argued through the K
criterion, not by building 2^N matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, ParameterError, trace_distance

PROJECTOR_TOL = 1e-10
DEFAULT_EVENT_EPSILON = 1e-12


@dataclass(frozen=True)
class Projector:
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ParameterError("projector must be square")
        if np.max(np.abs(m - m.conj().T)) > PROJECTOR_TOL:
            raise ParameterError("projector is not Hermitian")
        if np.max(np.abs(m @ m - m)) > PROJECTOR_TOL:
            raise ParameterError("projector is not idempotent")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def onto(cls, vector: np.ndarray) -> "Projector":
        """Rank-1 projector onto a (possibly unnormalized) vector."""
        v = np.asarray(vector, dtype=complex).ravel()
        n = np.linalg.norm(v)
        if n == 0:
            raise ParameterError("cannot project onto the zero vector")
        v = v / n
        return cls(np.outer(v, v.conj()))


@dataclass(frozen=True)
class EventRecord:
    essential: Projector
    compatible: tuple[Projector, ...]
    probability: float

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise ParameterError("probability must lie in [0, 1]")
        for p in self.compatible:
            if not is_compatible(p, self.essential):
                raise ParameterError("listed projector is not compatible")


def _embed_pointer(p: Projector, dim: int) -> np.ndarray:
    """Extend a pointer-factor projector by identities on the rest."""
    d1 = p.dim
    if dim % d1 != 0:
        raise ParameterError(
            f"pointer dimension {d1} does not divide state dimension {dim}")
    return np.kron(p.entries, np.eye(dim // d1))


def branch_project(state: np.ndarray, pointer_projector: Projector) -> np.ndarray:
    """Project onto one pointer branch: (P (x) I) |Psi>, unnormalized.

    The squared norm of the result is the branch probability.
    """
    psi = np.asarray(state, dtype=complex).ravel()
    return _embed_pointer(pointer_projector, psi.size) @ psi


def _check_resolving(projectors, dim: int) -> list[np.ndarray]:
    embedded = [_embed_pointer(p, dim) for p in projectors]
    total = sum(embedded)
    if np.max(np.abs(total - np.eye(dim))) > PROJECTOR_TOL:
        raise ParameterError("projectors do not sum to the identity")
    for i in range(len(embedded)):
        for j in range(i + 1, len(embedded)):
            if np.max(np.abs(embedded[i] @ embedded[j])) > PROJECTOR_TOL:
                raise ParameterError("projectors are not mutually orthogonal")
    return embedded


def projection_mixture(state: np.ndarray, projectors) -> DensityMatrix:
    """Statistical mixture of branch projections sum_i P_i |Psi><Psi| P_i."""
    psi = np.asarray(state, dtype=complex).ravel()
    embedded = _check_resolving(projectors, psi.size)
    rho = np.zeros((psi.size, psi.size), dtype=complex)
    for p in embedded:
        branch = p @ psi
        rho += np.outer(branch, branch.conj())
    return DensityMatrix(rho)


def is_compatible(p: Projector, essential: Projector) -> bool:
    """True iff P * E = E: the property holds with certainty on the event."""
    if p.dim != essential.dim:
        raise ParameterError("dimension mismatch")
    return bool(np.max(np.abs(p.entries @ essential.entries
                              - essential.entries)) < PROJECTOR_TOL)


def _dephase_pointer(rho: np.ndarray, embedded, strength: float) -> np.ndarray:
    """Scale every pointer cross-block P_i rho P_j (i != j) by e^(-strength)."""
    factor = math.exp(-strength)
    out = np.zeros_like(rho)
    for i, pi in enumerate(embedded):
        for j, pj in enumerate(embedded):
            block = pi @ rho @ pj
            out += block if i == j else factor * block
    return out


@dataclass(frozen=True)
class UndecidabilityResult:
    margin: float
    event: bool
    theta: float


def undecidability_margin(state: np.ndarray, projectors, dephasing: float,
                          epsilon: float = DEFAULT_EVENT_EPSILON) -> UndecidabilityResult:
    """Trace distance between the dephased full state and the dephased
    projection mixture; an event is declared once it drops below epsilon.

    dephasing >= 0 scales pointer cross-blocks by e^(-dephasing), so the
    margin is e^(-dephasing) times the undamped distance: monotone
    nonincreasing, zero in the full-dephasing limit.
    """
    if dephasing < 0:
        raise ParameterError("dephasing must be >= 0")
    if epsilon <= 0:
        raise ParameterError("epsilon must be positive")
    psi = np.asarray(state, dtype=complex).ravel()
    embedded = _check_resolving(projectors, psi.size)
    rho_full = np.outer(psi, psi.conj())
    mixture = np.zeros_like(rho_full)
    for p in embedded:
        branch = p @ psi
        mixture += np.outer(branch, branch.conj())
    damped_full = _dephase_pointer(rho_full, embedded, dephasing)
    damped_mixture = _dephase_pointer(mixture, embedded, dephasing)
    margin = trace_distance(DensityMatrix(damped_full),
                            DensityMatrix(damped_mixture))
    return UndecidabilityResult(margin=margin, event=margin < epsilon,
                                theta=dephasing)
