"""Fixed-total-number two-mode Fock space.

Basis vector k is |n_a = k, n_b = N - k>, ordered by n_a ascending. Every
container here is immutable: numpy payloads are copied and marked read-only.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from .errors import InvalidArgumentError, InvalidStateError

CONSTRUCTION_TOL = 1e-12
ACCEPTANCE_TOL = 1e-9
POSITIVITY_TOL = 1e-10


class Operator(str, Enum):
    """Operators available as matrices on the fixed-N basis."""

    ADAG_B = "adag_b"
    BDAG_A = "bdag_a"
    N_A = "n_a"
    N_B = "n_b"
    N_A_N_B = "n_a_n_b"
    JZ = "jz"
    JZ2 = "jz2"
    N2 = "n2"


@dataclass(frozen=True)
class FockBasis:
    N: int
    dim: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "dim", self.N + 1)

    def occupations(self, k: int) -> tuple[int, int]:
        """Return (n_a, n_b) for basis index k."""
        if not 0 <= k <= self.N:
            raise InvalidArgumentError(f"basis index {k} outside 0..{self.N}")
        return k, self.N - k

    @property
    def n_a(self) -> np.ndarray:
        return np.arange(self.dim, dtype=float)

    @property
    def n_b(self) -> np.ndarray:
        return self.N - self.n_a


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TwoModeState:
    """Pure state over a FockBasis."""

    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.shape != (self.basis.dim,):
            raise InvalidArgumentError(
                f"expected {self.basis.dim} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > CONSTRUCTION_TOL:
            raise InvalidStateError(f"squared norm {norm!r} is not 1")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, basis: FockBasis, amplitudes, normalize: bool = True) -> "TwoModeState":
        amps = np.asarray(amplitudes, dtype=complex)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise InvalidStateError("zero vector cannot be normalized")
            amps = amps / norm
        return cls(basis, amps)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(self.basis, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive matrix over a FockBasis."""

    basis: FockBasis
    entries: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.entries)
        dim = self.basis.dim
        if rho.shape != (dim, dim):
            raise InvalidArgumentError(f"expected {dim}x{dim} matrix, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > CONSTRUCTION_TOL:
            raise InvalidStateError("density matrix is not Hermitian")
        trace = np.trace(rho).real
        if abs(trace - 1.0) > CONSTRUCTION_TOL:
            raise InvalidStateError(f"density matrix trace {trace!r} is not 1")
        if np.linalg.eigvalsh(rho).min() < -POSITIVITY_TOL:
            raise InvalidStateError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", rho)

    @classmethod
    def from_spectrum(cls, basis: FockBasis, weights, vectors) -> "DensityMatrix":
        """Build sum_i w_i |v_i><v_i| from eigen-weights and column eigenvectors."""
        vectors = np.asarray(vectors)
        rho = (vectors * np.asarray(weights)) @ vectors.conj().T
        rho = 0.5 * (rho + rho.conj().T)
        return cls(basis, rho)


def build_basis(N: int) -> FockBasis:
    """Create the fixed-N two-mode basis of dimension N+1."""
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 1:
        raise InvalidArgumentError(f"atom number must be an integer >= 1, got {N!r}")
    return FockBasis(int(N))


def operator_matrix(kind: Union[Operator, str], basis: FockBasis) -> np.ndarray:
    """Dense matrix of `kind` in the fixed-N basis."""
    try:
        kind = Operator(kind)
    except ValueError:
        raise InvalidArgumentError(f"unknown operator descriptor {kind!r}") from None

    n_a = basis.n_a
    n_b = basis.n_b
    N = basis.N

    if kind is Operator.ADAG_B:
        # a†b |k, N-k> = sqrt((k+1)(N-k)) |k+1, N-k-1>
        k = np.arange(N, dtype=float)
        return np.diag(np.sqrt((k + 1) * (N - k)), -1).astype(complex)
    if kind is Operator.BDAG_A:
        return operator_matrix(Operator.ADAG_B, basis).conj().T.copy()

    diagonals = {
        Operator.N_A: n_a,
        Operator.N_B: n_b,
        Operator.N_A_N_B: n_a * n_b,
        Operator.JZ: (n_a - n_b) / 2,
        Operator.JZ2: ((n_a - n_b) / 2) ** 2,
        Operator.N2: (n_a + n_b) ** 2,
    }
    return np.diag(diagonals[kind]).astype(complex)


def expectation(op: np.ndarray, state: Union[TwoModeState, DensityMatrix]) -> complex:
    """<psi|op|psi> for a pure state, Tr[rho op] for a density matrix."""
    op = np.asarray(op)
    dim = state.basis.dim
    if op.shape != (dim, dim):
        raise InvalidArgumentError(f"operator shape {op.shape} does not match basis dimension {dim}")
    if isinstance(state, TwoModeState):
        psi = state.amplitudes
        return complex(np.vdot(psi, op @ psi))
    if isinstance(state, DensityMatrix):
        return complex(np.trace(state.entries @ op))
    raise InvalidArgumentError(f"cannot take an expectation in {type(state).__name__}")


def reduced_entropy(state: Union[TwoModeState, np.ndarray]) -> float:
    """Entropy in bits of well A's reduced state.

    For a fixed-N pure state the reduced density matrix of mode a is diagonal
    in atom number, so the entropy is the Shannon entropy of |amplitude_k|^2.
    """
    amps = state.amplitudes if isinstance(state, TwoModeState) else np.asarray(state, dtype=complex)
    p = np.abs(amps) ** 2
    if abs(p.sum() - 1.0) > ACCEPTANCE_TOL:
        raise InvalidStateError(f"state norm {p.sum()!r} deviates from 1")
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))
