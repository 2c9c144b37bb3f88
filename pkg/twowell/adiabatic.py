"""Adiabatic preparation: two-mode ground and canonical thermal states.

Energies are in units of hbar*kappa. The sweep axis is Ng/kappa; the
Hamiltonian takes G = g/kappa, so G = (Ng/kappa)/N.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .criteria import CriterionResult, entropic_criterion, hz_criterion, interwell_moments
from .errors import InvalidArgumentError, InvalidStateError, NumericError
from .fock import DensityMatrix, FockBasis, Operator, TwoModeState, build_basis, expectation, operator_matrix

logger = logging.getLogger(__name__)

DEFAULT_KAPPA_SCALE_NK = 50.0
DEGENERACY_TOL = 1e-12
MAX_ATOM_NUMBER = 1000


@dataclass(frozen=True)
class TwoModeHamiltonian:
    basis: FockBasis
    G: float
    diagonal: np.ndarray
    offdiagonal: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return (
            np.diag(self.diagonal)
            + np.diag(self.offdiagonal, -1)
            + np.diag(self.offdiagonal, 1)
        )

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        """Ascending eigenvalues and column eigenvectors."""
        try:
            energies, vectors = eigh_tridiagonal(self.diagonal, self.offdiagonal)
        except (LinAlgError, ValueError) as e:
            raise NumericError(
                "eigensolver failed",
                diagnostic=f"N={self.basis.N}, G={self.G!r}: {e}",
            ) from e
        if not np.all(np.isfinite(energies)):
            raise NumericError("eigensolver returned non-finite energies", diagnostic=f"G={self.G!r}")
        return energies, vectors

    @cached_property
    def ground_sector(self) -> tuple[float, np.ndarray]:
        """Lowest level of the a<->b parity sector (-1)^N, which holds the ground state.

        H is persymmetric, so states with psi[N-k] = (-1)^N psi[k] form an
        invariant subspace. Its basis (|k> + p|N-k>)/sqrt(2), plus |N/2> for
        even N, keeps the problem tridiagonal with N//2 + 1 levels. On the
        attractive side the ground doublet splits below double precision and
        only this sector separates its two members.
        """
        N = self.basis.N
        half = N // 2
        parity = -1.0 if N % 2 else 1.0
        diagonal = self.diagonal[: half + 1].copy()
        offdiagonal = self.offdiagonal[:half].copy()
        if N % 2:
            diagonal[half] += parity * self.offdiagonal[half]
        else:
            offdiagonal[-1] *= math.sqrt(2.0)
        if half == 0:
            energy, reduced = float(diagonal[0]), np.ones(1)
        else:
            try:
                energies, vectors = eigh_tridiagonal(diagonal, offdiagonal, select="i", select_range=(0, 0))
            except (LinAlgError, ValueError) as e:
                raise NumericError(
                    "eigensolver failed in the parity sector",
                    diagnostic=f"N={N}, G={self.G!r}: {e}",
                ) from e
            energy, reduced = float(energies[0]), vectors[:, 0]
        if not math.isfinite(energy):
            raise NumericError("eigensolver returned a non-finite ground energy", diagnostic=f"G={self.G!r}")
        psi = np.empty(N + 1)
        psi[: half + 1] = reduced
        psi[N - half :] = parity * reduced[::-1]
        psi /= math.sqrt(2.0)
        if N % 2 == 0:
            psi[half] *= math.sqrt(2.0)
        return energy, psi


@dataclass(frozen=True)
class ThermalSpec:
    T: float
    kappa_scale: float = DEFAULT_KAPPA_SCALE_NK

    def __post_init__(self):
        if not math.isfinite(self.T) or self.T < 0:
            raise InvalidArgumentError(f"temperature must be >= 0 nK, got {self.T!r}")
        if not math.isfinite(self.kappa_scale) or self.kappa_scale <= 0:
            raise InvalidArgumentError(f"kappa_scale must be > 0 nK, got {self.kappa_scale!r}")


def build_hamiltonian(N: int, G: float) -> TwoModeHamiltonian:
    """Two-mode restriction of the coupled-mode Hamiltonian.

    H[k+1, k] = sqrt((k+1)(N-k)),  H[k, k] = (G/2)[k(k-1) + (N-k)(N-k-1)].
    """
    basis = build_basis(N)
    if not math.isfinite(G):
        raise InvalidArgumentError(f"interaction ratio must be finite, got {G!r}")
    k = basis.n_a
    n_b = basis.n_b
    diagonal = 0.5 * G * (k * (k - 1) + n_b * (n_b - 1))
    kk = k[:-1]
    offdiagonal = np.sqrt((kk + 1) * (N - kk))
    return TwoModeHamiltonian(basis, float(G), diagonal, offdiagonal)


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    pivot = vector[np.argmax(np.abs(vector))]
    return vector * (abs(pivot) / pivot)


def ground_state(H: TwoModeHamiltonian) -> TwoModeState:
    """Lowest eigenvector, phased so its largest amplitude is real positive.

    The vector comes from the parity sector (-1)^N, so |psi_k| = |psi_{N-k}|
    even where the ground doublet is numerically degenerate.
    """
    _, vector = H.ground_sector
    psi = _fix_phase(vector.astype(complex))
    return TwoModeState.from_amplitudes(H.basis, psi)


def thermal_state(H: TwoModeHamiltonian, spec: ThermalSpec) -> DensityMatrix:
    """Canonical state exp(-H kappa_scale / T) / Z on the fixed-N space."""
    energies, vectors = H.spectrum
    shifted = energies - energies[0]
    if spec.T == 0:
        scale = max(1.0, abs(energies[0]))
        weights = (shifted <= DEGENERACY_TOL * scale).astype(float)
    else:
        weights = np.exp(-shifted * spec.kappa_scale / spec.T)
    weights = weights / weights.sum()
    return DensityMatrix.from_spectrum(H.basis, weights, vectors)


def number_squeezing_dB(state: Union[TwoModeState, DensityMatrix]) -> float:
    """Relative number variance Var(J^Z) against the coherent value N/4, in dB."""
    basis = state.basis
    jz = expectation(operator_matrix(Operator.JZ, basis), state).real
    jz2 = expectation(operator_matrix(Operator.JZ2, basis), state).real
    variance = max(jz2 - jz**2, 1e-300)
    return 10.0 * math.log10(variance / (basis.N / 4.0))


@dataclass(frozen=True)
class AdiabaticRow:
    ng_over_kappa: float
    T: float
    e_hz: CriterionResult
    e_entropic: Optional[CriterionResult] = None
    number_squeezing_dB: Optional[float] = None


def _grid_point_rows(
    N: int,
    ng: float,
    temperatures: Sequence[float],
    kappa_scale: float,
    include_number_squeezing: bool,
) -> list[AdiabaticRow]:
    H = build_hamiltonian(N, ng / N)
    rows = []
    for T in temperatures:
        spec = ThermalSpec(T, kappa_scale)
        entropic = None
        if spec.T == 0:
            state = ground_state(H)
            entropic = entropic_criterion(state)
        else:
            state = thermal_state(H, spec)
        squeezing = number_squeezing_dB(state) if include_number_squeezing else None
        rows.append(
            AdiabaticRow(
                ng_over_kappa=ng,
                T=spec.T,
                e_hz=hz_criterion(interwell_moments(state)),
                e_entropic=entropic,
                number_squeezing_dB=squeezing,
            )
        )
    return rows


def adiabatic_sweep(
    N: int,
    ng_grid: Sequence[float],
    temperatures: Sequence[float],
    kappa_scale: float = DEFAULT_KAPPA_SCALE_NK,
    include_number_squeezing: bool = False,
    threads: int = 1,
) -> list[AdiabaticRow]:
    """Evaluate E_HZ (and E_entropic at T=0) over an Ng/kappa x T grid.

    Rows are ordered by grid index, then by temperature in the given order.
    """
    if len(ng_grid) == 0 or len(temperatures) == 0:
        raise InvalidArgumentError("adiabatic sweep needs non-empty Ng/kappa and temperature grids")
    build_basis(N)
    ThermalSpec(0.0, kappa_scale)

    def evaluate(ng: float) -> list[AdiabaticRow]:
        try:
            return _grid_point_rows(N, float(ng), temperatures, kappa_scale, include_number_squeezing)
        except NumericError as e:
            e.point = {"Ng_over_kappa": ng, **e.point}
            raise
        except InvalidStateError as e:
            raise NumericError("invalid state", diagnostic=str(e), point={"Ng_over_kappa": ng}) from e

    logger.debug("adiabatic sweep: N=%d, %d grid points, T=%s", N, len(ng_grid), list(temperatures))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(evaluate, ng_grid))
    else:
        blocks = [evaluate(ng) for ng in ng_grid]
    return [row for block in blocks for row in block]
