"""Brute-force ground truth for the Kerr moment engine.

Each well is held as a truncated joint amplitude array c[k1, k2] with the
exact Kerr phases applied. Post-BS spin products are expanded into words of
pre-BS ladder operators (kept in their written order, never normal-ordered)
and every word is applied to the truncated state directly.
"""

import logging
import math
from itertools import product
from typing import Optional

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .bosons import MAX_DEGREE, WELL_MODES, beamsplitter_matrix
from .criteria import SpinMoments
from .errors import InsufficientCutoffError, InvalidArgumentError
from .kerr import COMPONENTS, WELLS, KerrParams, assemble_spin_moments

logger = logging.getLogger(__name__)

MAX_ORACLE_OCCUPATION = 25.0
MAX_TRUNCATION_LOSS = 1e-10
TAIL_TARGET = 1e-16

# (mode, dagger) sequences applied right to left
Word = tuple[tuple[int, bool], ...]


def minimum_cutoff(mean_occupation: float) -> int:
    """Smallest cutoff the oracle accepts for a mode: |alpha|^2 + 10 |alpha|."""
    return math.ceil(mean_occupation + 10.0 * math.sqrt(mean_occupation))


def default_cutoff(params: KerrParams) -> int:
    """A cutoff whose Poisson tail is below 1e-16 in every mode, with headroom."""
    cutoff = 0
    for a in params.alpha:
        nbar = abs(a) ** 2
        k = minimum_cutoff(nbar)
        while nbar > 0 and poisson.sf(k, nbar) > TAIL_TARGET:
            k += 1
        cutoff = max(cutoff, k)
    return cutoff + 2 * MAX_DEGREE


def _coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    k = np.arange(cutoff + 1)
    if alpha == 0:
        amps = np.zeros(cutoff + 1, dtype=complex)
        amps[0] = 1.0
        return amps
    log_mag = -0.5 * abs(alpha) ** 2 + k * math.log(abs(alpha)) - 0.5 * gammaln(k + 1)
    return np.exp(log_mag) * np.exp(1j * k * np.angle(alpha))


def _well_state(params: KerrParams, well: str, cutoff: int) -> np.ndarray:
    p, q = WELL_MODES[well]
    g = params.g_ratios
    t = params.interaction_time
    k = np.arange(cutoff + 1, dtype=float)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    energy = 0.5 * g[0][0] * k1 * (k1 - 1) + 0.5 * g[1][1] * k2 * (k2 - 1) + g[0][1] * k1 * k2
    joint = np.outer(_coherent_amplitudes(params.alpha[p], cutoff), _coherent_amplitudes(params.alpha[q], cutoff))
    padded = np.zeros((cutoff + 1 + MAX_DEGREE,) * 2, dtype=complex)
    padded[: cutoff + 1, : cutoff + 1] = joint * np.exp(-1j * energy * t)
    return padded


def _ladder(state: np.ndarray, axis: int, dagger: bool) -> np.ndarray:
    x = np.moveaxis(state, axis, 0)
    out = np.zeros_like(x)
    root = np.sqrt(np.arange(1, x.shape[0], dtype=float))[:, None]
    if dagger:
        out[1:] = root * x[:-1]
    else:
        out[:-1] = root * x[1:]
    return np.moveaxis(out, 0, axis)


class _WellOracle:
    """Word expectations on one well's truncated state, memoized."""

    def __init__(self, state: np.ndarray, modes: tuple[int, int]):
        self.state = state
        self.axis = {modes[0]: 0, modes[1]: 1}
        self.cache: dict[Word, complex] = {}

    def expect(self, word: Word) -> complex:
        if word not in self.cache:
            ket = self.state
            for mode, dagger in reversed(word):
                ket = _ladder(ket, self.axis[mode], dagger)
            self.cache[word] = complex(np.vdot(self.state, ket))
        return self.cache[word]


def _spin_words(well: str) -> dict[str, list[tuple[complex, Word]]]:
    p, q = WELL_MODES[well]
    pdq = ((p, True), (q, False))
    qdp = ((q, True), (p, False))
    pdp = ((p, True), (p, False))
    qdq = ((q, True), (q, False))
    return {
        "X": [(0.5, pdq), (0.5, qdp)],
        "Y": [(-0.5j, pdq), (0.5j, qdp)],
        "Z": [(0.5, pdp), (-0.5, qdq)],
        "N": [(1.0, pdp), (1.0, qdq)],
    }


def _requests() -> dict[tuple, list[tuple[complex, Word]]]:
    words = {w: _spin_words(w) for w in WELLS}
    out: dict[tuple, list[tuple[complex, Word]]] = {}
    for w in WELLS:
        out[("N", w)] = words[w]["N"]
        for p in COMPONENTS:
            out[("J", w, p)] = words[w][p]
    for w1, w2 in (("A", "A"), ("B", "B"), ("A", "B")):
        for p in COMPONENTS:
            for q in COMPONENTS:
                out[("JJ", w1, p, w2, q)] = [
                    (c1 * c2, word1 + word2) for c1, word1 in words[w1][p] for c2, word2 in words[w2][q]
                ]
    return out


def _check_cutoff(params: KerrParams, cutoff: int) -> None:
    survival = 1.0
    for a in params.alpha:
        nbar = abs(a) ** 2
        if nbar > MAX_ORACLE_OCCUPATION:
            raise InvalidArgumentError(
                f"oracle is for |alpha|^2 <= {MAX_ORACLE_OCCUPATION:g}, got {nbar:.6g}"
            )
        if cutoff < minimum_cutoff(nbar):
            raise InsufficientCutoffError(
                f"cutoff {cutoff} below |alpha|^2 + 10|alpha| = {minimum_cutoff(nbar)}"
            )
        if nbar > 0:
            survival *= 1.0 - poisson.sf(cutoff, nbar)
    loss = 1.0 - survival
    if loss > MAX_TRUNCATION_LOSS:
        raise InsufficientCutoffError(f"truncation loses probability {loss:.3g} > {MAX_TRUNCATION_LOSS:g}")


def fock_oracle(params: KerrParams, phi: float, cutoff: Optional[int] = None, beamsplitter: bool = True) -> SpinMoments:
    """SpinMoments computed on truncated Fock states, for validation."""
    if cutoff is None:
        cutoff = default_cutoff(params)
    _check_cutoff(params, cutoff)
    logger.debug("fock oracle: cutoff=%d tau=%r", cutoff, params.tau)

    wells = {w: _WellOracle(_well_state(params, w, cutoff), WELL_MODES[w]) for w in WELLS}
    well_of = {mode: w for w in WELLS for mode in WELL_MODES[w]}
    u = beamsplitter_matrix(phi) if beamsplitter else np.eye(4, dtype=complex)

    def word_value(word: Word) -> complex:
        parts = {w: tuple(op for op in word if well_of[op[0]] == w) for w in WELLS}
        return wells["A"].expect(parts["A"]) * wells["B"].expect(parts["B"])

    def expand(coef: complex, word: Word) -> complex:
        # every post-BS ladder operator becomes a sum over pre-BS modes
        options = []
        for mode, dagger in word:
            row = u[mode].conj() if dagger else u[mode]
            options.append([(row[nu], (nu, dagger)) for nu in range(4) if row[nu] != 0])
        total = 0j
        for choice in product(*options):
            weight = coef
            for w, _ in choice:
                weight *= w
            total += weight * word_value(tuple(op for _, op in choice))
        return total

    requests = _requests()
    return assemble_spin_moments(lambda name: sum(expand(c, word) for c, word in requests[name]))
