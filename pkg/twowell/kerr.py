"""Four-mode Kerr dynamics with a 50:50 beam splitter between the wells.

Each well evolves under its own number-conserving interaction, so the
Heisenberg solution is a_i(t) = exp[-i sum_j g_ij N_j t] a_i(0) and every
normally ordered moment of the coherent initial state has a closed form:

    < prod_mu a_mu†^m_mu a_mu^n_mu >_t
        = e^{iC} prod_mu (alpha_mu*)^m_mu alpha_mu^n_mu exp[|alpha_mu|^2 (e^{i lambda_mu} - 1)]

with lambda = G (m - n) t and C = [(m.G.m - n.G.n) - diag(G).(m - n)] t / 2
per well. Time enters as g_ij t = g_ratios[i][j] * tau / N_A.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .bosons import (
    MAX_DEGREE,
    WELL_MODES,
    BosonPolynomial,
    Key,
    MonomialDescriptor,
    beamsplitter_matrix,
    substitute_modes,
    well_spins,
)
from .criteria import (
    FRAMES,
    ROTATED,
    CriterionResult,
    SpinMoments,
    Squeezing,
    align_to_mean,
    combined_covariance,
    optimal_theta,
    product_criterion,
    squeezing_dB,
    squeezing_plane,
    sum_criterion,
)
from .errors import InvalidArgumentError, InvalidStateError, NumericError, UnsupportedRequestError

logger = logging.getLogger(__name__)

MAX_MEAN_OCCUPATION = 1e6
PRE_BS = "pre-BS"
POST_BS = "post-BS"
COMPONENTS = ("X", "Y", "Z")
WELLS = ("A", "B")

# scattering lengths in Bohr radii
RB_SCATTERING_LENGTHS = {"a11": 100.4, "a22": 95.5, "a12": 80.8}


def g_ratios_from_scattering_lengths(a11: float, a22: float, a12: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """Interaction ratios g_ij / g_11, with g_ij proportional to a_ij."""
    if a11 <= 0:
        raise InvalidArgumentError(f"a11 must be positive, got {a11!r}")
    return ((1.0, a12 / a11), (a12 / a11, a22 / a11))


@dataclass(frozen=True)
class KerrParams:
    """Initial amplitudes (a1, a2, b1, b2), interaction ratios and time.

    tau is the dimensionless time g_11 * N_A * t.
    """

    alpha: tuple[complex, complex, complex, complex]
    g_ratios: tuple[tuple[float, float], tuple[float, float]]
    n_a: float
    tau: float = 0.0

    def __post_init__(self):
        alpha = tuple(complex(a) for a in self.alpha)
        if len(alpha) != 4:
            raise InvalidArgumentError(f"need four mode amplitudes, got {len(alpha)}")
        g = tuple(tuple(float(x) for x in row) for row in self.g_ratios)
        if len(g) != 2 or any(len(row) != 2 for row in g):
            raise InvalidArgumentError("g_ratios must be a 2x2 matrix")
        if g[0][0] != 1.0:
            raise InvalidArgumentError(f"g_ratios[0][0] must be exactly 1, got {g[0][0]!r}")
        if g[0][1] != g[1][0]:
            raise InvalidArgumentError("g_ratios must be symmetric")
        if not all(math.isfinite(x) for row in g for x in row):
            raise InvalidArgumentError("g_ratios must be finite")
        if not (math.isfinite(self.n_a) and self.n_a > 0):
            raise InvalidArgumentError(f"N_A must be positive, got {self.n_a!r}")
        if not math.isfinite(self.tau):
            raise InvalidArgumentError(f"tau must be finite, got {self.tau!r}")
        for a in alpha:
            if not (abs(a) ** 2 <= MAX_MEAN_OCCUPATION):
                raise InvalidArgumentError(
                    f"|alpha|^2 = {abs(a) ** 2:.6g} exceeds the overflow guard {MAX_MEAN_OCCUPATION:g}"
                )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "g_ratios", g)
        object.__setattr__(self, "n_a", float(self.n_a))
        object.__setattr__(self, "tau", float(self.tau))

    @classmethod
    def from_atom_number(cls, n_a: float, g_ratios, tau: float = 0.0, alpha: Optional[complex] = None) -> "KerrParams":
        """Identical amplitudes in all four modes, |alpha|^2 = N_A / 2 unless given."""
        if alpha is None:
            alpha = math.sqrt(n_a / 2.0)
        return cls((alpha,) * 4, g_ratios, n_a, tau)

    def with_tau(self, tau: float) -> "KerrParams":
        return replace(self, tau=tau)

    @property
    def interaction_time(self) -> float:
        """g_11 t."""
        return self.tau / self.n_a


def kerr_kernel(alpha: complex, m: int, n: int, lam: float) -> complex:
    """<alpha| a†^m e^{i lam N} a^n |alpha> = (alpha*)^m alpha^n exp[|alpha|^2 (e^{i lam} - 1)]."""
    if m < 0 or n < 0:
        raise InvalidArgumentError("exponents must be non-negative")
    alpha = complex(alpha)
    return alpha.conjugate() ** m * alpha**n * np.exp(abs(alpha) ** 2 * (np.exp(1j * lam) - 1.0))


def _evaluate(creations: np.ndarray, annihilations: np.ndarray, params: KerrParams) -> np.ndarray:
    """Closed-form moments for rows of exponents, shape (K, 4) each."""
    g = np.array(params.g_ratios)
    s = params.interaction_time
    alpha = np.array(params.alpha)
    values = np.ones(len(creations), dtype=complex)
    for p, q in WELL_MODES.values():
        m = creations[:, [p, q]].astype(float)
        n = annihilations[:, [p, q]].astype(float)
        d = m - n
        lam = (d @ g) * s
        phase = 0.5 * (np.einsum("ki,ij,kj->k", m, g, m) - np.einsum("ki,ij,kj->k", n, g, n) - d @ np.diag(g)) * s
        values *= np.exp(1j * phase)
        for col, mode in enumerate((p, q)):
            a = complex(alpha[mode])
            # python complex powers keep 0**0 == 1
            powers = np.array([a**k for k in range(MAX_DEGREE + 1)])
            values *= (
                powers[creations[:, mode]].conj()
                * powers[annihilations[:, mode]]
                * np.exp(abs(a) ** 2 * (np.exp(1j * lam[:, col]) - 1.0))
            )
    return values


def evolve_monomial(mono: MonomialDescriptor, params: KerrParams) -> complex:
    """Expectation of a normally ordered monomial of evolved operators at time tau."""
    if mono.degree > MAX_DEGREE:
        raise UnsupportedRequestError(f"monomial degree {mono.degree} exceeds {MAX_DEGREE}: {mono}")
    cre = np.array([mono.creations])
    ann = np.array([mono.annihilations])
    return complex(mono.coefficient * _evaluate(cre, ann, params)[0])


@dataclass(frozen=True)
class MomentTable:
    """Expectation values of unit-coefficient monomials, keyed canonically."""

    values: dict
    params: KerrParams
    frame: str
    phi: Optional[float] = None

    def value(self, mono: MonomialDescriptor) -> complex:
        return mono.coefficient * self.values[mono.key]

    def expect(self, poly: BosonPolynomial) -> complex:
        return sum((coef * self.values[key] for key, coef in poly.terms.items()), 0j)

    def conjugate_closure_error(self) -> float:
        """Largest |<M†> - <M>*| over monomials whose conjugate is present."""
        worst = 0.0
        for (cre, ann), value in self.values.items():
            other = self.values.get((ann, cre))
            if other is not None:
                worst = max(worst, abs(other - value.conjugate()))
        return worst


def moment_table(keys, params: KerrParams, frame: str = PRE_BS, phi: Optional[float] = None) -> MomentTable:
    """Evaluate monomials and their conjugates into a conjugate-closed table.

    Both members of a conjugate pair go through the kernel separately, so
    conjugate_closure_error() measures the engine rather than the table.
    """
    wanted = set(keys)
    wanted |= {(ann, cre) for cre, ann in wanted}
    ordered = sorted(wanted)
    for cre, ann in ordered:
        if sum(cre) + sum(ann) > MAX_DEGREE:
            raise UnsupportedRequestError(f"monomial degree {sum(cre) + sum(ann)} exceeds {MAX_DEGREE}")
    values: dict[Key, complex] = {}
    if ordered:
        cre = np.array([k[0] for k in ordered])
        ann = np.array([k[1] for k in ordered])
        evaluated = _evaluate(cre, ann, params)
        if not np.all(np.isfinite(evaluated)):
            raise NumericError("non-finite moment", diagnostic=f"tau={params.tau!r}")
        values = {key: complex(value) for key, value in zip(ordered, evaluated)}
    return MomentTable(values, params, frame, phi)


# -- spin moment assembly ------------------------------------------------------


def spin_requests() -> dict[tuple, BosonPolynomial]:
    """Every operator whose expectation SpinMoments needs, in local (post-BS) modes."""
    spins = {w: well_spins(w) for w in WELLS}
    requests: dict[tuple, BosonPolynomial] = {}
    for w in WELLS:
        requests[("N", w)] = spins[w]["N"]
        for p in COMPONENTS:
            requests[("J", w, p)] = spins[w][p]
    for w1, w2 in (("A", "A"), ("B", "B"), ("A", "B")):
        for p in COMPONENTS:
            for q in COMPONENTS:
                requests[("JJ", w1, p, w2, q)] = spins[w1][p] * spins[w2][q]
    return requests


def assemble_spin_moments(expect: Callable[[tuple], complex], frame: str = "lab") -> SpinMoments:
    """Build SpinMoments from expectations of the operators named by spin_requests()."""
    mean = {w: np.array([expect(("J", w, p)).real for p in COMPONENTS]) for w in WELLS}

    def second(w1: str, w2: str) -> np.ndarray:
        out = np.empty((3, 3))
        for i, p in enumerate(COMPONENTS):
            for j, q in enumerate(COMPONENTS):
                if w1 == w2:
                    sym = 0.5 * (expect(("JJ", w1, p, w2, q)) + expect(("JJ", w1, q, w2, p))).real
                else:
                    sym = expect(("JJ", w1, p, w2, q)).real
                out[i, j] = sym - mean[w1][i] * mean[w2][j]
        return out

    return SpinMoments(
        mean_a=mean["A"],
        mean_b=mean["B"],
        cov_a=second("A", "A"),
        cov_b=second("B", "B"),
        cross=second("A", "B"),
        n_mean=(expect(("N", "A")).real, expect(("N", "B")).real),
        frame=frame,
    )


@lru_cache(maxsize=16)
def _moment_plan(phi: float, beamsplitter: bool) -> dict[tuple, BosonPolynomial]:
    """Spin requests rewritten in pre-BS modes."""
    requests = spin_requests()
    if not beamsplitter:
        return requests
    matrix = beamsplitter_matrix(phi)
    return {name: substitute_modes(poly, matrix) for name, poly in requests.items()}


def dynamic_moment_table(params: KerrParams, phi: float, beamsplitter: bool = True) -> tuple[MomentTable, dict]:
    plan = _moment_plan(float(phi), bool(beamsplitter))
    keys = {key for poly in plan.values() for key in poly.terms}
    table = moment_table(keys, params, POST_BS if beamsplitter else PRE_BS, phi if beamsplitter else None)
    return table, plan


def dynamic_spin_moments(params: KerrParams, phi: float, beamsplitter: bool = True) -> SpinMoments:
    """Local spin moments after Kerr evolution and (optionally) the beam splitter."""
    table, plan = dynamic_moment_table(params, phi, beamsplitter)
    return assemble_spin_moments(lambda name: table.expect(plan[name]))


@dataclass(frozen=True)
class DynamicRow:
    tau: float
    squeezing: Squeezing
    theta: float
    e_product: CriterionResult
    e_sum: CriterionResult
    moments: SpinMoments = field(repr=False, compare=False, default=None)


def evaluate_dynamic_point(params: KerrParams, phi: float, frame: str = ROTATED) -> DynamicRow:
    """Squeezing and product/sum criteria at one tau.

    theta* minimizes the variance of J_A - J_B in the Z-X plane.
    """
    sm = dynamic_spin_moments(params, phi)
    framed = align_to_mean(sm) if frame == ROTATED else sm
    theta = optimal_theta(squeezing_plane(combined_covariance(framed, -1)))
    return DynamicRow(
        tau=params.tau,
        squeezing=squeezing_dB(sm, theta, frame),
        theta=theta,
        e_product=product_criterion(sm, theta, frame),
        e_sum=sum_criterion(sm, theta, frame),
        moments=sm,
    )


def dynamic_sweep(
    params: KerrParams,
    tau_grid: Sequence[float],
    phi: float,
    frame: str = ROTATED,
    threads: int = 1,
) -> list[DynamicRow]:
    """Evaluate evaluate_dynamic_point over tau_grid; `params.tau` is ignored."""
    if len(tau_grid) == 0:
        raise InvalidArgumentError("dynamic sweep needs a non-empty tau grid")
    if frame not in FRAMES:
        raise InvalidArgumentError(f"unknown criterion frame {frame!r}; expected one of {FRAMES}")

    def evaluate(tau: float) -> DynamicRow:
        try:
            return evaluate_dynamic_point(params.with_tau(float(tau)), phi, frame)
        except NumericError as e:
            e.point = {"tau": tau, **e.point}
            raise
        except (InvalidStateError, UnsupportedRequestError) as e:
            raise NumericError(type(e).__name__, diagnostic=str(e), point={"tau": tau}) from e

    logger.debug("dynamic sweep: %d tau points, phi=%r, g_ratios=%r", len(tau_grid), phi, params.g_ratios)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(evaluate, tau_grid))
    return [evaluate(tau) for tau in tau_grid]
