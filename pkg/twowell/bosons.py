"""Normally ordered polynomials in the four bosonic modes (a1, a2, b1, b2).

A monomial is stored as creation and annihilation exponents per mode with
all creation operators to the left. Distinct modes commute, so the product
of two monomials normal-orders mode by mode with

    a^n a†^m = sum_k C(n, k) C(m, k) k! a†^(m-k) a^(n-k).
"""

import cmath
import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Union

import numpy as np

from .errors import InvalidArgumentError

MODES = ("a1", "a2", "b1", "b2")
WELL_MODES = {"A": (0, 1), "B": (2, 3)}
N_MODES = len(MODES)
MAX_DEGREE = 4
DROP_TOL = 1e-13

Exponents = tuple[int, int, int, int]
Key = tuple[Exponents, Exponents]


@dataclass(frozen=True)
class MonomialDescriptor:
    """coefficient * prod_mu a_mu†^m_mu  *  prod_mu a_mu^n_mu."""

    creations: Exponents
    annihilations: Exponents
    coefficient: complex = 1.0

    def __post_init__(self):
        for exps in (self.creations, self.annihilations):
            if len(exps) != N_MODES or any(int(e) != e or e < 0 for e in exps):
                raise InvalidArgumentError(f"exponents must be {N_MODES} non-negative integers, got {exps!r}")
        object.__setattr__(self, "creations", tuple(int(e) for e in self.creations))
        object.__setattr__(self, "annihilations", tuple(int(e) for e in self.annihilations))
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def key(self) -> Key:
        return self.creations, self.annihilations

    @property
    def degree(self) -> int:
        return sum(self.creations) + sum(self.annihilations)

    def conjugate(self) -> "MonomialDescriptor":
        return MonomialDescriptor(self.annihilations, self.creations, self.coefficient.conjugate())

    def __str__(self) -> str:
        parts = []
        for mode, m in zip(MODES, self.creations):
            if m:
                parts.append(f"{mode}†^{m}" if m > 1 else f"{mode}†")
        for mode, n in zip(MODES, self.annihilations):
            if n:
                parts.append(f"{mode}^{n}" if n > 1 else mode)
        return f"({self.coefficient:.6g}) " + (" ".join(parts) or "1")


def _mode_product(m1: int, n1: int, m2: int, n2: int) -> list[tuple[int, int, int]]:
    """Normal-ordered (a†^m1 a^n1)(a†^m2 a^n2) as (weight, m, n) terms."""
    return [
        (math.comb(n1, k) * math.comb(m2, k) * math.factorial(k), m1 + m2 - k, n1 + n2 - k)
        for k in range(min(n1, m2) + 1)
    ]


class BosonPolynomial:
    """Sparse linear combination of normally ordered monomials."""

    def __init__(self, terms: Union[dict, None] = None):
        self.terms: dict[Key, complex] = {}
        for key, coef in (terms or {}).items():
            self._add(key, coef)

    def _add(self, key: Key, coef: complex) -> None:
        self.terms[key] = self.terms.get(key, 0.0) + complex(coef)

    @classmethod
    def constant(cls, value: complex = 1.0) -> "BosonPolynomial":
        zero = (0,) * N_MODES
        return cls({(zero, zero): value})

    @classmethod
    def mode(cls, index: int, dagger: bool = False) -> "BosonPolynomial":
        unit = tuple(1 if i == index else 0 for i in range(N_MODES))
        zero = (0,) * N_MODES
        key = (unit, zero) if dagger else (zero, unit)
        return cls({key: 1.0})

    @classmethod
    def from_monomials(cls, monomials: Iterable[MonomialDescriptor]) -> "BosonPolynomial":
        poly = cls()
        for mono in monomials:
            poly._add(mono.key, mono.coefficient)
        return poly

    def __add__(self, other: "BosonPolynomial") -> "BosonPolynomial":
        out = BosonPolynomial(self.terms)
        for key, coef in other.terms.items():
            out._add(key, coef)
        return out

    def __sub__(self, other: "BosonPolynomial") -> "BosonPolynomial":
        return self + other.scale(-1.0)

    def scale(self, factor: complex) -> "BosonPolynomial":
        return BosonPolynomial({key: coef * factor for key, coef in self.terms.items()})

    def __mul__(self, other: "BosonPolynomial") -> "BosonPolynomial":
        out = BosonPolynomial()
        for (cre1, ann1), c1 in self.terms.items():
            for (cre2, ann2), c2 in other.terms.items():
                per_mode = [_mode_product(cre1[i], ann1[i], cre2[i], ann2[i]) for i in range(N_MODES)]
                for choice in product(*per_mode):
                    weight = 1
                    for w, _, _ in choice:
                        weight *= w
                    cre = tuple(m for _, m, _ in choice)
                    ann = tuple(n for _, _, n in choice)
                    out._add((cre, ann), c1 * c2 * weight)
        return out

    def dagger(self) -> "BosonPolynomial":
        return BosonPolynomial({(ann, cre): coef.conjugate() for (cre, ann), coef in self.terms.items()})

    def pruned(self, tol: float = DROP_TOL) -> "BosonPolynomial":
        if not self.terms:
            return BosonPolynomial()
        scale = max(abs(c) for c in self.terms.values())
        return BosonPolynomial({k: c for k, c in self.terms.items() if abs(c) > tol * max(scale, 1.0)})

    def monomials(self) -> list[MonomialDescriptor]:
        return [MonomialDescriptor(cre, ann, coef) for (cre, ann), coef in sorted(self.terms.items())]

    @property
    def degree(self) -> int:
        return max((sum(c) + sum(a) for c, a in self.terms), default=0)

    def __repr__(self) -> str:
        return f"BosonPolynomial({len(self.terms)} terms, degree {self.degree})"


# -- local spins -------------------------------------------------------------


def well_spins(well: str) -> dict[str, BosonPolynomial]:
    """Schwinger spin components and atom number of one well.

    J^X = (p†q + q†p)/2, J^Y = (p†q - q†p)/(2i), J^Z = (p†p - q†q)/2,
    N = p†p + q†q with (p, q) = (a1, a2) at A and (b1, b2) at B.
    """
    p, q = WELL_MODES[well]
    pdq = BosonPolynomial.mode(p, True) * BosonPolynomial.mode(q)
    qdp = BosonPolynomial.mode(q, True) * BosonPolynomial.mode(p)
    pdp = BosonPolynomial.mode(p, True) * BosonPolynomial.mode(p)
    qdq = BosonPolynomial.mode(q, True) * BosonPolynomial.mode(q)
    return {
        "X": (pdq + qdp).scale(0.5),
        "Y": (pdq - qdp).scale(-0.5j),
        "Z": (pdp - qdq).scale(0.5),
        "N": pdp + qdq,
    }


# -- beam splitter -----------------------------------------------------------


def beamsplitter_matrix(phi: float, inverse: bool = False) -> np.ndarray:
    """Row mu gives post-BS annihilator mu as a combination of pre-BS annihilators.

    a_i' = (a_i + e^{i phi} b_i)/sqrt2,  b_i' = (-e^{-i phi} a_i + b_i)/sqrt2.
    With `inverse` the rows express pre-BS modes through post-BS modes.
    """
    u = np.zeros((N_MODES, N_MODES), dtype=complex)
    r = 1 / math.sqrt(2)
    phase = cmath.exp(1j * phi)
    for a, b in ((0, 2), (1, 3)):
        u[a, a] = r
        u[a, b] = phase * r
        u[b, a] = -phase.conjugate() * r
        u[b, b] = r
    return u.conj().T if inverse else u


def _expand_linear(exponents: Exponents, rows: np.ndarray) -> dict[Exponents, complex]:
    """Expand prod_mu (sum_nu rows[mu, nu] x_nu)^e_mu over commuting x."""
    terms: dict[Exponents, complex] = {(0,) * N_MODES: 1.0}
    for mu, power in enumerate(exponents):
        for _ in range(power):
            nxt: dict[Exponents, complex] = {}
            for exps, coef in terms.items():
                for nu in range(N_MODES):
                    weight = rows[mu, nu]
                    if weight == 0:
                        continue
                    bumped = tuple(e + (1 if i == nu else 0) for i, e in enumerate(exps))
                    nxt[bumped] = nxt.get(bumped, 0.0) + coef * weight
            terms = nxt
    return terms


def substitute_modes(poly: BosonPolynomial, matrix: np.ndarray) -> BosonPolynomial:
    """Replace every annihilator a_mu by sum_nu matrix[mu, nu] a_nu.

    Creation operators take the conjugate rows. Normal order is preserved
    because creations only produce creations and annihilations only
    annihilations.
    """
    out = BosonPolynomial()
    for (cre, ann), coef in poly.terms.items():
        cre_terms = _expand_linear(cre, matrix.conj())
        ann_terms = _expand_linear(ann, matrix)
        for c_exps, c_coef in cre_terms.items():
            for a_exps, a_coef in ann_terms.items():
                out._add((c_exps, a_exps), coef * c_coef * a_coef)
    return out.pruned()


def beamsplitter_expand(
    spin_monomial: Union[MonomialDescriptor, BosonPolynomial],
    phi: float,
    inverse: bool = False,
) -> list[MonomialDescriptor]:
    """Rewrite a post-BS normally ordered monomial in pre-BS modes."""
    poly = (
        spin_monomial
        if isinstance(spin_monomial, BosonPolynomial)
        else BosonPolynomial.from_monomials([spin_monomial])
    )
    return substitute_modes(poly, beamsplitter_matrix(phi, inverse)).monomials()
