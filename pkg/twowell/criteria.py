"""Entanglement and squeezing signatures evaluated from moments.

Both preparation scenarios reduce to moments first (InterwellMoments for the
two-mode states, SpinMoments for the four-mode dynamics), so every criterion
here is a pure function of those containers.

Spin arrays are ordered (X, Y, Z). J^theta = cos(theta) J^Z + sin(theta) J^X.
An undefined criterion has value None; it means inconclusive, not violated.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .errors import InvalidArgumentError, InvalidStateError
from .fock import DensityMatrix, Operator, TwoModeState, expectation, operator_matrix, reduced_entropy

X, Y, Z = 0, 1, 2

ENTANGLEMENT_MARGIN = 1e-9
DENOMINATOR_FLOOR = 1e-300
VARIANCE_FLOOR = 1e-300
DB_FLOOR = -300.0

ROTATED = "rotated"
LITERAL = "literal"
FRAMES = (ROTATED, LITERAL)

SIGN_PAIRINGS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class CriterionResult:
    name: str
    value: Optional[float]
    entangled: Optional[bool]
    theta: Optional[float] = None
    signs: Optional[tuple[int, int]] = None

    @property
    def defined(self) -> bool:
        return self.value is not None

    @property
    def signs_label(self) -> str:
        if self.signs is None:
            return ""
        return "".join("+" if s > 0 else "-" for s in self.signs)


def _result(name: str, value: Optional[float], **extra) -> CriterionResult:
    if value is None:
        return CriterionResult(name, None, None, **extra)
    return CriterionResult(name, float(value), bool(value < 1.0 - ENTANGLEMENT_MARGIN), **extra)


# -- interwell (two-mode) moments -------------------------------------------


@dataclass(frozen=True)
class InterwellMoments:
    m_adb: complex
    m_nanb: float
    m_na: float
    m_nb: float
    m_n2: float
    m_jz2: float

    def __post_init__(self):
        if self.m_nanb < -1e-12 or self.m_n2 < -1e-12:
            raise InvalidStateError("number moments must be non-negative")

    @property
    def jx(self) -> float:
        return self.m_adb.real

    @property
    def jy(self) -> float:
        return self.m_adb.imag


def interwell_moments(state: Union[TwoModeState, DensityMatrix]) -> InterwellMoments:
    """Collect the HZ moments of a two-mode state, checking they are consistent."""
    basis = state.basis

    def ev(kind: Operator) -> complex:
        return expectation(operator_matrix(kind, basis), state)

    m = InterwellMoments(
        m_adb=ev(Operator.ADAG_B),
        m_nanb=ev(Operator.N_A_N_B).real,
        m_na=ev(Operator.N_A).real,
        m_nb=ev(Operator.N_B).real,
        m_n2=ev(Operator.N2).real,
        m_jz2=ev(Operator.JZ2).real,
    )
    # (N_A + N_B)^2 / 4 - (J^Z)^2 = n_a n_b
    gap = 0.25 * m.m_n2 - m.m_jz2 - m.m_nanb
    if abs(gap) > 1e-10 * max(1.0, m.m_n2):
        raise InvalidStateError(f"inconsistent interwell moments (identity off by {gap!r})")
    return m


def hz_criterion(m: InterwellMoments) -> CriterionResult:
    """Hillery-Zubairy product form <n_a n_b> / |<a†b>|^2."""
    denominator = abs(m.m_adb) ** 2
    if not math.isfinite(denominator) or denominator < DENOMINATOR_FLOOR:
        return _result("E_HZ", None)
    return _result("E_HZ", m.m_nanb / denominator)


def hz_spin_form(m: InterwellMoments) -> Optional[float]:
    """Spin form (<N^2>/4 - <(J^Z)^2>) / (|<J^X>|^2 + |<J^Y>|^2)."""
    denominator = m.jx**2 + m.jy**2
    if denominator < DENOMINATOR_FLOOR:
        return None
    return (0.25 * m.m_n2 - m.m_jz2) / denominator


def entropic_criterion(state: TwoModeState) -> CriterionResult:
    """1 - epsilon / epsilon_max with epsilon_max = log2(N + 1)."""
    entropy = reduced_entropy(state)
    return _result("E_entropic", 1.0 - entropy / math.log2(state.basis.N + 1))


# -- local spin moments ------------------------------------------------------


def _frozen(array, shape) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    if out.shape != shape:
        raise InvalidArgumentError(f"expected shape {shape}, got {out.shape}")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SpinMoments:
    """First and symmetrized second moments of the local spins J_A and J_B."""

    mean_a: np.ndarray
    mean_b: np.ndarray
    cov_a: np.ndarray
    cov_b: np.ndarray
    cross: np.ndarray
    n_mean: tuple[float, float]
    frame: str = field(default="lab")

    def __post_init__(self):
        for name, shape in (("mean_a", (3,)), ("mean_b", (3,)), ("cov_a", (3, 3)), ("cov_b", (3, 3)), ("cross", (3, 3))):
            object.__setattr__(self, name, _frozen(getattr(self, name), shape))
        for cov in (self.cov_a, self.cov_b):
            if np.max(np.abs(cov - cov.T)) > 1e-9 * max(1.0, np.max(np.abs(cov))):
                raise InvalidStateError("spin covariance matrix is not symmetric")
        if not np.all(np.isfinite(self.cross)):
            raise InvalidStateError("cross covariances must be finite")
        object.__setattr__(self, "n_mean", (float(self.n_mean[0]), float(self.n_mean[1])))

    def mean(self, well: str) -> np.ndarray:
        return self.mean_a if well == "A" else self.mean_b

    def cov(self, well: str) -> np.ndarray:
        return self.cov_a if well == "A" else self.cov_b


def _frame_rotation(mean: np.ndarray) -> np.ndarray:
    """Rows (x', y', z') of a right-handed frame with y' along the mean spin."""
    length = np.linalg.norm(mean)
    if length == 0:
        return np.eye(3)
    y_axis = mean / length
    reference = np.array([0.0, 0.0, 1.0])
    z_axis = reference - (reference @ y_axis) * y_axis
    if np.linalg.norm(z_axis) < 1e-8:
        reference = np.array([1.0, 0.0, 0.0])
        z_axis = reference - (reference @ y_axis) * y_axis
    z_axis /= np.linalg.norm(z_axis)
    x_axis = np.cross(y_axis, z_axis)
    return np.vstack([x_axis, y_axis, z_axis])


def align_to_mean(sm: SpinMoments) -> SpinMoments:
    """Rotate each well's spin so its mean lies along the internal Y axis."""
    if sm.frame == ROTATED:
        return sm
    ra = _frame_rotation(sm.mean_a)
    rb = _frame_rotation(sm.mean_b)
    return replace(
        sm,
        mean_a=ra @ sm.mean_a,
        mean_b=rb @ sm.mean_b,
        cov_a=ra @ sm.cov_a @ ra.T,
        cov_b=rb @ sm.cov_b @ rb.T,
        cross=ra @ sm.cross @ rb.T,
        frame=ROTATED,
    )


def _in_frame(sm: SpinMoments, frame: str) -> SpinMoments:
    if frame not in FRAMES:
        raise InvalidArgumentError(f"unknown criterion frame {frame!r}; expected one of {FRAMES}")
    return align_to_mean(sm) if frame == ROTATED else sm


def _direction(theta: float) -> np.ndarray:
    return np.array([math.sin(theta), 0.0, math.cos(theta)])


def squeezing_plane(cov: np.ndarray) -> np.ndarray:
    """The (Z, X) block of a 3x3 spin covariance."""
    return np.array([[cov[Z, Z], cov[Z, X]], [cov[X, Z], cov[X, X]]])


def combined_covariance(sm: SpinMoments, sign: int) -> np.ndarray:
    """Covariance of J_A + sign * J_B."""
    return sm.cov_a + sm.cov_b + sign * (sm.cross + sm.cross.T)


def plane_variance(block: np.ndarray, theta: float) -> float:
    c, s = math.cos(theta), math.sin(theta)
    return c * c * block[0, 0] + s * s * block[1, 1] + 2 * s * c * block[0, 1]


def optimal_theta(block) -> float:
    """Angle in [-pi/2, pi/2) minimizing the variance of J^theta.

    `block` is the (Z, X) covariance block [[zz, zx], [zx, xx]].
    """
    block = np.asarray(block, dtype=float)
    zz, zx, xx = block[0, 0], block[0, 1], block[1, 1]
    if not all(math.isfinite(v) for v in (zz, zx, xx)):
        raise InvalidArgumentError("covariance block must be finite")
    scale = max(abs(zz), abs(xx), abs(zx), DENOMINATOR_FLOOR)
    if abs(zx) <= 1e-14 * scale and abs(zz - xx) <= 1e-14 * scale:
        return 0.0
    theta = 0.5 * math.atan2(2 * zx, zz - xx)
    if plane_variance(block, theta + math.pi / 2) < plane_variance(block, theta):
        theta += math.pi / 2
    return (theta + math.pi / 2) % math.pi - math.pi / 2


def combined_variance(sm: SpinMoments, theta: float, sign: int) -> float:
    """Var(J_A^theta + sign * J_B^theta), clamped at zero."""
    u = _direction(theta)
    value = u @ sm.cov_a @ u + u @ sm.cov_b @ u + 2 * sign * (u @ sm.cross @ u)
    return max(float(value), 0.0)


def parallel_spin(sm: SpinMoments, frame: str = ROTATED) -> float:
    """|<J_A^par>| + |<J_B^par>|, the denominator of the product and sum criteria."""
    sm = _in_frame(sm, frame)
    return abs(sm.mean_a[Y]) + abs(sm.mean_b[Y])


@dataclass(frozen=True)
class Squeezing:
    plus: Optional[float]
    minus: Optional[float]
    perfect: bool = False


def _to_dB(variance: float, reference: float) -> tuple[float, bool]:
    floored = variance <= VARIANCE_FLOOR
    value = 10.0 * math.log10(max(variance, VARIANCE_FLOOR) / reference)
    if value < DB_FLOOR:
        return DB_FLOOR, True
    return value, floored


def squeezing_dB(sm: SpinMoments, theta: float, frame: str = ROTATED) -> Squeezing:
    """S_+ from Var(J_A^theta - J_B^theta), S_- from Var(J_A^theta' + J_B^theta'), theta' = theta + pi/2."""
    n0 = 0.5 * parallel_spin(sm, frame)
    sm = _in_frame(sm, frame)
    if n0 < DENOMINATOR_FLOOR:
        return Squeezing(None, None)
    plus, floor_plus = _to_dB(combined_variance(sm, theta, -1), n0)
    minus, floor_minus = _to_dB(combined_variance(sm, theta + math.pi / 2, 1), n0)
    return Squeezing(plus, minus, floor_plus or floor_minus)


def _paired_criterion(name: str, sm: SpinMoments, theta: float, frame: str, combine) -> CriterionResult:
    denominator = parallel_spin(sm, frame)
    sm = _in_frame(sm, frame)
    if denominator < DENOMINATOR_FLOOR:
        return _result(name, None, theta=theta)
    best_value, best_signs = None, None
    for s1, s2 in SIGN_PAIRINGS:
        v1 = combined_variance(sm, theta, s1)
        v2 = combined_variance(sm, theta + math.pi / 2, s2)
        value = combine(v1, v2) / denominator
        if best_value is None or value < best_value:
            best_value, best_signs = value, (s1, s2)
    return _result(name, best_value, theta=theta, signs=best_signs)


def product_criterion(sm: SpinMoments, theta: float, frame: str = ROTATED) -> CriterionResult:
    """Heisenberg-product form 2 sqrt(Var1 Var2) / (|<J_A^par>| + |<J_B^par>|)."""
    return _paired_criterion("E_product", sm, theta, frame, lambda v1, v2: 2.0 * math.sqrt(v1 * v2))


def sum_criterion(sm: SpinMoments, theta: float, frame: str = ROTATED) -> CriterionResult:
    """Sum form (Var1 + Var2) / (|<J_A^par>| + |<J_B^par>|)."""
    return _paired_criterion("E_sum", sm, theta, frame, lambda v1, v2: v1 + v2)


def local_squeezing_dB(sm: SpinMoments, well: str) -> Optional[float]:
    """Minimum transverse variance of one well against its coherent value |<J^par>|/2."""
    sm = align_to_mean(sm)
    reference = 0.5 * abs(sm.mean(well)[Y])
    if reference < DENOMINATOR_FLOOR:
        return None
    block = squeezing_plane(sm.cov(well))
    variance = max(plane_variance(block, optimal_theta(block)), 0.0)
    return _to_dB(variance, reference)[0]
