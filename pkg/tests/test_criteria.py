"""Tests for the HZ, entropic, squeezing and product/sum criteria."""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from twowell.adiabatic import ThermalSpec, build_hamiltonian, ground_state, thermal_state
from twowell.criteria import (
    LITERAL,
    ROTATED,
    InterwellMoments,
    SpinMoments,
    align_to_mean,
    entropic_criterion,
    hz_criterion,
    hz_spin_form,
    interwell_moments,
    local_squeezing_dB,
    optimal_theta,
    plane_variance,
    product_criterion,
    squeezing_dB,
    sum_criterion,
)
from twowell.errors import InvalidArgumentError
from twowell.fock import TwoModeState, build_basis


def _coherent_like(n_w: float = 20.0, scale: float = 1.0, cross=None) -> SpinMoments:
    """Mean spin N_W/2 along Y, transverse variances scale * N_W/4."""
    mean = [0.0, n_w / 2, 0.0]
    cov = np.diag([n_w / 4, n_w / 4, n_w / 4]) * scale
    return SpinMoments(mean, mean, cov, cov, np.zeros((3, 3)) if cross is None else cross, (n_w, n_w))


def _random_spin_moments(rng) -> SpinMoments:
    root = rng.normal(size=(6, 6))
    joint = root @ root.T
    return SpinMoments(
        rng.normal(size=3) * 3,
        rng.normal(size=3) * 3,
        joint[:3, :3],
        joint[3:, 3:],
        joint[:3, 3:],
        (10.0, 10.0),
    )


def test_hz_binomial_state():
    N = 10
    m = interwell_moments(ground_state(build_hamiltonian(N, 0.0)))
    assert m.m_adb.real == pytest.approx(-N / 2)
    assert m.m_nanb == pytest.approx(N * (N - 1) / 4)
    result = hz_criterion(m)
    assert result.name == "E_HZ"
    assert result.value == pytest.approx((N - 1) / N)


def test_hz_product_coherent_is_boundary():
    alpha, beta = 1.5, 0.5j
    m = InterwellMoments(
        m_adb=np.conj(alpha) * beta,
        m_nanb=abs(alpha) ** 2 * abs(beta) ** 2,
        m_na=abs(alpha) ** 2,
        m_nb=abs(beta) ** 2,
        m_n2=6.0,
        m_jz2=1.0,
    )
    result = hz_criterion(m)
    assert result.value == pytest.approx(1.0)
    assert result.entangled is False


def test_hz_undefined_without_coherence():
    basis = build_basis(4)
    state = TwoModeState(basis, np.array([0, 0, 0, 0, 1.0]))
    result = hz_criterion(interwell_moments(state))
    assert result.value is None
    assert result.entangled is None
    assert not result.defined


def test_hz_spin_form_agrees():
    """Moment form and spin form agree on random pure and thermal states."""
    rng = np.random.default_rng(11)
    basis = build_basis(30)
    for _ in range(100):
        state = TwoModeState.from_amplitudes(basis, rng.normal(size=31) + 1j * rng.normal(size=31))
        m = interwell_moments(state)
        assert hz_spin_form(m) == pytest.approx(hz_criterion(m).value, rel=1e-10)
    for _ in range(20):
        H = build_hamiltonian(30, rng.uniform(-0.2, 0.2))
        m = interwell_moments(thermal_state(H, ThermalSpec(rng.uniform(1.0, 100.0))))
        assert hz_spin_form(m) == pytest.approx(hz_criterion(m).value, rel=1e-10)


def test_hz_invariant_under_mode_phases():
    """A common phase on both modes, or a phase on mode a alone, leaves E_HZ unchanged."""
    basis = build_basis(20)
    state = ground_state(build_hamiltonian(20, -0.08))
    reference = interwell_moments(state)
    k = np.arange(21)
    for phases in (np.full(21, np.exp(20 * 0.7j)), np.exp(0.45j * k)):
        rotated = interwell_moments(TwoModeState(basis, state.amplitudes * phases))
        assert hz_criterion(rotated).value == pytest.approx(hz_criterion(reference).value, rel=1e-10)
        assert hz_spin_form(rotated) == pytest.approx(hz_spin_form(reference), rel=1e-10)


def test_entropic_examples():
    basis = build_basis(6)
    fock = TwoModeState(basis, np.eye(7)[6])
    assert entropic_criterion(fock).value == pytest.approx(1.0)
    assert entropic_criterion(fock).entangled is False
    uniform = TwoModeState.from_amplitudes(basis, np.ones(7))
    assert entropic_criterion(uniform).value == pytest.approx(0.0, abs=1e-12)
    binomial = TwoModeState(build_basis(2), np.sqrt([0.25, 0.5, 0.25]))
    assert entropic_criterion(binomial).value == pytest.approx(1 - 1.5 / math.log2(3))
    assert entropic_criterion(binomial).value == pytest.approx(0.0536, abs=1e-4)


def test_optimal_theta_examples():
    assert optimal_theta([[1.0, 0.0], [0.0, 2.0]]) == pytest.approx(0.0, abs=1e-12)
    # zx > 0 with equal diagonals: the variance is smallest at -pi/4
    assert optimal_theta([[1.0, 0.5], [0.5, 1.0]]) == pytest.approx(-math.pi / 4)
    assert optimal_theta([[1.0, 0.0], [0.0, 1.0]]) == 0.0


def test_optimal_theta_is_minimal():
    rng = np.random.default_rng(5)
    grid = np.linspace(-math.pi / 2, math.pi / 2, 360, endpoint=False)
    for _ in range(50):
        root = rng.normal(size=(2, 2))
        block = root @ root.T
        theta = optimal_theta(block)
        assert -math.pi / 2 <= theta < math.pi / 2
        best = plane_variance(block, theta)
        assert all(best <= plane_variance(block, t) + 1e-10 for t in grid)


def test_optimal_theta_rejects_non_finite():
    with pytest.raises(InvalidArgumentError):
        optimal_theta([[float("inf"), 0.0], [0.0, 1.0]])


def test_squeezing_coherent_baseline():
    s = squeezing_dB(_coherent_like(), 0.0)
    assert s.plus == pytest.approx(0.0, abs=1e-12)
    assert s.minus == pytest.approx(0.0, abs=1e-12)
    assert not s.perfect


def test_squeezing_doubling_adds_3dB():
    s = squeezing_dB(_coherent_like(scale=2.0), 0.3)
    assert s.plus == pytest.approx(10 * math.log10(2), abs=1e-12)
    assert s.minus == pytest.approx(3.0103, abs=1e-4)


def test_squeezing_perfect_correlation_floor():
    cov = np.diag([5.0, 5.0, 5.0])
    s = squeezing_dB(_coherent_like(cross=cov), 0.0)
    assert s.plus == -300.0
    assert s.perfect


def test_product_and_sum_coherent_boundary():
    sm = _coherent_like()
    for criterion in (product_criterion, sum_criterion):
        result = criterion(sm, 0.0)
        assert result.value == pytest.approx(1.0, abs=1e-12)
        assert result.entangled is False
        assert result.theta == 0.0


def test_product_zero_difference_variance():
    cov = np.diag([5.0, 5.0, 5.0])
    result = product_criterion(_coherent_like(cross=cov), 0.0)
    assert result.value == pytest.approx(0.0, abs=1e-12)
    assert result.entangled
    assert -1 in result.signs


def test_product_sqrt_scaling():
    """Doubling the X variance at theta=0 scales the product by sqrt(2)."""
    n_w = 20.0
    mean = [0.0, n_w / 2, 0.0]
    base = np.diag([1.0, 0.0, 3.0])
    wide = np.diag([2.0, 0.0, 3.0])
    zero = np.zeros((3, 3))
    first = product_criterion(SpinMoments(mean, mean, base, base, zero, (n_w, n_w)), 0.0)
    second = product_criterion(SpinMoments(mean, mean, wide, wide, zero, (n_w, n_w)), 0.0)
    assert second.value == pytest.approx(first.value * math.sqrt(2))


def test_sum_not_below_product():
    rng = np.random.default_rng(17)
    for _ in range(100):
        sm = _random_spin_moments(rng)
        theta = rng.uniform(-math.pi / 2, math.pi / 2)
        for frame in (ROTATED, LITERAL):
            assert sum_criterion(sm, theta, frame).value >= product_criterion(sm, theta, frame).value - 1e-12


def test_sum_equals_product_for_equal_variances():
    sm = _coherent_like(scale=0.7)
    assert sum_criterion(sm, 0.4).value == pytest.approx(product_criterion(sm, 0.4).value, rel=1e-12)


def test_undefined_without_mean_spin():
    zero = np.zeros(3)
    cov = np.eye(3)
    sm = SpinMoments(zero, zero, cov, cov, np.zeros((3, 3)), (0.0, 0.0))
    assert product_criterion(sm, 0.0).value is None
    assert sum_criterion(sm, 0.0, LITERAL).entangled is None
    assert squeezing_dB(sm, 0.0).plus is None


def test_rotated_frame_puts_mean_on_y():
    rng = np.random.default_rng(2)
    sm = align_to_mean(_random_spin_moments(rng))
    assert sm.frame == ROTATED
    for well in ("A", "B"):
        mean = sm.mean(well)
        assert abs(mean[0]) < 1e-12 and abs(mean[2]) < 1e-12
        assert mean[1] > 0


def test_unknown_frame():
    with pytest.raises(InvalidArgumentError):
        product_criterion(_coherent_like(), 0.0, "sideways")


def test_local_squeezing_coherent():
    assert local_squeezing_dB(_coherent_like(), "A") == pytest.approx(0.0, abs=1e-12)


if __name__ == "__main__":
    test_hz_binomial_state()
    test_optimal_theta_examples()
    test_product_and_sum_coherent_boundary()
    print("\nAll tests passed!")
