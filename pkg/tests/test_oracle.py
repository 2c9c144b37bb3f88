"""Tests for the truncated Fock oracle against the closed-form engine."""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from twowell.config import DEFAULT_ORACLE
from twowell.errors import InsufficientCutoffError, InvalidArgumentError
from twowell.kerr import RB_SCATTERING_LENGTHS, KerrParams, dynamic_spin_moments, g_ratios_from_scattering_lengths
from twowell.oracle import default_cutoff, fock_oracle, minimum_cutoff

RB = g_ratios_from_scattering_lengths(**RB_SCATTERING_LENGTHS)
NO_CROSS = ((1.0, 0.0), (0.0, RB[1][1]))
PHI = math.pi / 2
ORACLE_TAU = np.linspace(DEFAULT_ORACLE["tau"]["start"], DEFAULT_ORACLE["tau"]["stop"], DEFAULT_ORACLE["tau"]["num"])


def _assert_moments_match(engine, oracle, rtol=1e-8, atol=1e-10):
    for name in ("mean_a", "mean_b", "cov_a", "cov_b", "cross"):
        np.testing.assert_allclose(getattr(engine, name), getattr(oracle, name), rtol=rtol, atol=atol, err_msg=name)
    np.testing.assert_allclose(engine.n_mean, oracle.n_mean, rtol=rtol, atol=atol)


def _params(alpha_sq: float, ratios, tau: float) -> KerrParams:
    return KerrParams.from_atom_number(2 * alpha_sq, ratios, tau, alpha=math.sqrt(alpha_sq))


def test_minimum_cutoff():
    assert minimum_cutoff(4.0) == 24
    assert minimum_cutoff(0.0) == 0


def test_default_cutoff_covers_minimum():
    params = _params(16.0, RB, 0.0)
    assert default_cutoff(params) >= minimum_cutoff(16.0)


def test_cutoff_below_mean_occupation():
    with pytest.raises(InsufficientCutoffError):
        fock_oracle(_params(4.0, RB, 1.0), PHI, cutoff=3)


def test_cutoff_just_below_guard():
    with pytest.raises(InsufficientCutoffError):
        fock_oracle(_params(25.0, RB, 1.0), PHI, cutoff=minimum_cutoff(25.0) - 1)


def test_oracle_amplitude_limit():
    with pytest.raises(InvalidArgumentError):
        fock_oracle(_params(36.0, RB, 1.0), PHI)


def test_zero_time_is_coherent():
    alpha_sq = 4.0
    oracle = fock_oracle(_params(alpha_sq, RB, 0.0), PHI)
    n_w = 2 * alpha_sq
    assert sum(oracle.n_mean) == pytest.approx(2 * n_w, abs=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(oracle.cov_a), [n_w / 4] * 3, atol=1e-12)
    np.testing.assert_allclose(oracle.cross, 0, atol=1e-12)


def test_pre_beamsplitter_matches():
    params = _params(4.0, RB, 2.0)
    _assert_moments_match(
        dynamic_spin_moments(params, PHI, beamsplitter=False), fock_oracle(params, PHI, beamsplitter=False)
    )


@pytest.mark.parametrize("ratios", [RB, NO_CROSS], ids=["rb", "no_cross"])
@pytest.mark.parametrize("alpha_sq", [1.0, 4.0, 9.0, 16.0])
def test_engine_matches_oracle(alpha_sq, ratios):
    """Every point of the default oracle-check tau grid."""
    for tau in ORACLE_TAU:
        params = _params(alpha_sq, ratios, tau)
        _assert_moments_match(dynamic_spin_moments(params, PHI), fock_oracle(params, PHI))


def test_engine_matches_oracle_long_times():
    for tau in (12.5, 40.0):
        params = _params(4.0, RB, tau)
        _assert_moments_match(dynamic_spin_moments(params, PHI), fock_oracle(params, PHI))


def test_engine_matches_oracle_other_phase():
    params = KerrParams((1.5, 0.5 - 1.0j, -1.2j, 2.0), RB, n_a=6.0, tau=3.0)
    _assert_moments_match(dynamic_spin_moments(params, 1.1), fock_oracle(params, 1.1))


if __name__ == "__main__":
    test_minimum_cutoff()
    test_zero_time_is_coherent()
    test_engine_matches_oracle(4.0, RB)
    print("\nAll tests passed!")
