import math

import numpy as np
import pytest

from ringhopf.errors import DoubleEigenvalue, NotHopfMode
from ringhopf.hopf_predict import (
    dihedral_modes,
    predict,
    predict_from_sigma,
    symmetry_pair,
    time_reverse,
)
from ringhopf.spectral import CouplingCoefficients, Direction


def _coeffs(a, dihedral=False):
    a = np.asarray(a, dtype=float)
    return CouplingCoefficients(len(a), a, dihedral)


# ------------------------------------------------------------------
# predictions
# ------------------------------------------------------------------

def test_five_ring_clockwise_fractions():
    # a_1 = -2: sigma_2 = -2 sin(4 pi / 5) < 0, wave rotates clockwise
    p = predict(_coeffs([0.0, -2.0, 0.0, 0.0, 0.0]), 2)
    assert p.direction is Direction.CLOCKWISE
    assert np.allclose(p.phase_fraction, [0, 2 / 5, 4 / 5, 1 / 5, 3 / 5])
    assert p.omega == pytest.approx(2.0 * math.sin(4 * math.pi / 5))
    assert p.period_limit == pytest.approx(2 * math.pi / p.omega)


def test_three_ring_anticlockwise_fractions():
    # coupling at index 2: sigma_1 = -sqrt(3) a / 2 = +sqrt(3) for a = -2
    p = predict(_coeffs([0.3, 0.0, -2.0]), 1)
    assert p.direction is Direction.ANTICLOCKWISE
    assert np.allclose(p.phase_fraction, [0, 2 / 3, 1 / 3])
    assert p.omega == pytest.approx(math.sqrt(3.0))


def test_block_mode_zero_is_synchronous():
    p = predict_from_sigma(4, 0, sigma=1.7)
    assert p.direction is Direction.NOT_ROTATING
    assert np.all(p.phase_fraction == 0.0)
    assert p.omega == pytest.approx(1.7)
    assert p.twist_order == 1


def test_half_mode_alternates():
    p = predict_from_sigma(6, 3, sigma=-0.9)
    assert p.direction is Direction.NOT_ROTATING
    assert np.allclose(p.phase_fraction, [0, 0.5, 0, 0.5, 0, 0.5])


def test_not_hopf_mode():
    with pytest.raises(NotHopfMode):
        predict(_coeffs([0.0, 1.0, 0.0]), 0)
    with pytest.raises(NotHopfMode):
        predict(_coeffs([0.0, -1.0, 0.0, 0.0, 0.0, 0.0]), 3)


def test_dihedral_double_rejected():
    c = _coeffs([0, 1, 0, 0, 0, 1], dihedral=True)
    with pytest.raises(DoubleEigenvalue):
        predict(c, 1)


def test_mode_aliasing_same_branch():
    c = _coeffs([0.0, -2.0, 0.1, 0.0, 0.0])
    a = predict(c, 2)
    b = predict(c, 3)
    assert a.k == b.k == 2
    assert a.direction is b.direction
    assert np.allclose(a.phase_fraction, b.phase_fraction)


def test_fraction_step_is_constant():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(3, 13))
        c = _coeffs(rng.uniform(-2, 2, size=n))
        for k in range(1, (n - 1) // 2 + 1):
            if abs(np.dot(c.a, np.sin(2 * np.pi * k * np.arange(n) / n))) < 1e-6:
                continue
            p = predict(c, k)
            steps = np.diff(np.concatenate([p.phase_fraction, [p.phase_fraction[0]]])) % 1.0
            assert np.allclose(steps, steps[0])
            expected = {k / n, (n - k) / n}
            assert min(abs(steps[0] - e) for e in expected) < 1e-12


def test_twist_times_step_is_integer():
    p = predict(_coeffs([0.0, 0.0, -1.5, 0.0, 0.0, 0.0]), 2)
    step = (p.phase_fraction[1] - p.phase_fraction[0]) % 1.0
    assert (p.twist_order * step) % 1.0 == pytest.approx(0.0, abs=1e-12)


# ------------------------------------------------------------------
# time reversal
# ------------------------------------------------------------------

def test_time_reverse_five_ring():
    p = predict(_coeffs([0.0, -2.0, 0.0, 0.0, 0.0]), 2)
    r = time_reverse(p)
    assert np.allclose(r.phase_fraction, [0, 3 / 5, 1 / 5, 4 / 5, 2 / 5])
    assert r.direction is Direction.ANTICLOCKWISE
    assert r.omega == p.omega and r.period_limit == p.period_limit
    assert r.spatial_K == p.spatial_K and r.twist_order == p.twist_order


def test_time_reverse_three_ring():
    p = predict(_coeffs([0.3, 0.0, -2.0]), 1)
    assert np.allclose(time_reverse(p).phase_fraction, [0, 1 / 3, 2 / 3])


def test_time_reverse_involution():
    rng = np.random.default_rng(8)
    for _ in range(20):
        n = int(rng.integers(3, 11))
        c = _coeffs(rng.uniform(-2, 2, size=n))
        k = int(rng.integers(1, (n - 1) // 2 + 1))
        if abs(np.dot(c.a, np.sin(2 * np.pi * k * np.arange(n) / n))) < 1e-6:
            continue
        p = predict(c, k)
        rr = time_reverse(time_reverse(p))
        assert np.allclose(rr.phase_fraction, p.phase_fraction)
        assert rr.direction is p.direction


def test_time_reverse_fixes_synchrony():
    p = predict_from_sigma(5, 0, sigma=2.0)
    r = time_reverse(p)
    assert np.all(r.phase_fraction == 0.0)
    assert r.direction is Direction.NOT_ROTATING


# ------------------------------------------------------------------
# symmetry pairs
# ------------------------------------------------------------------

def test_symmetry_pair_examples():
    assert symmetry_pair(5, 2) == ("Z5", "trivial", 5)
    assert symmetry_pair(6, 3) == ("Z6", "Z3", 2)
    assert symmetry_pair(7, 0) == ("Z7", "Z7", 1)


def test_symmetry_pair_bounds():
    with pytest.raises(ValueError):
        symmetry_pair(5, 5)


# ------------------------------------------------------------------
# dihedral mode listing
# ------------------------------------------------------------------

def test_dihedral_three_ring():
    modes = dihedral_modes(_coeffs([0.5, 1.0, 1.0], dihedral=True))
    assert [m.k for m in modes] == [0, 1]
    assert modes[1].mu == pytest.approx(0.5 - 1.0)  # zeta + zeta^2 = -1
    assert modes[1].multiplicity == 2 and modes[1].c_axial_analysis_required
    assert modes[0].multiplicity == 1


def test_dihedral_four_ring():
    modes = dihedral_modes(_coeffs([0.2, 0.7, -0.4, 0.7], dihedral=True))
    assert [m.k for m in modes] == [0, 1, 2]
    assert [m.multiplicity for m in modes] == [1, 2, 1]
    assert modes[1].mu == pytest.approx(0.2 - (-0.4))


def test_dihedral_two_ring_all_simple():
    modes = dihedral_modes(_coeffs([0.1, 0.9], dihedral=True))
    assert [m.multiplicity for m in modes] == [1, 1]
    assert not any(m.c_axial_analysis_required for m in modes)


def test_dihedral_requires_flag():
    with pytest.raises(ValueError):
        dihedral_modes(_coeffs([0.0, 1.0, 0.0]))
