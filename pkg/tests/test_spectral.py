import cmath
import math

import numpy as np
import pytest

from ringhopf.eigensolver import spectrum_mismatch
from ringhopf.errors import AllDecoupled, InvalidMode
from ringhopf.spectral import (
    BifurcationKind,
    BlockCoefficients,
    CouplingCoefficients,
    Direction,
    block_spectrum,
    block_union_mismatch,
    circulant_matrix,
    circulant_spectrum,
    classify_first_bifurcation,
    design_ordering,
    hopf_nondegeneracy,
    mode_values,
    nn_ring,
    ordering_token,
    rotation_direction,
    sigma_k,
)


def _coeffs(a, dihedral=False):
    a = np.asarray(a, dtype=float)
    return CouplingCoefficients(len(a), a, dihedral)


# ------------------------------------------------------------------
# circulant spectra
# ------------------------------------------------------------------

def test_three_ring_closed_form():
    lam, a = 1.0, -2.0
    zeta = cmath.exp(2j * cmath.pi / 3)
    modes = circulant_spectrum(_coeffs([lam, 0.0, a]))
    expected = [lam + a, lam + zeta**2 * a, lam + zeta * a]
    for mode, want in zip(modes, expected):
        assert abs(mode.mu - want) < 1e-12


def test_four_ring_real_parts():
    a0, a1, a2, a3 = 0.3, -1.1, 0.7, 0.25
    modes = circulant_spectrum(_coeffs([a0, a1, a2, a3]))
    rho = [m.rho for m in modes]
    assert rho[0] == pytest.approx(a0 + a1 + a2 + a3, abs=1e-12)
    assert rho[1] == pytest.approx(a0 - a2, abs=1e-12)
    assert rho[2] == pytest.approx(a0 - a1 + a2 - a3, abs=1e-12)
    assert rho[3] == pytest.approx(a0 - a2, abs=1e-12)


def test_decoupled_ring_all_equal():
    modes = circulant_spectrum(_coeffs([5.0, 0, 0, 0, 0, 0]))
    assert all(abs(m.mu - 5.0) < 1e-12 for m in modes)
    assert all(m.algebraic_multiplicity == 6 for m in modes)


def test_eigenvector_residual():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(2, 13))
        c = _coeffs(rng.uniform(-3, 3, size=n))
        mat = circulant_matrix(c)
        for mode in circulant_spectrum(c):
            v = mode.eigenvector
            assert np.linalg.norm(mat @ v - mode.mu * v) <= 1e-10 * np.linalg.norm(v)


def test_oracle_equivalence_100_random():
    rng = np.random.default_rng(42)
    for _ in range(100):
        n = int(rng.integers(2, 13))
        c = _coeffs(rng.uniform(-2, 2, size=n))
        mu = mode_values(c)
        dense = np.linalg.eigvals(circulant_matrix(c))
        assert spectrum_mismatch(mu, dense) <= 1e-8


def test_conjugate_pairing_exact():
    rng = np.random.default_rng(1)
    for _ in range(40):
        n = int(rng.integers(2, 26))
        c = _coeffs(rng.uniform(-5, 5, size=n))
        mu = mode_values(c)
        for k in range(n):
            assert abs(mu[(n - k) % n] - mu[k].conjugate()) <= 1e-12 * c.scale


def test_dihedral_doubles():
    c = _coeffs([0, 1, 0, 0, 0, 1], dihedral=True)
    modes = circulant_spectrum(c)
    # mu_k = 2 cos(2 pi k / 6); k=1,2,4,5 pair up, k=0 and k=3 are simple
    for k in (1, 2, 4, 5):
        assert modes[k].algebraic_multiplicity == 2
        assert abs(modes[k].mu.imag) < 1e-12
        assert modes[k].mu == pytest.approx(2 * math.cos(2 * math.pi * k / 6))
    assert modes[0].algebraic_multiplicity == 1
    assert modes[3].algebraic_multiplicity == 1


def test_dihedral_coefficients_validated():
    with pytest.raises(ValueError):
        _coeffs([0, 1.0, 0.5], dihedral=True)


# ------------------------------------------------------------------
# block spectra
# ------------------------------------------------------------------

def test_block_scalar_reduces_to_circulant():
    c = _coeffs([0.4, -1.2, 0.0, 0.9])
    b = BlockCoefficients(4, 1, np.array([[c.a[0]]]), np.array([[c.a[1]]]))
    # only a_0 and a_1 present: P = a0, Q = a1
    per_mode = block_spectrum(b)
    mu = mode_values(_coeffs([0.4, -1.2, 0.0, 0.0]))
    for k, w in per_mode:
        assert len(w) == 1
        assert abs(w[0] - mu[k]) < 1e-12


def test_block_union_matches_dense_seeded():
    rng = np.random.default_rng(123)
    p = rng.standard_normal((2, 2))
    q = rng.standard_normal((2, 2))
    b = BlockCoefficients(3, 2, p, q)
    assert block_union_mismatch(b) <= 1e-8


def test_block_decoupled_q_zero():
    rng = np.random.default_rng(9)
    p = rng.standard_normal((2, 2))
    b = BlockCoefficients(2, 2, p, np.zeros((2, 2)))
    ref = np.linalg.eigvals(p)
    for _, w in block_spectrum(b):
        assert spectrum_mismatch(w, ref) <= 1e-9
    assert block_union_mismatch(b) <= 1e-8


def test_block_union_property_50_trials():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(2, 9))
        l = int(rng.integers(1, 4))
        b = BlockCoefficients(n, l, rng.standard_normal((l, l)),
                              rng.standard_normal((l, l)))
        assert block_union_mismatch(b) <= 1e-8


# ------------------------------------------------------------------
# first bifurcation
# ------------------------------------------------------------------

def test_classify_five_ring_nn_negative():
    fb = classify_first_bifurcation(nn_ring(5, -1.0))
    assert fb.kind is BifurcationKind.HOPF
    assert fb.critical_modes == frozenset({2, 3})
    assert fb.omega == pytest.approx(abs(math.sin(4 * math.pi / 5)))


def test_classify_six_ring_nn_negative():
    fb = classify_first_bifurcation(nn_ring(6, -1.0))
    assert fb.kind is BifurcationKind.STEADY_STATE
    assert fb.critical_modes == frozenset({3})


def test_classify_four_ring_long_range():
    fb = classify_first_bifurcation(_coeffs([0.0, 0.1, -1.0, 0.0]))
    assert fb.kind is BifurcationKind.HOPF
    assert fb.critical_modes == frozenset({1, 3})
    assert fb.omega == pytest.approx(0.1)


def test_classify_all_decoupled_raises():
    with pytest.raises(AllDecoupled):
        classify_first_bifurcation(_coeffs([1.0, 0.0, 0.0]))


def test_classify_degenerate_tie():
    # a = (0, 0, 1, 0): rho = (1, -1, 1, -1): modes 0 and 2 tie
    fb = classify_first_bifurcation(_coeffs([0.0, 0.0, 1.0, 0.0]))
    assert fb.kind is BifurcationKind.DEGENERATE
    assert fb.critical_modes == frozenset({0, 2})


def test_crossing_value_three_ring():
    # diag lam, coupling a at range 1 (coefficient index 2): the complex
    # pair crosses when the diagonal reaches a/2
    for lam, a in [(-1.0, -2.0), (0.3, -0.5), (-4.0, -1.0)]:
        fb = classify_first_bifurcation(_coeffs([lam, 0.0, a]))
        assert fb.kind is BifurcationKind.HOPF
        assert fb.crossing_value == pytest.approx(a / 2.0, abs=1e-12)
    # positive coupling: synchronous real mode crosses first, at -a
    fb = classify_first_bifurcation(_coeffs([0.7, 0.0, 1.5]))
    assert fb.kind is BifurcationKind.STEADY_STATE
    assert fb.crossing_value == pytest.approx(-1.5, abs=1e-12)


def _nn_expected(n, a1):
    # cosine ordering of the unit roots, independent of the classifier
    if n % 2 == 1 and a1 < 0:
        big_n = (n - 1) // 2
        return BifurcationKind.HOPF, {big_n, big_n + 1}
    if a1 > 0:
        return BifurcationKind.STEADY_STATE, {0}
    return BifurcationKind.STEADY_STATE, {n // 2}


@pytest.mark.parametrize("n", range(3, 26))
@pytest.mark.parametrize("a1", [-1.0, 1.0])
def test_nn_first_bifurcation_theorem(n, a1):
    fb = classify_first_bifurcation(nn_ring(n, a1))
    kind, modes = _nn_expected(n, a1)
    assert fb.kind is kind
    assert fb.critical_modes == frozenset(modes)


# ------------------------------------------------------------------
# rotation direction
# ------------------------------------------------------------------

def test_rotation_three_ring():
    # sigma_1 = -sqrt(3) a / 2 for (lam, 0, a)
    c = _coeffs([0.2, 0.0, -2.0])
    assert sigma_k(c, 1) == pytest.approx(math.sqrt(3.0))
    assert rotation_direction(c, 1) is Direction.ANTICLOCKWISE


def test_rotation_five_ring_clockwise():
    c = _coeffs([0.0, -2.0, 0.0, 0.0, 0.0])
    assert sigma_k(c, 2) == pytest.approx(-2.0 * math.sin(4 * math.pi / 5))
    assert rotation_direction(c, 2) is Direction.CLOCKWISE


def test_rotation_antisymmetry():
    rng = np.random.default_rng(17)
    for _ in range(50):
        n = int(rng.integers(3, 12))
        c = _coeffs(rng.uniform(-2, 2, size=n))
        for k in range(1, (n - 1) // 2 + 1):
            if 2 * k == n:
                continue
            if abs(sigma_k(c, k)) < 1e-6:
                continue
            d1 = rotation_direction(c, k)
            d2 = rotation_direction(_coeffs(-c.a), k)
            assert {d1, d2} == {Direction.CLOCKWISE, Direction.ANTICLOCKWISE}


def test_rotation_invalid_modes():
    c = _coeffs([0.0, 1.0, 0.0, 0.0])
    with pytest.raises(InvalidMode):
        rotation_direction(c, 0)
    with pytest.raises(InvalidMode):
        rotation_direction(c, 2)  # k = n/2


def test_rotation_zero_sigma():
    c = _coeffs([0.0, 1.0, 0.0, 0.0, 1.0], dihedral=True)
    assert rotation_direction(c, 1) is Direction.NOT_ROTATING


# ------------------------------------------------------------------
# inverse design
# ------------------------------------------------------------------

def _realized_ranks(c):
    half = c.n // 2
    rho = np.array([m.rho for m in circulant_spectrum(c)[: half + 1]])
    ranks = np.empty(half + 1, dtype=int)
    ranks[np.argsort(-rho)] = np.arange(half + 1)
    return list(ranks)


def test_design_three_ring_identity():
    c = design_ordering(3, [0, 1])
    modes = circulant_spectrum(c)
    assert modes[0].rho > modes[1].rho


def test_design_five_ring_mode_one_first():
    c = design_ordering(5, [1, 0, 2])
    fb = classify_first_bifurcation(c)
    assert fb.critical_modes == frozenset({1, 4})


def test_design_two_ring_both_orders():
    for desired in ([0, 1], [1, 0]):
        c = design_ordering(2, desired)
        assert _realized_ranks(c) == desired


def test_design_exhaustive_small_n():
    import itertools

    for n in range(2, 10):
        half = n // 2
        for perm in itertools.permutations(range(half + 1)):
            c = design_ordering(n, list(perm))
            assert _realized_ranks(c) == list(perm)
            rho = sorted(m.rho for m in circulant_spectrum(c)[: half + 1])
            gaps = np.diff(rho)
            assert np.all(gaps >= 0.5)


def test_design_random_perms_up_to_15():
    rng = np.random.default_rng(23)
    for _ in range(50):
        n = int(rng.integers(10, 16))
        perm = list(rng.permutation(n // 2 + 1))
        c = design_ordering(n, [int(p) for p in perm])
        assert _realized_ranks(c) == perm


def test_design_rejects_non_permutation():
    with pytest.raises(ValueError):
        design_ordering(5, [0, 0, 1])


# ------------------------------------------------------------------
# nondegeneracy report
# ------------------------------------------------------------------

def test_nondegeneracy_five_ring():
    rep = hopf_nondegeneracy(nn_ring(5, -1.0), 2)
    assert rep.simple and rep.no_other_imaginary and rep.crossing


def test_nondegeneracy_dihedral_double():
    c = _coeffs([0, 1, 0, 0, 0, 1], dihedral=True)
    rep = hopf_nondegeneracy(c, 1)
    assert rep.simple is False


def test_nondegeneracy_four_ring():
    rep = hopf_nondegeneracy(_coeffs([0.0, 0.1, -1.0, 0.0]), 1)
    assert rep.no_other_imaginary is True


# ------------------------------------------------------------------
# ordering token
# ------------------------------------------------------------------

def test_ordering_token_four_ring():
    # rho = (a2 + a3, -a2, a2 - a3) for a0 = a1 = 0
    assert ordering_token(_coeffs([0, 0, 1.0, 0.2])) == "0>2>1"
    assert ordering_token(_coeffs([0, 0, 1.0, 2.0])) == ""  # rho1 = rho2 tie


def test_classify_batch_matches_scalar():
    from ringhopf.spectral import classify_batch

    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(2, 10))
        a = np.round(rng.uniform(-2, 2, size=n), 2)
        if rng.integers(0, 4) == 0:
            a[1:] = 0.0
        (batch_fb, batch_tok), = classify_batch(n, a[None, :])
        if not np.any(a[1:] != 0.0):
            assert batch_fb is None and batch_tok == ""
            continue
        c = _coeffs(a)
        fb = classify_first_bifurcation(c)
        assert batch_fb.kind == fb.kind
        assert batch_fb.critical_modes == fb.critical_modes
        assert batch_fb.crossing_value == pytest.approx(fb.crossing_value, abs=1e-14)
        assert batch_fb.omega == pytest.approx(fb.omega, abs=1e-14)
        assert batch_tok == ordering_token(c)
