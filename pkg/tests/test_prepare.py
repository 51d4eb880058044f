import numpy as np
import pytest

from parabolica import germ, poly, prepare
from parabolica.germ import conjugate_family
from parabolica.poly import from_coeffs
from parabolica.prepare import (canonical_involution, hermite_fit, lagrange_fit,
                                prepare_at)

from conftest import (cubic_prepared_family, quad_prepared_family,
                      random_real_family, random_tangent_change)


def test_lagrange_zero_and_linear():
    assert lagrange_fit([0, 1], [0, 0], 1).is_zero()
    p = lagrange_fit([0, 1], [1, 2], 1)
    assert np.allclose(p.coeffs, [1, 1])


def test_lagrange_sample_round_trip():
    q = from_coeffs(0, -2, 0, 1)  # z^3 - 2z
    nodes = [1, 1j, -1, -1j]
    p = lagrange_fit(nodes, [q(z) for z in nodes], 3)
    assert np.allclose(p.coeffs, q.coeffs, atol=1e-12)


def test_lagrange_node_count_mismatch():
    with pytest.raises(prepare.PrepareError, match="nodes"):
        lagrange_fit([0, 1, 2], [1, 2], 2)


def test_hermite_matches_confluent_limit():
    # f(z) = exp(z): double node at 0, simple at 1
    import math
    groups = [(0.0, [1.0, 1.0]), (1.0, [math.e])]
    p = hermite_fit(groups)
    assert abs(p(0) - 1) < 1e-12 and abs(poly.derivative(p)(0) - 1) < 1e-12
    assert abs(p(1) - math.e) < 1e-12


def test_prepare_quadratic_closed_form():
    fam = quad_prepared_family()
    prep = prepare_at(fam, [0.01])
    # fixed points of g at +-sqrt(0.01); P = z^2 - 0.01
    assert np.allclose(prep.P.coeffs, [-0.01, 0, 1], atol=1e-9)
    assert abs(prep.eps_canonical[0] - (-0.01)) < 1e-9
    assert abs(prep.b - 0.5) < 0.01
    assert abs(prep.translation) < 1e-9


def test_prepare_holomorphic_quadratic_spec_example():
    fam = germ.family_from_jets(
        germ.HOLOMORPHIC, 1, lambda eps: from_coeffs(-eps[0], 1, 1),
        validity=0.05)
    prep = prepare_at(fam, [0.01])
    assert np.allclose(prep.P.coeffs, [-0.01, 0, 1], atol=1e-10)
    assert abs(prep.b - (1 / np.log(1.2) + 1 / np.log(0.8))) < 1e-9


def test_prepare_at_zero_parameter():
    fam = quad_prepared_family()
    prep = prepare_at(fam, [0.0])
    assert np.allclose(prep.P.coeffs, [0, 0, 1], atol=1e-8)
    assert np.allclose(prep.eps_canonical, [0.0], atol=1e-8)
    assert abs(prep.b - 0.5) < 1e-4   # extrapolated at the confluent point
    # S at the fully confluent point is the jet truncation; for the exact
    # normal-form-like family the eigenvalue relation pins S(0) = b-free data
    assert prep.S.degree <= 1 and prep.K.degree <= 1


def test_eigenvalue_fit_residuals():
    for fam, eps in [(quad_prepared_family(), [0.013]),
                     (cubic_prepared_family(), [0.004, -0.006])]:
        prep = prepare_at(fam, eps)
        res = prepare.eigenvalue_residuals(prep, fam, eps)
        assert res.size > 0 and np.max(res) < 1e-8


def test_reality_for_real_parameters(rng):
    for k in (1, 2):
        for _ in range(6):
            fam = random_real_family(k, rng)
            eps = rng.uniform(-0.012, 0.012, size=k)
            prep = prepare_at(fam, eps)
            for q in (prep.P, prep.S, prep.K):
                assert np.max(np.abs(np.imag(q.coeffs))) < 1e-9
            assert abs(prep.b.imag) < 1e-9
            assert np.max(np.abs(np.imag(prep.eps_canonical))) < 1e-9


def test_multiplier_symmetry_after_u_change(rng):
    for k in (1, 2):
        for _ in range(6):
            fam = random_real_family(k, rng)
            eps = rng.uniform(-0.012, 0.012, size=k)
            prep = prepare_at(fam, eps)
            assert prepare.f_multiplier_symmetry_residual(prep, fam, eps) < 1e-8


def test_conjugation_invariance_small_eps(rng):
    fam = quad_prepared_family(validity=5e-4)
    eps = [2e-4]
    prep = prepare_at(fam, eps)
    for _ in range(5):
        phi = random_tangent_change(rng)
        fam2 = conjugate_family(fam, phi)
        prep2 = prepare_at(fam2, eps)
        assert abs(prep2.b - prep.b) < 1e-7
        assert np.max(np.abs(prep2.eps_canonical - prep.eps_canonical)) < 1e-7


def test_involution_pattern():
    assert np.allclose(canonical_involution([1, 2], 2), [-1, 2])
    assert np.allclose(canonical_involution([0, 0], 2), [0, 0])
    assert np.allclose(canonical_involution([1, 2, 3, 4], 4), [-1, 2, -3, 4])
    # involution squares to the identity
    e = np.array([0.3 + 0.1j, -0.2, 1.0, 2.0])
    assert np.allclose(canonical_involution(canonical_involution(e, 4), 4), e)


def test_involution_odd_k_errors():
    with pytest.raises(prepare.PrepareError, match="unique"):
        canonical_involution([1.0], 1)


def test_involution_matches_minus_z_conjugation(rng):
    # conjugating by z -> -z sends eps to the involuted parameters (k even)
    fam = cubic_prepared_family()
    eps = [0.004, -0.007]
    prep = prepare_at(fam, eps)
    minus = poly.CPoly([0, -1])

    def jet(e):
        h = fam.h_jet(e)
        return poly.compose(poly.conj_coeffs(minus), poly.compose(h, minus))

    fam_m = germ.JetFamily(kind=germ.ANTIHOLOMORPHIC, k=2, jet_fn=jet,
                           validity=fam.validity)
    prep_m = prepare_at(fam_m, eps)
    want = canonical_involution(prep.eps_canonical, 2)
    assert np.max(np.abs(prep_m.eps_canonical - want)) < 1e-8


def test_prepared_residual_vanishes_for_exact_form():
    fam = quad_prepared_family()
    prep = prepare_at(fam, [0.01])
    res = prepare.prepared_residual(fam, [0.01], prep, order=6)
    assert np.max(np.abs(res.coeffs)) < 1e-9
