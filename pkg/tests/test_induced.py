import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from affinefourier.detmeasure import Kernel
from affinefourier.fourier import mu_hat
from affinefourier.ifs import bernoulli_ifs
from affinefourier.induced import (
    InducedSystem,
    d_weights,
    det_lambda,
    det_lambda_order,
    det_order,
    nu_hat_bruteforce,
    nu_hat_det,
    nu_hat_trace_asymptotic,
    positive_definite_check,
    toeplitz_an,
    toeplitz_exact_pn,
    toeplitz_minor,
    toeplitz_minor_expansion,
    toeplitz_product_approx,
    unitary_invariance_check,
)


def dense6():
    return Kernel.random_dense(6, np.random.default_rng(2))


def test_t_zero_is_one():
    for K in (Kernel.diagonal(0.3), Kernel.toeplitz(0.5), dense6()):
        r = nu_hat_det(InducedSystem(0.4, K), 0.0)
        assert all(v == 1 for _, v in r.trace)
        assert nu_hat_bruteforce(InducedSystem(0.4, K), 0.0, 8) == pytest.approx(1, abs=1e-13)


def test_diagonal_is_bernoulli_product():
    p, lam, t = 0.3, 0.4, 1.7
    S = InducedSystem(lam, Kernel.diagonal(p))
    n = 20
    prod = np.prod([p * np.exp(2j * np.pi * lam**k * t) + 1 - p for k in range(1, n + 1)])
    assert abs(det_order(S.kernel, lam, t, n) - prod) < 1e-14
    # and the IFS with digits {0, 1}, weights (1-p, p), coded by sum omega_k lam^k
    assert abs(nu_hat_det(S, t).value - mu_hat(bernoulli_ifs(lam, (0, 1), (1 - p, p)), t).value) < 1e-9


def test_bruteforce_order_one():
    p, lam, t = 0.3, 0.4, 1.1
    assert nu_hat_bruteforce(InducedSystem(lam, Kernel.diagonal(p)), t, 1) == pytest.approx(
        1 - p + p * np.exp(2j * np.pi * lam * t), abs=1e-15
    )


def test_dense_det_vs_bruteforce():
    S = InducedSystem(0.4, dense6())
    assert abs(det_order(S.kernel, 0.4, 1.7, 10) - nu_hat_bruteforce(S, 1.7, 10)) < 1e-9
    assert nu_hat_det(S, 1.7).converged


def test_bruteforce_limit():
    with pytest.raises(ValueError):
        nu_hat_bruteforce(InducedSystem(0.5, Kernel.diagonal(0.5)), 1.0, 15)


@given(st.floats(-5, 5))
def test_transform_properties(t):
    S = InducedSystem(0.5, Kernel.toeplitz(0.5))
    v = nu_hat_det(S, t).value
    w = nu_hat_det(S, -t).value
    assert abs(v) <= 1 + 1e-9
    assert abs(w - np.conj(v)) <= 1e-12


def test_non_convergence_is_flagged():
    r = nu_hat_det(InducedSystem(0.999, Kernel.diagonal(0.5)), 3.0, n_max=10)
    assert not r.converged and r.n_used == 10


def test_trace_asymptotic_gap_scales():
    S = InducedSystem(0.5, Kernel.diagonal(0.3))
    assert nu_hat_trace_asymptotic(S, 0.0, 10).value == 1
    gaps = [nu_hat_trace_asymptotic(S, t, 30).gap for t in (0.1, 0.05, 0.025)]
    for g0, g1 in zip(gaps, gaps[1:]):
        assert 3.5 < g0 / g1 < 4.5


def test_an_and_minors():
    assert float(np.linalg.det(toeplitz_an(0.5, 3))) == pytest.approx(0.5625, abs=1e-14)
    assert [toeplitz_minor(0.5, 3, k) for k in (1, 2, 3)] == pytest.approx([0.75, 0.9375, 0.75], abs=1e-14)
    for a in (0.2, 0.5, 0.8):
        for n in range(1, 11):
            assert abs(np.linalg.det(toeplitz_an(a, n)) - (1 - a * a) ** (n - 1)) <= 1e-10


def test_full_expansion_is_the_determinant():
    p, a, lam = 0.3, 0.5, 0.5
    K = Kernel.toeplitz_general(p, a)
    for n in range(1, 9):
        for t in (0.7, 1.3):
            assert abs(toeplitz_minor_expansion(p, a, lam, t, n) - det_order(K, lam, t, n)) < 1e-13


def test_printed_pn_order_two():
    # at n = 2 the minors of sizes 1 and 2 are all the non-empty subsets
    p, a, lam, t = 0.3, 0.5, 0.5, 1.3
    K = Kernel.toeplitz_general(p, a)
    assert abs(toeplitz_exact_pn(p, a, lam, t, 2) - det_order(K, lam, t, 2)) < 1e-15


def test_printed_pn_misses_middle_minors():
    p, a, lam, t = 0.3, 0.5, 0.5, 1.3
    K = Kernel.toeplitz_general(p, a)
    gaps = [abs(toeplitz_exact_pn(p, a, lam, t, n) - det_order(K, lam, t, n)) for n in range(3, 9)]
    assert min(gaps) > 0.1


def test_a_zero_is_diagonal():
    r = toeplitz_product_approx(0.3, 0.0, 0.5, 1.3, 10)
    assert r.dev < 1e-15


def test_small_p_limit():
    r = toeplitz_product_approx(1e-9, 0.5, 0.5, 1.3, 8)
    assert abs(r.det_value - 1) < 1e-7 and abs(r.product - 1) < 1e-7


def test_det_lambda_identity():
    for K in (Kernel.diagonal(0.5), Kernel.toeplitz(0.4), dense6()):
        for t in (0.3, -1.9, 4.2):
            for n in range(1, 30):
                assert abs(det_lambda_order(K, 0.5, t, n) - det_order(K, 0.5, t, n)) <= 1e-13
    assert det_lambda(dense6(), 0.5, 0.0).value == 1


def test_positive_definite():
    grid = np.linspace(-2, 2, 16)
    assert positive_definite_check(Kernel.diagonal(0.5), 0.5, grid) >= -1e-8
    assert positive_definite_check(Kernel.toeplitz_general(0.4, 0.3), 0.5, grid) >= -1e-8
    assert positive_definite_check(Kernel.toeplitz(0.5), 0.5, [0.7]) == pytest.approx(1.0)


def test_identity_permutation():
    assert unitary_invariance_check(dense6(), [1, 2, 3, 4, 5, 6], 0.5, 1.0, 10) == 0


def test_diagonal_swap_is_invariant():
    K = Kernel.diagonal(0.3)
    assert unitary_invariance_check(K, [2, 1], 0.5, 1.0, 20) < 1e-15
