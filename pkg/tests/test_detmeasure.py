import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from affinefourier.detmeasure import (
    CylinderSpec,
    Kernel,
    KernelInvalid,
    all_words,
    consistency_check,
    cylinder_prob,
    cylinder_probs,
    sample_configuration,
    shift_recursion_check,
    w_matrix,
)


def kernels():
    rng = np.random.default_rng(11)
    return [
        Kernel.diagonal(0.3),
        Kernel.toeplitz(0.3),
        Kernel.toeplitz(0.7),
        Kernel.toeplitz_general(0.15, 0.7),
        Kernel.random_dense(8, rng),
    ]


cylinders = st.lists(st.integers(1, 8), max_size=5, unique=True).flatmap(
    lambda F: st.tuples(st.just(tuple(sorted(F))), st.lists(st.integers(0, 1), min_size=len(F), max_size=len(F)))
)


def test_examples():
    assert cylinder_prob(Kernel.diagonal(0.5), CylinderSpec((1, 2), (1, 0))) == 0.25
    assert cylinder_prob(Kernel.diagonal(0.5), CylinderSpec((), ())) == 1.0
    assert cylinder_prob(Kernel.toeplitz(0.5), CylinderSpec((1, 2), (1, 1))) == pytest.approx(1 / 12, abs=1e-15)


def test_w_matrix_rules():
    W = w_matrix(Kernel.diagonal(0.3), CylinderSpec((2, 4, 5), (1, 0, 1)))
    assert np.array_equal(W, np.diag([0.3, 0.7, 0.3]))
    assert w_matrix(Kernel.toeplitz(1 / 3), CylinderSpec((3,), (1,)))[0, 0] == pytest.approx(0.5)
    K = Kernel.toeplitz(0.6)
    F = (1, 3, 4)
    assert np.allclose(w_matrix(K, CylinderSpec(F, (1, 1, 1))), K.block(F), atol=0)


@given(cylinders, st.floats(0.05, 0.95))
def test_toeplitz_sign_rule(cyl, a):
    F, xi = cyl
    W = w_matrix(Kernel.toeplitz(a), CylinderSpec(F, tuple(xi)))
    c = (1 - a) / (1 + a)
    for r, i in enumerate(F):
        for s, j in enumerate(F):
            if i != j:
                assert W[r, s] == pytest.approx((2 * xi[r] - 1) * c * a ** abs(i - j), abs=1e-15)


def test_cylinder_spec_validation():
    for F, xi in [((2, 1), (0, 0)), ((0,), (1,)), ((1,), (2,)), ((1, 2), (1,))]:
        with pytest.raises(ValueError):
            CylinderSpec(F, xi)


def test_kernel_validation():
    with pytest.raises(KernelInvalid):
        Kernel.toeplitz_general(0.4, 0.7)
    with pytest.raises(KernelInvalid):
        Kernel.dense([[1.0, 0.2], [0.1, 1.0]])
    with pytest.raises(KernelInvalid):
        Kernel.dense([[1.5, 0.0], [0.0, 0.5]])
    with pytest.raises(KernelInvalid):
        Kernel.from_dict({"variant": "circulant"})


def test_kernel_json_round_trip():
    for K in kernels():
        L = Kernel.from_json(K.to_json())
        assert np.array_equal(K.leading(10), L.leading(10))


def test_dense_zero_extension():
    K = Kernel.dense(np.diag([0.5, 0.5]))
    assert K.entry(3, 3) == 0.0 and K.entry(1, 5) == 0.0
    assert cylinder_prob(K, CylinderSpec((3,), (0,))) == 1.0


@pytest.mark.parametrize("K", kernels(), ids=lambda K: K.variant)
def test_consistency_and_total_mass(K):
    worst = 0.0
    for r in range(4):
        for F in itertools.combinations(range(1, 7), r):
            for k in range(1, 7):
                if k not in F:
                    worst = max(worst, consistency_check(K, F, k))
    assert worst <= 1e-12
    F = [1, 2, 4, 5, 7]
    assert abs(cylinder_probs(K, F, all_words(5)).sum() - 1) <= 1e-10


@given(st.floats(0.01, 0.99), st.lists(st.integers(0, 1), min_size=1, max_size=10))
def test_bernoulli_exact(p, xi):
    n = len(xi)
    got = cylinder_prob(Kernel.diagonal(p), CylinderSpec(tuple(range(1, n + 1)), tuple(xi)))
    assert got == math.prod(p if b else 1 - p for b in xi)


@pytest.mark.parametrize("K", kernels(), ids=lambda K: K.variant)
def test_shift_recursion(K):
    rng = np.random.default_rng(5)
    for F in ([], [1], [1, 2, 3], [2, 4, 5, 7]):
        xi = rng.integers(0, 2, len(F))
        r = shift_recursion_check(K, F, xi)
        assert r.residual <= 1e-12 and r.det_residual <= 1e-12


def test_one_sided_shift_differs():
    r = shift_recursion_check(Kernel.toeplitz(0.4), [1, 2, 3], [1, 0, 1])
    assert r.residual == 0 and r.residual_one_sided > 0.1


def test_sampling():
    assert np.all(sample_configuration(Kernel.diagonal(1.0), 10, seed=1) == 1)
    assert np.array_equal(sample_configuration(Kernel.toeplitz(0.5), 12, 4), sample_configuration(Kernel.toeplitz(0.5), 12, 4))
    trials = 2000
    draws = np.array([sample_configuration(Kernel.toeplitz(0.5), 2, s) for s in range(trials)])
    assert abs(draws[:, 0].mean() - 1 / 3) < 4 * math.sqrt(2 / 9 / trials)
    n = 8
    draws = np.array([sample_configuration(Kernel.diagonal(0.3), n, s) for s in range(500)])
    assert abs(draws.mean() - 0.3) < 3 / math.sqrt(n * 500)
    with pytest.raises(ValueError):
        sample_configuration(Kernel.diagonal(0.5), 25)


def test_invalid_kernel_probability_errors():
    # unchecked kernel with spectrum outside [0, 1]
    K = Kernel("toeplitz_general", p=1.0, a=0.9, check_order=0)
    with pytest.raises(KernelInvalid):
        cylinder_prob(K, CylinderSpec((1, 2), (0, 0)))
