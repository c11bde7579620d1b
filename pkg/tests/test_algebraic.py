import threading

import numpy as np
import pytest
from hypothesis import given, strategies as st

from affinefourier.algebraic import (
    IntPolynomial,
    NumericFailure,
    PisotRejection,
    alpha_pow_mod1,
    certify_pisot,
    geometric_theta,
    newton_power_sums,
    roots,
    theta_index,
    trace,
)

# integer power sums from 80-digit mpmath roots
PERRIN = [0, 2, 3, 2, 5, 5, 7, 10, 12, 17]
SILVER = [2, 6, 14, 34, 82]


def test_parse_forms():
    a = IntPolynomial.parse("x^3 - x - 1")
    b = IntPolynomial.parse("[1, 0, -1, -1]")
    assert a.coeffs == b.coeffs == (1, 0, -1, -1)
    assert IntPolynomial.parse("x-3").coeffs == (1, -3)
    assert IntPolynomial.parse(str(a)).coeffs == a.coeffs


@pytest.mark.parametrize("text", ["x^2-+x", "2x^2 - 1", "", "[0, 1]", "x^2 - 0.5"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        IntPolynomial.parse(text)


def test_lucas_traces(phi):
    assert [trace(phi, k) for k in range(7)] == [2, 1, 3, 4, 7, 11, 18]


def test_other_traces(silver, plastic):
    assert [plastic.trace(k) for k in range(1, 11)] == PERRIN
    assert [silver.trace(k) for k in range(1, 6)] == SILVER


def test_traces_are_exact_for_large_k(phi):
    # Lucas numbers satisfy L_{2k} = L_k^2 - 2 (-1)^k
    for k in (50, 100, 150):
        assert phi.trace(2 * k) == phi.trace(k) ** 2 - 2 * (-1) ** k


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4))
def test_newton_matches_roots(tail):
    coeffs = [1, *tail]
    s = newton_power_sums(coeffs, 8)
    r = np.roots(coeffs)
    for k in range(9):
        assert abs(s[k] - np.sum(r**k).real) <= 1e-6 * max(1.0, abs(s[k]))


def test_roots_sorted_and_accurate():
    p = IntPolynomial.parse("x^3 - x - 1")
    r = roots(p)
    assert abs(r[0] - 1.324717957244746) < 1e-14
    assert np.all(np.abs(p(r)) < 1e-12)


def test_certify(phi, three):
    assert phi.alpha == pytest.approx((1 + 5**0.5) / 2, abs=1e-15)
    assert phi.conjugate_max == pytest.approx(0.6180339887498949, abs=1e-15)
    assert three.alpha == 3.0 and three.conjugates == ()


@pytest.mark.parametrize(
    "text, indeterminate",
    [("x^2 - 2", False), ("x^2 - x + 1", False), ("x^2 + 1", False), ("x - 1", True), ("x^2 - 3x + 1", False)],
)
def test_rejections(text, indeterminate):
    # x^2 - 3x + 1 has conjugate 0.38 and is Pisot; everything else is not
    p = IntPolynomial.parse(text)
    if text == "x^2 - 3x + 1":
        assert certify_pisot(p).alpha == pytest.approx(2.618033988749895)
        return
    with pytest.raises(PisotRejection) as info:
        certify_pisot(p)
    assert info.value.indeterminate is indeterminate


def test_mod1_offsets(phi):
    assert alpha_pow_mod1(phi, 0).value == 0.0
    m = alpha_pow_mod1(phi, 4)
    assert m.offset == pytest.approx(-0.14589803375031545, abs=1e-14)
    assert alpha_pow_mod1(phi, 20).value == pytest.approx(6.6106961351895970e-5, rel=1e-10)


def test_mod1_relative_precision_at_large_k(phi):
    # |phi^k - L_k| = phi^{-k}
    for k in (60, 100):
        assert alpha_pow_mod1(phi, k).value == pytest.approx(phi.alpha ** -k, rel=1e-10)


def test_theta(phi, silver, plastic, three):
    assert geometric_theta(phi).N == 4
    assert geometric_theta(silver).N == 2
    assert geometric_theta(plastic).N == 148
    ch = geometric_theta(three)
    assert ch.theta == pytest.approx(1 / 32) and ch.N == 1
    with pytest.raises(ValueError):
        theta_index(phi, 0.5)


def test_theta_screen_can_fail(phi):
    with pytest.raises(NumericFailure):
        geometric_theta(phi, screen=lambda th: False)


def test_concurrent_trace_fill():
    ctx = certify_pisot(IntPolynomial.parse("x^2 - x - 1"))
    out = {}

    def work(k):
        out[k] = ctx.trace(k)

    threads = [threading.Thread(target=work, args=(k,)) for k in range(0, 400, 7)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    ref = newton_power_sums([1, -1, -1], 400)
    assert all(out[k] == ref[k] for k in out)


def test_context_json(phi):
    import json

    data = json.loads(phi.to_json(5))
    assert data["traces"] == ["2", "1", "3", "4", "7", "11"]
