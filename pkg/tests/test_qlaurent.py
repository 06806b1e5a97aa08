import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from genlambda.cyclotomic import CyclotomicNumber, cyclo_context, zeta_pow
from genlambda.phiexp import difference_slash, prop1_truncation
from genlambda.qlaurent import PrecisionExhausted, QLaurentSeries, eq_to_precision, galois_series

import oracles

CTX = cyclo_context(7)


def series(coeffs, val=0, prec=None, ctx=CTX):
    return QLaurentSeries.from_coefficients(ctx, val, coeffs, prec)


def q_pow(m, prec, ctx=CTX):
    return QLaurentSeries.monomial(CyclotomicNumber.one(ctx), m, prec)


@st.composite
def random_series(draw, N=7, nonzero_lead=False):
    ctx = cyclo_context(N)
    d = ctx.degree
    val = draw(st.integers(-3, 3))
    n = draw(st.integers(1, 9))
    coeffs = []
    for i in range(n):
        num = draw(st.lists(st.integers(-4, 4), min_size=d, max_size=d))
        if i == 0 and nonzero_lead and not any(num):
            num[0] = 1
        coeffs.append(CyclotomicNumber(ctx, num, draw(st.integers(1, 3))))
    return QLaurentSeries.from_coefficients(ctx, val, coeffs)


def test_add_zero_and_q_inverse():
    a = series([1, 2, 3], val=-1, prec=6)
    assert a + QLaurentSeries.zero(CTX, 10) == a
    p = q_pow(1, 10) * q_pow(-1, 10)
    assert p.order() == 0 and p.leading() == 1
    assert p == QLaurentSeries.constant(CyclotomicNumber.one(CTX), p.prec)


def test_geometric_identity():
    a = series([1, -1], prec=10)
    b = series([1] * 10, prec=10)
    assert a * b == QLaurentSeries.constant(CyclotomicNumber.one(CTX), 10)


def test_product_precision_is_min_supported():
    a = series([1, 1], val=2, prec=8)  # q^2 + q^3 + O(q^8)
    b = series([1, 5], val=-1, prec=4)
    p = a * b
    assert p.prec == min(8 - 1, 4 + 2)
    assert p.order() == 1


def test_invert_examples():
    one = QLaurentSeries.constant(CyclotomicNumber.one(CTX), 8)
    assert one.invert() == one
    a = series([1, 1], val=1, prec=9)  # q (1 + q)
    inv = a.invert()
    assert inv.order() == -1
    assert [inv[m] for m in range(-1, 7)] == [(-1) ** (m + 1) for m in range(-1, 7)]
    c = zeta_pow(CTX, 3) + 2
    m = QLaurentSeries.monomial(c, 4, 10)
    assert m.invert() == QLaurentSeries.monomial(c.inv(), -4, 2)


def test_invert_errors():
    with pytest.raises(PrecisionExhausted):
        QLaurentSeries.zero(CTX, 5).invert()


def test_order_and_leading():
    s = series([0, 0, 0, 1, 2], prec=9)
    assert s.order() == 3 and s.leading() == 1
    with pytest.raises(PrecisionExhausted):
        QLaurentSeries.zero(CTX, 5).order()
    with pytest.raises(PrecisionExhausted):
        s.coefficient(9)


def test_galois_series_examples():
    a = series([1, zeta_pow(CTX, 1), 3], prec=3)
    assert galois_series(a, 1) == a
    zq = QLaurentSeries.monomial(zeta_pow(CTX, 1), 1, 5)
    assert galois_series(zq, 3) == QLaurentSeries.monomial(zeta_pow(CTX, 3), 1, 5)
    with pytest.raises(ValueError):
        galois_series(zq, 14)


def test_eq_to_precision_examples():
    a = series([1, 2, 3, 4], prec=7)
    assert eq_to_precision(a, a, 7)
    assert eq_to_precision(q_pow(7, 10), QLaurentSeries.zero(CTX, 10), 7)
    assert not eq_to_precision(q_pow(6, 10), QLaurentSeries.zero(CTX, 10), 7)
    with pytest.raises(PrecisionExhausted):
        eq_to_precision(a, a, 8)


def test_prop1_case_via_eq_to_precision():
    from genlambda.phiexp import UnimodularMatrix

    A = UnimodularMatrix(1, 0, 1, 1)  # {rc}, {sc} both nonzero for r, s = 1, 2
    lhs = difference_slash(1, 2, A, 7, CTX)
    assert eq_to_precision(lhs, prop1_truncation(1, 2, A, CTX), 7)


def test_json_round_trip():
    a = series([zeta_pow(CTX, 2) / 3, 0, 5], val=-2, prec=4)
    b = QLaurentSeries.from_json_obj(a.to_json_obj())
    assert a == b and b.prec == a.prec
    assert "q^-2" in a.to_text()


@given(random_series(), random_series(), random_series())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    lhs = (a * b) * c
    rhs = a * (b * c)
    m = min(lhs.prec, rhs.prec)
    assert eq_to_precision(lhs, rhs, m)
    dist = a * (b + c)
    dist2 = a * b + a * c
    m = min(dist.prec, dist2.prec)
    assert eq_to_precision(dist, dist2, m)


@given(random_series(), random_series())
def test_mul_matches_naive_convolution(a, b):
    p = a * b
    n = p.prec - (a.val + b.val)
    ref = oracles.naive_series_mul([a.coefficient(e) for e in range(a.val, a.prec)],
                                   [b.coefficient(e) for e in range(b.val, b.prec)], n)
    for i, c in enumerate(ref):
        assert p.coefficient(a.val + b.val + i) == c


@given(random_series(nonzero_lead=True))
def test_invert_two_sided(a):
    inv = a.invert()
    one = a * inv
    assert one.prec == a.prec - a.val
    assert eq_to_precision(one, QLaurentSeries.constant(CyclotomicNumber.one(CTX), one.prec), one.prec)
    assert eq_to_precision(inv * a, one, one.prec)


@given(random_series(), random_series(), st.sampled_from([1, 2, 3, 4, 5, 6]))
def test_galois_commutes(a, b, h):
    assert galois_series(a + b, h) == galois_series(a, h) + galois_series(b, h)
    assert galois_series(a * b, h) == galois_series(a, h) * galois_series(b, h)


def test_precision_honesty():
    rng = random.Random(3)
    full_a = [oracles.random_element(rng, 7) for _ in range(20)]
    full_b = [oracles.random_element(rng, 7) for _ in range(20)]
    for n in (5, 10, 20):
        a = QLaurentSeries.from_coefficients(CTX, -2, full_a[:n])
        b = QLaurentSeries.from_coefficients(CTX, 1, full_b[:n])
        deeper_a = QLaurentSeries.from_coefficients(CTX, -2, full_a)
        deeper_b = QLaurentSeries.from_coefficients(CTX, 1, full_b)
        p, deep = a * b, deeper_a * deeper_b
        assert eq_to_precision(p, deep, p.prec)
        assert eq_to_precision(a.invert(), deeper_a.invert(), a.invert().prec)


def test_pow_and_division():
    a = series([2, 1], prec=6)
    assert a ** 3 == a * a * a
    assert eq_to_precision((a ** -2) * (a ** 2), QLaurentSeries.constant(CyclotomicNumber.one(CTX), 6), 6)
    b = series([1, 3, 0, 1], val=1, prec=6)
    assert eq_to_precision((a / b) * b, a, (a / b * b).prec)
