import json

import pytest

from genlambda import kernel
from genlambda.cosets import build_transversal
from genlambda.cyclotomic import CyclotomicNumber, cyclo_context, zeta_pow
from genlambda.modpoly import (
    ModularEquation,
    ReductionFailure,
    evaluate_at_j,
    j_coefficients,
    j_series,
    modular_equation,
    pole_budget,
    reduce_to_j,
    required_precision,
)
from genlambda.phiexp import LambdaParams, lambda_order, lambda_slash
from genlambda.qlaurent import PrecisionExhausted, QLaurentSeries

import oracles

REGIME_TABLE = [(7, 3, 2), (8, 3, 2), (9, 4, 2), (10, 3, 2), (11, 3, 2), (11, 4, 3), (12, 5, 2)]


@pytest.fixture(scope="module")
def me732():
    return modular_equation(LambdaParams(7, 3, 2))


def test_j_coefficients_match_e4_e6_oracle():
    assert j_coefficients(25) == oracles.j_coefficients_e4_e6(25)
    assert j_coefficients(3) == [1, 744, 196884]


@pytest.mark.parametrize("N", [7, 8, 12])
def test_j_series_invariants(N):
    js = j_series(N, 5 * N)
    assert js.order() == -N
    assert js[-N] == 1 and js[0] == 744 and js[N] == 196884
    for e, c in js.items():
        assert e % N == 0 and c.is_rational() and c.den == 1
    with pytest.raises(ValueError):
        j_series(N, N)


def test_reduce_to_j_examples():
    ctx = cyclo_context(7)
    c = zeta_pow(ctx, 2) + 5
    coeffs, guard = reduce_to_j(QLaurentSeries.constant(c, 20))
    assert coeffs == [c] and guard == 19
    js = j_series(7, 40)
    coeffs, _ = reduce_to_j(js)
    assert coeffs == [0, 1]
    coeffs, _ = reduce_to_j((js * js).truncate(30), j_series(7, 60))
    assert coeffs == [0, 0, 1]
    poly = (js * js).scale(3) + js.scale(zeta_pow(ctx, 1)) - QLaurentSeries.constant(CyclotomicNumber.from_int(ctx, 11), 30)
    coeffs, _ = reduce_to_j(poly.truncate(25))
    assert coeffs == [-11, zeta_pow(ctx, 1), 3]


def test_reduce_to_j_rejects_non_invariant():
    ctx = cyclo_context(7)
    js = j_series(7, 40)
    bad = js + QLaurentSeries.monomial(CyclotomicNumber.one(ctx), 3, 40)
    with pytest.raises(ReductionFailure):
        reduce_to_j(bad)
    with pytest.raises(ReductionFailure):
        reduce_to_j(QLaurentSeries.monomial(CyclotomicNumber.one(ctx), -3, 20))
    with pytest.raises(PrecisionExhausted):
        reduce_to_j(QLaurentSeries.monomial(CyclotomicNumber.one(ctx), -14, -1))


def test_required_precision():
    p = LambdaParams(7, 3, 2)
    R = build_transversal(7)
    orders = [lambda_order(p, e.matrix) for e in R]
    D = -sum(o for o in orders if o < 0)
    assert pole_budget(p, R) == D == 7
    assert required_precision(p, R) == 7 * (D + 2)
    # orders agree with actual expansions
    assert orders == [lambda_slash(p, e.matrix, 7).order() for e in R]


def test_modular_equation_732(me732):
    assert me732.degree == 24
    assert me732.coeffs[-1] == [1]
    assert me732.verified_integer and me732.galois_invariant
    assert me732.guard_terms >= 2 * 7 - 1
    ints = me732.integer_coeffs()
    assert all(isinstance(c, int) for row in ints for c in row)
    assert me732.j_degree() == 1


def test_roots_are_the_factor_series(me732):
    # Phi(Lambda o A, j) = 0 as a q-series for a few A
    p = LambdaParams(7, 3, 2)
    R = build_transversal(7)
    js = j_series(7, 80)
    for e in list(R)[::6]:
        f = lambda_slash(p, e.matrix, 30)
        acc = None
        for row in reversed(me732.coeffs):
            c = QLaurentSeries.zero(f.ctx, 60)
            for i, a in enumerate(row):
                c = c + (js ** i).truncate(60).scale(a) if i else c + QLaurentSeries.constant(a, 60)
            acc = c if acc is None else acc * f + c
        assert acc.prec >= 7 and acc.is_zero()


def test_deterministic_json_and_round_trip(me732):
    again = modular_equation(LambdaParams(7, 3, 2))
    assert again.to_json() == me732.to_json()
    back = ModularEquation.from_json(me732.to_json())
    assert back.to_json() == me732.to_json()
    obj = json.loads(me732.to_json())
    assert obj["degree"] == 24 and obj["N"] == 7 and obj["l"] == 2
    assert all(isinstance(x, str) for row in obj["coefficients"] for x in row)
    assert len(me732.checksum()) == 64


def test_backends_and_workers_agree(me732):
    prev = kernel.BACKEND
    try:
        for name in kernel.available_backends():
            kernel.set_backend(name)
            assert modular_equation(LambdaParams(7, 3, 2)).to_json() == me732.to_json()
    finally:
        kernel.set_backend(prev)
    assert modular_equation(LambdaParams(7, 3, 2), workers=2).to_json() == me732.to_json()


def test_evaluate_at_j(me732):
    poly = evaluate_at_j(me732, -3375)
    assert len(poly) == 25 and poly[-1] == 1
    assert all(isinstance(c, int) for c in poly)
    assert evaluate_at_j(me732, None) is me732
    import mpmath

    num = evaluate_at_j(me732, mpmath.mpc(-3375))
    assert all(abs(a - b) < 1e-6 for a, b in zip(num, poly))


def test_non_integral_is_data_not_error():
    me = modular_equation(LambdaParams(10, 4, 3))
    assert not LambdaParams(10, 4, 3).integrality_expected()
    assert not me.verified_integer and me.galois_invariant
    with pytest.raises(ValueError):
        me.integer_coeffs()
    back = ModularEquation.from_json(me.to_json())
    assert back.coeffs == me.coeffs


def test_insufficient_precision_is_loud():
    with pytest.raises((PrecisionExhausted, ReductionFailure)):
        modular_equation(LambdaParams(7, 3, 2), prec=14)


@pytest.mark.slow
@pytest.mark.parametrize("N,k,l", REGIME_TABLE)
def test_regime_table(N, k, l):  # noqa: E741
    p = LambdaParams(N, k, l)
    me = modular_equation(p)
    assert me.degree == len(build_transversal(N))
    assert me.galois_invariant
    assert me.verified_integer >= p.integrality_expected()
