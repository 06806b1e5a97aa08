import os
import subprocess
import sys

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from genlambda import kernel
from genlambda.cyclotomic import cyclo_context


X = sympy.Symbol("x")


def naive_mul_rows(a, b, n_out, N):
    """Schoolbook convolution, each coefficient reduced by sympy polynomial remainder."""
    phi = sympy.cyclotomic_poly(N, X)
    d = sympy.degree(phi, X)
    out = []
    for i in range(n_out):
        acc = sympy.Integer(0)
        for j in range(i + 1):
            if j < len(a) and i - j < len(b):
                pa = sum(c * X ** t for t, c in enumerate(a[j]))
                pb = sum(c * X ** t for t, c in enumerate(b[i - j]))
                acc += pa * pb
        r = sympy.Poly(sympy.rem(sympy.expand(acc), phi, X), X)
        coeffs = [int(r.coeff_monomial(X ** t)) for t in range(d)]
        out.append(coeffs)
    return out


@st.composite
def row_lists(draw, d):
    n = draw(st.integers(1, 6))
    big = draw(st.sampled_from([3, 2 ** 40, 2 ** 200]))
    return [draw(st.lists(st.integers(-big, big), min_size=d, max_size=d)) for _ in range(n)]


@pytest.fixture
def restore_backend():
    prev = kernel.BACKEND
    yield
    kernel.set_backend(prev)


@pytest.mark.parametrize("N", [7, 12])
@given(data=st.data())
def test_mul_rows_matches_naive(N, data):
    ctx = cyclo_context(N)
    a = data.draw(row_lists(ctx.degree))
    b = data.draw(row_lists(ctx.degree))
    n_out = data.draw(st.integers(1, 8))
    ref = naive_mul_rows(a, b, n_out, N)
    prev = kernel.BACKEND
    try:
        for name in kernel.available_backends():
            kernel.set_backend(name)
            assert kernel.mul_rows(a, b, n_out, ctx.degree, ctx.red) == ref
    finally:
        kernel.set_backend(prev)


def test_mul_blocks_is_blockwise_product(restore_backend):
    ctx = cyclo_context(8)
    d, length = ctx.degree, 4
    a = [[[1, 0, 2, -1], [0, 3, 0, 0]], [[5, 5, 0, 1]]]
    b = [[[2, 0, 0, 0]], [[0, 1, 0, 0], [1, 1, 1, 1], [7, 0, 0, -2]]]
    got = kernel.mul_blocks(a, b, length, d, ctx.red)
    assert len(got) == 3

    def add(x, y):
        return [[p + q for p, q in zip(r, s)] for r, s in zip(x, y)]

    expect = [None] * 3
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            term = kernel.mul_rows(ai, bj, length, d, ctx.red)
            expect[i + j] = term if expect[i + j] is None else add(expect[i + j], term)
    assert got == expect


def test_zero_and_empty():
    ctx = cyclo_context(7)
    assert kernel.mul_rows([[0] * 6], [[1] * 6], 3, 6, ctx.red) == [[0] * 6] * 3
    assert kernel.mul_rows([[1] * 6], [[1] * 6], 0, 6, ctx.red) == []
    assert kernel.content([[4, 6], [8, 0]], 10) == 2


def test_set_backend_rejects_unknown(restore_backend):
    with pytest.raises(ValueError):
        kernel.set_backend("fortran")
    assert "python" in kernel.available_backends()


def test_environment_forces_fallback():
    env = dict(os.environ, GENLAMBDA_PURE_PYTHON="1")
    res = subprocess.run([sys.executable, "-c", "from genlambda import kernel; print(kernel.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert res.stdout.strip() == "python"
