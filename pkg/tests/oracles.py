"""Independent reference computations used by the tests.

Nothing here calls into the package's arithmetic kernels: polynomial
arithmetic goes through sympy or plain integer loops, and numerical values
come from lattice sums rather than q-expansions.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd

import mpmath
import sympy

from genlambda.cyclotomic import CyclotomicNumber, cyclo_context
from genlambda.phiexp import UnimodularMatrix

X = sympy.Symbol("x")


# field arithmetic ------------------------------------------------------

def sympy_cyclotomic(N: int) -> list[int]:
    return [int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(N, X), X).all_coeffs())]


def to_sympy(a: CyclotomicNumber):
    return sum(sympy.Rational(c) * X ** i for i, c in enumerate(a.coeffs))


def from_sympy(ctx, expr) -> CyclotomicNumber:
    p = sympy.Poly(sympy.rem(sympy.expand(expr), sympy.cyclotomic_poly(ctx.N, X), X), X, domain="QQ")
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(p.all_coeffs())]
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    num = [int(c * den) for c in coeffs] + [0] * (ctx.degree - len(coeffs))
    return CyclotomicNumber(ctx, num, den)


def euclid_inverse(a: CyclotomicNumber) -> CyclotomicNumber:
    """Inverse by the extended Euclidean algorithm in Q[x] modulo Phi_N."""
    ctx = a.ctx
    inv = sympy.invert(to_sympy(a), sympy.cyclotomic_poly(ctx.N, X), X)
    return from_sympy(ctx, inv)


def resultant_norm(a: CyclotomicNumber) -> Fraction:
    r = sympy.resultant(sympy.cyclotomic_poly(a.ctx.N, X), to_sympy(a), X)
    r = sympy.Rational(r)
    return Fraction(int(r.p), int(r.q))


def random_element(rng: random.Random, N: int, span: int = 5, den: bool = True) -> CyclotomicNumber:
    ctx = cyclo_context(N)
    num = [rng.randint(-span, span) for _ in range(ctx.degree)]
    return CyclotomicNumber(ctx, num, rng.randint(1, 4) if den else 1)


def random_sl2(rng: random.Random, bound: int = 30) -> UnimodularMatrix:
    while True:
        c = rng.randint(-bound, bound)
        d = rng.randint(-bound, bound)
        if gcd(c, d) != 1:
            continue
        # solve a d - b c = 1
        g, x, y = _egcd(d, -c)
        a, b = x, y
        t = rng.randint(-3, 3)
        return UnimodularMatrix(a + t * c, b + t * d, c, d)


def _egcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def naive_series_mul(a: list[CyclotomicNumber], b: list[CyclotomicNumber], n: int):
    out = [CyclotomicNumber.zero(a[0].ctx) for _ in range(n)]
    for i, x in enumerate(a[:n]):
        for j, y in enumerate(b[:n - i]):
            out[i + j] = out[i + j] + x * y
    return out


def coset_count(N: int) -> int:
    """Number of cosets, counted as primitive bottom rows mod N up to sign."""
    rows = sum(1 for c in range(N) for d in range(N) if gcd(gcd(c, d), N) == 1)
    return rows // 2


# classical q-series ----------------------------------------------------

def j_coefficients_e4_e6(terms: int) -> list[int]:
    """j = 1728 E4^3 / (E4^3 - E6^2) with plain integer/rational series."""
    n = terms + 1
    s3 = [0] * n
    s5 = [0] * n
    for d in range(1, n):
        for m in range(d, n, d):
            s3[m] += d ** 3
            s5[m] += d ** 5
    e4 = [1] + [240 * s3[m] for m in range(1, n)]
    e6 = [1] + [-504 * s5[m] for m in range(1, n)]

    def mul(a, b):
        out = [0] * n
        for i in range(n):
            for k in range(n - i):
                out[i + k] += a[i] * b[k]
        return out

    e4c = mul(mul(e4, e4), e4)
    e6s = mul(e6, e6)
    disc = [(x - y) for x, y in zip(e4c, e6s)]  # 1728 q + ...
    assert disc[0] == 0 and disc[1] == 1728
    # divide 1728 * e4c by disc / q, then shift by q^-1
    dq = [Fraction(x, 1728) for x in disc[1:]] + [Fraction(0)]
    inv = [Fraction(0)] * n
    inv[0] = Fraction(1)
    for m in range(1, n):
        inv[m] = -sum(dq[i] * inv[m - i] for i in range(1, m + 1))
    out = [sum(e4c[i] * inv[m - i] for i in range(m + 1)) for m in range(terms)]
    assert all(x.denominator == 1 for x in out)
    return [int(x) for x in out]


# lattice sums -----------------------------------------------------------

def wp_lattice(z, tau, rows: int = 40):
    """wp(z; Z + Z tau) summed over lattice rows n with |n| <= rows.

    Each row is summed in closed form by sum_m 1/(w + m)^2 = pi^2 / sin^2(pi w)
    (Eisenstein summation order); the n = 0 row of the correction term is
    sum_{m != 0} 1/m^2 = pi^2/3.
    """
    pi = mpmath.pi
    total = -pi ** 2 / 3
    for n in range(-rows, rows + 1):
        total += pi ** 2 / mpmath.sin(pi * (z + n * tau)) ** 2
        if n:
            total -= pi ** 2 / mpmath.sin(pi * n * tau) ** 2
    return total


def phi_lattice(s: int, N: int, tau, rows: int = 40):
    """phi_s(tau) = wp(s/N; L_tau)/(2 pi i)^2 - 1/12 from the lattice sum."""
    return wp_lattice(mpmath.mpf(s) / N, tau, rows) / (2j * mpmath.pi) ** 2 - mpmath.mpf(1) / 12
