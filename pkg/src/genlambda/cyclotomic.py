"""Exact arithmetic in the cyclotomic field Q(zeta_N).

Elements are stored in the power basis ``1, zeta, ..., zeta**(phi(N)-1)``
reduced modulo the N-th cyclotomic polynomial, as an integer numerator
vector over one positive common denominator.  The representation is
canonical, so equality is tuple equality.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import ceil, gcd, log2

import mpmath

MIN_LEVEL = 7


class ContextMismatch(ValueError):
    """Operands live in cyclotomic fields of different levels."""


def euler_phi(n: int) -> int:
    result = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    # both ascending, den monic; remainder must vanish
    num = list(num)
    dd = len(den) - 1
    q = [0] * (len(num) - dd)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + dd]
        q[i] = c
        if c:
            for j in range(dd + 1):
                num[i + j] -= c * den[j]
    assert not any(num), "inexact polynomial division"
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (ascending) of the n-th cyclotomic polynomial."""
    poly = [-1] + [0] * (n - 1) + [1]
    for m in range(1, n):
        if n % m == 0:
            poly = _polydiv_exact(poly, list(cyclotomic_polynomial(m)))
    return tuple(poly)


class CycloContext:
    """Shared data for Q(zeta_N): the cyclotomic polynomial and reduction table."""

    __slots__ = ("N", "degree", "poly", "red", "units", "_zeta_cache")

    def __init__(self, N: int):
        if N < MIN_LEVEL:
            raise ValueError(f"level N must be >= {MIN_LEVEL}, got {N}")
        self.N = N
        self.poly = cyclotomic_polynomial(N)
        d = len(self.poly) - 1
        self.degree = d
        # red[j] = x**j mod poly, for 0 <= j < max(N, 2d - 1)
        size = max(N, 2 * d - 1)
        red = []
        cur = [0] * d
        cur[0] = 1
        for _ in range(size):
            red.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for i in range(d):
                    cur[i] -= top * self.poly[i]
        self.red = tuple(red)
        self.units = tuple(h for h in range(1, N) if gcd(h, N) == 1)
        self._zeta_cache = {}

    def __repr__(self):
        return f"CycloContext(N={self.N})"

    def __reduce__(self):
        return (cyclo_context, (self.N,))

    def reduce_vector(self, vec) -> list[int]:
        """Reduce a coefficient vector in powers of zeta (any length) to the basis."""
        d = self.degree
        N = self.N
        out = list(vec[:d]) + [0] * max(0, d - len(vec))
        red = self.red
        for j in range(d, len(vec)):
            c = vec[j]
            if c:
                rj = red[j] if j < len(red) else red[j % N]
                for i in range(d):
                    if rj[i]:
                        out[i] += c * rj[i]
        return out

    def zeta_numeric(self, prec: int):
        """exp(2 pi i / N) at ``prec`` bits, cached."""
        z = self._zeta_cache.get(prec)
        if z is None:
            with mpmath.workprec(prec):
                z = mpmath.expjpi(mpmath.mpf(2) / self.N)
            self._zeta_cache[prec] = z
        return z


@lru_cache(maxsize=None)
def cyclo_context(N: int) -> CycloContext:
    return CycloContext(N)


class CyclotomicNumber:
    """An element of Q(zeta_N); immutable."""

    __slots__ = ("ctx", "num", "den", "_hash")

    def __init__(self, ctx: CycloContext, num, den: int = 1, *, _normal: bool = False):
        self.ctx = ctx
        if not _normal:
            num = list(num)
            if len(num) != ctx.degree:
                num = ctx.reduce_vector(num)
            if den == 0:
                raise ZeroDivisionError("zero denominator")
            if den < 0:
                num = [-c for c in num]
                den = -den
            g = gcd(den, *num)
            if g > 1:
                num = [c // g for c in num]
                den //= g
            num = tuple(num)
        self.num = num
        self.den = den
        self._hash = None

    # constructors -----------------------------------------------------
    @classmethod
    def from_int(cls, ctx: CycloContext, n) -> CyclotomicNumber:
        if isinstance(n, Fraction):
            return cls(ctx, [n.numerator] + [0] * (ctx.degree - 1), n.denominator)
        return cls(ctx, (int(n),) + (0,) * (ctx.degree - 1), 1, _normal=True)

    @classmethod
    def zero(cls, ctx):
        return cls.from_int(ctx, 0)

    @classmethod
    def one(cls, ctx):
        return cls.from_int(ctx, 1)

    @classmethod
    def from_powers(cls, ctx: CycloContext, coeffs: dict[int, int]) -> CyclotomicNumber:
        """Sum of ``c * zeta**e`` over ``coeffs.items()`` (exponents taken mod N)."""
        vec = [0] * ctx.N
        for e, c in coeffs.items():
            vec[e % ctx.N] += c
        return cls(ctx, vec)

    # basic queries ----------------------------------------------------
    def _coerce(self, other) -> CyclotomicNumber:
        if isinstance(other, CyclotomicNumber):
            if other.ctx.N != self.ctx.N:
                raise ContextMismatch(f"Q(zeta_{self.ctx.N}) vs Q(zeta_{other.ctx.N})")
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber.from_int(self.ctx, other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not any(self.num)

    def __bool__(self):
        return not self.is_zero()

    def is_integral(self) -> bool:
        """True iff the element lies in Z[zeta]."""
        return self.den == 1

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self.num[0], self.den)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self.num[0], self.den) == other
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        return self.ctx.N == other.ctx.N and self.den == other.den and self.num == other.num

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.N, self.num, self.den))
        return self._hash

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.num):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*z^{i}")
        body = " + ".join(terms) or "0"
        if self.den != 1:
            body = f"({body})/{self.den}"
        return f"<{body} in Q(zeta_{self.ctx.N})>"

    # arithmetic -------------------------------------------------------
    def __neg__(self):
        return CyclotomicNumber(self.ctx, tuple(-c for c in self.num), self.den, _normal=True)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return CyclotomicNumber(self.ctx, [a + b for a, b in zip(self.num, other.num)], self.den)
        return CyclotomicNumber(
            self.ctx,
            [a * other.den + b * self.den for a, b in zip(self.num, other.num)],
            self.den * other.den,
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = self.ctx.degree
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(self.num):
            if a:
                for j, b in enumerate(other.num):
                    if b:
                        prod[i + j] += a * b
        return CyclotomicNumber(self.ctx, self.ctx.reduce_vector(prod), self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = CyclotomicNumber.one(self.ctx)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def galois(self, h: int) -> CyclotomicNumber:
        """Image under the automorphism zeta -> zeta**h."""
        N = self.ctx.N
        if gcd(h, N) != 1:
            raise ValueError(f"h={h} is not coprime to N={N}")
        h %= N
        if h == 1:
            return self
        vec = [0] * N
        for i, c in enumerate(self.num):
            if c:
                vec[(h * i) % N] += c
        return CyclotomicNumber(self.ctx, self.ctx.reduce_vector(vec), self.den)

    def conjugate_product(self) -> CyclotomicNumber:
        """Product of the conjugates under every nontrivial automorphism."""
        result = CyclotomicNumber.one(self.ctx)
        for h in self.ctx.units[1:]:
            result = result * self.galois(h)
        return result

    def norm(self) -> Fraction:
        """Field norm down to Q."""
        return (self * self.conjugate_product()).rational()

    def inv(self) -> CyclotomicNumber:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta)")
        # a^{-1} = (product of the other conjugates) / N(a)
        rest = self.conjugate_product()
        n = (self * rest).rational()
        return rest * CyclotomicNumber.from_int(self.ctx, 1 / n)

    def embed(self, bits: int = 64):
        """Complex value at zeta = exp(2 pi i/N), an mpmath ``mpc``.

        Evaluated with ``guard_bits`` extra bits so the absolute error stays
        below ``2**(-bits)``.
        """
        bits = max(int(bits), 64)
        g = self.guard_bits()
        with mpmath.workprec(bits + g):
            z = self.ctx.zeta_numeric(bits + g)
            acc = mpmath.mpc(0)
            p = mpmath.mpc(1)
            for c in self.num:
                if c:
                    acc += c * p
                p *= z
            acc /= self.den
        return acc

    def guard_bits(self) -> int:
        m = max((abs(c) for c in self.num), default=0)
        return 10 + ceil(log2(max(2, self.ctx.degree * max(m, 1))))


def zeta_pow(ctx: CycloContext, k: int) -> CyclotomicNumber:
    """zeta_N ** k (k taken mod N)."""
    k %= ctx.N
    return CyclotomicNumber(ctx, ctx.red[k], 1, _normal=True)


def one_minus_zeta_pow(ctx: CycloContext, k: int) -> CyclotomicNumber:
    return 1 - zeta_pow(ctx, k)


def is_unit_in_ring(a: CyclotomicNumber) -> bool:
    """Whether an element of Z[zeta] is a unit (norm +-1)."""
    if not a.is_integral():
        raise ValueError("is_unit_in_ring requires an element of Z[zeta]")
    if a.is_zero():
        return False
    return abs(a.norm()) == 1


def divides_in_ring(a: CyclotomicNumber, b: CyclotomicNumber):
    """Whether ``a`` divides ``b`` in Z[zeta]; returns ``(flag, quotient or None)``."""
    if not (a.is_integral() and b.is_integral()):
        raise ValueError("divides_in_ring requires elements of Z[zeta]")
    if a.is_zero():
        raise ZeroDivisionError("divisor is zero")
    q = b / a
    if q.is_integral():
        return True, q
    return False, None
