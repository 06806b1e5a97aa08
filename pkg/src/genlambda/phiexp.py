"""q-expansions of the normalized torsion values phi_s and the lambda quotients.

``phi_s(tau) = wp(s/N; Z + Z tau) / (2 pi i)^2 - 1/12``.  For a matrix
``A = [[a, b], [c, d]]`` in SL2(Z) the weight-2 slash ``phi_s[A]_2`` is the
same normalized value at the torsion point ``({sc} tau + s*) / N`` and
expands in ``q = exp(2 pi i tau / N)`` with ``u = zeta**s* q**{sc}`` as

    {sc} = 0 :  zeta^s*/(1 - zeta^s*)^2 - sum_{m,n>=1} n (1-zeta^{s* n})(1-zeta^{-s* n}) q^{mnN}
    otherwise:  sum_{n>=1} n u^n - sum_{m,n>=1} n (1 - u^n)(1 - u^{-n}) q^{mnN}

where ``({sc}, mu)`` is the brace reduction of ``s c`` and ``s* = mu s d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .cyclotomic import (
    MIN_LEVEL,
    CycloContext,
    CyclotomicNumber,
    cyclo_context,
    one_minus_zeta_pow,
    zeta_pow,
)
from .qlaurent import QLaurentSeries


@dataclass(frozen=True)
class BraceValue:
    brace: int
    mu: int


def brace(x: int, N: int) -> BraceValue:
    """The pair ({x}, mu(x)) with 0 <= {x} <= N/2 and x = mu(x) {x} mod N."""
    if N < MIN_LEVEL:
        raise ValueError(f"level N must be >= {MIN_LEVEL}, got {N}")
    r = x % N
    if r == 0 or 2 * r == N:
        return BraceValue(r, 1)
    if 2 * r < N:
        return BraceValue(r, 1)
    return BraceValue(N - r, -1)


@dataclass(frozen=True)
class UnimodularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.rows()} is not 1")

    @classmethod
    def identity(cls) -> UnimodularMatrix:
        return cls(1, 0, 0, 1)

    @classmethod
    def from_rows(cls, rows) -> UnimodularMatrix:
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]

    def __matmul__(self, o: UnimodularMatrix) -> UnimodularMatrix:
        return UnimodularMatrix(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                                self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inverse(self) -> UnimodularMatrix:
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> UnimodularMatrix:
        return UnimodularMatrix(-self.a, -self.b, -self.c, -self.d)

    def act(self, tau):
        """Moebius action on a point of the upper half plane."""
        return (self.a * tau + self.b) / (self.c * tau + self.d)


IDENTITY = UnimodularMatrix.identity()
T_MATRIX = UnimodularMatrix(1, 0, 1, 1)
S_MATRIX = UnimodularMatrix(0, -1, 1, 0)


def _is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            return n == 1
        p += 1
    return True


class ParameterError(ValueError):
    """Invalid (N, k, l) or index data."""


@dataclass(frozen=True)
class LambdaParams:
    """Level and indices of Lambda_{k,l} = (phi_k - phi_1)/(phi_l - phi_1).

    ``regime`` is ``"generating"`` when 1 < l != k < N/2 and ``"relaxed"``
    when one index equals N/2 (allowed for the integrality statements).
    """

    N: int
    k: int
    l: int  # noqa: E741

    def __post_init__(self):
        N, k, l = self.N, self.k, self.l
        if N < MIN_LEVEL:
            raise ParameterError(f"requires N >= {MIN_LEVEL} (got N={N})")
        if not (1 < l <= N / 2 and 1 < k <= N / 2 and k != l):
            raise ParameterError(f"requires 1 < l != k <= N/2 (got N={N}, k={k}, l={l})")

    @property
    def regime(self) -> str:
        return "generating" if max(self.k, self.l) < self.N / 2 else "relaxed"

    @property
    def delta(self) -> int:
        return gcd(self.k, self.N)

    def coprime_hypothesis(self) -> bool:
        """(k(l-1), N) = (k(l+1), N) = 1."""
        k, l, N = self.k, self.l, self.N
        return gcd(k * (l - 1), N) == 1 and gcd(k * (l + 1), N) == 1

    def l2_hypothesis(self) -> bool:
        """The weaker conditions available for l = 2."""
        k, N = self.k, self.N
        if self.l != 2 or not (2 < k < N / 2):
            return False
        delta = self.delta
        if delta == 1:
            return True
        return gcd(delta, 3) == 1 and not _is_prime_power(N // delta)

    def integrality_expected(self) -> bool:
        return self.coprime_hypothesis() or self.l2_hypothesis()

    def swapped(self) -> LambdaParams:
        return LambdaParams(self.N, self.l, self.k)


def _as_matrix(A) -> UnimodularMatrix:
    if isinstance(A, UnimodularMatrix):
        return A
    if A is None:
        return IDENTITY
    if len(A) == 4:
        return UnimodularMatrix(*map(int, A))
    return UnimodularMatrix.from_rows(A)


def star(s: int, A: UnimodularMatrix, N: int) -> tuple[int, int]:
    """({sc}, s* mod N) for phi_s[A]_2."""
    bv = brace(s * A.c, N)
    return bv.brace, (bv.mu * s * A.d) % N


def phi_slash(s: int, A, prec: int, ctx: CycloContext | int) -> QLaurentSeries:
    """q-expansion of phi_s[A]_2, exact through q**(prec-1)."""
    if isinstance(ctx, int):
        ctx = cyclo_context(ctx)
    A = _as_matrix(A)
    N = ctx.N
    if s % N == 0:
        raise ParameterError(f"s={s} must be nonzero mod N={N}")
    if prec < 1:
        raise ParameterError("prec must be >= 1")
    b, sstar = star(s, A, N)
    # acc[m][e]: integer coefficient of zeta^e q^m, e mod N
    acc = [None] * prec

    def add(m, e, c):
        row = acc[m]
        if row is None:
            row = acc[m] = [0] * N
        row[e % N] += c

    if b:
        n = 1
        while n * b < prec:
            add(n * b, sstar * n, n)
            n += 1
    # double sum; exponents n*(mN - b) <= mnN - nb < mnN < mnN + nb, all > 0
    m = 1
    while m * N - b < prec:
        step = m * N - b
        n = 1
        while n * step < prec:
            base = m * n * N
            if base < prec:
                add(base, 0, -2 * n)
                if b == 0:
                    add(base, sstar * n, n)
                    add(base, -sstar * n, n)
            if b:
                if base + n * b < prec:
                    add(base + n * b, sstar * n, n)
                add(base - n * b, -sstar * n, n)
            n += 1
        m += 1
    d = ctx.degree
    rows = [ctx.reduce_vector(r) if r is not None else [0] * d for r in acc]
    series = QLaurentSeries(ctx, 0, rows, 1, prec)
    if b == 0:
        z = zeta_pow(ctx, sstar)
        const = z / (1 - z) ** 2
        series = series + QLaurentSeries.constant(const, prec)
    return series


def phi_orders_of(A: UnimodularMatrix, N: int, *indices: int) -> list[int]:
    return [brace(i * A.c, N).brace for i in indices]


def phi_order(s: int, A, N: int) -> int:
    """Exact order of phi_s[A]_2.

    This is {sc} except in one degenerate case: when {sc} = N/2 the
    coefficient of q^{N/2} is zeta^s* + zeta^-s*, which vanishes for
    s* = +-N/4 (mod N); the series then starts at q^N with coefficient -6.
    """
    A = _as_matrix(A)
    b, sstar = star(s, A, N)
    if 2 * b == N and N % 4 == 0 and (2 * sstar) % N == N // 2:
        return N
    return b


# leading coefficients ---------------------------------------------------

CASE_TAGS = (
    "equal-orders-generic",
    "equal-orders-half",
    "equal-orders-zero",
    "distinct-orders-positive",
    "distinct-orders-zero",
)


@dataclass(frozen=True)
class ThetaValue:
    value: CyclotomicNumber
    case_tag: str
    order: int


def _check_pair(r: int, s: int, N: int):
    if not (0 < r <= N / 2 and 0 < s <= N / 2 and r != s):
        raise ParameterError(f"requires 0 < r != s <= N/2 (got r={r}, s={s}, N={N})")


def theta(r: int, s: int, A, ctx: CycloContext | int) -> ThetaValue:
    """Closed-form leading coefficient of (phi_r - phi_s)[A]_2.

    When {rc} > {sc} the value returned is the leading coefficient of the
    ordered difference, i.e. minus the closed form for (s, r).
    """
    if isinstance(ctx, int):
        ctx = cyclo_context(ctx)
    A = _as_matrix(A)
    N = ctx.N
    _check_pair(r, s, N)
    br, rs = star(r, A, N)
    bs, ss = star(s, A, N)
    z = lambda e: zeta_pow(ctx, e)  # noqa: E731
    om = lambda e: one_minus_zeta_pow(ctx, e)  # noqa: E731
    if br == bs:
        ell = br
        if ell == 0:
            val = -z(ss) * om(rs - ss) * om(rs + ss) / (om(rs) ** 2 * om(ss) ** 2)
            return ThetaValue(val, "equal-orders-zero", 0)
        if 2 * ell == N:
            # q^{N/2} collects u_r + u_r^{-1} q^N - (same for s)
            val = z(-rs) * om(rs - ss) * om(rs + ss)
            return ThetaValue(val, "equal-orders-half", ell)
        return ThetaValue(-z(ss) * om(rs - ss), "equal-orders-generic", ell)
    sign = 1
    if br > bs:
        br, rs, bs, ss = bs, ss, br, rs
        sign = -1
    if br == 0:
        val = z(rs) / om(rs) ** 2
        tag = "distinct-orders-zero"
    else:
        val = z(rs)
        tag = "distinct-orders-positive"
    return ThetaValue(val if sign == 1 else -val, tag, br)


def difference_slash(r: int, s: int, A, prec: int, ctx) -> QLaurentSeries:
    """(phi_r - phi_s)[A]_2 through q**(prec-1)."""
    return phi_slash(r, A, prec, ctx) - phi_slash(s, A, prec, ctx)


def _quotient(top: tuple[int, int], bottom: tuple[int, int], A, prec: int, ctx) -> QLaurentSeries:
    N = ctx.N
    r1, r0 = top
    s1, s0 = bottom
    o_num = min(brace(r1 * A.c, N).brace, brace(r0 * A.c, N).brace)
    o_den = min(brace(s1 * A.c, N).brace, brace(s0 * A.c, N).brace)
    # quotient abs. precision = P + o_num - o_den - max(o_num, o_den)
    P = prec - o_num + o_den + max(o_num, o_den)
    num = difference_slash(r1, r0, A, P, ctx)
    den = difference_slash(s1, s0, A, P, ctx)
    return (num / den).truncate(prec)


def lambda_order(p: LambdaParams, A) -> int:
    """Order of Lambda_{k,l} o A: min({kc},{c}) - min({lc},{c})."""
    A = _as_matrix(A)
    N = p.N
    bc = brace(A.c, N).brace
    return min(brace(p.k * A.c, N).brace, bc) - min(brace(p.l * A.c, N).brace, bc)


def lambda_slash(p: LambdaParams, A, prec: int) -> QLaurentSeries:
    """q-expansion of Lambda_{k,l} o A, exact through q**(prec-1)."""
    A = _as_matrix(A)
    ctx = cyclo_context(p.N)
    return _quotient((p.k, 1), (p.l, 1), A, prec, ctx)


def lambda_leading(p: LambdaParams, A) -> CyclotomicNumber:
    """theta_{k,1}(A) / theta_{l,1}(A)."""
    ctx = cyclo_context(p.N)
    return theta(p.k, 1, A, ctx).value / theta(p.l, 1, A, ctx).value


def _check_triple(a1: int, a2: int, a3: int, N: int):
    a = (a1, a2, a3)
    if not all(0 < x <= N / 2 for x in a) or len(set(a)) != 3:
        raise ParameterError(f"requires 0 < a_i <= N/2 pairwise distinct (got {a}, N={N})")


def transport_data(a1: int, a2: int, a3: int, N: int):
    """(LambdaParams, M) with W_[a1,a2,a3] = Lambda_{k,l} o M, for (a3, N) = 1."""
    from .cosets import lift_diag

    _check_triple(a1, a2, a3, N)
    if gcd(a3, N) != 1:
        raise ParameterError(f"transport needs (a3, N) = 1 (got a3={a3}, N={N})")
    inv = pow(a3, -1, N)
    k = brace(a1 * inv, N).brace
    l = brace(a2 * inv, N).brace  # noqa: E741
    return LambdaParams(N, k, l), lift_diag(a3, N)


def w_slash(a1: int, a2: int, a3: int, A, prec: int, N: int | CycloContext) -> QLaurentSeries:
    """q-expansion of W_[a1,a2,a3] o A = (phi_a1 - phi_a3)[A] / (phi_a2 - phi_a3)[A]."""
    ctx = cyclo_context(N) if isinstance(N, int) else N
    A = _as_matrix(A)
    _check_triple(a1, a2, a3, ctx.N)
    return _quotient((a1, a3), (a2, a3), A, prec, ctx)


def w_slash_transported(a1: int, a2: int, a3: int, A, prec: int, N: int) -> QLaurentSeries:
    """Same function computed as Lambda_{k,l} o (M A)."""
    p, M = transport_data(a1, a2, a3, N)
    return lambda_slash(p, M @ _as_matrix(A), prec)


def prop1_truncation(r: int, s: int, A, ctx) -> QLaurentSeries:
    """Closed-form value of (phi_r - phi_s)[A]_2 modulo q**N.

    Three cases by which of {rc}, {sc} vanish; the case {rc} != 0 = {sc}
    is the negated mirror of {rc} = 0 != {sc}.
    """
    if isinstance(ctx, int):
        ctx = cyclo_context(ctx)
    A = _as_matrix(A)
    N = ctx.N
    _check_pair(r, s, N)
    br, rs = star(r, A, N)
    bs, ss = star(s, A, N)

    def u_part(b, st, sign):
        # sign * (sum_n n u^n + u^{-1} q^N) mod q^N, u = zeta^st q^b
        terms = {}
        n = 1
        while n * b < N:
            terms.setdefault(n * b, {})
            terms[n * b][st * n] = terms[n * b].get(st * n, 0) + sign * n
            n += 1
        terms.setdefault(N - b, {})
        terms[N - b][-st] = terms[N - b].get(-st, 0) + sign
        return terms

    def to_series(terms, const=None):
        coeffs = [CyclotomicNumber.zero(ctx) for _ in range(N)]
        for e, pw in terms.items():
            if e < N:
                coeffs[e] = coeffs[e] + CyclotomicNumber.from_powers(ctx, pw)
        if const is not None:
            coeffs[0] = coeffs[0] + const
        return QLaurentSeries.from_coefficients(ctx, 0, coeffs, N)

    if br and bs:
        terms = u_part(br, rs, 1)
        for e, pw in u_part(bs, ss, -1).items():
            slot = terms.setdefault(e, {})
            for k, v in pw.items():
                slot[k] = slot.get(k, 0) + v
        return to_series(terms)
    if br == 0 and bs:
        zr = zeta_pow(ctx, r * A.d)
        return to_series(u_part(bs, ss, -1), zr / (1 - zr) ** 2)
    if bs == 0 and br:
        return -prop1_truncation(s, r, A, ctx)
    zr, zs = r * A.d, s * A.d
    om = lambda e: one_minus_zeta_pow(ctx, e)  # noqa: E731
    const = -zeta_pow(ctx, zs) * om(zr - zs) * om(zr + zs) / (om(zr) ** 2 * om(zs) ** 2)
    return QLaurentSeries.constant(const, N)
