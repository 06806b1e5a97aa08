"""Modular equation Phi(X, j) = prod_{A in R} (X - Lambda_{k,l} o A) over Z[j].

Each factor is expanded exactly in q = exp(2 pi i tau/N); the product is
taken with a balanced tree over polynomials in X with series coefficients;
every X-coefficient is then an SL2(Z)-invariant series (exponents in NZ)
which is rewritten as a polynomial in j by clearing its principal part.
Guard coefficients past the constant term must all vanish after the
reduction, otherwise the computation is rejected.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__, kernel
from .cosets import Transversal, build_transversal
from .cyclotomic import CyclotomicNumber, cyclo_context
from .phiexp import LambdaParams, lambda_order, lambda_slash
from .qlaurent import PrecisionExhausted, QLaurentSeries

log = logging.getLogger(__name__)

SCHEMA = "genlambda.modpoly/1"


class ReductionFailure(ArithmeticError):
    """A residual principal part or guard coefficient did not vanish."""


# j-invariant ------------------------------------------------------------

def _int_series_mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[:n - i]):
                out[i + j] += x * y
    return out


def _int_series_inv(a: list[int], n: int) -> list[int]:
    # a[0] == 1
    out = [0] * n
    out[0] = 1
    for m in range(1, n):
        out[m] = -sum(a[i] * out[m - i] for i in range(1, min(m, len(a) - 1) + 1))
    return out


def j_coefficients(terms: int) -> list[int]:
    """Coefficients c(-1), c(0), ..., of j in q~ = exp(2 pi i tau); ``terms`` values."""
    n = terms
    sigma3 = [0] * n
    for d in range(1, n):
        for m in range(d, n, d):
            sigma3[m] += d ** 3
    e4 = [1] + [240 * sigma3[m] for m in range(1, n)]
    # prod (1 - x^m)^24 by multiplying the Euler product 24 times via squaring
    euler = [0] * n
    euler[0] = 1
    for m in range(1, n):
        # multiply by (1 - x^m)
        for i in range(n - 1, m - 1, -1):
            euler[i] -= euler[i - m]
    e2 = _int_series_mul(euler, euler, n)
    e4_ = _int_series_mul(e2, e2, n)
    e8 = _int_series_mul(e4_, e4_, n)
    e16 = _int_series_mul(e8, e8, n)
    eta24 = _int_series_mul(e16, e8, n)
    num = _int_series_mul(_int_series_mul(e4, e4, n), e4, n)
    return _int_series_mul(num, _int_series_inv(eta24, n), n)


def j_series(N: int, prec: int) -> QLaurentSeries:
    """j as a series in q = exp(2 pi i tau / N), exact through q**(prec-1)."""
    if prec < N + 1:
        raise ValueError("j_series needs prec >= N + 1")
    ctx = cyclo_context(N)
    d = ctx.degree
    terms = (prec + N - 1) // N + 1  # exponents -N, 0, N, ... < prec
    coeffs = j_coefficients(terms)
    rows = [[0] * d for _ in range(prec + N)]
    for i, c in enumerate(coeffs):
        e = (i - 1) * N
        if e < prec:
            rows[e + N][0] = c
    return QLaurentSeries(ctx, -N, rows, 1, prec)


def reduce_to_j(s: QLaurentSeries, js: QLaurentSeries | None = None):
    """Write an SL2(Z)-invariant series as a polynomial in j.

    Returns ``(coeffs, guard)`` with ``coeffs[i]`` the coefficient of J**i and
    ``guard`` the number of coefficients past q^0 verified to vanish in the
    residual.  Raises ReductionFailure on any nonzero residual coefficient.
    """
    N = s.N
    ctx = s.ctx
    P = s.prec
    if P <= 0:
        raise PrecisionExhausted("series must be known through q^0")
    if s.is_zero():
        return [CyclotomicNumber.zero(ctx)], P - 1
    if s.val < 0 and s.val % N:
        raise ReductionFailure(f"leading exponent {s.val} is not a multiple of N={N}")
    top = max(0, -s.val // N)
    need = max(P + (top - 1) * N, N + 1)
    if js is None or js.prec < need:
        js = j_series(N, need)
    powers = [None]
    cur = None
    for _ in range(top):
        cur = js if cur is None else cur * js
        powers.append(cur.truncate(P))
    r = s
    coeffs = [CyclotomicNumber.zero(ctx) for _ in range(top + 1)]
    for i in range(top, 0, -1):
        c = r.coefficient(-i * N)
        coeffs[i] = c
        if not c.is_zero():
            r = r - powers[i].scale(c)
    coeffs[0] = r.coefficient(0)
    r = r - coeffs[0]
    if not r.is_zero():
        e, c = next(r.items())
        raise ReductionFailure(f"residual coefficient at q^{e} is {c!r}")
    while len(coeffs) > 1 and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs, P - 1


# modular equation -----------------------------------------------------

def pole_budget(p: LambdaParams, R: Transversal) -> int:
    """D_j = -sum_A min(0, ord(Lambda o A)), computed from brace data alone."""
    return -sum(min(0, lambda_order(p, e.matrix)) for e in R)


def required_precision(p: LambdaParams, R: Transversal) -> int:
    """Factor precision N (D_j + 2); leaves at least 2N guard terms after the product."""
    return p.N * (pole_budget(p, R) + 2)


@dataclass
class ModularEquation:
    N: int
    k: int
    l: int  # noqa: E741
    coeffs: list  # coeffs[i][m]: CyclotomicNumber coefficient of X^i J^m
    verified_integer: bool
    galois_invariant: bool
    guard_terms: int
    tool_version: str = __version__
    precision: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def params(self) -> LambdaParams:
        return LambdaParams(self.N, self.k, self.l)

    def integer_coeffs(self) -> list[list[int]]:
        if not self.verified_integer:
            raise ValueError("modular equation has non-integer coefficients")
        return [[c.num[0] for c in row] for row in self.coeffs]

    def j_degree(self) -> int:
        return max(len(row) for row in self.coeffs) - 1

    def to_json_obj(self) -> dict:
        obj = {
            "schema": SCHEMA,
            "N": self.N,
            "k": self.k,
            "l": self.l,
            "degree": self.degree,
            "verified_integer": self.verified_integer,
            "galois_invariant": self.galois_invariant,
            "guard_terms": self.guard_terms,
            "precision": self.precision,
            "tool_version": self.tool_version,
        }
        if self.verified_integer:
            obj["coefficients"] = [[str(c.num[0]) for c in row] for row in self.coeffs]
        else:
            obj["coefficients"] = None
            obj["cyclotomic_coefficients"] = [
                [{"num": [str(x) for x in c.num], "den": str(c.den)} for c in row]
                for row in self.coeffs
            ]
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=1) + "\n"

    def checksum(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    @classmethod
    def from_json_obj(cls, obj: dict) -> ModularEquation:
        if obj.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {obj.get('schema')!r}")
        ctx = cyclo_context(int(obj["N"]))
        if obj["verified_integer"]:
            coeffs = [[CyclotomicNumber.from_int(ctx, int(x)) for x in row] for row in obj["coefficients"]]
        else:
            coeffs = [[CyclotomicNumber(ctx, [int(x) for x in c["num"]], int(c["den"])) for c in row]
                      for row in obj["cyclotomic_coefficients"]]
        return cls(int(obj["N"]), int(obj["k"]), int(obj["l"]), coeffs, bool(obj["verified_integer"]),
                   bool(obj["galois_invariant"]), int(obj["guard_terms"]), obj["tool_version"],
                   int(obj.get("precision", 0)))

    @classmethod
    def from_json(cls, text: str) -> ModularEquation:
        return cls.from_json_obj(json.loads(text))


def _expand_one(args):
    p, A, prec = args
    return lambda_slash(p, A, prec)


def expand_factors(p: LambdaParams, R: Transversal, prec: int, workers: int = 1) -> list[QLaurentSeries]:
    jobs = [(p, e.matrix, prec) for e in R]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_expand_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_expand_one(j) for j in jobs]


def _factor_block(f: QLaurentSeries, length: int):
    """(X - f) * q^shift as blocks of numerator rows with one denominator."""
    d = f.ctx.degree
    shift = max(0, -f.val)
    g = f.shift(shift)
    rows = g._rows_over(0, length, g.den)  # noqa: SLF001
    const = [[-c for c in r] for r in rows]
    x_row = [[0] * d for _ in range(length)]
    if shift < length:
        x_row[shift][0] = g.den
    return {"blocks": [const, x_row], "den": g.den, "shift": shift}


def polynomial_product(series: list[QLaurentSeries], length: int):
    """Coefficients (ascending in X) of prod (X - f) as series, each known mod q^(length - D)."""
    ctx = series[0].ctx
    d = ctx.degree
    red = ctx.red
    items = [_factor_block(f, length) for f in series]

    def mul(x, y):
        blocks = kernel.mul_blocks(x["blocks"], y["blocks"], length, d, red)
        den = x["den"] * y["den"]
        g = den
        for blk in blocks:
            if g == 1:
                break
            g = kernel.content(blk, g)
        if g > 1:
            blocks = [[[c // g for c in r] for r in blk] for blk in blocks]
            den //= g
        return {"blocks": blocks, "den": den, "shift": x["shift"] + y["shift"]}

    from .qlaurent import balanced_product

    total = balanced_product(items, mul)
    D = total["shift"]
    out = []
    for blk in total["blocks"]:
        out.append(QLaurentSeries(ctx, -D, blk, total["den"], length - D))
    return out


def modular_equation(p: LambdaParams, N: int | None = None, *, workers: int = 1,
                     prec: int | None = None) -> ModularEquation:
    """Compute Phi(X, J) exactly and verify integrality of its coefficients."""
    if N is not None and N != p.N:
        raise ValueError("level mismatch")
    N = p.N
    R = build_transversal(N)
    if prec is None:
        prec = required_precision(p, R)
    D = pole_budget(p, R)
    log.info("modpoly N=%d k=%d l=%d: |R|=%d, D_j=%d, prec=%d", N, p.k, p.l, len(R), D, prec)
    factors = expand_factors(p, R, prec, workers)
    for e, f in zip(R, factors):
        if f.order() != lambda_order(p, e.matrix):
            raise AssertionError(f"order mismatch at {e}")
    xcoeffs = polynomial_product(factors, prec)
    ctx = cyclo_context(N)
    js = j_series(N, xcoeffs[0].prec + N * (D // N))
    coeffs = []
    guard = None
    for s in xcoeffs:
        poly, g = reduce_to_j(s, js)
        coeffs.append(poly)
        guard = g if guard is None else min(guard, g)
    if guard < 2 * N - 1:
        raise PrecisionExhausted(f"only {guard} guard coefficients, need {2 * N - 1}")
    galois_ok = all(c.galois(h) == c for row in coeffs for c in row for h in ctx.units)
    integer = all(c.is_rational() and c.den == 1 for row in coeffs for c in row)
    monic = len(coeffs[-1]) == 1 and coeffs[-1][0] == 1
    if not monic or len(coeffs) != len(R) + 1:
        raise AssertionError("product is not monic of degree |R|")
    return ModularEquation(N, p.k, p.l, coeffs, integer, galois_ok, guard, __version__, prec)


def evaluate_at_j(me: ModularEquation, j0):
    """Substitute J = j0.

    An ``int`` (or Fraction) gives exact coefficients (ascending in X), integers
    when the equation is verified; any other number is evaluated through the
    complex embedding; ``None`` returns ``me`` unchanged.
    """
    if j0 is None:
        return me
    if isinstance(j0, (int, Fraction)):
        out = []
        for row in me.coeffs:
            acc = CyclotomicNumber.zero(cyclo_context(me.N))
            for c in reversed(row):
                acc = acc * j0 + c
            out.append(acc)
        if all(c.is_rational() and c.den == 1 for c in out):
            return [c.num[0] for c in out]
        return out
    import mpmath

    out = []
    for row in me.coeffs:
        acc = mpmath.mpc(0)
        for c in reversed(row):
            acc = acc * j0 + c.embed(mpmath.mp.prec)
        out.append(acc)
    return out
