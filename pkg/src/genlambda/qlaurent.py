"""Truncated Laurent series in q with coefficients in Q(zeta_N).

A series stores every coefficient for exponents ``val .. prec-1`` as integer
rows over one common denominator; exponents ``>= prec`` are unknown.  Every
operation reports only the precision its inputs actually support.
"""

from __future__ import annotations

import json
from math import gcd

from . import kernel
from .cyclotomic import ContextMismatch, CycloContext, CyclotomicNumber, cyclo_context


class PrecisionExhausted(ArithmeticError):
    """The series is zero to the stored precision; re-expand deeper."""


class QLaurentSeries:
    __slots__ = ("ctx", "val", "prec", "rows", "den")

    def __init__(self, ctx: CycloContext, val: int, rows, den: int = 1, prec: int | None = None,
                 *, normalize: bool = True):
        self.ctx = ctx
        rows = [list(r) for r in rows]
        if prec is None:
            prec = val + len(rows)
        if len(rows) != prec - val:
            raise ValueError("row count must equal prec - val")
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.val = val
        self.prec = prec
        self.rows = rows
        self.den = den
        if normalize:
            self._normalize()

    def _normalize(self):
        rows = self.rows
        start = 0
        while start < len(rows) and not any(rows[start]):
            start += 1
        if start:
            self.rows = rows = rows[start:]
            self.val += start
        if not rows:
            self.den = 1
            return
        g = kernel.content(rows, self.den)
        if g > 1:
            self.rows = [[c // g for c in r] for r in rows]
            self.den //= g

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ctx, prec: int) -> QLaurentSeries:
        return cls(ctx, prec, [], 1, prec)

    @classmethod
    def constant(cls, c: CyclotomicNumber, prec: int) -> QLaurentSeries:
        return cls.monomial(c, 0, prec)

    @classmethod
    def monomial(cls, c: CyclotomicNumber, exp: int, prec: int) -> QLaurentSeries:
        """``c * q**exp + O(q**prec)``."""
        ctx = c.ctx
        if prec <= exp:
            return cls.zero(ctx, prec)
        d = ctx.degree
        rows = [list(c.num)] + [[0] * d for _ in range(prec - exp - 1)]
        return cls(ctx, exp, rows, c.den, prec)

    @classmethod
    def from_coefficients(cls, ctx, val: int, coeffs, prec: int | None = None) -> QLaurentSeries:
        """Build from a list of CyclotomicNumber (or int) coefficients starting at ``q**val``."""
        coeffs = [c if isinstance(c, CyclotomicNumber) else CyclotomicNumber.from_int(ctx, c)
                  for c in coeffs]
        if prec is None:
            prec = val + len(coeffs)
        coeffs = coeffs[:max(0, prec - val)]
        den = 1
        for c in coeffs:
            den = den * c.den // gcd(den, c.den)
        rows = [[x * (den // c.den) for x in c.num] for c in coeffs]
        d = ctx.degree
        rows += [[0] * d for _ in range(prec - val - len(rows))]
        return cls(ctx, val, rows, den, prec)

    # queries ----------------------------------------------------------
    @property
    def N(self) -> int:
        return self.ctx.N

    def is_zero(self) -> bool:
        """Zero to the stored precision."""
        return not self.rows

    def order(self) -> int:
        if not self.rows:
            raise PrecisionExhausted(f"series is O(q^{self.prec}); order unknown")
        return self.val

    def leading(self) -> CyclotomicNumber:
        self.order()
        return CyclotomicNumber(self.ctx, self.rows[0], self.den)

    def coefficient(self, m: int) -> CyclotomicNumber:
        if m >= self.prec:
            raise PrecisionExhausted(f"coefficient of q^{m} unknown (prec {self.prec})")
        if m < self.val:
            return CyclotomicNumber.zero(self.ctx)
        return CyclotomicNumber(self.ctx, self.rows[m - self.val], self.den)

    def __getitem__(self, m: int) -> CyclotomicNumber:
        return self.coefficient(m)

    @property
    def coeffs(self) -> list[CyclotomicNumber]:
        """Coefficients for exponents ``val .. prec-1``."""
        return [CyclotomicNumber(self.ctx, r, self.den) for r in self.rows]

    def items(self):
        """Nonzero ``(exponent, coefficient)`` pairs, ascending."""
        for i, r in enumerate(self.rows):
            if any(r):
                yield self.val + i, CyclotomicNumber(self.ctx, r, self.den)

    def is_integral(self) -> bool:
        """All stored coefficients lie in Z[zeta]."""
        return self.den == 1

    def __repr__(self):
        terms = [f"({c!r})*q^{e}" for e, c in list(self.items())[:4]]
        more = " + ..." if len(list(self.items())) > 4 else ""
        return f"QLaurentSeries(N={self.N}: {' + '.join(terms) or '0'}{more} + O(q^{self.prec}))"

    def __eq__(self, other):
        if not isinstance(other, QLaurentSeries):
            return NotImplemented
        return (self.ctx.N == other.ctx.N and self.prec == other.prec and self.val == other.val
                and self.den == other.den and self.rows == other.rows)

    __hash__ = None

    # arithmetic -------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, QLaurentSeries):
            raise TypeError(f"expected QLaurentSeries, got {type(other).__name__}")
        if other.ctx.N != self.ctx.N:
            raise ContextMismatch(f"series over Q(zeta_{self.N}) vs Q(zeta_{other.N})")

    def _rows_over(self, lo: int, hi: int, den: int):
        """Numerator rows for exponents lo..hi-1 rescaled to denominator ``den``."""
        d = self.ctx.degree
        f = den // self.den
        out = []
        for m in range(lo, hi):
            i = m - self.val
            if 0 <= i < len(self.rows):
                r = self.rows[i]
                out.append([c * f for c in r] if f != 1 else list(r))
            else:
                out.append([0] * d)
        return out

    def _combine(self, other, sign: int):
        self._check(other)
        prec = min(self.prec, other.prec)
        lo = min(self.val, other.val, prec)
        den = self.den * other.den // gcd(self.den, other.den)
        a = self._rows_over(lo, prec, den)
        b = other._rows_over(lo, prec, den)
        rows = [[x + sign * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]
        return QLaurentSeries(self.ctx, lo, rows, den, prec)

    def __add__(self, other):
        if isinstance(other, (int, CyclotomicNumber)):
            other = QLaurentSeries.constant(self._scalar(other), self.prec)
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, CyclotomicNumber)):
            other = QLaurentSeries.constant(self._scalar(other), self.prec)
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return QLaurentSeries(self.ctx, self.val, [[-c for c in r] for r in self.rows], self.den,
                              self.prec, normalize=False)

    def _scalar(self, c) -> CyclotomicNumber:
        if isinstance(c, CyclotomicNumber):
            if c.ctx.N != self.N:
                raise ContextMismatch("scalar from a different cyclotomic field")
            return c
        return CyclotomicNumber.from_int(self.ctx, c)

    def scale(self, c) -> QLaurentSeries:
        """Multiply by a scalar in Q(zeta)."""
        c = self._scalar(c)
        if c.is_zero():
            return QLaurentSeries.zero(self.ctx, self.prec)
        ctx = self.ctx
        rows = kernel.mul_rows(self.rows, [list(c.num)], len(self.rows), ctx.degree, ctx.red)
        return QLaurentSeries(ctx, self.val, rows, self.den * c.den, self.prec)

    def shift(self, m: int) -> QLaurentSeries:
        """Multiply by q**m."""
        return QLaurentSeries(self.ctx, self.val + m, self.rows, self.den, self.prec + m,
                              normalize=False)

    def truncate(self, prec: int) -> QLaurentSeries:
        if prec > self.prec:
            raise PrecisionExhausted(f"cannot raise precision {self.prec} -> {prec}")
        if prec <= self.val:
            return QLaurentSeries.zero(self.ctx, prec)
        return QLaurentSeries(self.ctx, self.val, self.rows[:prec - self.val], self.den, prec)

    def __mul__(self, other):
        if isinstance(other, (int, CyclotomicNumber)):
            return self.scale(other)
        self._check(other)
        prec = min(self.prec + other.val, other.prec + self.val)
        val = self.val + other.val
        if prec <= val:
            return QLaurentSeries.zero(self.ctx, prec)
        ctx = self.ctx
        rows = kernel.mul_rows(self.rows, other.rows, prec - val, ctx.degree, ctx.red)
        return QLaurentSeries(ctx, val, rows, self.den * other.den, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> QLaurentSeries:
        if n < 0:
            return self.invert() ** (-n)
        result = QLaurentSeries.constant(CyclotomicNumber.one(self.ctx), self.prec - self.val)
        base = self
        first = True
        while n:
            if n & 1:
                result = base if first else result * base
                first = False
            n >>= 1
            if n:
                base = base * base
        return result

    def invert(self) -> QLaurentSeries:
        """Multiplicative inverse to the available relative precision."""
        v = self.order()
        lead = self.leading()
        rel = self.prec - v
        ctx = self.ctx
        d = ctx.degree
        linv = lead.inv()
        # monic part b = (self / q^v) * lead^{-1}, then Newton y <- y (2 - b y)
        b = QLaurentSeries(ctx, 0, self.rows, self.den, rel, normalize=False).scale(linv)
        y = QLaurentSeries.constant(CyclotomicNumber.one(ctx), 1)
        n = 1
        while n < rel:
            n = min(2 * n, rel)
            bt = b.truncate(n) if b.prec > n else b
            yt = QLaurentSeries(ctx, y.val, y.rows + [[0] * d] * (n - y.prec), y.den, n,
                                normalize=False)
            e = bt * yt
            two = QLaurentSeries.constant(CyclotomicNumber.from_int(ctx, 2), n)
            y = yt * (two - e)
        return y.scale(linv).shift(-v)

    def __truediv__(self, other):
        if isinstance(other, (int, CyclotomicNumber)):
            return self.scale(self._scalar(other).inv())
        return self * other.invert()

    def galois_series(self, h: int) -> QLaurentSeries:
        """Apply zeta -> zeta**h to every coefficient."""
        ctx = self.ctx
        N = ctx.N
        if gcd(h, N) != 1:
            raise ValueError(f"h={h} is not coprime to N={N}")
        h %= N
        if h == 1:
            return self
        perm = [(h * i) % N for i in range(ctx.degree)]
        rows = []
        for r in self.rows:
            vec = [0] * N
            for i, c in enumerate(r):
                if c:
                    vec[perm[i]] += c
            rows.append(ctx.reduce_vector(vec))
        return QLaurentSeries(ctx, self.val, rows, self.den, self.prec, normalize=False)

    # rendering --------------------------------------------------------
    def to_json_obj(self) -> dict:
        terms = []
        for i, r in enumerate(self.rows):
            if any(r):
                terms.append([self.val + i, [str(c) for c in r]])
        return {"level": self.N, "prec": self.prec, "den": str(self.den), "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: dict) -> QLaurentSeries:
        ctx = cyclo_context(int(obj["level"]))
        prec = int(obj["prec"])
        terms = [(int(e), [int(c) for c in v]) for e, v in obj["terms"]]
        val = terms[0][0] if terms else prec
        rows = [[0] * ctx.degree for _ in range(prec - val)]
        for e, v in terms:
            rows[e - val] = v
        return cls(ctx, val, rows, int(obj["den"]), prec)

    def to_text(self) -> str:
        lines = [f"# q-series over Q(zeta_{self.N}), exponents in q = exp(2 pi i tau/{self.N})",
                 f"# common denominator {self.den}; known through q^{self.prec - 1}"]
        for e, c in self.items():
            vec = ", ".join(str(x) for x in c.num)
            lines.append(f"q^{e}: [{vec}]" + (f" / {c.den}" if c.den != 1 else ""))
        lines.append(f"O(q^{self.prec})")
        return "\n".join(lines)


def eq_to_precision(a: QLaurentSeries, b: QLaurentSeries, m: int) -> bool:
    """Whether all coefficients of exponent < m agree exactly."""
    if a.prec < m or b.prec < m:
        raise PrecisionExhausted(f"need precision {m}, have {a.prec} and {b.prec}")
    return (a.truncate(m) - b.truncate(m)).is_zero()


def galois_series(a: QLaurentSeries, h: int) -> QLaurentSeries:
    return a.galois_series(h)


def balanced_product(items, mul):
    """Fold ``items`` with ``mul`` in a fixed balanced tree (deterministic shape)."""
    items = list(items)
    if not items:
        raise ValueError("empty product")
    while len(items) > 1:
        nxt = [mul(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]
