"""Numerical values at imaginary quadratic points and integrality certificates.

All values are computed with mpmath at a working precision of ``bits`` plus
a fixed guard.  The normalized Weierstrass value used throughout is

    P(z; tau) = wp(z; Z + Z tau) / (2 pi i)^2
              = 1/12 + sum_{m in Z} q^m u / (1 - q^m u)^2 - 2 sum_{n>=1} q^n / (1 - q^n)^2

with ``q = exp(2 pi i tau)`` and ``u = exp(2 pi i z)``, so that
``phi_s(tau) = P(s/N; tau) - 1/12``.  Truncation points are chosen from
geometric tail bounds in ``|q|``.

A certificate for Lambda(alpha) rounds j(alpha) to an integer j0, substitutes
it into the exact modular equation and checks the residual of the resulting
monic integer polynomial at the numerical value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath

from .modpoly import ModularEquation, evaluate_at_j
from .phiexp import LambdaParams, ParameterError, UnimodularMatrix, _as_matrix, _check_triple
from .qlaurent import QLaurentSeries

GUARD_BITS = 32
SCHEMA = "genlambda.certificate/1"

#: discriminants accepted by certify_integral (class number one)
CERTIFIABLE = (-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163)


class UnsupportedClassNumber(ValueError):
    """j(alpha) is not a rational integer at the requested precision."""


class CertificationError(ArithmeticError):
    """The residual of the annihilator exceeds the tolerance."""


# imaginary quadratic points ---------------------------------------------

@lru_cache(maxsize=None)
def class_number(D: int) -> int:
    """Number of reduced primitive positive definite forms of discriminant D."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")
    h = 0
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                h += 1
        a += 1
    return h


@dataclass(frozen=True)
class CMPoint:
    """alpha = (-b + sqrt(b^2 - 4ac)) / (2a) in the upper half plane."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("leading coefficient must be positive")
        if self.discriminant >= 0:
            raise ValueError(f"discriminant {self.discriminant} is not negative")

    @classmethod
    def canonical(cls, D: int) -> CMPoint:
        """The root (D + sqrt D)/2 of x^2 - D x + (D^2 - D)/4."""
        if D >= 0 or D % 4 not in (0, 1):
            raise ValueError(f"{D} is not a negative discriminant")
        return cls(1, -D, (D * D - D) // 4)

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def tau(self, bits: int = 64):
        return _alpha(self.a, self.b, self.c, bits)


@lru_cache(maxsize=64)
def _alpha(a: int, b: int, c: int, bits: int):
    with mpmath.workprec(bits + GUARD_BITS):
        D = b * b - 4 * a * c
        return mpmath.mpc(-b, mpmath.sqrt(-D)) / (2 * a)


# numeric kernels --------------------------------------------------------

def _check_upper(tau):
    if mpmath.im(tau) <= 0:
        raise ValueError("tau must lie in the upper half plane")


def _terms_for(qabs, bits: int) -> int:
    # smallest M with qabs**M < 2**-(bits + 8)
    return int(math.ceil((bits + 8) * math.log(2) / -float(mpmath.log(qabs)))) + 1


def reduce_to_fundamental(tau):
    """(tau', g) with tau' = g(tau) in the standard fundamental domain."""
    a, b, c, d = 1, 0, 0, 1
    for _ in range(10_000):
        n = int(mpmath.nint(mpmath.re(tau)))
        if n:
            tau -= n
            a, b = a - n * c, b - n * d
        if abs(tau) < 1 - mpmath.mpf(2) ** (-mpmath.mp.prec // 2):
            tau = -1 / tau
            a, b, c, d = -c, -d, a, b
        else:
            return tau, UnimodularMatrix(a, b, c, d)
    raise RuntimeError("reduction did not terminate")


def wp_normalized(x: int, y: int, N: int, tau, bits: int):
    """P(z; tau) at the torsion point z = (x tau + y)/N, z not in the lattice."""
    x %= N
    y %= N
    if x == 0 and y == 0:
        raise ValueError("torsion point lies in the lattice")
    with mpmath.workprec(bits + GUARD_BITS):
        tau = mpmath.mpc(tau)
        _check_upper(tau)
        q = mpmath.expjpi(2 * tau)
        u = mpmath.expjpi(2 * (x * tau + y) / N)
        qabs = abs(q)
        M = _terms_for(qabs, bits)
        total = mpmath.mpf(1) / 12 + u / (1 - u) ** 2
        qm = mpmath.mpc(1)
        for m in range(1, M + 1):
            qm *= q
            w = qm * u
            v = qm / u
            total += w / (1 - w) ** 2 + v / (1 - v) ** 2 - 2 * qm / (1 - qm) ** 2
        return total


def eval_phi(s: int, tau, N: int, bits: int = 128):
    """phi_s(tau) = P(s/N; tau) - 1/12."""
    if s % N == 0:
        raise ParameterError(f"s={s} must be nonzero mod N={N}")
    with mpmath.workprec(bits + GUARD_BITS):
        return wp_normalized(0, s, N, tau, bits) - mpmath.mpf(1) / 12


def _phi_at(s: int, A: UnimodularMatrix, tau, N: int, bits: int):
    # P((s c tau + s d)/N; tau), i.e. (c tau + d)^-2 P(s/N; A tau)
    return wp_normalized(s * A.c, s * A.d, N, tau, bits)


def _w_value(a1: int, a2: int, a3: int, A: UnimodularMatrix, tau, N: int, bits: int):
    tau = mpmath.mpc(tau)
    _check_upper(tau)
    with mpmath.workprec(bits + GUARD_BITS):
        tr, g = reduce_to_fundamental(tau)
        B = A @ g.inverse()
        p3 = _phi_at(a3, B, tr, N, bits)
        num = _phi_at(a1, B, tr, N, bits) - p3
        den = _phi_at(a2, B, tr, N, bits) - p3
        if abs(den) < mpmath.mpf(2) ** (-(bits // 2)) * max(1, abs(num)):
            raise ArithmeticError("denominator indistinguishable from zero at this precision")
        return num / den


def eval_lambda(p: LambdaParams, pt, bits: int = 128):
    """Lambda_{k,l} at a point (a CMPoint or a complex number)."""
    tau = pt.tau(bits) if isinstance(pt, CMPoint) else pt
    return _w_value(p.k, p.l, 1, UnimodularMatrix(1, 0, 0, 1), tau, p.N, bits)


def eval_w_slash_at(a1: int, a2: int, a3: int, A, tau, bits: int = 128, *, N: int):
    """(W_[a1,a2,a3] o A)(tau) = W(A tau)."""
    _check_triple(a1, a2, a3, N)
    return _w_value(a1, a2, a3, _as_matrix(A), tau, N, bits)


def eval_j(tau, bits: int = 128):
    """j(tau) = E4^3/Delta after moving tau to the fundamental domain."""
    with mpmath.workprec(bits + GUARD_BITS):
        tau = mpmath.mpc(tau)
        _check_upper(tau)
        tau, _ = reduce_to_fundamental(tau)
        q = mpmath.expjpi(2 * tau)
        M = _terms_for(abs(q), bits + 16)
        e4 = mpmath.mpc(1)
        eta = mpmath.mpc(1)
        qn = mpmath.mpc(1)
        for n in range(1, M + 1):
            qn *= q
            e4 += 240 * n ** 3 * qn / (1 - qn)
            eta *= 1 - qn
        return e4 ** 3 / (q * eta ** 24)


def eval_series(f: QLaurentSeries, tau, bits: int = 128):
    """Sum of the stored terms of f at q = exp(2 pi i tau / N)."""
    with mpmath.workprec(bits + GUARD_BITS):
        q = mpmath.expjpi(2 * mpmath.mpc(tau) / f.N)
        total = mpmath.mpc(0)
        for e, c in f.items():
            total += c.embed(bits) * q ** e
        return total


# certificates -----------------------------------------------------------

def tolerance(bits: int):
    return mpmath.mpf(2) ** (-(bits // 4))


def polyval(coeffs, x):
    """Horner evaluation of an ascending coefficient list."""
    acc = mpmath.mpc(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass
class IntegralityCertificate:
    N: int
    k: int
    l: int  # noqa: E741
    point: tuple[int, int, int]
    value: object
    annihilator: list[int]
    residual: object
    precision_bits: int
    rounding_report: dict
    minimal_polynomial: list[int] | None = None
    extra: dict = field(default_factory=dict)

    @property
    def tolerance(self):
        return tolerance(self.precision_bits)

    def to_json_obj(self) -> dict:
        digits = max(15, int(self.precision_bits * 0.30103) - 5)
        obj = {
            "schema": SCHEMA,
            "N": self.N,
            "k": self.k,
            "l": self.l,
            "point": list(self.point),
            "discriminant": self.point[1] ** 2 - 4 * self.point[0] * self.point[2],
            "value": {"re": mpmath.nstr(mpmath.re(self.value), digits),
                      "im": mpmath.nstr(mpmath.im(self.value), digits)},
            "annihilator": [str(c) for c in self.annihilator],
            "degree": len(self.annihilator) - 1,
            "residual": mpmath.nstr(self.residual, 6),
            "tolerance": mpmath.nstr(self.tolerance, 6),
            "precision_bits": self.precision_bits,
            "rounding_report": self.rounding_report,
        }
        if self.minimal_polynomial is not None:
            obj["minimal_polynomial"] = [str(c) for c in self.minimal_polynomial]
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=1) + "\n"


def round_j(tau, bits: int) -> tuple[int, dict]:
    """Round j(tau) to an integer, rejecting values not provably near one."""
    with mpmath.workprec(bits + GUARD_BITS):
        jv = eval_j(tau, bits)
        j0 = int(mpmath.nint(mpmath.re(jv)))
        dist = abs(jv - j0)
        # absolute error of jv is about |j| 2^-bits; require room to spare
        resolution = abs(jv) * mpmath.mpf(2) ** (20 - bits)
        report = {
            "j_value": mpmath.nstr(mpmath.re(jv), 30),
            "j0": str(j0),
            "distance": mpmath.nstr(dist, 6),
            "resolution": mpmath.nstr(resolution, 6),
        }
        if not (resolution < 1e-6 and dist < 1e-6):
            raise UnsupportedClassNumber(
                f"j(tau) is not resolved as a rational integer (distance {report['distance']}, "
                f"resolution {report['resolution']})")
        return j0, report


def minimal_factor(poly: list[int], value) -> list[int]:
    """The irreducible factor of an integer polynomial that vanishes at ``value``."""
    import sympy

    X = sympy.Symbol("X")
    expr = sum(int(c) * X ** i for i, c in enumerate(poly))
    _, factors = sympy.factor_list(expr)
    best = None
    for f, _mult in factors:
        coeffs = [int(c) for c in reversed(sympy.Poly(f, X).all_coeffs())]
        r = abs(polyval(coeffs, value))
        if best is None or r < best[0]:
            best = (r, coeffs)
    return best[1]


def certify_integral(p: LambdaParams, pt: CMPoint, me: ModularEquation, bits: int = 384,
                     *, minimal: bool = False) -> IntegralityCertificate:
    """Certificate that Lambda_{k,l}(pt) is a root of the monic Phi(X, j0)."""
    if (me.N, me.k, me.l) != (p.N, p.k, p.l):
        raise ValueError("modular equation does not match the parameters")
    if not me.verified_integer:
        raise CertificationError("modular equation is not verified integral")
    D = pt.discriminant
    if class_number(D) != 1:
        raise UnsupportedClassNumber(f"class number of {D} is {class_number(D)}, only 1 is supported")
    tau = pt.tau(bits)
    j0, report = round_j(tau, bits)
    annihilator = evaluate_at_j(me, j0)
    if annihilator[-1] != 1:
        raise CertificationError("annihilator is not monic")
    with mpmath.workprec(bits + GUARD_BITS):
        value = eval_lambda(p, pt, bits)
        residual = abs(polyval(annihilator, value))
    if not residual < tolerance(bits):
        raise CertificationError(f"residual {mpmath.nstr(residual, 6)} exceeds 2^-{bits // 4}")
    mp = minimal_factor(annihilator, value) if minimal else None
    return IntegralityCertificate(p.N, p.k, p.l, (pt.a, pt.b, pt.c), value, annihilator, residual,
                                  bits, report, mp)


def check_certificate(cert: IntegralityCertificate) -> bool:
    """Re-evaluate the residual of the stored annihilator at the stored value."""
    if cert.annihilator[-1] != 1 or not all(isinstance(c, int) for c in cert.annihilator):
        return False
    with mpmath.workprec(cert.precision_bits + GUARD_BITS):
        return abs(polyval(cert.annihilator, cert.value)) < cert.tolerance


__all__ = [
    "CERTIFIABLE",
    "CMPoint",
    "CertificationError",
    "IntegralityCertificate",
    "UnsupportedClassNumber",
    "certify_integral",
    "check_certificate",
    "class_number",
    "eval_j",
    "eval_lambda",
    "eval_phi",
    "eval_series",
    "eval_w_slash_at",
    "minimal_factor",
    "reduce_to_fundamental",
    "round_j",
    "wp_normalized",
]
