"""Exact product kernel for series with cyclotomic coefficients.

A series is handed to the kernel as a list of rows; row ``i`` is the
coefficient vector (length ``d`` = degree of the cyclotomic field) of
``q**i``.  Products are computed by Kronecker substitution: both operands
are packed into one signed integer with fixed-width slots, multiplied once,
and the slots of the product are read back and reduced modulo the
cyclotomic polynomial.

The single bigint multiplication is the hot spot.  It is delegated to the
compiled GMP extension when it is importable and to CPython's ``int``
otherwise; set ``GENLAMBDA_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from math import gcd

from . import _pykernel

BACKEND = "python"
_mul_packed = _pykernel.mul_packed

if os.environ.get("GENLAMBDA_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernel
    except ImportError:  # extension not built
        pass
    else:
        _mul_packed = _ckernel.mul_packed
        BACKEND = "gmp"


def set_backend(name: str) -> None:
    """Switch the multiplication backend (``"python"`` or ``"gmp"``)."""
    global _mul_packed, BACKEND
    if name == "python":
        _mul_packed = _pykernel.mul_packed
    elif name == "gmp":
        from . import _ckernel

        _mul_packed = _ckernel.mul_packed
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _ckernel  # noqa: F401
    except ImportError:
        return names
    names.append("gmp")
    return names


def _max_abs(rows) -> int:
    m = 0
    for r in rows:
        for c in r:
            if c > m:
                m = c
            elif -c > m:
                m = -c
    return m


def _pack(rows, stride: int, nb: int) -> tuple[bytes, bytes]:
    mag = bytearray(len(rows) * stride * nb)
    neg = bytearray(len(mag) + nb)
    pos = 0
    step = stride * nb
    for r in rows:
        off = pos
        for c in r:
            if c:
                mag[off:off + nb] = c.to_bytes(nb, "little", signed=True)
                if c < 0:
                    neg[off + nb] = 1
            off += nb
        pos += step
    if not any(neg):
        return bytes(mag), b""
    return bytes(mag), bytes(neg)


def _unpack(buf: bytes, nslots: int, nb: int) -> list[int]:
    half = 1 << (8 * nb - 1)
    full = 1 << (8 * nb)
    frm = int.from_bytes
    out = [0] * nslots
    carry = 0
    pos = 0
    for i in range(nslots):
        t = frm(buf[pos:pos + nb], "little") + carry
        if t >= half:
            out[i] = t - full
            carry = 1
        else:
            out[i] = t
            carry = 0
        pos += nb
    return out


def mul_rows(a, b, n_out: int, d: int, red) -> list[list[int]]:
    """Rows ``0..n_out-1`` of the product ``a*b`` reduced mod the cyclotomic polynomial.

    ``red[j]`` must hold the reduction of ``x**j`` for ``d <= j <= 2*d-2``.
    """
    if n_out <= 0:
        return []
    a = a[:n_out]
    b = b[:n_out]
    ma = _max_abs(a)
    mb = _max_abs(b)
    if not ma or not mb:
        return [[0] * d for _ in range(n_out)]
    # every slot of the raw product is a sum of at most min(len)*d terms
    bound = ma * mb * min(len(a), len(b)) * d
    nb = (bound.bit_length() + 2 + 7) // 8
    stride = 2 * d - 1
    a_mag, a_neg = _pack(a, stride, nb)
    b_mag, b_neg = _pack(b, stride, nb)
    n_raw = min(n_out, len(a) + len(b) - 1)
    nslots = n_raw * stride
    buf = _mul_packed(a_mag, a_neg, b_mag, b_neg, nslots * nb)
    slots = _unpack(buf, nslots, nb)
    out = []
    for i in range(n_raw):
        base = i * stride
        row = slots[base:base + d]
        for j in range(d, stride):
            c = slots[base + j]
            if c:
                rj = red[j]
                for t in range(d):
                    if rj[t]:
                        row[t] += c * rj[t]
        out.append(row)
    for _ in range(n_raw, n_out):
        out.append([0] * d)
    return out


def mul_blocks(a_blocks, b_blocks, length: int, d: int, red) -> list[list[list[int]]]:
    """Multiply polynomials in X whose coefficients are power series.

    ``a_blocks[i]`` is the row list (``length`` rows, exponents ``0..length-1``)
    of the X**i coefficient.  Each output block is truncated to ``length`` rows.
    Blocks are laid out with a gap so that one packed product computes all
    X-degree convolutions at once.
    """
    gap = 2 * length - 1
    zero = [0] * d

    def flatten(blocks):
        rows = []
        for i, blk in enumerate(blocks):
            rows.extend(blk[:length])
            rows.extend([zero] * (length - len(blk[:length])))
            if i + 1 < len(blocks):
                rows.extend([zero] * (gap - length))
        return rows

    fa = flatten(a_blocks)
    fb = flatten(b_blocks)
    deg = len(a_blocks) + len(b_blocks) - 2
    n_out = deg * gap + length
    prod = mul_rows(fa, fb, n_out, d, red)
    return [prod[i * gap:i * gap + length] for i in range(deg + 1)]


def content(rows, den: int) -> int:
    """gcd of ``den`` and every entry of ``rows``."""
    g = den
    for r in rows:
        if g == 1:
            return 1
        g = gcd(g, *r)
    return g
