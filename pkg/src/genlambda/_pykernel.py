"""Pure-Python backend for the packed-integer product."""


def mul_packed(a_mag, a_neg, b_mag, b_neg, out_len):
    """Multiply two Kronecker-packed signed integers.

    Each operand arrives as two little-endian byte strings: the slot-wise
    two's complement image ``mag`` and the borrow mask ``neg``, so that the
    signed value is ``int(mag) - int(neg)``.  Returns the low ``out_len``
    bytes of the product in two's complement.
    """
    a = int.from_bytes(a_mag, "little") - int.from_bytes(a_neg, "little")
    b = int.from_bytes(b_mag, "little") - int.from_bytes(b_neg, "little")
    c = (a * b) & ((1 << (8 * out_len)) - 1)
    return c.to_bytes(out_len, "little")
