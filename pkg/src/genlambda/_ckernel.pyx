# cython: language_level=3, boundscheck=False, wraparound=False
"""GMP backend for the packed-integer product.

Same contract as ``genlambda._pykernel.mul_packed``; the multiplication is
delegated to ``mpz_mul`` (FFT for large operands) instead of CPython's
Karatsuba.
"""

from libc.string cimport memset
from cpython.bytes cimport PyBytes_FromStringAndSize, PyBytes_AS_STRING


cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct mpz_t[1]
    void mpz_init(mpz_t)
    void mpz_clear(mpz_t)
    void mpz_sub(mpz_t, const mpz_t, const mpz_t)
    void mpz_mul(mpz_t, const mpz_t, const mpz_t)
    void mpz_fdiv_r_2exp(mpz_t, const mpz_t, unsigned long)
    void mpz_import(mpz_t, size_t, int, size_t, int, size_t, const void *)
    void *mpz_export(void *, size_t *, int, size_t, int, size_t, const mpz_t)
    size_t mpz_sizeinbase(const mpz_t, int)


cdef void _load(mpz_t dst, bytes mag, bytes neg):
    cdef mpz_t tmp
    mpz_import(dst, len(mag), -1, 1, 0, 0, PyBytes_AS_STRING(mag))
    if len(neg):
        mpz_init(tmp)
        mpz_import(tmp, len(neg), -1, 1, 0, 0, PyBytes_AS_STRING(neg))
        mpz_sub(dst, dst, tmp)
        mpz_clear(tmp)


def mul_packed(bytes a_mag, bytes a_neg, bytes b_mag, bytes b_neg, Py_ssize_t out_len):
    cdef mpz_t a, b, c
    cdef size_t count = 0
    cdef bytes out
    cdef char *buf
    mpz_init(a)
    mpz_init(b)
    mpz_init(c)
    try:
        _load(a, a_mag, a_neg)
        _load(b, b_mag, b_neg)
        mpz_mul(c, a, b)
        mpz_fdiv_r_2exp(c, c, <unsigned long>(8 * out_len))
        out = PyBytes_FromStringAndSize(NULL, out_len)
        buf = PyBytes_AS_STRING(out)
        memset(buf, 0, out_len)
        if (mpz_sizeinbase(c, 2) + 7) // 8 <= <size_t>out_len:
            mpz_export(buf, &count, -1, 1, 0, 0, c)
        return out
    finally:
        mpz_clear(a)
        mpz_clear(b)
        mpz_clear(c)
