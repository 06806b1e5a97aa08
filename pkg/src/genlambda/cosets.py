"""Coset representatives of SL2(Z) modulo Gamma_1(N){+-1}.

The transversal is the set of products ``M_v B(t, u, k)`` with ``v`` over
(Z/N)^x/{+-1}, ``t`` over the positive divisors of N, ``u`` over a fixed
set Theta_t of representatives of (Z/(t, N/t))^x prime to t, and ``k``
over residues mod N/t with ``u k = 1 (mod t)``, where

    M_v = diag(v^-1, v) mod N,    B(t, u, k) = [[u, (uk-1)/t], [t, k]].

Two matrices lie in the same coset iff their bottom rows agree mod N up to
sign, which gives the lookup key used for normalization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd

from .cyclotomic import MIN_LEVEL, prime_factors
from .phiexp import UnimodularMatrix


def divisors(n: int) -> list[int]:
    return [t for t in range(1, n + 1) if n % t == 0]


def index_gamma1_pm(N: int) -> int:
    """[SL2(Z) : Gamma_1(N){+-1}] = N^2/2 * prod_{p | N} (1 - 1/p^2)."""
    num = N * N
    for p in prime_factors(N):
        num = num // (p * p) * (p * p - 1)
    return num // 2


def theta_set(t: int, N: int) -> list[int]:
    """Least positive lifts, prime to t, of the classes of (Z/(t, N/t))^x."""
    if t <= 0 or N % t:
        raise ValueError(f"t={t} does not divide N={N}")
    g = gcd(t, N // t)
    out = []
    for w in range(1, g + 1):
        if gcd(w, g) != 1:
            continue
        u = w
        while gcd(u, t) != 1:
            u += g
        out.append(u)
    return out


def lift_diag(v: int, N: int) -> UnimodularMatrix:
    """A matrix in SL2(Z) congruent to diag(v^-1, v) mod N.

    Canonical choice: the identity for v = 1, minus the identity for
    v = -1, otherwise ``[[a, b], [N, d]]`` with ``a`` the least positive
    inverse of v and ``d = v + N t``, ``t`` the least residue making
    ``b = (a d - 1)/N`` divisible by N.
    """
    if gcd(v, N) != 1:
        raise ValueError(f"v={v} is not coprime to N={N}")
    v %= N
    if v == 1:
        return UnimodularMatrix(1, 0, 0, 1)
    if v == N - 1:
        return UnimodularMatrix(-1, 0, 0, -1)
    a = pow(v, -1, N)
    c0 = (a * v - 1) // N
    t = (-pow(a, -1, N) * c0) % N
    d = v + N * t
    b = (a * d - 1) // N
    return UnimodularMatrix(a, b, N, d)


def b_matrix(t: int, u: int, k: int) -> UnimodularMatrix:
    if (u * k - 1) % t:
        raise ValueError(f"u k = 1 mod t fails for t={t}, u={u}, k={k}")
    return UnimodularMatrix(u, (u * k - 1) // t, t, k)


def coset_key(A: UnimodularMatrix, N: int) -> tuple[int, int]:
    """Bottom row mod N, normalized up to sign."""
    p = (A.c % N, A.d % N)
    m = ((-A.c) % N, (-A.d) % N)
    return min(p, m)


def in_gamma1_pm(A: UnimodularMatrix, N: int) -> bool:
    for s in (1, -1):
        if (s * A.a - 1) % N == 0 and (s * A.c) % N == 0 and (s * A.d - 1) % N == 0:
            return True
    return False


def same_coset(A: UnimodularMatrix, B: UnimodularMatrix, N: int) -> bool:
    """Whether A B^-1 lies in Gamma_1(N){+-1}."""
    return in_gamma1_pm(A @ B.inverse(), N)


@dataclass(frozen=True)
class TransversalElement:
    v: int
    t: int
    u: int
    k: int
    matrix: UnimodularMatrix

    def to_json_obj(self) -> dict:
        return {"v": self.v, "t": self.t, "u": self.u, "k": self.k, "matrix": self.matrix.rows()}


def _k_values(t: int, u: int, N: int) -> list[int]:
    # integers k, one per residue mod N/t compatible with u k = 1 mod t
    m = N // t
    out = []
    for r in range(m):
        for k in range(r, r + m * t, m):
            if t == 1 or (u * k - 1) % t == 0:
                out.append(k)
                break
    return out


class Transversal:
    """Ordered coset representatives with a coset-key lookup table."""

    def __init__(self, N: int, elements: list[TransversalElement]):
        self.N = N
        self.elements = elements
        self._by_key = {}
        for i, e in enumerate(elements):
            key = coset_key(e.matrix, N)
            if key in self._by_key:
                raise AssertionError(f"duplicate coset {key} in transversal")
            self._by_key[key] = i

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def matrices(self) -> list[UnimodularMatrix]:
        return [e.matrix for e in self.elements]

    def locate(self, A: UnimodularMatrix) -> int:
        """Index of the element in the coset of A."""
        return self._by_key[coset_key(A, self.N)]

    def galois_step(self, elem: TransversalElement, h: int) -> TransversalElement:
        """The element whose Lambda-expansion is the sigma_h-image of elem's."""
        N = self.N
        if gcd(h, N) != 1:
            raise ValueError(f"h={h} is not coprime to N={N}")
        hs = pow(h, -1, N)
        k2 = h * elem.k
        u2 = hs * elem.u
        # B(t, h* u, h k) needs an integer lift of h* u prime to t
        while gcd(u2, elem.t) != 1:
            u2 += N
        target = lift_diag(elem.v, N) @ b_matrix(elem.t, u2, k2)
        out = self.elements[self.locate(target)]
        assert same_coset(out.matrix, target, N)
        return out

    def galois_permutation(self, h: int) -> list[int]:
        return [self.locate(self.galois_step(e, h).matrix) for e in self.elements]

    def to_json_obj(self) -> dict:
        return {"level": self.N, "size": len(self), "elements": [e.to_json_obj() for e in self]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)


def unit_classes(N: int) -> list[int]:
    """Representatives of (Z/N)^x/{+-1}: the units in [1, N/2]."""
    return [v for v in range(1, N // 2 + 1) if gcd(v, N) == 1]


def build_transversal(N: int) -> Transversal:
    if N < MIN_LEVEL:
        raise ValueError(f"level N must be >= {MIN_LEVEL}, got {N}")
    elements = []
    for v in unit_classes(N):
        M = lift_diag(v, N)
        for t in divisors(N):
            for u in theta_set(t, N):
                for k in _k_values(t, u, N):
                    elements.append(TransversalElement(v, t, u, k, M @ b_matrix(t, u, k)))
    R = Transversal(N, elements)
    expected = index_gamma1_pm(N)
    if len(R) != expected:
        raise AssertionError(f"transversal has {len(R)} elements, index is {expected}")
    return R


def galois_step(R: Transversal, elem: TransversalElement, h: int) -> TransversalElement:
    return R.galois_step(elem, h)
