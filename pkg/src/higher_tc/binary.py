"""Binary-expansion combinatorics and binomial arithmetic.

``nu``, ``block_starts``, ``z_complement`` and ``m_defect`` feed the
zero-divisor cup-length formula for real projective spaces;
``binom_parity`` is the bit-disjointness test for B_{i,j} = C(i+j, i).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb


def _positive(n: int, what: str = "n"):
    if n < 1:
        raise ValueError(f"{what} must be a positive integer, got {n}")


def nu(n: int) -> int:
    """2-adic valuation of n >= 1."""
    _positive(n)
    return (n & -n).bit_length() - 1


def digits(n: int) -> list:
    """Binary digits d_0, d_1, ... of n (least significant first)."""
    return [(n >> i) & 1 for i in range(max(n.bit_length(), 1))]


def pset(k: int) -> set:
    """Positions of the 1-digits in the binary expansion of k."""
    _positive(k, "k")
    return {i for i, d in enumerate(digits(k)) if d}


def _bit(n: int, i: int) -> int:
    return (n >> i) & 1 if i >= 0 else 0


def block_starts(n: int) -> set:
    """Positions i > 0 where a block of at least two consecutive 1s starts (reading left to right)."""
    _positive(n)
    return {i for i in range(1, n.bit_length())
            if _bit(n, i + 1) == 0 and _bit(n, i) == 1 and _bit(n, i - 1) == 1}


def z_complement(n: int, i: int) -> int:
    """sum_{j<=i} (1 - d_j) 2^j, the complement of n modulo 2^(i+1)."""
    if i < 0:
        raise ValueError("i must be non-negative")
    return sum((1 - _bit(n, j)) << j for j in range(i + 1))


@dataclass(frozen=True)
class BinaryProfile:
    n: int
    digits: tuple
    nu: int
    block_starts: frozenset

    def complement(self, i: int) -> int:
        return z_complement(self.n, i)

    @classmethod
    def of(cls, n: int) -> BinaryProfile:
        return cls(n, tuple(digits(n)), nu(n), frozenset(block_starts(n)))


def m_defect(n: int, s: int) -> int:
    """max{2^nu(n+1) - 1, 2^(i+1) - 1 - s Z_i(n) : i in S(n)}, floored at 0.

    Only valid for s >= 3; s = 2 is the classical TC case with its own
    (immersion-theoretic) answer.
    """
    _positive(n)
    if s < 3:
        raise ValueError("the projective zero-divisor formula needs s >= 3 "
                         "(s = 2 is governed by immersion dimensions)")
    vals = [(1 << nu(n + 1)) - 1]
    vals += [(1 << (i + 1)) - 1 - s * z_complement(n, i) for i in block_starts(n)]
    return max(0, max(vals))


def maximality_threshold(n: int) -> int | None:
    """Smallest s guaranteeing zcl_s(P^n) = sn for even n.

    Returns None when some i in S(n) has Z_i(n) = 0, where the bound is not
    determined; that cannot happen for even n since d_0 = 0 forces Z_i(n) >= 1.
    """
    if n < 2 or n % 2:
        raise ValueError("the threshold is defined for even n >= 2")
    best = 3
    for i in block_starts(n):
        z = z_complement(n, i)
        if z == 0:
            return None
        num = (1 << (i + 1)) - 1
        best = max(best, -(-num // z))
    return best


def binom_big(i: int, j: int) -> int:
    """B_{i,j} = C(i+j, i)."""
    if i < 0 or j < 0:
        raise ValueError("binomial indices must be non-negative")
    return comb(i + j, i)


def binom_parity(i: int, j: int) -> str:
    """'odd' iff the binary expansions of i and j share no 1-digit."""
    if i < 0 or j < 0:
        raise ValueError("binomial indices must be non-negative")
    return "even" if i & j else "odd"


def binom_is_odd(i: int, j: int) -> bool:
    return not (i & j)


def binom_mod(i: int, j: int, p: int) -> int:
    """B_{i,j} mod a prime p by Lucas' theorem on base-p digits of i+j and i."""
    if i < 0 or j < 0:
        raise ValueError("binomial indices must be non-negative")
    if p < 2:
        raise ValueError("p must be prime")
    top, bot = i + j, i
    out = 1
    while top or bot:
        a, b = top % p, bot % p
        if b > a:
            return 0
        out = out * comb(a, b) % p
        top //= p
        bot //= p
    return out % p
