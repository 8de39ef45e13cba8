"""Small chain models for Z_q and Z, and their structure maps.

For Z_q the model is the periodic resolution tensored down to Z:
``d[2k] = q[2k-1]``, ``d[2k-1] = 0``.  Its twisted version (q = 2, orientation
character) has ``d[2k+1] = -2[2k]``, ``d[2k] = 0``.  A free factor Z uses the
circle model ``[0], [1]`` with zero differential.

Structure maps on one factor (diagonal, Pontryagin product, inversion) are
given as dicts on degrees; ``structure_map`` assembles them for a product
group, shuffling tensor slots with Koszul signs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .binary import binom_big
from .chains import (ChainComplex, ChainError, ChainMap, Slot, koszul_sign)

PLAIN = "plain"
TWISTED = "twisted"


class GroupSpecError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    """Finitely generated abelian group as an ordered list of cyclic orders (0 = Z)."""

    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise GroupSpecError("a group needs at least one factor")
        for q in self.factors:
            if q < 0 or q == 1:
                raise GroupSpecError(f"invalid cyclic order {q}")

    @property
    def name(self) -> str:
        return format_group(self)

    @property
    def rank(self) -> int:
        return sum(1 for q in self.factors if q == 0)

    @property
    def finite_orders(self) -> tuple:
        return tuple(q for q in self.factors if q)

    def __str__(self):
        return self.name

    @classmethod
    def parse(cls, text: str) -> GroupSpec:
        return parse_group(text)


_FACTOR = re.compile(r"^Z(?:\^(\d+)|_(\d+))?$")


def parse_group(text: str) -> GroupSpec:
    """Parse ``Z``, ``Z^r``, ``Z_q`` joined by ``x`` (whitespace-insensitive)."""
    s = "".join(text.split())
    if not s:
        raise GroupSpecError("empty group description")
    factors: list = []
    for tok in s.split("x"):
        m = _FACTOR.match(tok)
        if not m:
            raise GroupSpecError(f"cannot parse group factor {tok!r}")
        power, order = m.groups()
        if order is not None:
            q = int(order)
            if q < 2:
                raise GroupSpecError(f"cyclic order must be >= 2, got {q}")
            factors.append(q)
        else:
            r = 1 if power is None else int(power)
            if r < 1:
                raise GroupSpecError("Z^r needs r >= 1")
            factors.extend([0] * r)
    return GroupSpec(tuple(factors))


def format_group(g: GroupSpec) -> str:
    parts = []
    i = 0
    f = g.factors
    while i < len(f):
        if f[i] == 0:
            j = i
            while j < len(f) and f[j] == 0:
                j += 1
            parts.append("Z" if j - i == 1 else f"Z^{j - i}")
            i = j
        else:
            parts.append(f"Z_{f[i]}")
            i += 1
    return " x ".join(parts)


# -- slots -------------------------------------------------------------------

@lru_cache(maxsize=None)
def cyclic_slot(q: int) -> Slot:
    if q < 2:
        raise ChainError("Z_q model needs q >= 2")
    return Slot(f"Z_{q}", None, lambda k, q=q: q if k % 2 == 0 else 0)


@lru_cache(maxsize=None)
def twisted_slot() -> Slot:
    return Slot("Z~_2", None, lambda k: -2 if k % 2 else 0)


@lru_cache(maxsize=None)
def free_slot() -> Slot:
    return Slot("Z", 1, lambda k: 0)


def factor_slot(q: int, twist: str = PLAIN) -> Slot:
    if twist == TWISTED:
        if q != 2:
            raise ChainError("twisted coefficients are only modelled for Z_2 factors")
        return twisted_slot()
    if twist != PLAIN:
        raise ChainError(f"unknown twist {twist!r}")
    return free_slot() if q == 0 else cyclic_slot(q)


def complex_c(q: int, max_degree: int) -> ChainComplex:
    return ChainComplex([cyclic_slot(q)], max_degree, f"C(Z_{q})")


def complex_c_tilde(max_degree: int) -> ChainComplex:
    return ChainComplex([twisted_slot()], max_degree, "C~(Z_2)")


def complex_free_z(max_degree: int) -> ChainComplex:
    return ChainComplex([free_slot()], max_degree, "C(Z)")


def group_complex(g: GroupSpec, max_degree: int, twist: Sequence[str] | None = None) -> ChainComplex:
    """Tensor product of the factor models of g (one slot per factor)."""
    twist = tuple(twist) if twist is not None else (PLAIN,) * len(g.factors)
    if len(twist) != len(g.factors):
        raise ChainError("one twist flag per factor is required")
    slots = [factor_slot(q, t) for q, t in zip(g.factors, twist)]
    return ChainComplex(slots, max_degree, g.name)


# -- single-factor formulas ----------------------------------------------------

def alpha(q: int) -> int:
    """Coefficient of [k] (x) [l] in the plain diagonal when k and l are both odd."""
    return (q - 1) * q // 2


def diagonal_terms(q: int, p: int, variant: str = PLAIN) -> dict:
    """Diagonal of [p] as {(k, l): coeff}.

    plain: alpha_kl = (q-1)q/2 when k, l are both odd, else 1 (q = 0 is the circle);
    twist_left (C~ -> C~ (x) C): all ones; twist_right (C~ -> C (x) C~): (-1)^k.
    """
    if variant != PLAIN and q != 2:
        raise ChainError(f"diagonal variant {variant!r} needs q = 2")
    if q == 0:
        if p == 0:
            return {(0, 0): 1}
        if p == 1:
            return {(1, 0): 1, (0, 1): 1}
        return {}
    out = {}
    for k in range(p + 1):
        l = p - k
        if variant == PLAIN:
            c = alpha(q) if (k & 1 and l & 1) else 1
        elif variant == "twist_left":
            c = 1
        elif variant == "twist_right":
            c = -1 if k & 1 else 1
        else:
            raise ChainError(f"unknown diagonal variant {variant!r}")
        if c:
            out[(k, l)] = c
    return out


def pontryagin_terms(q: int, a: int, b: int) -> dict:
    """[a] ^ [b] as {(c,): coeff}; the same formula serves the twisted product."""
    if q == 0:
        if a + b > 1:
            return {}
        return {(a + b,): 1}
    if a & 1 and b & 1:
        return {}
    return {(a + b,): binom_big(a // 2, b // 2)}


def inversion_coeff(q: int, i: int) -> int:
    """j[i] = (q-1)^k [i] for i in {2k, 2k-1}; on the circle j[1] = -[1]."""
    if q == 0:
        return -1 if i == 1 else 1
    return (q - 1) ** ((i + 1) // 2)


# -- single-factor chain maps ------------------------------------------------

_DIAG_SLOTS = {PLAIN: (PLAIN, PLAIN, PLAIN),
               "twist_left": (TWISTED, TWISTED, PLAIN),
               "twist_right": (TWISTED, PLAIN, TWISTED)}


def diagonal_map(q: int, variant: str = PLAIN, max_degree: int = 12) -> ChainMap:
    if variant not in _DIAG_SLOTS:
        raise ChainError(f"unknown diagonal variant {variant!r}")
    if variant != PLAIN and q != 2:
        raise ChainError(f"diagonal variant {variant!r} is only defined for q = 2")
    s_src, s_l, s_r = _DIAG_SLOTS[variant]
    src = ChainComplex([factor_slot(q, s_src)], max_degree)
    tgt = ChainComplex([factor_slot(q, s_l), factor_slot(q, s_r)], max_degree)
    return ChainMap(src, tgt, lambda lab: diagonal_terms(q, lab[0], variant),
                    f"Delta[{variant}]")


def pontryagin_map(q: int, pattern: str = PLAIN, max_degree: int = 12) -> ChainMap:
    if pattern not in (PLAIN, TWISTED):
        raise ChainError(f"unsupported product pattern {pattern!r}")
    slot = factor_slot(q, pattern)
    src = ChainComplex([slot, slot], max_degree)
    tgt = ChainComplex([slot], max_degree)
    return ChainMap(src, tgt, lambda lab: pontryagin_terms(q, lab[0], lab[1]), f"mu[{pattern}]")


def inversion_map(q: int, max_degree: int = 12) -> ChainMap:
    c = ChainComplex([factor_slot(q)], max_degree)
    return ChainMap(c, c, lambda lab: {lab: inversion_coeff(q, lab[0])}, "j")


# -- product groups ------------------------------------------------------------

def interleave_order(f: int) -> tuple:
    """[a1..af, b1..bf] -> [a1, b1, a2, b2, ...]."""
    out = []
    for i in range(f):
        out += [i, f + i]
    return tuple(out)


def deinterleave_order(f: int) -> tuple:
    """[k1, l1, k2, l2, ...] -> [k1..kf, l1..lf]."""
    return tuple(range(0, 2 * f, 2)) + tuple(range(1, 2 * f, 2))


def _permute_dict(terms: dict, order: tuple) -> dict:
    out = {}
    for lab, c in terms.items():
        new = tuple(lab[i] for i in order)
        out[new] = out.get(new, 0) + c * koszul_sign(lab, order)
    return out


def group_diagonal_terms(g: GroupSpec, label: tuple) -> dict:
    acc = {(): 1}
    for q, p in zip(g.factors, label):
        d = diagonal_terms(q, p)
        acc = {a + b: u * v for a, u in acc.items() for b, v in d.items()}
    return _permute_dict(acc, deinterleave_order(len(g.factors)))


def group_product_terms(g: GroupSpec, label: tuple) -> dict:
    f = len(g.factors)
    shuffled = _permute_dict({label: 1}, interleave_order(f))
    out: dict = {}
    for lab, sign in shuffled.items():
        acc = {(): sign}
        for i, q in enumerate(g.factors):
            prod = pontryagin_terms(q, lab[2 * i], lab[2 * i + 1])
            if not prod:
                acc = {}
                break
            acc = {a + b: u * v for a, u in acc.items() for b, v in prod.items()}
        for k, v in acc.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def group_inversion_terms(g: GroupSpec, label: tuple) -> dict:
    c = 1
    for q, i in zip(g.factors, label):
        c *= inversion_coeff(q, i)
    return {label: c}


def group_chi_terms(g: GroupSpec, label: tuple) -> dict:
    """chi = product o (id (x) j) on C(pi) (x) C(pi)."""
    f = len(g.factors)
    a, b = label[:f], label[f:]
    (jb, c), = group_inversion_terms(g, b).items()
    return {k: v * c for k, v in group_product_terms(g, a + jb).items()}


def structure_map(g: GroupSpec, kind: str, max_degree: int = 12) -> ChainMap:
    """Diagonal, Pontryagin product, inversion or chi for the product group g."""
    one = group_complex(g, max_degree)
    two = ChainComplex(one.slots * 2, max_degree, f"{g.name} (x) {g.name}")
    if kind in ("delta", "diagonal"):
        return ChainMap(one, two, lambda lab: group_diagonal_terms(g, lab), "Delta")
    if kind in ("wedge", "product"):
        return ChainMap(two, one, lambda lab: group_product_terms(g, lab), "wedge")
    if kind in ("j", "inversion"):
        return ChainMap(one, one, lambda lab: group_inversion_terms(g, lab), "j")
    if kind == "chi":
        return ChainMap(two, one, lambda lab: group_chi_terms(g, lab), "chi")
    raise ChainError(f"unknown structure map {kind!r}")
