"""Obstruction chains ^s chi(m^{(x)s}) for abelian fundamental groups, trivial coefficients.

``^s chi`` is induced by (a_1, ..., a_s) -> (a_1 a_2^-1, ..., a_{s-1} a_s^-1); on
small models it is

    ^s chi(a_1 (x) ... (x) a_s) = sum chi(a_1 (x) k_2) (x) chi(l_2 (x) k_3) (x) ... (x) chi(l_{s-1} (x) a_s)

with Delta a_i = sum k_i (x) l_i and chi = product o (id (x) j).  All maps
involved have degree 0 and the regrouping does not reorder factors, so no
extra Koszul signs appear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product

from .chains import (ChainComplex, ChainElement, ChainError, ChainMap, _clean,
                     serialize_chain)
from .cyclic import (GroupSpec, group_chi_terms, group_complex,
                     group_diagonal_terms, parse_group)
from .smith import boundary_residue, is_boundary, is_boundary_mod_p

ZERO_CHAIN = "zero-chain"
BOUNDARY = "boundary"
NONZERO = "nonzero-class"

LESS = "TC_s < sn"
EQUAL = "TC_s = sn"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class FundamentalClassSpec:
    """A degree-n cycle in the group complex standing for the image of [M]."""

    group: GroupSpec
    n: int
    chain: ChainElement

    def __post_init__(self):
        if self.n < 2:
            raise ChainError("manifold dimension must be at least 2")
        if self.chain and self.chain.degree != self.n:
            raise ChainError(f"class has degree {self.chain.degree}, expected {self.n}")
        f = len(self.group.factors)
        for lab, _ in self.chain.items():
            if len(lab) != f:
                raise ChainError(f"label {list(lab)} has {len(lab)} entries, group has {f} factors")
        c = group_complex(self.group, self.n + 1)
        for lab, _ in self.chain.items():
            if not c.contains(lab):
                raise ChainError(f"label {list(lab)} is not a basis element of {self.group}")
        if not c.is_cycle(self.chain):
            raise ChainError("fundamental class chain is not a cycle")


def default_class(g: GroupSpec, n: int, scale: int = 1) -> ChainElement:
    """lambda [n] for a single cyclic factor (zero in even dimension)."""
    if len(g.factors) != 1 or g.factors[0] == 0:
        raise ChainError(f"no default fundamental class for {g}; pass one explicitly")
    if n % 2 == 0:
        return ChainElement.zero(n)
    return ChainElement(n, {(n,): scale})


@lru_cache(maxsize=None)
def _chi(g: GroupSpec, label: tuple) -> tuple:
    return tuple(group_chi_terms(g, label).items())


@lru_cache(maxsize=None)
def _delta(g: GroupSpec, label: tuple) -> tuple:
    f = len(g.factors)
    return tuple((lab[:f], lab[f:], c) for lab, c in group_diagonal_terms(g, label).items())


@lru_cache(maxsize=200_000)
def chi_s_terms(g: GroupSpec, labels: tuple) -> dict:
    """^s chi on one basis tensor (labels = (a_1, ..., a_s), each a group label)."""
    s = len(labels)
    if s < 2:
        raise ChainError("^s chi needs s >= 2")
    # state: (output so far, pending left factor) -> coeff
    states = {((), labels[0]): 1}
    for a in labels[1:-1]:
        nxt: dict = {}
        for (out, left), c in states.items():
            for k, l, u in _delta(g, a):
                for lab, v in _chi(g, left + k):
                    key = (out + lab, l)
                    nxt[key] = nxt.get(key, 0) + c * u * v
        states = {k: v for k, v in nxt.items() if v}
    result: dict = {}
    for (out, left), c in states.items():
        for lab, v in _chi(g, left + labels[-1]):
            key = out + lab
            result[key] = result.get(key, 0) + c * v
    return {k: v for k, v in result.items() if v}


def power_complex(g: GroupSpec, k: int, max_degree: int) -> ChainComplex:
    base = group_complex(g, max_degree)
    return ChainComplex(base.slots * k, max_degree, f"C({g})^{k}")


def chi_s(g: GroupSpec, s: int, max_degree: int) -> ChainMap:
    """^s chi as a chain map C(pi)^{(x)s} -> C(pi)^{(x)(s-1)}."""
    if s < 2:
        raise ChainError("^s chi needs s >= 2")
    f = len(g.factors)
    src = power_complex(g, s, max_degree)
    tgt = power_complex(g, s - 1, max_degree)

    def func(label):
        parts = tuple(label[i * f:(i + 1) * f] for i in range(s))
        return chi_s_terms(g, parts)

    return ChainMap(src, tgt, func, f"{s}chi")


def obstruction_chain(f: FundamentalClassSpec, s: int) -> ChainElement:
    """^s chi applied to the s-fold tensor power of the class (exact integers)."""
    if s < 2:
        raise ChainError("s must be at least 2")
    terms = list(f.chain.items())
    out: dict = {}
    for combo in product(terms, repeat=s):
        coeff = 1
        for _, c in combo:
            coeff *= c
        for lab, v in chi_s_terms(f.group, tuple(l for l, _ in combo)).items():
            out[lab] = out.get(lab, 0) + coeff * v
    return ChainElement(s * f.n, _clean(out, 0), _trusted=True)


@dataclass
class ObstructionVerdict:
    group: str
    n: int
    s: int
    obstruction: ChainElement
    status: str
    conclusion: str
    preimage: ChainElement | None = None
    residue: dict | None = None
    modulus: int = 0
    citations: list = field(default_factory=list)

    def as_dict(self) -> dict:
        d = {
            "group": self.group, "n": self.n, "s": self.s,
            "obstruction": serialize_chain(self.obstruction),
            "obstruction_terms": len(self.obstruction),
            "status": self.status, "conclusion": self.conclusion,
            "sn": self.s * self.n,
        }
        if self.preimage is not None:
            d["preimage"] = serialize_chain(self.preimage)
        if self.residue:
            d["residue"] = {str(k): v for k, v in sorted(self.residue.items())}
        if self.modulus:
            d["certified_mod"] = self.modulus
        return d


def _primes_dividing(orders) -> list:
    ps = set()
    for q in orders:
        x, p = q, 2
        while x > 1:
            while x % p == 0:
                ps.add(p)
                x //= p
            p += 1
    return sorted(ps)


def decide_orientable(f: FundamentalClassSpec, s: int, try_mod_p: bool = True) -> ObstructionVerdict:
    """Classify the obstruction: zero chain, integral boundary, or nonzero homology class.

    A class that is non-zero after reduction mod p is non-zero integrally, so
    primes dividing the finite orders are tried first (cheap F_p solve); the
    integral Smith-form decision runs otherwise.
    """
    if s < 2:
        raise ChainError("s must be at least 2")
    z = obstruction_chain(f, s)
    gname = f.group.name
    base = dict(group=gname, n=f.n, s=s, obstruction=z)
    if not z:
        return ObstructionVerdict(**base, status=ZERO_CHAIN, conclusion=LESS,
                                  citations=[_less_citation(f.group)])
    target = power_complex(f.group, s - 1, s * f.n + 1)
    if try_mod_p:
        for p in _primes_dividing(f.group.finite_orders):
            if is_boundary_mod_p(target, z, p) is None:
                return ObstructionVerdict(**base, status=NONZERO, conclusion=EQUAL, modulus=p,
                                          citations=["nonzero-obstruction-maximality"])
    x = is_boundary(target, z)
    if x is not None:
        return ObstructionVerdict(**base, status=BOUNDARY, conclusion=LESS, preimage=x,
                                  citations=[_less_citation(f.group)])
    return ObstructionVerdict(**base, status=NONZERO, conclusion=EQUAL,
                              residue=boundary_residue(target, z),
                              citations=["nonzero-obstruction-maximality"])


def _less_citation(g: GroupSpec) -> str:
    if g.rank == 0 and len(g.factors) == 1:
        return "cyclic-vanishing"
    if g.rank == len(g.factors):
        return "free-abelian-vanishing"
    if g.rank and len(g.finite_orders) == 1:
        return "free-times-cyclic-vanishing"
    return "vanishing-obstruction"


def exterior_monomials(r: int, degree: int) -> list:
    """Labels of Z^r with `degree` ones, lexicographically."""
    out = []
    for idx in combinations(range(r), degree):
        out.append(tuple(1 if i in idx else 0 for i in range(r)))
    return sorted(out)


def monomial_classes(r: int, q: int, n: int) -> list:
    """Monomial cycles sigma (x) [n - |sigma|] of Z^r x Z_q in degree n."""
    out = []
    for d in range(0, min(r, n) + 1):
        k = n - d
        if k % 2 == 0 and k > 0:
            continue                     # [even > 0] is not a cycle in C(Z_q)
        for sigma in exterior_monomials(r, d):
            out.append(sigma + (k,))
    return out


def free_times_cyclic_vanishing(r: int, q: int, n: int, s: int,
                                classes: list | None = None) -> dict:
    """Zero-chain check of the obstruction for Z^r x Z_q (r < n).

    ``classes`` defaults to every monomial cycle plus their sum; returns
    {serialized class: obstruction is the zero chain}.
    """
    if r >= n:
        raise ChainError(f"r = {r} >= n = {n}: outside the free-times-cyclic vanishing range")
    g = GroupSpec((0,) * r + (q,))
    if classes is None:
        mons = monomial_classes(r, q, n)
        classes = [ChainElement(n, {lab: 1}) for lab in mons]
        if len(mons) > 1:
            classes.append(ChainElement(n, {lab: 1 for lab in mons}))
    out = {}
    for c in classes:
        fc = FundamentalClassSpec(g, n, c)
        out[serialize_chain(c)] = not obstruction_chain(fc, s)
    return out


def parse_class(group: str | GroupSpec, n: int, text: str | None) -> FundamentalClassSpec:
    from .chains import parse_chain
    g = parse_group(group) if isinstance(group, str) else group
    chain = default_class(g, n) if text is None else parse_chain(text, n)
    return FundamentalClassSpec(g, n, chain)

