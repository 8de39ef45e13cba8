"""Chain complexes of finitely generated free abelian groups.

Every complex handled here is a (truncated) tensor product of *slots*:
one-generator-per-degree complexes ``[0], [1], [2], ...`` whose boundary
is ``d[k] = c_k [k-1]``.  A basis label is the tuple of slot degrees,
written ``[i1,...,il]``.  Coefficients are Python ints throughout.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Iterator, Mapping, Sequence

Label = tuple


class ChainError(ValueError):
    pass


def _clean(terms: Mapping[Label, int], modulus: int) -> dict:
    if modulus:
        out = {k: v % modulus for k, v in terms.items()}
        return {k: v for k, v in out.items() if v}
    return {k: v for k, v in terms.items() if v}


class ChainElement:
    """A homogeneous integer (or F_p) combination of basis labels.

    Instances are treated as immutable; arithmetic returns new objects.
    """

    __slots__ = ("degree", "_terms", "modulus")

    def __init__(self, degree: int, terms: Mapping[Label, int] | None = None,
                 modulus: int = 0, *, _trusted: bool = False):
        self.degree = degree
        self.modulus = modulus
        if terms is None:
            self._terms = {}
        elif _trusted:
            self._terms = terms
        else:
            terms = {tuple(k): int(v) for k, v in terms.items()}
            for lab in terms:
                if sum(lab) != degree or min(lab, default=0) < 0:
                    raise ChainError(f"label {list(lab)} does not have degree {degree}")
            self._terms = _clean(terms, modulus)

    @classmethod
    def zero(cls, degree: int, modulus: int = 0) -> ChainElement:
        return cls(degree, None, modulus)

    @classmethod
    def basis(cls, label: Sequence[int], coeff: int = 1) -> ChainElement:
        label = tuple(label)
        return cls(sum(label), {label: coeff})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, label) -> int:
        return self._terms.get(tuple(label), 0)

    def labels(self) -> list:
        return sorted(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __iter__(self) -> Iterator:
        return iter(sorted(self._terms.items()))

    def _check(self, other: ChainElement):
        if not isinstance(other, ChainElement):
            return NotImplemented
        if self.modulus != other.modulus:
            raise ChainError("cannot combine chains over different coefficient rings")
        if self._terms and other._terms and self.degree != other.degree:
            raise ChainError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: ChainElement) -> ChainElement:
        self._check(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        deg = self.degree if self._terms else other.degree
        return ChainElement(deg, _clean(out, self.modulus), self.modulus, _trusted=True)

    def __neg__(self) -> ChainElement:
        return self.scale(-1)

    def __sub__(self, other: ChainElement) -> ChainElement:
        return self + (-other)

    def scale(self, c: int) -> ChainElement:
        out = {k: v * c for k, v in self._terms.items()}
        return ChainElement(self.degree, _clean(out, self.modulus), self.modulus, _trusted=True)

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainElement):
            return NotImplemented
        return self.modulus == other.modulus and self._terms == other._terms

    def __hash__(self):
        return hash((self.modulus, frozenset(self._terms.items())))

    def restrict(self, predicate: Callable[[Label], bool]) -> ChainElement:
        out = {k: v for k, v in self._terms.items() if predicate(k)}
        return ChainElement(self.degree, out, self.modulus, _trusted=True)

    def serialize(self) -> str:
        return serialize_chain(self)

    def __repr__(self):
        return f"ChainElement({self.serialize()!r})"

    __str__ = serialize


def serialize_chain(x: ChainElement) -> str:
    if not x:
        return "0"
    return " + ".join(f"{c}*[{','.join(map(str, lab))}]" for lab, c in x)


_TERM = re.compile(r"([+-]*)(\d*)\*?\[([\d,]*)\]")


def parse_chain(text: str, degree: int | None = None) -> ChainElement:
    """Parse ``2*[0,5] - [5,0]``-style input (also the canonical serialization)."""
    s = "".join(text.split())
    if s in ("", "0"):
        return ChainElement.zero(degree or 0)
    terms: dict = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ChainError(f"cannot parse chain near {s[pos:]!r}")
        signs, num, body = m.groups()
        if pos > 0 and not signs:
            raise ChainError(f"missing '+' or '-' before {s[pos:]!r}")
        if not body:
            raise ChainError("empty label")
        sign = -1 if signs.count("-") % 2 else 1
        coeff = sign * (int(num) if num else 1)
        label = tuple(int(t) for t in body.split(","))
        terms[label] = terms.get(label, 0) + coeff
        pos = m.end()
    degs = {sum(k) for k in terms}
    if len(degs) > 1:
        raise ChainError(f"chain is not homogeneous: degrees {sorted(degs)}")
    deg = degs.pop()
    if degree is not None and deg != degree:
        raise ChainError(f"chain has degree {deg}, expected {degree}")
    return ChainElement(deg, terms)


@dataclass(frozen=True)
class Slot:
    """A complex with one generator per degree 0..top (top=None: unbounded).

    ``coeff(k)`` is the integer c with d[k] = c [k-1].
    """

    name: str
    top: int | None
    coeff: Callable[[int], int]

    def __repr__(self):
        return f"Slot({self.name})"


def _zero_coeff(k: int) -> int:
    return 0


POINT = Slot("pt", 0, _zero_coeff)


def _compositions(total: int, tops: Sequence[int | None]) -> list:
    """All tuples t with sum(t) == total, 0 <= t[i] <= tops[i], in lex order."""
    n = len(tops)
    caps = [total if t is None else min(t, total) for t in tops]
    # suffix capacity bounds prune impossible branches
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + caps[i]
    out: list = []
    cur = [0] * n

    def rec(i, remaining):
        if i == n - 1:
            if remaining <= caps[i]:
                cur[i] = remaining
                out.append(tuple(cur))
            return
        lo = max(0, remaining - suffix[i + 1])
        for v in range(lo, min(caps[i], remaining) + 1):
            cur[i] = v
            rec(i + 1, remaining - v)

    if n == 0:
        return [()] if total == 0 else []
    if total <= suffix[0]:
        rec(0, total)
    return out


class ChainComplex:
    """Truncated tensor product of slots, optionally with a custom differential.

    ``differential`` (if given) maps a label to a dict ``{label: coeff}``
    and replaces the Koszul-rule differential built from the slots.
    """

    def __init__(self, slots: Sequence[Slot], max_degree: int, name: str = "",
                 differential: Callable[[Label], dict] | None = None):
        if not slots:
            raise ChainError("a chain complex needs at least one slot")
        if max_degree < 0:
            raise ChainError("max_degree must be non-negative")
        self.slots = tuple(slots)
        self.max_degree = max_degree
        self.name = name or " (x) ".join(s.name for s in self.slots)
        self._custom = differential
        self._basis_cache: dict = {}
        self._snf_cache: dict = {}

    @property
    def slot_count(self) -> int:
        return len(self.slots)

    @cached_property
    def tops(self) -> tuple:
        return tuple(s.top for s in self.slots)

    def basis(self, degree: int) -> list:
        if degree < 0 or degree > self.max_degree:
            return []
        b = self._basis_cache.get(degree)
        if b is None:
            b = _compositions(degree, self.tops)
            self._basis_cache[degree] = b
        return b

    def rank(self, degree: int) -> int:
        return len(self.basis(degree))

    def contains(self, label: Label) -> bool:
        if len(label) != self.slot_count or sum(label) > self.max_degree:
            return False
        return all(0 <= v and (t is None or v <= t) for v, t in zip(label, self.tops))

    def boundary_terms(self, label: Label) -> dict:
        """d(label) as a plain dict; labels with negative entries are dropped."""
        if self._custom is not None:
            return {k: v for k, v in self._custom(label).items() if v and min(k) >= 0}
        out = {}
        sign = 1
        for i, (k, slot) in enumerate(zip(label, self.slots)):
            if k > 0:
                c = slot.coeff(k)
                if c:
                    lab = label[:i] + (k - 1,) + label[i + 1:]
                    out[lab] = sign * c
            if k & 1:
                sign = -sign
        return out

    def boundary_label(self, label: Label) -> ChainElement:
        return ChainElement(sum(label) - 1, self.boundary_terms(tuple(label)), _trusted=True)

    def boundary(self, x: ChainElement) -> ChainElement:
        out: dict = {}
        for lab, c in x.items():
            for k, v in self.boundary_terms(lab).items():
                out[k] = out.get(k, 0) + c * v
        return ChainElement(x.degree - 1, _clean(out, x.modulus), x.modulus, _trusted=True)

    def is_cycle(self, x: ChainElement) -> bool:
        return not self.boundary(x)

    def check_d_squared(self, up_to: int | None = None) -> bool:
        top = self.max_degree if up_to is None else up_to
        for d in range(top + 1):
            for lab in self.basis(d):
                if self.boundary(self.boundary_label(lab)):
                    return False
        return True

    def boundary_matrix(self, degree: int) -> tuple:
        """Sparse matrix of d: C_degree -> C_{degree-1} as ({row: {col: v}}, nrows, ncols)."""
        src = self.basis(degree)
        tgt = self.basis(degree - 1)
        index = {lab: i for i, lab in enumerate(tgt)}
        rows: dict = {}
        for j, lab in enumerate(src):
            for k, v in self.boundary_terms(lab).items():
                rows.setdefault(index[k], {})[j] = v
        return rows, len(tgt), len(src)

    def __repr__(self):
        return f"ChainComplex({self.name}, max_degree={self.max_degree})"


def point_complex(max_degree: int = 0) -> ChainComplex:
    return ChainComplex([POINT], max_degree, "pt")


def tensor(a: ChainComplex, b: ChainComplex) -> ChainComplex:
    """A (x) B with d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy, truncated at min(max degrees)."""
    top = min(a.max_degree, b.max_degree)
    name = f"{a.name} (x) {b.name}"
    if a._custom is None and b._custom is None:
        return ChainComplex(a.slots + b.slots, top, name)
    na = a.slot_count

    def diff(label):
        x, y = label[:na], label[na:]
        out = {}
        for k, v in a.boundary_terms(x).items():
            out[k + y] = out.get(k + y, 0) + v
        sign = -1 if sum(x) & 1 else 1
        for k, v in b.boundary_terms(y).items():
            out[x + k] = out.get(x + k, 0) + sign * v
        return out

    return ChainComplex(a.slots + b.slots, top, name, differential=diff)


def tensor_power(c: ChainComplex, k: int, max_degree: int | None = None) -> ChainComplex:
    if k < 1:
        raise ChainError("tensor power needs k >= 1")
    if c._custom is not None:
        out = c
        for _ in range(k - 1):
            out = tensor(out, c)
        return out
    md = c.max_degree if max_degree is None else max_degree
    return ChainComplex(c.slots * k, md, f"({c.name})^{k}")


def tensor_elements(x: ChainElement, y: ChainElement) -> ChainElement:
    out = {}
    for a, u in x.items():
        for b, v in y.items():
            out[a + b] = u * v
    return ChainElement(x.degree + y.degree, _clean(out, x.modulus), x.modulus, _trusted=True)


def koszul_sign(degrees: Sequence[int], order: Sequence[int]) -> int:
    """Sign of moving factors of the given degrees into positions ``order``.

    The new tuple is ``[old[order[0]], old[order[1]], ...]``; each pair of
    factors whose relative order flips contributes (-1)^(deg*deg).
    """
    parity = 0
    for i, j in combinations(range(len(order)), 2):
        a, b = order[i], order[j]
        if a > b:
            parity ^= degrees[a] & degrees[b] & 1
    return -1 if parity else 1


def permute_slots(x: ChainElement, order: Sequence[int]) -> ChainElement:
    """Permute slots of every label, applying the Koszul interchange sign."""
    order = tuple(order)
    if sorted(order) != list(range(len(order))):
        raise ChainError(f"{order} is not a permutation")
    out = {}
    for lab, c in x.items():
        if len(lab) != len(order):
            raise ChainError(f"permutation of arity {len(order)} applied to label {list(lab)}")
        new = tuple(lab[i] for i in order)
        out[new] = c * koszul_sign(lab, order)
    return ChainElement(x.degree, _clean(out, x.modulus), x.modulus, _trusted=True)


def inverse_permutation(order: Sequence[int]) -> tuple:
    inv = [0] * len(order)
    for i, j in enumerate(order):
        inv[j] = i
    return tuple(inv)


class ChainMap:
    """Degree-0 map given on basis labels.

    ``func`` returns a dict ``{target_label: coeff}``; values are memoised.
    """

    def __init__(self, source: ChainComplex, target: ChainComplex,
                 func: Callable[[Label], dict], name: str = "", modulus: int = 0):
        self.source = source
        self.target = target
        self.degree_shift = 0
        self.name = name
        self.modulus = modulus
        self._func = func
        self._cache: dict = {}

    def value_terms(self, label: Label) -> dict:
        v = self._cache.get(label)
        if v is None:
            v = _clean(self._func(label), self.modulus)
            self._cache[label] = v
        return v

    def value(self, label) -> ChainElement:
        label = tuple(label)
        return ChainElement(sum(label), self.value_terms(label), self.modulus, _trusted=True)

    def __call__(self, x: ChainElement) -> ChainElement:
        mod = self.modulus or x.modulus
        out: dict = {}
        for lab, c in x.items():
            for k, v in self.value_terms(lab).items():
                out[k] = out.get(k, 0) + c * v
        return ChainElement(x.degree, _clean(out, mod), mod, _trusted=True)

    def values(self, up_to: int) -> Iterator:
        for d in range(up_to + 1):
            for lab in self.source.basis(d):
                yield lab, self.value(lab)

    def then(self, other: ChainMap, name: str = "") -> ChainMap:
        """Composite ``other o self``."""
        def func(label):
            return other(self.value(label)).terms
        return ChainMap(self.source, other.target, func, name or f"{other.name}.{self.name}",
                        self.modulus or other.modulus)

    def __repr__(self):
        return f"ChainMap({self.name}: {self.source.name} -> {self.target.name})"


def zero_map(source: ChainComplex, target: ChainComplex) -> ChainMap:
    return ChainMap(source, target, lambda lab: {}, "0")


def identity_map(c: ChainComplex) -> ChainMap:
    return ChainMap(c, c, lambda lab: {lab: 1}, "id")


def tensor_maps(maps: Sequence[ChainMap], source: ChainComplex, target: ChainComplex,
                name: str = "") -> ChainMap:
    """f1 (x) f2 (x) ... on labels split by the source slot counts (degree-0 maps: no signs)."""
    widths = [m.source.slot_count for m in maps]

    def func(label):
        acc = {(): 1}
        pos = 0
        for m, w in zip(maps, widths):
            part = label[pos:pos + w]
            pos += w
            vals = m.value_terms(part)
            if not vals:
                return {}
            nxt = {}
            for a, u in acc.items():
                for b, v in vals.items():
                    nxt[a + b] = u * v
            acc = nxt
        return acc

    return ChainMap(source, target, func, name or " (x) ".join(m.name for m in maps))


def verify_chain_map(f: ChainMap, up_to: int) -> bool:
    """True iff d o f == f o d on every source label of degree <= up_to."""
    if up_to >= f.source.max_degree or up_to >= f.target.max_degree:
        raise ChainError(
            f"verify up to degree {up_to} needs complexes built through degree {up_to + 1} "
            f"(source {f.source.max_degree}, target {f.target.max_degree})")
    for d in range(up_to + 1):
        for lab in f.source.basis(d):
            lhs = f.target.boundary(f.value(lab))
            rhs = f(f.source.boundary_label(lab))
            if f.modulus:
                lhs = reduce_mod(lhs, f.modulus)
                rhs = reduce_mod(rhs, f.modulus)
            if lhs != rhs:
                return False
    return True


def reduce_mod(x, p: int):
    """Coefficientwise reduction of a ChainElement or ChainMap modulo p."""
    if p < 2:
        raise ChainError("modulus must be a prime >= 2")
    if isinstance(x, ChainElement):
        return ChainElement(x.degree, _clean(x._terms, p), p, _trusted=True)
    if isinstance(x, ChainMap):
        return ChainMap(x.source, x.target, x._func, f"{x.name} mod {p}", modulus=p)
    raise TypeError(f"cannot reduce {type(x).__name__}")


def label_str(label: Iterable[int]) -> str:
    return "[" + ",".join(map(str, label)) + "]"
