"""Obstruction for non-orientable manifolds with fundamental group Z_2, even s.

With s = 2 sigma and the class [n] in the twisted model C~, the obstruction is
the image of [n, ..., n] under

    C~^{(x)s} --id (x) (Delta_L (x) Delta_R)^{sigma-1} (x) id--> ... --products--> D

where D = C~ (x) (C (x) C~)^{sigma-1} has labels [u_1, v_1, ..., u_sigma].
Expanding gives a signed sum of binomial products times generators G; the
parity DP shows every term with delta_1 = 0 has an even coefficient, and
``rewrite_even_to_odd`` moves the remaining even-labelled mass onto odd
labels modulo boundaries.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from math import comb
from typing import Iterator

from .binary import binom_big
from .chains import (ChainComplex, ChainElement, ChainError, _clean,
                     identity_map, serialize_chain, tensor_maps)
from .cyclic import (PLAIN, TWISTED, diagonal_map, factor_slot, pontryagin_map)
from .smith import is_boundary, rational_rank_upper

DEFAULT_BUDGET = 10_000_000


class InapplicableError(ValueError):
    """The method does not apply to these parameters (distinct from a usage error)."""


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class DComplexSpec:
    """Parameters n (even), s = 2 sigma; r is set when n = 2^(r+1) - 2."""

    n: int
    s: int

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ChainError(f"n must be even and positive, got {self.n}")
        if self.s < 2:
            raise ChainError("s must be at least 2")
        if self.s % 2:
            raise InapplicableError(
                f"s = {self.s} is odd: the twisted coefficient system needed for the "
                "even-s argument cannot be formed for odd s")

    @classmethod
    def from_r(cls, r: int, s: int) -> DComplexSpec:
        if r < 1:
            raise ChainError("r must be >= 1")
        return cls((1 << (r + 1)) - 2, s)

    @property
    def m(self) -> int:
        return self.n // 2

    @property
    def sigma(self) -> int:
        return self.s // 2

    @property
    def r(self) -> int | None:
        k = self.n + 2
        if k & (k - 1) == 0 and k >= 4:
            return k.bit_length() - 2
        return None

    @property
    def slot_count(self) -> int:
        return self.s - 1

    @property
    def in_theorem_scope(self) -> bool:
        return self.r is not None and self.s <= self.n

    @property
    def twist(self) -> tuple:
        return tuple(TWISTED if i % 2 == 0 else PLAIN for i in range(self.slot_count))


# -- the complex D ---------------------------------------------------------------

def d_boundary_terms(label: tuple) -> dict:
    """Hand-coded differential of D on [u_1, v_1, ..., u_sigma]."""
    out = {}
    prefix = 0
    for i, x in enumerate(label):
        if i % 2 == 0:          # u slot: -2 odd(u)
            c = -2 if x & 1 else 0
        else:                   # v slot: +2 even(v)
            c = 2 if x % 2 == 0 else 0
        if c and x > 0:
            lab = label[:i] + (x - 1,) + label[i + 1:]
            out[lab] = c if prefix % 2 == 0 else -c
        prefix += x
    return out


def d_complex(spec: DComplexSpec, max_degree: int | None = None, check: bool = True) -> ChainComplex:
    """D with the explicit differential, checked against the slot tensor product."""
    top = spec.s * spec.n + 1 if max_degree is None else max_degree
    slots = [factor_slot(2, t) for t in spec.twist]
    d = ChainComplex(slots, top, f"D(sigma={spec.sigma})", differential=d_boundary_terms)
    if check:
        ref = ChainComplex(slots, top)
        for deg in range(top + 1):
            for lab in d.basis(deg):
                if d.boundary_terms(lab) != ref.boundary_terms(lab):
                    raise ChainError(f"hand-coded differential disagrees with tensor model at {list(lab)}")
    return d


def twisted_power(s: int, max_degree: int) -> ChainComplex:
    return ChainComplex([factor_slot(2, TWISTED)] * s, max_degree, f"C~^{s}")


# -- expansion ----------------------------------------------------------------------

@dataclass(frozen=True)
class ExpansionTerm:
    deltas: tuple
    ps: tuple
    qs: tuple
    sign: int
    binomial_product: int
    generator: tuple

    @property
    def coefficient(self) -> int:
        return self.sign * self.binomial_product


def term_count(spec: DComplexSpec) -> int:
    """Exact number of admissible (delta, p) index tuples."""
    k = spec.s - 2
    if k == 0:
        return 1
    m = spec.m
    # ways ending with delta = 0 / 1
    a, b = m + 1, m
    for _ in range(k - 1):
        a, b = (a + b) * (m + 1), a * m
    return a + b


def _delta_strings(k: int) -> Iterator[tuple]:
    def rec(prefix):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        yield from rec(prefix + [0])
        if not prefix or prefix[-1] == 0:
            yield from rec(prefix + [1])
    yield from rec([])


def expand_obstruction(spec: DComplexSpec, budget: int = DEFAULT_BUDGET) -> Iterator[ExpansionTerm]:
    """Stream every term of the expanded obstruction (zero coefficients included)."""
    count = term_count(spec)
    if count > budget:
        raise BudgetExceeded(f"expansion has {count} terms (budget {budget}); "
                             "use the parity certificate instead")
    n, m, k = spec.n, spec.m, spec.s - 2
    if k == 0:
        yield ExpansionTerm((), (), (), 1, binom_big(m, m), (2 * n,))
        return
    for deltas in _delta_strings(k):
        sign = -1 if sum(deltas[j] for j in range(1, k, 2)) % 2 else 1
        ranges = [range(m - d + 1) for d in deltas]

        def rec(i, ps):
            if i == k:
                yield tuple(ps)
                return
            for p in ranges[i]:
                ps.append(p)
                yield from rec(i + 1, ps)
                ps.pop()

        for ps in rec(0, []):
            qs = tuple(m - d - p for p, d in zip(ps, deltas))
            prod = binom_big(m, ps[0])
            for i in range(1, k):
                prod *= binom_big(qs[i - 1], ps[i])
            prod *= binom_big(qs[-1], m)
            gen = [n + 2 * ps[0] + deltas[0]]
            for i in range(1, k):
                gen.append(2 * (qs[i - 1] + ps[i]) + deltas[i - 1] + deltas[i])
            gen.append(n + 2 * qs[-1] + deltas[-1])
            yield ExpansionTerm(deltas, ps, qs, sign, prod, tuple(gen))


def aggregate_obstruction(spec: DComplexSpec, budget: int = DEFAULT_BUDGET) -> ChainElement:
    out: dict = {}
    for t in expand_obstruction(spec, budget):
        if t.binomial_product:
            out[t.generator] = out.get(t.generator, 0) + t.coefficient
    return ChainElement(spec.s * spec.n, _clean(out, 0), _trusted=True)


def twisted_chi_image(spec: DComplexSpec) -> ChainElement:
    """Image of [n, ..., n] computed by composing the single-factor chain maps."""
    s, n = spec.s, spec.n
    top = s * n + 1
    src = twisted_power(s, top)
    if s == 2:
        mid_slots = src.slots
        first = identity_map(src)
    else:
        dl = diagonal_map(2, "twist_left", top)
        dr = diagonal_map(2, "twist_right", top)
        idt = identity_map(ChainComplex([factor_slot(2, TWISTED)], top))
        maps = [idt] + [dl, dr] * (spec.sigma - 1) + [idt]
        mid_slots = [factor_slot(2, TWISTED)]
        for _ in range(spec.sigma - 1):
            mid_slots += dl.target.slots + dr.target.slots
        mid_slots += [factor_slot(2, TWISTED)]
        first = tensor_maps(maps, src, ChainComplex(mid_slots, top))
    mid = ChainComplex(mid_slots, top)
    mu_t = pontryagin_map(2, TWISTED, top)
    mu_p = pontryagin_map(2, PLAIN, top)
    prods = [mu_t if t == TWISTED else mu_p for t in spec.twist]
    second = tensor_maps(prods, mid, d_complex(spec, top, check=False))
    x = ChainElement(s * n, {(n,) * s: 1})
    return second(first(x))


# -- parity certificate -------------------------------------------------------------

@dataclass
class ParityTrace:
    n: int
    s_max: int
    accepting: dict          # s -> bool (some delta_1 = 0 term has all factors odd)
    reachable_states: dict   # s -> number of reachable (q, delta) states at position s-2
    table_digest: str

    def certificate(self, s: int) -> bool:
        return not self.accepting[s]


def parity_table_digest(m: int) -> str:
    """sha256 of the parity table of B_{i,j}, 0 <= i, j <= m (row-major '0'/'1')."""
    h = hashlib.sha256()
    for i in range(m + 1):
        h.update("".join("1" if not (i & j) else "0" for j in range(m + 1)).encode())
        h.update(b"\n")
    return h.hexdigest()


def parity_dp(n: int, s_max: int) -> ParityTrace:
    """One pass of the odd-coefficient reachability DP for all even s <= s_max.

    States at position i are pairs (q_i, delta_i); a step picks delta_{i+1}
    (never two consecutive 1s) and p_{i+1} with B_{q_i, p_{i+1}} odd.
    """
    if n < 2 or n % 2:
        raise ChainError("n must be even and positive")
    m = n // 2
    accepting = {}
    counts = {}
    if s_max >= 2:
        accepting[2] = (m & m) == 0
        counts[2] = 0
    # position 1: delta_1 = 0 and B_{m, p_1} odd
    states = {(m - p, 0) for p in range(m + 1) if not (p & m)}
    pos = 1
    while pos + 2 <= s_max:
        s = pos + 2
        if s % 2 == 0:
            accepting[s] = any(not (q & m) for q, _ in states)
            counts[s] = len(states)
        nxt = set()
        for q, d in states:
            for d2 in ((0,) if d else (0, 1)):
                for p in range(m - d2 + 1):
                    if not (q & p):
                        nxt.add((m - d2 - p, d2))
        states = nxt
        pos += 1
    return ParityTrace(n, s_max, accepting, counts, parity_table_digest(m))


def parity_certificate_dp(spec: DComplexSpec) -> bool:
    """True iff no term with delta_1 = 0 has all binomial factors odd."""
    return parity_dp(spec.n, spec.s).certificate(spec.s)


def parity_certificate_brute(spec: DComplexSpec, budget: int = DEFAULT_BUDGET) -> bool:
    for t in expand_obstruction(spec, budget):
        if (not t.deltas or t.deltas[0] == 0) and t.binomial_product % 2:
            return False
    return True


# -- even-to-odd rewriting -----------------------------------------------------------

def is_odd_label(label: tuple) -> bool:
    return label[0] % 2 == 1


def rewrite_even_to_odd(spec: DComplexSpec, c: ChainElement,
                        d: ChainComplex | None = None) -> tuple:
    """Return (c', w) with c' supported on odd labels and c - c' = d(w).

    An even label e with coefficient 2t is cancelled by adding t * d[e + (1, 0, ...)],
    whose other terms all sit on odd labels.
    """
    d = d or d_complex(spec, c.degree + 1, check=False)
    out = dict(c.terms)
    pre: dict = {}
    for lab, v in c.items():
        if is_odd_label(lab):
            continue
        if v % 2:
            raise ChainError(f"odd coefficient {v} on even label {list(lab)}: "
                             "the parity certificate does not hold for this chain")
        t = v // 2
        lift = (lab[0] + 1,) + lab[1:]
        pre[lift] = pre.get(lift, 0) - t
        for k, u in d.boundary_terms(lift).items():
            out[k] = out.get(k, 0) + t * u
    c2 = ChainElement(c.degree, _clean(out, 0), _trusted=True)
    w = ChainElement(c.degree + 1, _clean(pre, 0), _trusted=True)
    if any(not is_odd_label(lab) for lab, _ in c2.items()):
        raise ChainError("rewriting left an even label behind")
    if d.boundary(w) != c - c2:
        raise ChainError("rewriting difference is not the boundary of the recorded preimage")
    return c2, w


# -- decision -------------------------------------------------------------------------

TORSION_RANK_LIMIT = 8000


@dataclass
class NonorientVerdict:
    n: int
    s: int
    r: int | None
    conclusion: str
    torsion: dict
    certificate: bool
    trace: dict
    theorem_scope: bool
    oracle: dict | None = None
    citations: tuple = ()

    def as_dict(self) -> dict:
        d = {"n": self.n, "s": self.s, "r": self.r, "sn": self.s * self.n,
             "conclusion": self.conclusion, "torsion_check": self.torsion,
             "parity_certificate": self.certificate, "trace": self.trace,
             "theorem_scope": self.theorem_scope}
        if self.oracle is not None:
            d["oracle"] = self.oracle
        return d


def torsion_check(spec: DComplexSpec) -> dict:
    """Free rank of H_sn of C~^{(x)s} and of D: computed when small, structural otherwise.

    Both complexes have a C~ tensor factor, which is acyclic over Q, so their
    homology is all torsion; at small scale this is re-derived from F_p ranks.
    """
    deg = spec.s * spec.n
    out = {}
    for name, cx in (("twisted_power", twisted_power(spec.s, deg + 1)),
                     ("D", d_complex(spec, deg + 1, check=False))):
        k = cx.slot_count       # unbounded slots: compositions counted, not listed
        size = comb(deg + k - 1, k - 1) + comb(deg + k, k - 1)
        if size <= TORSION_RANK_LIMIT:
            out[name] = {"method": "rank-mod-p", "free_rank_upper": rational_rank_upper(cx, deg)}
        else:
            out[name] = {"method": "twisted-factor-acyclic-over-Q", "free_rank_upper": 0}
    out["all_torsion"] = all(v["free_rank_upper"] == 0 for v in out.values())
    return out


def decide_nonorientable(spec: DComplexSpec, oracle: bool = False,
                         budget: int = DEFAULT_BUDGET) -> NonorientVerdict:
    tors = torsion_check(spec)
    trace = parity_dp(spec.n, spec.s)
    cert = trace.certificate(spec.s)
    tinfo = {"reachable_states": trace.reachable_states.get(spec.s, 0),
             "accepting": trace.accepting[spec.s],
             "parity_table_digest": trace.table_digest,
             "term_count": term_count(spec)}
    scope = spec.in_theorem_scope
    if tors["all_torsion"] and cert:
        conclusion = "TC_s < sn" if scope else "certificate holds (outside proven range)"
    else:
        conclusion = "inconclusive"
    cites = ("twisted-parity-certificate", "odd-labels-torsion-free") if scope and cert else ()
    verdict = NonorientVerdict(spec.n, spec.s, spec.r, conclusion, tors, cert, tinfo,
                               scope, citations=cites)
    if oracle:
        verdict.oracle = boundary_oracle(spec, budget)
    return verdict


def boundary_oracle(spec: DComplexSpec, budget: int = DEFAULT_BUDGET) -> dict:
    """Solve d x = aggregate over Z in D and check the even-to-odd rewrite."""
    agg = aggregate_obstruction(spec, budget)
    d = d_complex(spec, agg.degree + 1)
    if not d.is_cycle(agg):
        raise ChainError("aggregate obstruction is not a cycle")
    x = is_boundary(d, agg)
    out = {"aggregate_terms": len(agg), "is_boundary": x is not None}
    if x is not None:
        out["preimage_terms"] = len(x)
        out["preimage"] = serialize_chain(x)
    try:
        c2, w = rewrite_even_to_odd(spec, agg, d)
        diff = agg - c2
        out["rewrite"] = {"odd_terms": len(c2),
                          "difference_is_boundary": is_boundary(d, diff) is not None}
    except ChainError as e:
        out["rewrite"] = {"error": str(e)}
    return out
