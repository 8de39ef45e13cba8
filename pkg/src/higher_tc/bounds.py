"""Closed-form bounds for TC_s and the per-s report assembly."""

from __future__ import annotations

from dataclasses import dataclass, field

from .binary import binom_big, m_defect
from .chains import ChainError
from .cyclic import GroupSpec
from .nonorientable import DComplexSpec, decide_nonorientable
from .orientable import (EQUAL, LESS, FundamentalClassSpec, decide_orientable,
                         default_class, free_times_cyclic_vanishing, parse_class,
                         power_complex)
from .smith import homology
from .zcl import TensorPower, projective_ring, search_zcl_lower

CITATIONS = {
    "dimension-bound": "TC_s(X) <= s dim X for a closed manifold X",
    "projective-zcl-pullback": "pi_1 = Z_2 and cat = dim n give TC_s(M) >= zcl_s(P^n; F_2) = sn - m_{n,s} (s >= 3)",
    "cyclic-vanishing": "orientable with pi_1 = Z_q: the obstruction chain vanishes, so TC_s < sn",
    "free-abelian-vanishing": "pi_1 = Z^r and sn > (s-1)r: H_sn(Z^{r(s-1)}) = 0, so TC_s < sn",
    "free-times-cyclic-vanishing": "pi_1 = Z^r x Z_q with r < n: the obstruction chain vanishes, so TC_s < sn",
    "twisted-parity-certificate": "non-orientable, pi_1 = Z_2, n = 2^(r+1) - 2, even s <= n: "
                                  "odd-coefficient DP plus torsion-free odd labels give TC_s < sn",
    "odd-labels-torsion-free": "classes spanned by odd labels of D form a torsion-free subgroup",
    "lens-weighted-bound": "pi_1 = Z_p, orientable, cat = dim = 2n+1: lens-space weighted "
                           "zero-divisor bound over admissible (l, l')",
    "nonzero-obstruction-maximality": "a non-zero obstruction class with trivial coefficients gives TC_s = sn",
    "vanishing-obstruction": "the obstruction for the given class is zero in homology, so TC_s < sn",
    "zcl-search": "an explicit non-zero product of zero divisors certifies the lower bound",
    "no-theorem": "no covered family applies; only generic bounds",
}


def davis_zcl(n: int, s: int) -> int:
    """zcl_s(P^n; F_2) = sn - m_{n,s} (s >= 3)."""
    if s < 3:
        raise ValueError("the closed form needs s >= 3")
    return s * n - m_defect(n, s)


def lens_admissible(l1: int, l2: int, p: int, s: int, divisor: str = "p") -> bool:
    """D does not divide C(l1+l2, l1)^floor(s/2), with D = p (default) or D = s."""
    if divisor not in ("p", "s"):
        raise ValueError(f"unknown divisor reading {divisor!r}")
    d = p if divisor == "p" else s
    return pow(binom_big(l1, l2), s // 2, d) != 0


def lens_lower_bound(p: int, n: int, s: int, divisor: str = "p") -> tuple:
    """(bound, l, l') maximising the lens bound; ties keep the lexicographically least pair."""
    if p < 3 or any(p % k == 0 for k in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"p must be an odd prime, got {p}")
    if s < 2:
        raise ValueError("s must be at least 2")
    best = None
    for l1 in range(n + 1):
        for l2 in range(n + 1):
            if not lens_admissible(l1, l2, p, s, divisor):
                continue
            if s % 2 == 0:
                v = s * (l1 + l2 + 1) - 1
            else:
                v = (s - 1) * (l1 + l2) + s + 2 * n - 1
            if best is None or v > best[0]:
                best = (v, l1, l2)
    if best is None:
        raise ValueError("no admissible (l, l') pair")
    return best


@dataclass(frozen=True)
class ManifoldSpec:
    group: GroupSpec
    dim: int
    orientable: bool = True
    cat_max: bool = True
    fundamental_class: str | None = None

    def as_dict(self) -> dict:
        d = {"group": self.group.name, "dim": self.dim, "orientable": self.orientable,
             "cat_equals_dim": self.cat_max}
        if self.fundamental_class is not None:
            d["class"] = self.fundamental_class
        return d


@dataclass
class BoundRow:
    s: int
    lower: int
    lower_cite: str
    upper: int
    upper_cite: str
    notes: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def as_dict(self) -> dict:
        d = {"s": self.s, "lower": self.lower, "upper": self.upper, "exact": self.exact,
             "citations": [self.lower_cite, self.upper_cite]}
        if self.exact:
            d["value"] = self.lower
        if self.notes:
            d["notes"] = list(self.notes)
        return d


@dataclass
class BoundReport:
    manifold: ManifoldSpec
    family: str
    rows: list

    def as_dict(self) -> dict:
        cites = sorted({c for r in self.rows for c in (r.lower_cite, r.upper_cite)})
        return {"manifold": self.manifold.as_dict(), "family": self.family,
                "rows": [r.as_dict() for r in self.rows],
                "citations": {c: CITATIONS[c] for c in cites}}

    def tsv(self) -> str:
        lines = ["s\tlower\tupper\texact\tcitations"]
        for r in self.rows:
            lines.append(f"{r.s}\t{r.lower}\t{r.upper}\t{'yes' if r.exact else 'no'}\t"
                         f"{r.lower_cite},{r.upper_cite}")
        return "\n".join(lines) + "\n"


def classify(m: ManifoldSpec) -> str:
    f = m.group.factors
    if f == (2,):
        return "Z2-orientable" if m.orientable else "Z2-nonorientable"
    if len(f) == 1 and f[0] > 2 and m.orientable:
        return "Zp-orientable"
    if m.group.rank == len(f):
        return "free-abelian"
    if m.group.rank and len(m.group.finite_orders) == 1 and m.orientable:
        return "free-times-cyclic"
    if m.fundamental_class is not None and m.orientable:
        return "explicit-class"
    return "uncovered"


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % k for k in range(2, int(p ** 0.5) + 1))


def _zcl_projective_lower(n: int, s: int) -> tuple:
    if s >= 3:
        return davis_zcl(n, s), "projective-zcl-pullback"
    tp = TensorPower(projective_ring(n), s)
    return search_zcl_lower(tp).length, "zcl-search"


def _class_of(m: ManifoldSpec) -> FundamentalClassSpec:
    if m.fundamental_class is None:
        return FundamentalClassSpec(m.group, m.dim, default_class(m.group, m.dim))
    return parse_class(m.group, m.dim, m.fundamental_class)


def report_bounds(m: ManifoldSpec, s_values, divisor: str = "p") -> BoundReport:
    """Per-s lower/upper bounds; upper bounds below sn come from live obstruction checks."""
    fam = classify(m)
    n = m.dim
    rows = []
    for s in s_values:
        if s < 2:
            raise ValueError("s must be at least 2")
        sn = s * n
        row = BoundRow(s, 0, "no-theorem", sn, "dimension-bound")
        if fam in ("Z2-orientable", "Z2-nonorientable") and m.cat_max:
            row.lower, row.lower_cite = _zcl_projective_lower(n, s)
        if fam == "Z2-orientable":
            if n % 2 == 0 and m.cat_max:
                row.notes.append("orientable with cat = dim forces odd dimension")
            v = decide_orientable(_class_of(m), s)
            if v.conclusion == LESS:
                row.upper, row.upper_cite = sn - 1, "cyclic-vanishing"
        elif fam == "Z2-nonorientable":
            if n % 2 == 0 and s % 2 == 0:
                spec = DComplexSpec(n, s)
                if spec.in_theorem_scope:
                    v = decide_nonorientable(spec)
                    if v.conclusion == LESS:
                        row.upper, row.upper_cite = sn - 1, "twisted-parity-certificate"
        elif fam == "Zp-orientable":
            p = m.group.factors[0]
            if n % 2 == 0:
                row.notes.append("lens bounds need odd dimension 2n+1")
            elif _is_prime(p) and m.cat_max:
                k = (n - 1) // 2
                b, l1, l2 = lens_lower_bound(p, k, s, divisor)
                row.lower, row.lower_cite = b, "lens-weighted-bound"
                row.notes.append(f"l={l1}, l'={l2}, divisor={divisor}")
            v = decide_orientable(_class_of(m), s)
            if v.conclusion == LESS:
                row.upper, row.upper_cite = sn - 1, "cyclic-vanishing"
        elif fam == "free-abelian":
            r = m.group.rank
            if sn > (s - 1) * r:
                h = homology(power_complex(m.group, s - 1, sn + 1), sn)
                if h.is_zero():
                    row.upper, row.upper_cite = sn - 1, "free-abelian-vanishing"
        elif fam == "free-times-cyclic":
            r, q = m.group.rank, m.group.finite_orders[0]
            if r < n:
                live = s * n <= 60
                if not live or all(free_times_cyclic_vanishing(r, q, n, s).values()):
                    row.upper, row.upper_cite = sn - 1, "free-times-cyclic-vanishing"
                if not live:
                    row.notes.append("vanishing cited, live chain check skipped at this size")
        elif fam == "explicit-class":
            v = decide_orientable(_class_of(m), s)
            if v.conclusion == EQUAL:
                row.lower, row.lower_cite = sn, "nonzero-obstruction-maximality"
            elif v.conclusion == LESS:
                row.upper, row.upper_cite = sn - 1, "vanishing-obstruction"
        if row.lower > row.upper:
            raise ChainError(f"inconsistent bounds at s={s}: {row.lower} > {row.upper}")
        rows.append(row)
    return BoundReport(m, fam, rows)
