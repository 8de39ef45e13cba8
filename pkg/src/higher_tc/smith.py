"""Sparse Smith normal form over Z, ranks over F_p, homology and boundary solving."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from math import gcd

from .chains import ChainComplex, ChainElement, ChainError, _clean, label_str


def xgcd(a: int, b: int) -> tuple:
    """Return (g, u, v) with u*a + v*b == g == gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@dataclass
class SmithCertificate:
    """U A V = D with D supported on ``pivots`` and d_1 | d_2 | ...

    ``row_ops`` is the sequence of unimodular row operations whose product
    is U (``apply_left`` replays it on a vector); ``right`` holds the columns
    of V as sparse dicts.
    """

    nrows: int
    ncols: int
    pivots: list                      # (row, col, d) in divisibility order
    row_ops: list = field(repr=False)
    right: dict = field(repr=False)

    @property
    def diagonal(self) -> list:
        return [d for _, _, d in self.pivots]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def torsion(self) -> list:
        return [d for d in self.diagonal if d > 1]

    def apply_left(self, vec: dict) -> dict:
        v = dict(vec)
        for op in self.row_ops:
            kind = op[0]
            if kind == "add":          # row dst += q * row src
                _, src, dst, q = op
                x = v.get(src, 0)
                if x:
                    v[dst] = v.get(dst, 0) + q * x
            elif kind == "lin":        # (r1, r2) <- (a r1 + b r2, c r1 + d r2)
                _, r1, r2, a, b, c, d = op
                x, y = v.get(r1, 0), v.get(r2, 0)
                v[r1], v[r2] = a * x + b * y, c * x + d * y
            else:                      # negate row
                _, r = op
                if r in v:
                    v[r] = -v[r]
        return {k: x for k, x in v.items() if x}

    def solve(self, rhs: dict) -> dict | None:
        """Integer x with A x = rhs, or None if no integer solution exists."""
        w = self.apply_left(rhs)
        y = {}
        pivot_rows = {}
        for r, c, d in self.pivots:
            pivot_rows[r] = (c, d)
        for r, val in w.items():
            if r not in pivot_rows:
                return None
            c, d = pivot_rows[r]
            if val % d:
                return None
            y[c] = val // d
        x: dict = {}
        for c, yc in y.items():
            for k, v in self.right.get(c, {c: 1}).items():
                x[k] = x.get(k, 0) + yc * v
        return {k: v for k, v in x.items() if v}

    def residue(self, rhs: dict) -> dict:
        """Obstruction to solvability: entries of U*rhs not killed by D."""
        w = self.apply_left(rhs)
        piv = {r: d for r, _, d in self.pivots}
        out = {}
        for r, val in w.items():
            d = piv.get(r)
            if d is None:
                out[r] = val
            elif val % d:
                out[r] = val % d
        return out


class _Sparse:
    """Row- and column-indexed sparse integer matrix under elimination."""

    def __init__(self, rows: dict, ncols: int, track: bool):
        self.rows = {r: dict(cs) for r, cs in rows.items() if cs}
        self.cols: dict = {}
        for r, cs in self.rows.items():
            for c, v in cs.items():
                self.cols.setdefault(c, {})[r] = v
        self.track = track
        self.ops: list = []
        self.right: dict = {}

    def _set(self, r, c, v):
        if v:
            self.rows.setdefault(r, {})[c] = v
            self.cols.setdefault(c, {})[r] = v
        else:
            row = self.rows.get(r)
            if row is not None and c in row:
                del row[c]
                if not row:
                    del self.rows[r]
            col = self.cols.get(c)
            if col is not None and r in col:
                del col[r]
                if not col:
                    del self.cols[c]

    def row_add(self, src, dst, q):
        for c, v in list(self.rows.get(src, {}).items()):
            self._set(dst, c, self.rows.get(dst, {}).get(c, 0) + q * v)
        if self.track:
            self.ops.append(("add", src, dst, q))

    def row_lin(self, r1, r2, a, b, c, d):
        row1 = dict(self.rows.get(r1, {}))
        row2 = dict(self.rows.get(r2, {}))
        for col in set(row1) | set(row2):
            x, y = row1.get(col, 0), row2.get(col, 0)
            self._set(r1, col, a * x + b * y)
            self._set(r2, col, c * x + d * y)
        if self.track:
            self.ops.append(("lin", r1, r2, a, b, c, d))

    def _vcol(self, c):
        return self.right.get(c, {c: 1})

    def col_add(self, src, dst, q):
        for r, v in list(self.cols.get(src, {}).items()):
            self._set(r, dst, self.cols.get(dst, {}).get(r, 0) + q * v)
        if self.track:
            vd = dict(self._vcol(dst))
            for k, v in self._vcol(src).items():
                vd[k] = vd.get(k, 0) + q * v
            self.right[dst] = {k: v for k, v in vd.items() if v}

    def col_lin(self, c1, c2, a, b, c, d):
        """(C1, C2) <- (a C1 + b C2, c C1 + d C2)."""
        col1 = dict(self.cols.get(c1, {}))
        col2 = dict(self.cols.get(c2, {}))
        for r in set(col1) | set(col2):
            x, y = col1.get(r, 0), col2.get(r, 0)
            self._set(r, c1, a * x + b * y)
            self._set(r, c2, c * x + d * y)
        if self.track:
            v1, v2 = self._vcol(c1), self._vcol(c2)
            n1, n2 = {}, {}
            for k in set(v1) | set(v2):
                x, y = v1.get(k, 0), v2.get(k, 0)
                if a * x + b * y:
                    n1[k] = a * x + b * y
                if c * x + d * y:
                    n2[k] = c * x + d * y
            self.right[c1], self.right[c2] = n1, n2


def _pick_pivot(m: _Sparse, col):
    best = None
    for r, v in m.cols[col].items():
        key = (abs(v), len(m.rows[r]), r)
        if best is None or key < best[0]:
            best = (key, r)
    return best[1]


def smith_normal_form(rows: dict, nrows: int, ncols: int, track: bool = True) -> SmithCertificate:
    """Smith normal form of a sparse integer matrix ``{row: {col: value}}``.

    Pivots are chosen column-by-column, sparsest column first, smallest
    entry (then shortest row) within it.  The divisibility chain of the
    resulting diagonal is asserted before returning.
    """
    m = _Sparse(rows, ncols, track)
    pivots = []
    heap = [(len(cs), c) for c, cs in m.cols.items()]
    heapq.heapify(heap)
    while heap:
        n, col = heapq.heappop(heap)
        cs = m.cols.get(col)
        if not cs:
            continue
        if len(cs) != n:
            heapq.heappush(heap, (len(cs), col))
            continue
        r = _pick_pivot(m, col)
        c = col
        while True:
            a = m.rows[r][c]
            # clear the pivot column
            for k, b in list(m.cols.get(c, {}).items()):
                if k == r:
                    continue
                a = m.rows[r][c]
                if b % a == 0:
                    m.row_add(r, k, -(b // a))
                else:
                    g, u, v = xgcd(a, b)
                    m.row_lin(r, k, u, v, -b // g, a // g)
            a = m.rows[r][c]
            # clear the pivot row
            dirty = False
            for l, b in list(m.rows[r].items()):
                if l == c:
                    continue
                a = m.rows[r][c]
                if b % a == 0:
                    m.col_add(c, l, -(b // a))
                else:
                    g, u, v = xgcd(a, b)
                    m.col_lin(c, l, u, v, -b // g, a // g)
                    dirty = True
            if not dirty or len(m.cols.get(c, {})) == 1:
                break
        assert len(m.rows[r]) == 1 and len(m.cols[c]) == 1
        pivots.append([r, c, m.rows[r][c]])
        # detach the pivot so it is not picked again
        del m.rows[r]
        del m.cols[c]
    pivots = _normalize(pivots, m)
    ds = [d for _, _, d in pivots]
    for x, y in zip(ds, ds[1:]):
        assert x > 0 and y % x == 0, "Smith diagonal lost the divisibility chain"
    return SmithCertificate(nrows, ncols, [tuple(p) for p in pivots], m.ops, m.right)


def _normalize(pivots: list, m: _Sparse) -> list:
    """Turn a pivot diagonal into a divisibility chain with positive entries."""
    for p in pivots:
        if p[2] < 0:
            p[2] = -p[2]
            if m.track:
                m.ops.append(("neg", p[0]))
    pivots.sort(key=lambda p: (p[2], p[0]))
    n = len(pivots)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = pivots[i][2], pivots[j][2]
            if b % a == 0:
                continue
            g, u, v = xgcd(a, b)
            ri, ci = pivots[i][0], pivots[i][1]
            rj, cj = pivots[j][0], pivots[j][1]
            if m.track:
                m.ops.append(("lin", ri, rj, u, v, -b // g, a // g))
                # V <- V * [[1, -v b/g], [1, u a/g]]
                vi, vj = m._vcol(ci), m._vcol(cj)
                n1, n2 = {}, {}
                for k in set(vi) | set(vj):
                    x, y = vi.get(k, 0), vj.get(k, 0)
                    if x + y:
                        n1[k] = x + y
                    t = (-v * b // g) * x + (u * a // g) * y
                    if t:
                        n2[k] = t
                m.right[ci], m.right[cj] = n1, n2
            pivots[i][2] = g
            pivots[j][2] = a * b // g
    return pivots


def rank_mod_p(rows: dict, ncols: int, p: int) -> int:
    """Rank over F_p of a sparse integer matrix."""
    work = {}
    for r, cs in rows.items():
        row = {c: v % p for c, v in cs.items() if v % p}
        if row:
            work[r] = row
    rank = 0
    pivot_of: dict = {}       # col -> reduced row with leading entry 1 at col
    for r in sorted(work, key=lambda r: len(work[r])):
        row = work[r]
        while row:
            c = min(row)
            prow = pivot_of.get(c)
            if prow is None:
                inv = pow(row[c], -1, p)
                pivot_of[c] = {k: v * inv % p for k, v in row.items()}
                rank += 1
                break
            f = row[c]
            for k, v in prow.items():
                nv = (row.get(k, 0) - f * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return rank


def solve_mod_p(rows: dict, ncols: int, rhs: dict, p: int) -> dict | None:
    """A solution x of A x = rhs over F_p (dict col -> value) or None."""
    # work on columns of the augmented system via row reduction of [A | b]
    eqs = {}
    for r, cs in rows.items():
        eqs[r] = {c: v % p for c, v in cs.items() if v % p}
    for r, v in rhs.items():
        eqs.setdefault(r, {})["rhs"] = v % p
    pivots: list = []         # (col, row-dict) in elimination order
    by_col: dict = {}
    for r in sorted(eqs, key=lambda r: len(eqs[r])):
        row = {k: v for k, v in eqs[r].items() if v}
        while True:
            cols = [k for k in row if k != "rhs"]
            if not cols:
                if row.get("rhs", 0):
                    return None
                break
            c = min(cols)
            prow = by_col.get(c)
            if prow is None:
                inv = pow(row[c], -1, p)
                row = {k: v * inv % p for k, v in row.items()}
                by_col[c] = row
                pivots.append(c)
                break
            f = row[c]
            for k, v in prow.items():
                nv = (row.get(k, 0) - f * v) % p
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    x: dict = {}
    # a pivot row only has entries right of its pivot column
    for c in sorted(pivots, reverse=True):
        row = by_col[c]
        val = row.get("rhs", 0)
        for k, v in row.items():
            if k != "rhs" and k != c:
                val -= v * x.get(k, 0)
        val %= p
        if val:
            x[c] = val
    return x


@dataclass(frozen=True)
class HomologyGroup:
    """Z^free (+) Z/t1 (+) Z/t2 ...; over F_p only ``dimension`` is meaningful."""

    free_rank: int
    torsion: tuple = ()
    modulus: int = 0

    @property
    def dimension(self) -> int:
        return self.free_rank

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        if self.modulus:
            return f"F_{self.modulus}^{self.free_rank}"
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z_{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


def boundary_snf(c: ChainComplex, degree: int, track: bool = True) -> SmithCertificate:
    """Smith form of d: C_degree -> C_{degree-1} (memoised on the complex)."""
    key = (degree, track)
    cert = c._snf_cache.get(key) or c._snf_cache.get((degree, True))
    if cert is None:
        rows, nr, nc = c.boundary_matrix(degree)
        cert = smith_normal_form(rows, nr, nc, track=track)
        c._snf_cache[key] = cert
    return cert


def homology(c: ChainComplex, k: int, modulus: int = 0) -> HomologyGroup:
    """H_k(C) over Z (modulus 0) or its dimension over F_p."""
    if k < 0:
        raise ChainError("homology degree must be non-negative")
    if k > c.max_degree - 1:
        raise ChainError(f"H_{k} needs the complex built through degree {k + 1} "
                         f"(max_degree={c.max_degree})")
    dim = c.rank(k)
    if modulus:
        rk = rank_mod_p(*c.boundary_matrix(k)[::2], modulus) if k > 0 else 0
        rows, _, ncols = c.boundary_matrix(k + 1)
        rk1 = rank_mod_p(rows, ncols, modulus)
        return HomologyGroup(dim - rk - rk1, (), modulus)
    rk = boundary_snf(c, k, track=False).rank if k > 0 else 0
    cert = boundary_snf(c, k + 1, track=False)
    return HomologyGroup(dim - rk - cert.rank, tuple(cert.torsion))


def rational_rank_upper(c: ChainComplex, k: int, p: int = 2_147_483_647) -> int:
    """An upper bound for rank H_k(C; Q) from ranks over F_p (rank_p <= rank_Q).

    A returned 0 certifies that H_k(C; Z) is all torsion.
    """
    dim = c.rank(k)
    rk = rank_mod_p(*c.boundary_matrix(k)[::2], p) if k > 0 else 0
    rows, _, ncols = c.boundary_matrix(k + 1)
    return dim - rk - rank_mod_p(rows, ncols, p)


def _vector(c: ChainComplex, z: ChainElement) -> dict:
    index = {lab: i for i, lab in enumerate(c.basis(z.degree))}
    vec = {}
    for lab, v in z.items():
        if lab not in index:
            raise ChainError(f"label {label_str(lab)} is not a basis element of {c.name}")
        vec[index[lab]] = v
    return vec


def _require_cycle(c: ChainComplex, z: ChainElement):
    if z.degree + 1 > c.max_degree:
        raise ChainError(f"complex must be built through degree {z.degree + 1}")
    dz = c.boundary(z)
    if dz:
        lab, v = next(iter(dz))
        raise ChainError(f"not a cycle: boundary has coefficient {v} on {label_str(lab)}")


def is_boundary(c: ChainComplex, z: ChainElement) -> ChainElement | None:
    """A chain x with d x == z over Z, or None when z is not an integral boundary."""
    _require_cycle(c, z)
    if not z:
        return ChainElement.zero(z.degree + 1)
    cert = boundary_snf(c, z.degree + 1)
    sol = cert.solve(_vector(c, z))
    if sol is None:
        return None
    src = c.basis(z.degree + 1)
    x = ChainElement(z.degree + 1, {src[j]: v for j, v in sol.items()}, _trusted=True)
    assert c.boundary(x) == z, "boundary solve failed verification"
    return x


def boundary_residue(c: ChainComplex, z: ChainElement) -> dict:
    """Non-zero residue of z in the Smith basis (empty iff z is a boundary)."""
    _require_cycle(c, z)
    cert = boundary_snf(c, z.degree + 1)
    return cert.residue(_vector(c, z))


def is_boundary_mod_p(c: ChainComplex, z: ChainElement, p: int) -> ChainElement | None:
    """A chain x with d x == z over F_p, or None."""
    if z.degree + 1 > c.max_degree:
        raise ChainError(f"complex must be built through degree {z.degree + 1}")
    zp = ChainElement(z.degree, _clean(z._terms, p), p, _trusted=True)
    dz = ChainElement(z.degree - 1, _clean(c.boundary(zp)._terms, p), p, _trusted=True)
    if dz:
        lab, v = next(iter(dz))
        raise ChainError(f"not a cycle mod {p}: coefficient {v} on {label_str(lab)}")
    if not zp:
        return ChainElement.zero(z.degree + 1, p)
    rows, _, ncols = c.boundary_matrix(z.degree + 1)
    sol = solve_mod_p(rows, ncols, _vector(c, zp), p)
    if sol is None:
        return None
    src = c.basis(z.degree + 1)
    x = ChainElement(z.degree + 1, {src[j]: v for j, v in sol.items()}, p)
    assert c.boundary(x) == zp, "mod-p boundary solve failed verification"
    return x


def gcd_all(values) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g
