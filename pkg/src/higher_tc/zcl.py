"""F_p cohomology rings of projective and lens spaces, their tensor powers, and
zero-divisor cup-length search.

Elements of the s-fold tensor power are dense numpy arrays of shape (d,)*s
(d = dimension of the base ring).  Products carry the Koszul sign
(a_1 (x) ... (x) a_s)(b_1 (x) ... (x) b_s) = (-1)^{sum_j |b_j| sum_{i>j} |a_i|} (a_1 b_1) (x) ... (x) (a_s b_s).

The search works level by level: V_1 = span(pool), V_{l+1} = span(pool . V_l),
keeping only genuine products (with their factor lists) as spanning vectors.
Since products are multilinear, span(V_l) is the span of all l-fold products
from span(pool), so the largest l with V_l != 0 is exactly the zero-divisor
cup length relative to that subspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

MAX_ENTRIES = 1 << 24


class RingError(ValueError):
    pass


@dataclass(frozen=True)
class GradedRingSpec:
    """A monomial basis with degrees and a structure-constant table over F_p."""

    name: str
    p: int
    degrees: tuple
    labels: tuple
    table: tuple = field(repr=False)     # table[a][b] = (c, coeff) or None

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @property
    def top_degree(self) -> int:
        return max(self.degrees)


def projective_ring(n: int, p: int = 2) -> GradedRingSpec:
    """H*(RP^n; F_2) = F_2[x]/(x^{n+1}), |x| = 1."""
    if p != 2:
        raise RingError("the projective-space ring is only modelled over F_2")
    if n < 1:
        raise RingError("n must be positive")
    table = tuple(tuple((a + b, 1) if a + b <= n else None for b in range(n + 1))
                  for a in range(n + 1))
    return GradedRingSpec(f"P^{n}", 2, tuple(range(n + 1)),
                          tuple(f"x^{i}" for i in range(n + 1)), table)


def lens_ring(n: int, p: int) -> GradedRingSpec:
    """H*(L^{2n+1}_p; F_p) = F_p[x, y]/(x^2, y^{n+1}), |x| = 1, |y| = 2 (p odd)."""
    if p < 3 or any(p % k == 0 for k in range(2, int(p ** 0.5) + 1)):
        raise RingError(f"lens rings need an odd prime, got {p}")
    if n < 0:
        raise RingError("n must be non-negative")
    basis = [(a, b) for b in range(n + 1) for a in (0, 1)]
    index = {m: i for i, m in enumerate(basis)}
    table = []
    for a1, b1 in basis:
        row = []
        for a2, b2 in basis:
            if a1 + a2 > 1 or b1 + b2 > n:
                row.append(None)
            else:
                # x^a1 y^b1 x^a2 y^b2 = x^(a1+a2) y^(b1+b2): y is even, no sign
                row.append((index[(a1 + a2, b1 + b2)], 1))
        table.append(tuple(row))
    labels = tuple(("x" if a else "") + (f"y^{b}" if b else "") or "1" for a, b in basis)
    return GradedRingSpec(f"L^{2 * n + 1}_{p}", p, tuple(a + 2 * b for a, b in basis),
                          labels, tuple(table))


class TensorPower:
    """The s-fold graded tensor power of a ring, with products and the cup map."""

    def __init__(self, ring: GradedRingSpec, s: int):
        if s < 2:
            raise RingError("s must be at least 2")
        if ring.dim ** s > MAX_ENTRIES:
            raise RingError(f"tensor power has {ring.dim}^{s} entries (limit {MAX_ENTRIES})")
        self.ring, self.s, self.p = ring, s, ring.p
        self.d = ring.dim
        self.shape = (self.d,) * s
        deg = np.array(ring.degrees)
        grids = np.meshgrid(*([deg] * s), indexing="ij")
        self.slot_degrees = grids
        self.degree = sum(grids)
        # suffix degree parity: sum_{i > j} |a_i| mod 2
        suf = np.zeros(self.shape, dtype=np.int64)
        self._suffix = [None] * s
        for j in range(s - 1, -1, -1):
            self._suffix[j] = suf.copy()
            suf = suf + grids[j]
        self._suffix = [x % 2 for x in self._suffix]
        # right multiplication by basis b in one slot: target c <- source src[c] times coef[c]
        self._gather = []
        for b in range(self.d):
            src = np.zeros(self.d, dtype=np.int64)
            coef = np.zeros(self.d, dtype=np.int64)
            for a in range(self.d):
                e = ring.table[a][b]
                if e is not None:
                    if coef[e[0]]:
                        raise RingError("monomial multiplication must be injective on the basis")
                    src[e[0]], coef[e[0]] = a, e[1] % self.p
            self._gather.append((src, coef))
        self._cup_index, self._cup_coeff = self._cup_tables()
        self._degree_cols = {}
        flat = self.degree.ravel()
        for k in range(int(flat.max()) + 1):
            self._degree_cols[k] = np.nonzero(flat == k)[0]

    # -- construction
    def zero(self) -> np.ndarray:
        return np.zeros(self.shape, dtype=np.int64)

    def monomial(self, idx, coeff: int = 1) -> np.ndarray:
        u = self.zero()
        u[tuple(idx)] = coeff % self.p
        return u

    def slot_generator(self, slot: int, basis_index: int) -> np.ndarray:
        idx = [0] * self.s
        idx[slot] = basis_index
        return self.monomial(idx)

    def degree_of(self, u: np.ndarray) -> int | None:
        """Degree of a homogeneous non-zero element (None for 0 or inhomogeneous)."""
        degs = np.unique(self.degree[u % self.p != 0])
        return int(degs[0]) if len(degs) == 1 else None

    # -- products
    def _mul_monomial(self, batch: np.ndarray, b: tuple, coeff: int) -> np.ndarray:
        """batch (shape (k,)+shape) times the monomial b_1 (x) ... (x) b_s."""
        sign_par = np.zeros(self.shape, dtype=np.int64)
        for j, bj in enumerate(b):
            if self.ring.degrees[bj] % 2:
                sign_par = sign_par + self._suffix[j]
        sign = np.where(sign_par % 2, -1, 1) * coeff
        out = batch * sign
        for j, bj in enumerate(b):
            if bj == 0:
                continue
            src, coef = self._gather[bj]
            shape = [1] * out.ndim
            shape[j + 1] = self.d
            out = np.take(out, src, axis=j + 1) * coef.reshape(shape)
        return out % self.p

    def mul_batch(self, batch: np.ndarray, v: np.ndarray) -> np.ndarray:
        out = np.zeros_like(batch)
        for idx in zip(*np.nonzero(v % self.p)):
            out = (out + self._mul_monomial(batch, idx, int(v[idx]))) % self.p
        return out

    def mul(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.mul_batch(u[None], v)[0]

    def product(self, factors) -> np.ndarray:
        it = iter(factors)
        acc = next(it)
        for f in it:
            acc = self.mul(acc, f)
        return acc

    # -- cup map
    def _cup_tables(self):
        tab_idx = np.zeros((self.d, self.d), dtype=np.int64)
        tab_coef = np.zeros((self.d, self.d), dtype=np.int64)
        for a in range(self.d):
            for b in range(self.d):
                e = self.ring.table[a][b]
                if e is not None:
                    tab_idx[a, b], tab_coef[a, b] = e[0], e[1] % self.p
        comps = np.unravel_index(np.arange(self.d ** self.s), self.shape)
        idx = np.zeros(self.d ** self.s, dtype=np.int64)
        coeff = np.ones(self.d ** self.s, dtype=np.int64)
        for a in comps:
            coeff = coeff * tab_coef[idx, a] % self.p
            idx = tab_idx[idx, a]
        return idx, coeff

    def cup_image(self, u: np.ndarray) -> np.ndarray:
        w = (u.ravel() * self._cup_coeff) % self.p
        return np.bincount(self._cup_index, weights=w, minlength=self.d).astype(np.int64) % self.p

    def is_zero_divisor(self, u: np.ndarray) -> bool:
        return not self.cup_image(u).any()

    # -- helpers
    def degree_columns(self, k: int) -> np.ndarray:
        return self._degree_cols.get(k, np.array([], dtype=np.int64))

    def monomials_of_degree(self, k: int) -> list:
        return [tuple(int(x) for x in np.unravel_index(i, self.shape)) for i in self.degree_columns(k)]

    def kernel_basis(self, k: int) -> list:
        """Basis of the degree-k zero divisors (kernel of the cup map)."""
        mons = self.monomials_of_degree(k)
        if not mons:
            return []
        images = np.array([self.cup_image(self.monomial(m)) for m in mons]).T   # d x N
        null = nullspace_mod_p(images, self.p)
        out = []
        for vec in null:
            u = self.zero()
            for m, c in zip(mons, vec):
                if c:
                    u[m] = c
            out.append(u)
        return out

    def format(self, u: np.ndarray) -> str:
        terms = []
        for idx in zip(*np.nonzero(u % self.p)):
            lab = "(x)".join(self.ring.labels[i] for i in idx)
            terms.append(f"{int(u[idx])}*{lab}")
        return " + ".join(terms) or "0"


# -- F_p linear algebra -----------------------------------------------------------

def rref_mod_p(a: np.ndarray, p: int) -> tuple:
    """Reduced row echelon form mod p; returns (matrix, pivot columns)."""
    m = a.copy() % p
    rows, cols = m.shape
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if not len(nz):
            continue
        k = r + nz[0]
        if k != r:
            m[[r, k]] = m[[k, r]]
        m[r] = m[r] * pow(int(m[r, c]), -1, p) % p
        f = m[:, c].copy()
        f[r] = 0
        m = (m - np.outer(f, m[r])) % p
        piv.append(c)
        r += 1
    return m[:r], piv


def nullspace_mod_p(a: np.ndarray, p: int) -> list:
    rows, cols = a.shape
    red, piv = rref_mod_p(a, p)
    free = [c for c in range(cols) if c not in piv]
    out = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(piv):
            v[c] = (-red[i, f]) % p
        out.append(v)
    return out


class Echelon:
    """Incrementally maintained RREF basis of a subspace of F_p^cols.

    Reductions use float64 matrix products (exact while rank * p^2 < 2^53).
    """

    CHUNK = 256

    def __init__(self, cols: int, p: int):
        if cols * p * p >= 1 << 53:
            raise RingError("matrix too large for exact float64 reduction")
        self.p = p
        self.rows = np.zeros((0, cols), dtype=np.float64)
        self.pivots: list = []

    def reduce(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if not self.pivots:
            return np.mod(x, self.p)
        return np.mod(x - x[:, self.pivots] @ self.rows, self.p)

    def _insert(self, row: np.ndarray, c: int) -> np.ndarray:
        p = self.p
        row = np.mod(row * pow(int(row[c]), -1, p), p)
        if len(self.rows):
            self.rows = np.mod(self.rows - np.outer(self.rows[:, c], row), p)
        self.rows = np.vstack([self.rows, row])
        self.pivots.append(c)
        return row

    def add_batch(self, x: np.ndarray) -> list:
        """Insert rows of x in order; return indices of the independent ones."""
        kept = []
        for start in range(0, len(x), self.CHUNK):
            res = self.reduce(x[start:start + self.CHUNK])
            live = np.nonzero(res.any(axis=1))[0]
            while len(live):
                i = int(live[0])
                c = int(np.nonzero(res[i])[0][0])
                row = self._insert(res[i], c)
                kept.append(start + i)
                rest = live[1:]
                if not len(rest):
                    break
                sub = res[rest]
                sub = np.mod(sub - np.outer(sub[:, c], row), self.p)
                res[rest] = sub
                live = rest[sub.any(axis=1)]
        return kept

    @property
    def rank(self) -> int:
        return len(self.pivots)


# -- pools and search -----------------------------------------------------------------

def default_pool(tp: TensorPower) -> list:
    """Degree-1 zero divisors and degree-2 monomial differences with equal cup image.

    Over F_2 the degree-1 part is every even-weight sum of slot generators;
    otherwise it is the set of equal-image differences in degree 1.
    """
    pool = []
    ring = tp.ring
    deg1 = [b for b in range(ring.dim) if ring.degrees[b] == 1]
    if tp.p == 2:
        for b in deg1:
            for k in range(2, tp.s + 1, 2):
                for slots in combinations(range(tp.s), k):
                    u = tp.zero()
                    for j in slots:
                        u = u + tp.slot_generator(j, b)
                    pool.append(u % 2)
    else:
        pool += equal_image_differences(tp, 1)
    pool += equal_image_differences(tp, 2)
    return pool


def equal_image_differences(tp: TensorPower, k: int) -> list:
    """c' m - c m' for monomials of degree k with images c e, c' e; image-zero monomials as is."""
    groups: dict = {}
    out = []
    for m in tp.monomials_of_degree(k):
        img = tp.cup_image(tp.monomial(m))
        nz = np.nonzero(img)[0]
        if not len(nz):
            out.append(tp.monomial(m))
            continue
        groups.setdefault(tuple(nz), []).append((m, img))
    for members in groups.values():
        m0, i0 = members[0]
        e = int(np.nonzero(i0)[0][0])
        for m, img in members[1:]:
            out.append((tp.monomial(m, int(i0[e])) - tp.monomial(m0, int(img[e]))) % tp.p)
    return out


@dataclass
class ZclResult:
    length: int
    witness: list            # factor indices into the pool
    levels: list             # dim span of l-fold products, l = 1, 2, ...
    pool_size: int
    capped: bool = False

    def as_dict(self) -> dict:
        return {"length": self.length, "witness": list(self.witness),
                "level_dims": list(self.levels), "pool_size": self.pool_size,
                "capped": self.capped}


def search_zcl_lower(tp: TensorPower, pool: list | None = None,
                     target_length: int | None = None) -> ZclResult:
    """Longest non-zero product of pool elements (all validated as zero divisors)."""
    pool = default_pool(tp) if pool is None else pool
    if not pool:
        raise RingError("empty zero-divisor pool")
    degs = []
    for i, u in enumerate(pool):
        d = tp.degree_of(u)
        if d is None:
            raise RingError(f"pool element {i} is zero or not homogeneous")
        if not tp.is_zero_divisor(u):
            raise RingError(f"pool element {i} is not a zero divisor: {tp.format(u)}")
        degs.append(d)
    cap = target_length if target_length is not None else tp.s * tp.ring.top_degree
    flat = tp.d ** tp.s
    # only span(pool) matters: keep an independent subset per degree
    level = _independent(tp, [(pool[i].ravel(), (i,), degs[i]) for i in range(len(pool))])
    basis = [w[0] for _, w, _ in level]
    dims = [len(level)]
    best = level[0][1] if level else ()
    length = 1 if level else 0
    while level and length < cap:
        cands = []
        by_deg: dict = {}
        for vec, wit, d in level:
            by_deg.setdefault(d, []).append((vec, wit))
        for dgr in sorted(by_deg):
            vecs = np.array([v for v, _ in by_deg[dgr]]).reshape((-1,) + tp.shape)
            wits = [w for _, w in by_deg[dgr]]
            for i in basis:
                if dgr + degs[i] > tp.degree.max():
                    continue
                prods = tp.mul_batch(vecs, pool[i]).reshape(len(wits), flat)
                for row, w in zip(prods, wits):
                    cands.append((row, w + (i,), dgr + degs[i]))
        level = _independent(tp, cands)
        if not level:
            break
        dims.append(len(level))
        length += 1
        best = level[0][1]
    return ZclResult(length, list(best), dims, len(pool), capped=length >= cap and bool(level))


def _independent(tp: TensorPower, cands: list) -> list:
    """Keep, per degree and in input order, a maximal linearly independent subset."""
    by_deg: dict = {}
    for vec, wit, d in cands:
        by_deg.setdefault(d, []).append((vec, wit))
    out = []
    for d in sorted(by_deg):
        cols = tp.degree_columns(d)
        items = by_deg[d]
        mat = np.array([v[cols] for v, _ in items], dtype=np.float64)
        ech = Echelon(len(cols), tp.p)
        for i in ech.add_batch(mat):
            out.append((items[i][0], items[i][1], d))
    return out


def validate_witness(tp: TensorPower, pool: list, witness: list) -> bool:
    """Each factor is a zero divisor and the product (recomputed) is non-zero."""
    if not witness:
        return True
    if not all(tp.is_zero_divisor(pool[i]) for i in witness):
        return False
    return bool(tp.product([pool[i] for i in witness]).any())


def full_kernel_pool(tp: TensorPower) -> list:
    pool = []
    for k in range(1, int(tp.degree.max()) + 1):
        pool += tp.kernel_basis(k)
    return pool


def exhaustive_zcl_tiny(tp: TensorPower) -> ZclResult:
    """Exact zero-divisor cup length from full kernel bases (total dimension <= 100)."""
    if tp.d ** tp.s > 100:
        raise RingError(f"exhaustive search limited to total dimension 100, got {tp.d ** tp.s}")
    pool = full_kernel_pool(tp)
    if not pool:
        return ZclResult(0, [], [], 0)
    return search_zcl_lower(tp, pool)


def brute_force_zcl(tp: TensorPower) -> int:
    """Enumerate every homogeneous zero divisor and every product (tiny rings only)."""
    if tp.p ** (tp.d ** tp.s) > 1 << 16:
        raise RingError("brute force is only for rings with at most 2^16 elements")
    elems = []
    for k in range(1, int(tp.degree.max()) + 1):
        mons = tp.monomials_of_degree(k)
        for coeffs in product(range(tp.p), repeat=len(mons)):
            if not any(coeffs):
                continue
            u = tp.zero()
            for m, c in zip(mons, coeffs):
                u[m] = c
            if tp.is_zero_divisor(u):
                elems.append(u)
    best = 0
    frontier = [tp.monomial([0] * tp.s)]
    length = 0
    while frontier:
        seen = set()
        nxt = []
        for f in frontier:
            for e in elems:
                v = tp.mul(f, e)
                key = v.tobytes()
                if v.any() and key not in seen:
                    seen.add(key)
                    nxt.append(v)
        if not nxt:
            break
        length += 1
        best = length
        frontier = nxt
    return best
