import random

import pytest
import sympy
from sympy import GF
from sympy.polys.matrices import DomainMatrix
from hypothesis import given, settings, strategies as st

from higher_tc.chains import ChainElement, ChainError, tensor
from higher_tc.cyclic import GroupSpec, complex_c, complex_c_tilde, group_complex
from higher_tc.smith import (boundary_residue, homology, is_boundary, is_boundary_mod_p,
                             rank_mod_p, smith_normal_form, solve_mod_p, xgcd)


def _dense(rows, nr, nc):
    return sympy.Matrix(nr, nc, lambda i, j: rows.get(i, {}).get(j, 0))


def _u_matrix(cert):
    cols = []
    for j in range(cert.nrows):
        v = cert.apply_left({j: 1})
        cols.append([v.get(i, 0) for i in range(cert.nrows)])
    return sympy.Matrix(cols).T


def _v_matrix(cert):
    return sympy.Matrix(cert.ncols, cert.ncols,
                        lambda i, j: cert.right.get(j, {j: 1}).get(i, 0))


matrices = st.integers(1, 6).flatmap(lambda nr: st.integers(1, 6).flatmap(
    lambda nc: st.lists(st.lists(st.integers(-9, 9), min_size=nc, max_size=nc),
                        min_size=nr, max_size=nr)))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_snf_certificate(dense):
    nr, nc = len(dense), len(dense[0])
    rows = {i: {j: v for j, v in enumerate(r) if v} for i, r in enumerate(dense)}
    rows = {i: r for i, r in rows.items() if r}
    cert = smith_normal_form(rows, nr, nc)
    a, u, v = _dense(rows, nr, nc), _u_matrix(cert), _v_matrix(cert)
    assert abs(u.det()) == 1 and abs(v.det()) == 1
    d = u * a * v
    piv = {(r, c): dd for r, c, dd in cert.pivots}
    for i in range(nr):
        for j in range(nc):
            assert d[i, j] == piv.get((i, j), 0)
    diag = cert.diagonal
    assert all(x > 0 for x in diag)
    assert all(diag[k + 1] % diag[k] == 0 for k in range(len(diag) - 1))
    assert cert.rank == a.rank()


def test_snf_known():
    # [[2,4,4],[-6,6,12],[10,-4,-16]] has invariant factors 2, 6, 12
    dense = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    rows = {i: {j: v for j, v in enumerate(r)} for i, r in enumerate(dense)}
    assert smith_normal_form(rows, 3, 3).diagonal == [2, 6, 12]


def test_xgcd():
    for _ in range(200):
        a, b = random.randint(-500, 500), random.randint(-500, 500)
        g, x, y = xgcd(a, b)
        assert g >= 0 and a * x + b * y == g and sympy.gcd(a, b) == g


@pytest.mark.parametrize("q", range(2, 7))
def test_homology_cyclic(q):
    c = complex_c(q, 11)
    for k in range(11):
        h = homology(c, k)
        if k == 0:
            assert (h.free_rank, h.torsion) == (1, ())
        elif k % 2:
            assert (h.free_rank, h.torsion) == (0, (q,))
        else:
            assert h.is_zero()


def test_homology_twisted():
    c = complex_c_tilde(13)
    for k in range(13):
        h = homology(c, k)
        assert (h.free_rank, h.torsion) == ((0, (2,)) if k % 2 == 0 else (0, ()))


def test_f3_dimensions():
    c = group_complex(GroupSpec((3, 3)), 9)
    assert [homology(c, k, modulus=3).dimension for k in range(9)] == list(range(1, 10))


@pytest.mark.parametrize("q,p", [(2, 2), (4, 2), (3, 3), (6, 3), (6, 2)])
def test_kunneth_field_count(q, p):
    c = tensor(complex_c(q, 9), complex_c(q, 9))
    for k in range(9):
        # each factor has dimension 1 in every degree over F_p when p | q
        assert homology(c, k, modulus=p).dimension == k + 1


def test_degree_guard():
    with pytest.raises(ChainError):
        homology(complex_c(2, 5), 5)


def test_boundary_examples():
    ct = complex_c_tilde(14)
    x = is_boundary(ct, ChainElement.basis((12,), 20))
    assert x == ChainElement.basis((13,), -10)
    assert is_boundary(ct, ChainElement.zero(12)) == ChainElement.zero(13)
    c3 = complex_c(3, 4)
    z = ChainElement.basis((1,))
    assert is_boundary(c3, z) is None
    assert boundary_residue(c3, z)
    assert is_boundary_mod_p(c3, z, 3) is None
    assert is_boundary_mod_p(c3, z, 2) is not None


def test_non_cycle_rejected():
    with pytest.raises(ChainError, match=r"\[1\]"):
        is_boundary(complex_c(3, 6), ChainElement.basis((2,)))


def test_boundary_preimages_verified():
    c = group_complex(GroupSpec((2, 4)), 8)
    rng = random.Random(5)
    for k in range(2, 7):
        for _ in range(5):
            x = ChainElement(k, {lab: rng.randint(-3, 3) for lab in c.basis(k)})
            z = c.boundary(x)
            y = is_boundary(c, z)
            assert y is not None and c.boundary(y) == z


def test_mod_p_solver():
    rows = {0: {0: 1, 1: 2}, 1: {1: 3}}
    assert rank_mod_p(rows, 2, 3) == 1
    assert rank_mod_p(rows, 2, 5) == 2
    x = solve_mod_p(rows, 2, {0: 1, 1: 1}, 5)
    assert (x.get(0, 0) + 2 * x.get(1, 0)) % 5 == 1 and (3 * x.get(1, 0)) % 5 == 1
    assert solve_mod_p(rows, 2, {0: 1, 1: 1}, 3) is None


@settings(max_examples=60, deadline=None)
@given(matrices, st.sampled_from([2, 3, 5, 7]), st.randoms())
def test_mod_p_solutions_verify(dense, p, rnd):
    nr, nc = len(dense), len(dense[0])
    rows = {i: {j: v for j, v in enumerate(r) if v} for i, r in enumerate(dense)}
    x0 = [rnd.randrange(p) for _ in range(nc)]
    rhs = {i: sum(v * x0[j] for j, v in r.items()) % p for i, r in rows.items()}
    x = solve_mod_p(rows, nc, rhs, p)
    assert x is not None
    for i, r in rows.items():
        assert sum(v * x.get(j, 0) for j, v in r.items()) % p == rhs[i]
    dm = DomainMatrix([[GF(p)(v) for v in r] for r in dense], (nr, nc), GF(p))
    assert rank_mod_p(rows, nc, p) == dm.rank()
