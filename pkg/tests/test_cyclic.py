from math import comb

import pytest
from hypothesis import given, strategies as st

from higher_tc.chains import ChainError, permute_slots, ChainElement, verify_chain_map
from higher_tc.cyclic import (GroupSpec, GroupSpecError, PLAIN, complex_c, complex_c_tilde,
                              complex_free_z, diagonal_map, diagonal_terms, format_group,
                              group_chi_terms, group_complex, group_diagonal_terms,
                              group_product_terms, inversion_coeff, inversion_map,
                              parse_group, pontryagin_map, pontryagin_terms, structure_map)
from higher_tc.smith import homology


def test_group_grammar():
    assert parse_group("Z^2 x Z_4").factors == (0, 0, 4)
    assert parse_group(" Z_3x Z_3 ").factors == (3, 3)
    assert parse_group("Z x Z x Z_2").name == "Z^2 x Z_2"
    for bad in ("", "Z_1", "Q", "Z_3 x", "Z^0"):
        with pytest.raises(GroupSpecError):
            parse_group(bad)


@given(st.lists(st.sampled_from([0, 2, 3, 4, 7, 12]), min_size=1, max_size=5))
def test_group_round_trip(factors):
    g = GroupSpec(tuple(factors))
    assert parse_group(format_group(g)) == g
    assert format_group(parse_group(g.name)) == g.name


def test_complex_c_differential():
    c = complex_c(2, 4)
    assert c.boundary_terms((2,)) == {(1,): 2}
    assert c.boundary_terms((1,)) == {}
    assert homology(complex_c(4, 5), 3).torsion == (4,)


def test_complex_c_tilde_differential():
    ct = complex_c_tilde(4)
    assert ct.boundary_terms((1,)) == {(0,): -2}
    assert ct.boundary_terms((2,)) == {}


def test_free_model():
    z = complex_free_z(3)
    assert z.basis(2) == []
    assert homology(z, 0).free_rank == 1 and homology(z, 1).free_rank == 1
    for r in range(1, 5):
        zr = group_complex(GroupSpec((0,) * r), r + 1)
        for k in range(r + 1):
            assert homology(zr, k).free_rank == comb(r, k)


def test_diagonal_examples():
    assert diagonal_terms(3, 2) == {(0, 2): 1, (1, 1): 3, (2, 0): 1}
    assert diagonal_terms(5, 0) == {(0, 0): 1}
    assert diagonal_terms(2, 6, "twist_right") == {(k, 6 - k): (-1) ** k for k in range(7)}
    assert diagonal_terms(2, 5, "twist_left") == {(k, 5 - k): 1 for k in range(6)}
    with pytest.raises(ChainError):
        diagonal_terms(3, 2, "twist_left")


def test_alpha_table():
    for q in range(2, 9):
        for p in range(12):
            for (k, l), c in diagonal_terms(q, p).items():
                assert c == ((q - 1) * q // 2 if k % 2 and l % 2 else 1)


def test_pontryagin_examples():
    assert pontryagin_terms(2, 2, 2) == {(4,): 2}
    assert all(pontryagin_terms(q, 0, k) == {(k,): 1} for q in (2, 3) for k in range(9))
    assert pontryagin_terms(3, 3, 5) == {}


def test_inversion_examples():
    assert inversion_coeff(3, 4) == 4
    assert inversion_coeff(5, 0) == 1
    assert all(inversion_coeff(2, i) == 1 for i in range(13))
    assert inversion_coeff(0, 1) == -1


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_maps_are_chain_maps(q):
    assert verify_chain_map(diagonal_map(q, PLAIN, 11), 10)
    assert verify_chain_map(pontryagin_map(q, PLAIN, 11), 10)
    assert verify_chain_map(inversion_map(q, 11), 10)


@pytest.mark.parametrize("variant", ["twist_left", "twist_right"])
def test_twisted_diagonals(variant):
    assert verify_chain_map(diagonal_map(2, variant, 11), 10)


def test_twisted_product_is_chain_map():
    assert verify_chain_map(pontryagin_map(2, "twisted", 11), 10)


@pytest.mark.parametrize("q", [0, 2, 3, 5])
def test_counit(q):
    top = 1 if q == 0 else 10
    for p in range(top + 1):
        d = diagonal_terms(q, p)
        assert {k: c for (k, l), c in d.items() if l == 0} == {p: 1}
        assert {l: c for (k, l), c in d.items() if k == 0} == {p: 1}


@pytest.mark.parametrize("q", [2, 3, 4])
def test_product_unital_and_commutative(q):
    for a in range(13):
        for b in range(13 - a):
            ab = pontryagin_terms(q, a, b)
            ba = pontryagin_terms(q, b, a)
            sign = -1 if a % 2 and b % 2 else 1
            assert ab == {k: sign * v for k, v in ba.items()}
        assert pontryagin_terms(q, 0, a) == pontryagin_terms(q, a, 0) == {(a,): 1}


def test_group_complex_basis():
    g = parse_group("Z_3 x Z_3")
    assert group_complex(g, 5).basis(5) == [(0, 5), (1, 4), (2, 3), (3, 2), (4, 1), (5, 0)]
    assert group_complex(parse_group("Z_4"), 6).basis(3) == complex_c(4, 6).basis(3)
    assert group_complex(parse_group("Z^2"), 3).basis(2) == [(1, 1)]
    with pytest.raises(ChainError):
        group_complex(parse_group("Z_3"), 4, twist=("twisted",))


def test_componentwise_product_example():
    g = parse_group("Z_3 x Z_3")
    assert group_product_terms(g, (0, 4, 0, 5)) == {(0, 9): 6}
    chi = group_chi_terms(g, (0, 4, 0, 5))
    assert set(chi) == {(0, 9)} and chi[(0, 9)] % 3 == -6 % 3


def test_single_factor_delta():
    g = parse_group("Z_3")
    for p in range(9):
        assert group_diagonal_terms(g, (p,)) == diagonal_terms(3, p)


@pytest.mark.parametrize("gs", ["Z_2 x Z_3", "Z x Z_2", "Z^2 x Z_4", "Z_3 x Z_3"])
def test_group_structure_maps(gs):
    g = parse_group(gs)
    for kind in ("delta", "wedge", "j", "chi"):
        assert verify_chain_map(structure_map(g, kind, 9), 8)


def test_group_delta_counit():
    g = parse_group("Z_3 x Z_2")
    c = group_complex(g, 6)
    for d in range(7):
        for lab in c.basis(d):
            terms = group_diagonal_terms(g, lab)
            assert {k[:2]: v for k, v in terms.items() if k[2:] == (0, 0)} == {lab: 1}


def test_group_product_commutes_with_swap():
    g = parse_group("Z_3 x Z_3")
    c = group_complex(g, 6)
    for a in range(4):
        for b in range(4):
            for x in c.basis(a):
                for y in c.basis(b):
                    lhs = ChainElement(a + b, group_product_terms(g, x + y))
                    sw = permute_slots(ChainElement.basis(x + y), (2, 3, 0, 1))
                    (lab, sgn), = sw.items()
                    rhs = ChainElement(a + b, group_product_terms(g, lab)).scale(sgn)
                    assert lhs == rhs
