import pytest
from hypothesis import given, strategies as st

from higher_tc.chains import (ChainComplex, ChainElement, ChainError, Slot, identity_map,
                              inverse_permutation, koszul_sign, parse_chain, permute_slots,
                              point_complex, reduce_mod, serialize_chain, tensor,
                              verify_chain_map, zero_map)
from higher_tc.cyclic import complex_c, complex_c_tilde, diagonal_map
from higher_tc.nonorientable import d_boundary_terms
from higher_tc.smith import homology


def test_element_validation():
    with pytest.raises(ChainError):
        ChainElement(3, {(1, 1): 2})
    x = ChainElement(2, {(1, 1): 0, (2, 0): 3})
    assert x.labels() == [(2, 0)]


def test_serialization_sorted_and_zero():
    x = parse_chain("[5,0] - 2[0,5]")
    assert serialize_chain(x) == "-2*[0,5] + 1*[5,0]"
    assert serialize_chain(ChainElement.zero(4)) == "0"


labels = st.lists(st.integers(0, 6), min_size=1, max_size=4)


@given(st.dictionaries(st.tuples(st.integers(0, 5), st.integers(0, 5)),
                       st.integers(-50, 50), max_size=6), st.integers(0, 10))
def test_serialization_round_trip(raw, deg):
    terms = {(a, deg - a) if a <= deg else (deg, 0): c for (a, _), c in raw.items()}
    x = ChainElement(deg, terms)
    assert parse_chain(serialize_chain(x), deg if x else None) == x
    assert serialize_chain(parse_chain(serialize_chain(x))) == serialize_chain(x)


def test_parse_rejects_garbage():
    for bad in ("[1,2", "3*[1]+[1,1]", "[1]]", "2[1][2]"):
        with pytest.raises(ChainError):
            parse_chain(bad)


def test_whitespace_ignored():
    assert parse_chain(" 2 * [ 0 , 5 ] + [5,0] ") == parse_chain("2*[0,5]+[5,0]")


def test_d_squared_tensor_c3():
    c = tensor(complex_c(3, 12), complex_c(3, 12))
    assert c.check_d_squared()


def test_degree_zero_boundary_and_ordering():
    c = tensor(complex_c(4, 6), complex_c_tilde(6))
    for lab in c.basis(0):
        assert not c.boundary_label(lab)
    for d in range(7):
        b = c.basis(d)
        assert b == sorted(set(b))


def test_point_unit():
    a = complex_c(3, 6)
    t = tensor(a, point_complex(6))
    for d in range(7):
        assert [lab[:1] for lab in t.basis(d)] == a.basis(d)
        for lab in a.basis(d):
            got = {k[:1]: v for k, v in t.boundary_terms(lab + (0,)).items()}
            assert got == a.boundary_terms(lab)


def test_tensor_associative():
    a, b, c = complex_c(2, 7), complex_c_tilde(7), complex_c(3, 7)
    left, right = tensor(tensor(a, b), c), tensor(a, tensor(b, c))
    for d in range(8):
        assert left.basis(d) == right.basis(d)
        for lab in left.basis(d):
            assert left.boundary_terms(lab) == right.boundary_terms(lab)


@pytest.mark.parametrize("sigma", [1, 2, 3])
def test_hand_differential_matches_koszul(sigma):
    slots = [complex_c_tilde(9) if i % 2 == 0 else complex_c(2, 9) for i in range(2 * sigma - 1)]
    t = slots[0]
    for s in slots[1:]:
        t = tensor(t, s)
    for d in range(10):
        for lab in t.basis(d):
            assert d_boundary_terms(lab) == t.boundary_terms(lab)


def test_verify_chain_map_examples():
    assert verify_chain_map(diagonal_map(2, max_degree=11), 10)
    c = complex_c(3, 6)
    assert verify_chain_map(zero_map(c, c), 5)
    assert verify_chain_map(identity_map(c), 5)
    with pytest.raises(ChainError):
        verify_chain_map(identity_map(c), 6)


def test_koszul_examples():
    x = ChainElement.basis((1, 1))
    assert permute_slots(x, (1, 0)).coefficient((1, 1)) == -1
    assert koszul_sign((0, 4, 0, 5), (0, 2, 1, 3)) == 1
    assert koszul_sign((5, 0, 0, 1), (0, 2, 1, 3)) == 1
    assert koszul_sign((2, 3), (1, 0)) == 1
    with pytest.raises(ChainError):
        permute_slots(x, (0, 1, 2))


@given(st.lists(st.integers(0, 5), min_size=2, max_size=5), st.randoms())
def test_permutation_inverse(lab, rnd):
    order = list(range(len(lab)))
    rnd.shuffle(order)
    x = ChainElement.basis(lab, 7)
    y = permute_slots(permute_slots(x, order), inverse_permutation(order))
    assert y == x


def test_reduce_mod_examples():
    assert not reduce_mod(ChainElement.basis((0, 9), -6), 3)
    assert not reduce_mod(ChainElement.basis((12,), 20), 2)
    c = complex_c(3, 5)
    idp = reduce_mod(identity_map(c), 5)
    assert idp.value((3,)) == ChainElement(3, {(3,): 1}, 5)


def test_empty_complex():
    empty = ChainComplex([Slot("empty", -1, lambda k: 0)], 4)
    assert all(homology(empty, k).is_zero() for k in range(4))
    assert empty.check_d_squared()
