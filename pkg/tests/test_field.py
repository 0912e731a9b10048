import itertools

import pytest
from hypothesis import given, settings, strategies as st

from qnmext import oracles
from qnmext.errors import DomainError, ResourceError
from qnmext.field import (
    ExtFieldSpec,
    FieldSpec,
    FpVector,
    canonical_field,
    coeffs_to_int,
    ext_add,
    ext_mul,
    ext_pow,
    find_irreducible,
    fp_arith,
    fp_vectors,
    inner_product,
    int_to_coeffs,
    is_prime,
    phi,
    phi_inv,
    vec_square,
)


@pytest.mark.parametrize("p, op, a, b, want", [
    (3, "mul", 2, 2, 1),
    (5, "add", 0, 4, 4),
    (7, "inv", 3, None, 5),
    (7, "sub", 2, 5, 4),
])
def test_fp_arith_examples(p, op, a, b, want):
    assert fp_arith(FieldSpec(p), op, a, b) == want


def test_fp_arith_errors():
    with pytest.raises(ZeroDivisionError):
        fp_arith(FieldSpec(5), "inv", 0)
    with pytest.raises(DomainError):
        fp_arith(FieldSpec(5), "add", 5, 1)
    with pytest.raises(DomainError):
        FieldSpec(9)


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("p, k, want", [
    (3, 2, (1, 0, 1)),
    (2, 2, (1, 1, 1)),
    (5, 1, (0, 1)),
])
def test_find_irreducible_examples(p, k, want):
    assert find_irreducible(p, k) == want


@pytest.mark.parametrize("p, k", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 2), (7, 2)])
def test_find_irreducible_matches_product_set_oracle(p, k):
    assert find_irreducible(p, k) == oracles._smallest_irreducible(p, k)


def test_find_irreducible_scan_limit():
    with pytest.raises(ResourceError):
        find_irreducible(1021, 3)


def test_ext_mul_examples():
    f9 = canonical_field(3, 2)
    assert ext_mul(f9, (1, 1), (1, 1)) == (0, 2)
    f4 = canonical_field(2, 2)
    assert ext_mul(f4, (1, 1), (0, 1)) == (1, 0)
    assert ext_mul(f4, (1, 1), f4.one) == (1, 1)
    with pytest.raises(DomainError):
        ext_mul(f4, (1, 1), (1,))


def test_ext_field_rejects_reducible_modulus():
    with pytest.raises(DomainError):
        ExtFieldSpec(FieldSpec(3), 2, (2, 0, 1))  # x^2 - 1 = (x-1)(x+1)


@pytest.mark.parametrize("p, k", [(2, 3), (3, 2), (5, 2)])
def test_multiplicative_group_is_a_field(p, k):
    spec = canonical_field(p, k)
    elems = list(fp_vectors(p, k))
    for a in elems:
        if any(a):
            assert ext_pow(spec, a, spec.order - 1) == spec.one
            assert sum(ext_mul(spec, a, b) == spec.one for b in elems) == 1


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 3), (3, 2), (5, 2), (7, 2)]), st.data())
def test_ring_axioms(pk, data):
    p, k = pk
    spec = canonical_field(p, k)
    vec = st.tuples(*[st.integers(0, p - 1)] * k)
    a, b, c = data.draw(vec), data.draw(vec), data.draw(vec)
    assert ext_mul(spec, a, b) == ext_mul(spec, b, a)
    assert ext_mul(spec, a, ext_mul(spec, b, c)) == ext_mul(spec, ext_mul(spec, a, b), c)
    assert ext_mul(spec, a, ext_add(spec, b, c)) == ext_add(spec, ext_mul(spec, a, b), ext_mul(spec, a, c))


def test_vec_square_examples():
    assert vec_square(3, (1, 1)) == (0, 2)
    assert vec_square(3, (0, 0)) == (0, 0)
    assert vec_square(5, (2,)) == (4,)


@pytest.mark.parametrize("p, k", [(3, 1), (3, 2), (5, 2), (2, 3)])
def test_vec_square_matches_oracle(p, k):
    for y in fp_vectors(p, k):
        assert vec_square(p, y) == oracles.square_in_extension(p, y)


def test_inner_product_examples():
    assert inner_product(3, (1, 2, 0, 1), (1, 1, 0, 2)) == 2
    assert inner_product(3, (0, 0, 0, 0), (2, 1, 2, 1)) == 0
    assert inner_product(7, (1, 0), (0, 1)) == 0
    with pytest.raises(DomainError):
        inner_product(3, (1, 2), (1,))


def test_phi_roundtrip():
    spec = canonical_field(3, 2)
    for v in fp_vectors(3, 2):
        assert phi_inv(spec, phi(3, v)) == v


def test_int_coeff_roundtrip():
    for v in range(27):
        assert coeffs_to_int(3, int_to_coeffs(3, v, 3)) == v
    assert int_to_coeffs(2, 9, 4) == (1, 0, 0, 1)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([2, 3, 5, 65521]), st.lists(st.integers(0, 10**6), max_size=12))
def test_fpvector_bytes_roundtrip(p, raw):
    v = FpVector(p, tuple(c % p for c in raw))
    assert FpVector.from_bytes(p, v.to_bytes()) == v
    assert list(v) == v.to_json()


def test_fpvector_rejects_out_of_range():
    with pytest.raises(DomainError):
        FpVector(3, (0, 3))


def test_fp_vectors_count_and_order():
    vs = list(fp_vectors(3, 2))
    assert len(vs) == 9 and len(set(vs)) == 9
    assert vs == list(itertools.product(range(3), repeat=2))
