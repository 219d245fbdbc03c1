"""Fermionic sign bookkeeping and sparse state vectors."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darkpair.fock import (
    BasisSizeError,
    StateVector,
    apply_annihilate,
    apply_create,
    bitstring_to_occ,
    occ_to_bitstring,
    sector_basis,
)

B = bitstring_to_occ


def test_create_examples():
    assert apply_create(4, 3, B("0000")) == (1, B("0001"))
    assert apply_create(4, 0, B("0001")) == (1, B("1001"))
    assert apply_create(4, 2, B("0100")) == (-1, B("0110"))
    assert apply_create(4, 3, B("0001")) is None


def test_annihilate_examples():
    assert apply_annihilate(4, 3, B("1001")) == (-1, B("1000"))
    assert apply_annihilate(4, 0, B("1001")) == (1, B("0001"))
    assert apply_annihilate(4, 2, B("1001")) is None


def test_create_then_annihilate_is_identity():
    for occ in range(16):
        for i in range(4):
            created = apply_create(4, i, occ)
            if created is None:
                continue
            s1, mid = created
            s2, back = apply_annihilate(4, i, mid)
            assert back == occ and s1 * s2 == 1


def test_creation_order_antisymmetry():
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            si, a = apply_create(4, i, 0)
            sj, ab = apply_create(4, j, a)
            sj2, b = apply_create(4, j, 0)
            si2, ba = apply_create(4, i, b)
            assert ab == ba
            assert si * sj == -sj2 * si2


@settings(max_examples=300, deadline=None)
@given(
    n_modes=st.integers(2, 6),
    i=st.integers(0, 5),
    j=st.integers(0, 5),
    occ=st.integers(0, 63),
)
def test_anticommutation_property(n_modes, i, j, occ):
    """{a_i, a+_j} acting on any state equals delta_ij times the state."""
    i %= n_modes
    j %= n_modes
    occ &= (1 << n_modes) - 1
    acc = {}
    first = apply_create(n_modes, j, occ)
    if first is not None:
        s1, mid = first
        second = apply_annihilate(n_modes, i, mid)
        if second is not None:
            s2, res = second
            acc[res] = acc.get(res, 0) + s1 * s2
    first = apply_annihilate(n_modes, i, occ)
    if first is not None:
        s1, mid = first
        second = apply_create(n_modes, j, mid)
        if second is not None:
            s2, res = second
            acc[res] = acc.get(res, 0) + s1 * s2
    acc = {k: v for k, v in acc.items() if v != 0}
    assert acc == ({occ: 1} if i == j else {})


def test_sector_basis_enumeration():
    assert sector_basis(4, 2) == [B(s) for s in
                                  ["0011", "0101", "0110", "1001", "1010", "1100"]]
    assert sector_basis(4, 0) == [0]
    assert len(sector_basis(16, 8)) == 12870
    assert sector_basis(4, 5) == []


def test_sector_basis_sorted_and_correct_popcount():
    basis = sector_basis(6, 3)
    assert basis == sorted(basis)
    assert all(occ.bit_count() == 3 for occ in basis)
    assert len(basis) == math.comb(6, 3)


def test_sector_basis_cap():
    with pytest.raises(BasisSizeError):
        sector_basis(30, 15, cap=1000)


def test_inner_product_examples():
    vac = StateVector.vacuum(4)
    assert vac.inner(vac) == 1
    a = StateVector(4, {B("1001"): 1, B("0110"): 1})
    b = StateVector(4, {B("1001"): 1, B("0110"): -1})
    assert a.inner(b) == 0
    assert a.inner(a) == 2


def test_inner_product_conjugate_symmetric():
    a = StateVector(3, {B("100"): 1 + 2j, B("010"): 0.5})
    b = StateVector(3, {B("100"): -1j, B("001"): 3.0})
    assert a.inner(b) == b.inner(a).conjugate()


def test_inner_product_positive_definite():
    a = StateVector(3, {B("101"): Fraction(1, 3), B("010"): -2})
    assert a.norm2() > 0
    assert StateVector(3).norm2() == 0


def test_mode_count_mismatch_raises():
    with pytest.raises(ValueError):
        StateVector(3).inner(StateVector(4))


def test_exact_zero_amplitudes_are_dropped():
    v = StateVector(4)
    v.add_term(B("1001"), Fraction(1))
    v.add_term(B("1001"), Fraction(-1))
    assert len(v) == 0
    assert v == StateVector(4)


def test_norm_independent_of_insertion_order():
    terms = [(B("1100"), 0.1), (B("0011"), 0.7), (B("1001"), -0.3)]
    v1 = StateVector(4)
    v2 = StateVector(4)
    for occ, a in terms:
        v1.add_term(occ, a)
    for occ, a in reversed(terms):
        v2.add_term(occ, a)
    assert v1.norm2() == v2.norm2()
    assert v1 == v2


def test_purge_thresholds():
    v = StateVector(4, {B("1000"): 1e-16, B("0001"): 1.0})
    assert len(v) == 2  # default keeps everything stored
    assert len(v.purge(1e-12)) == 1


def test_jsonl_round_trip_is_bit_exact():
    v = StateVector(4, {B("1001"): 1.0, B("0110"): -0.3333333333333333,
                        B("0001"): 2.5e-17})
    text = v.to_jsonl()
    again = StateVector.from_jsonl(text)
    assert again.to_jsonl() == text
    assert [occ for occ, _ in again.terms()] == sorted(again.amp)


def test_jsonl_rejects_garbage():
    with pytest.raises(ValueError):
        StateVector.from_jsonl("")
    with pytest.raises(ValueError):
        StateVector.from_jsonl(
            '{"bitstring":"10","re":1.0,"im":0.0}\n'
            '{"bitstring":"100","re":1.0,"im":0.0}\n'
        )


def test_bitstring_conventions():
    # mode 0 is the leftmost character
    occ = B("1000")
    assert occ == 8
    assert occ_to_bitstring(4, occ) == "1000"
    s, res = apply_create(4, 1, occ)
    assert occ_to_bitstring(4, res) == "1100"
    assert s == -1
