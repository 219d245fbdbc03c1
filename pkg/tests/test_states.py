"""Named state constructions and their eigen-properties."""

import math
from fractions import Fraction

import pytest

from darkpair.fock import StateVector, apply_create, bitstring_to_occ
from darkpair.formfactors import random_symmetric
from darkpair.lattice import LatticeConfig, build_mode_table
from darkpair.operators import (
    apply_operator,
    build_h0,
    build_momentum_op,
    build_number_op,
    build_w,
)
from darkpair.states import (
    bcs_state,
    boosted_nc_state,
    fermi_state,
    nc_energy,
    nc_momentum,
    nc_state,
    phi_core,
)

B = bitstring_to_occ


def test_phi_core_unfrozen(minimal_unfrozen_table):
    core = phi_core(minimal_unfrozen_table)
    assert core.amp == {B("110000"): 1}


def test_phi_core_frozen(minimal_table):
    assert phi_core(minimal_table).amp == {0: 1}
    assert minimal_table.core_particles == 2
    assert minimal_table.core_energy == 0


def test_fermi_state_fills_everything_inside_kf(minimal_table):
    # both shell points are inside kf = 1.2
    assert fermi_state(minimal_table).amp == {B("1111"): 1}


def test_fermi_state_counts(minimal_unfrozen_table):
    state = fermi_state(minimal_unfrozen_table)
    (occ,) = state.amp
    assert occ.bit_count() == 2 * 3  # three points within kf, two spins each


def test_fermi_state_empty_when_shell_outside_kf():
    table = build_mode_table(
        LatticeConfig(kf=1.8, delta=0.5, frozen_core=True,
                      shell_points=((0, 0, 2), (0, 0, -2)), volume=1)
    )
    assert fermi_state(table).amp == {0: 1}


def test_nc_state_single_pair(minimal_table):
    nc = nc_state(minimal_table)
    assert nc.amp == {B("1001"): 1, B("0110"): 1}
    assert nc.norm2() == 2


def hand_built_two_pair_expectation(table):
    """Expand the two commuting pair creators from first principles."""
    n = table.n_modes
    plus = table.shell_plus
    terms = {0: 1}
    for k in plus:
        pk = table.partner(k)
        branches = [
            (1, (table.mode_index(1, pk), table.mode_index(0, k))),
            (-1, (table.mode_index(1, k), table.mode_index(0, pk))),
        ]
        new_terms = {}
        for occ, amp in terms.items():
            for branch_sign, modes in branches:
                cur, sign, dead = occ, 1, False
                for mode in modes:  # rightmost factor first
                    step = apply_create(n, mode, cur)
                    if step is None:
                        dead = True
                        break
                    s, cur = step
                    sign *= s
                if not dead:
                    new_terms[cur] = new_terms.get(cur, 0) + amp * branch_sign * sign
        terms = {k2: v for k2, v in new_terms.items() if v != 0}
    return terms


def test_nc_state_two_pairs_matches_hand_expansion(twopair_table):
    nc = nc_state(twopair_table)
    assert nc.norm2() == 4
    assert all(abs(a) == 1 for _, a in nc.terms())
    assert nc.amp == hand_built_two_pair_expectation(twopair_table)
    # frozen expected occupations for this mode order
    expected = {B(s): 1 for s in
                ["10100101", "01100110", "10011001", "01011010"]}
    assert nc.amp == expected


def test_nc_state_three_pairs_norm(threepair_table):
    nc = nc_state(threepair_table)
    assert nc.norm2() == 8
    assert len(nc) == 8


def test_nc_state_order_independent(twopair_table):
    forward = nc_state(twopair_table)
    backward = nc_state(twopair_table, subset=tuple(reversed(twopair_table.shell_plus)))
    assert forward == backward


def test_nc_state_partial_shell_is_still_dark(twopair_table):
    partial = nc_state(twopair_table, subset=twopair_table.shell_plus[:1])
    for g in (Fraction(-1), Fraction(1, 2)):
        w = build_w(twopair_table, g)
        assert len(apply_operator(w, partial)) == 0


def test_nc_state_rejects_non_hemisphere_subset(twopair_table):
    with pytest.raises(ValueError):
        nc_state(twopair_table, subset=((0, 0, -1),))


def test_nc_dark_for_all_couplings_and_symmetric_weights(threepair_table):
    nc = nc_state(threepair_table)
    for seed in (1, 2, 3):
        g_fun, _, _ = random_symmetric(threepair_table, seed)
        for g in (Fraction(-1), Fraction(-1, 2), Fraction(1, 2), Fraction(1)):
            w = build_w(threepair_table, g, g_fun)
            image = apply_operator(w, nc)
            assert len(image) == 0
            assert nc.inner(image) == 0  # expectation value vanishes too


def test_nc_h0_eigenstate_exact(threepair_table):
    nc = nc_state(threepair_table)
    h0 = build_h0(threepair_table)
    e_table = nc_energy(threepair_table) - threepair_table.core_energy
    diff = apply_operator(h0, nc) - nc.scaled(e_table)
    assert len(diff) == 0
    assert nc_energy(threepair_table) == 6  # 3 pairs at |n|^2 = 1, core at 0


def test_nc_number_eigenstate(twopair_table):
    nc = nc_state(twopair_table)
    n_op = build_number_op(twopair_table)
    diff = apply_operator(n_op, nc) - nc.scaled(4)
    assert len(diff) == 0
    assert twopair_table.total_particles_nc() == 6  # 4 paired + 2 frozen core


def test_nc_zero_momentum_at_rest(threepair_table):
    nc = nc_state(threepair_table)
    for p in build_momentum_op(threepair_table):
        assert len(apply_operator(p, nc)) == 0
    assert nc_momentum(threepair_table) == (0, 0, 0)


def test_boosted_nc_momentum(boosted_table):
    nc = boosted_nc_state(boosted_table)
    _, _, pz = build_momentum_op(boosted_table)
    # table modes carry total particles minus the frozen core
    table_pz = nc_momentum(boosted_table)[2] - boosted_table.core_momentum[2]
    assert table_pz == 2
    diff = apply_operator(pz, nc) - nc.scaled(table_pz)
    assert len(diff) == 0
    n_op = build_number_op(boosted_table)
    diff = apply_operator(n_op, nc) - nc.scaled(2)
    assert len(diff) == 0
    assert boosted_table.total_particles_nc() == 4
    assert nc_momentum(boosted_table) == (0, 0, 4)


def test_boosted_nc_dark(boosted_table):
    nc = boosted_nc_state(boosted_table)
    for g in (Fraction(-1), Fraction(1)):
        assert len(apply_operator(build_w(boosted_table, g), nc)) == 0


def test_boosted_nc_requires_boost(minimal_table):
    with pytest.raises(ValueError):
        boosted_nc_state(minimal_table)


def test_bcs_identity_coefficients(minimal_table):
    coeffs = {k: (1.0, 0.0) for k in minimal_table.shell_all}
    assert bcs_state(minimal_table, coeffs) == phi_core(minimal_table)


def test_bcs_fully_paired(minimal_table):
    coeffs = {k: (0.0, 1.0) for k in minimal_table.shell_all}
    state = bcs_state(minimal_table, coeffs)
    assert set(state.amp) == {B("1111")}
    assert abs(state.amp[B("1111")]) == 1


def test_bcs_equal_mixture_signs(minimal_table):
    r = 1 / math.sqrt(2)
    coeffs = {k: (r, r) for k in minimal_table.shell_all}
    state = bcs_state(minimal_table, coeffs)
    assert set(state.amp) == {B("0000"), B("1001"), B("0110"), B("1111")}
    half = 0.5
    assert math.isclose(state.amp[B("0000")], half)
    assert math.isclose(state.amp[B("1001")], half)
    assert math.isclose(state.amp[B("0110")], -half)
    assert math.isclose(state.amp[B("1111")], -half)
    assert state.particle_numbers() == {0, 2, 4}


def test_bcs_rejects_unnormalized(minimal_table):
    coeffs = {k: (1.0, 1.0) for k in minimal_table.shell_all}
    with pytest.raises(ValueError):
        bcs_state(minimal_table, coeffs)


def test_bcs_requires_full_shell_coverage(minimal_table):
    coeffs = {(0, 0, 1): (1.0, 0.0)}
    with pytest.raises(ValueError):
        bcs_state(minimal_table, coeffs)


def test_state_serialization_of_nc(twopair_table):
    nc = nc_state(twopair_table)
    text = nc.to_jsonl()
    again = StateVector.from_jsonl(text)
    assert again.to_jsonl() == text
    assert {occ for occ, _ in again.terms()} == set(nc.amp)
