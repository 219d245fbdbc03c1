"""Lattice classification, mode ordering, and dispersion."""

import math
from fractions import Fraction

import pytest

from darkpair.lattice import (
    INNER,
    SHELL_MINUS,
    SHELL_PLUS,
    SPIN_DOWN,
    SPIN_UP,
    EmptyShellError,
    LatticeConfig,
    LatticeError,
    Mode,
    UnpairedModeError,
    boosted_twin,
    build_mode_table,
    dispersion,
    hemisphere_positive,
)


def brute_force_shell(kf, delta, reach=4):
    """Independent enumeration of the radial shell with exact bounds."""
    lo2 = Fraction(kf - delta) ** 2
    hi2 = Fraction(kf + delta) ** 2
    pts = []
    for z in range(-reach, reach + 1):
        for y in range(-reach, reach + 1):
            for x in range(-reach, reach + 1):
                n2 = x * x + y * y + z * z
                if lo2 <= n2 <= hi2:
                    pts.append((x, y, z))
    return set(pts)


def test_shell_enumeration_against_brute_force():
    table = build_mode_table(LatticeConfig(kf=1.2, delta=0.5))
    expected = brute_force_shell(1.2, 0.5)
    assert set(table.shell_plus) | set(table.shell_minus) == expected
    # |n|^2 = 1 and |n|^2 = 2 orbits both fall in [0.49, 2.89]
    assert len(expected) == 18
    units = {(0, 0, 1), (0, 0, -1), (0, 1, 0), (0, -1, 0), (1, 0, 0), (-1, 0, 0)}
    assert units <= expected
    assert {(0, 0, 1), (0, 1, 0), (1, 0, 0)} <= set(table.shell_plus)
    assert len(table.shell_plus) == 9


def test_three_pair_shell_is_exactly_unit_vectors(threepair_table):
    assert set(threepair_table.shell_plus) == {(0, 0, 1), (0, 1, 0), (1, 0, 0)}
    assert set(threepair_table.shell_minus) == {(0, 0, -1), (0, -1, 0), (-1, 0, 0)}
    assert threepair_table.inner_points == ((0, 0, 0),)


def test_hemisphere_covers_each_pair_once():
    table = build_mode_table(LatticeConfig(kf=1.2, delta=0.5))
    plus = set(table.shell_plus)
    minus = set(table.shell_minus)
    assert plus.isdisjoint(minus)
    assert {(-x, -y, -z) for x, y, z in plus} == minus
    for n in plus:
        assert hemisphere_positive(n)
        assert not hemisphere_positive((-n[0], -n[1], -n[2]))


def test_shell_symmetric_under_negation():
    table = build_mode_table(LatticeConfig(kf=1.0, delta=0.25))
    shell = set(table.shell_all)
    assert shell == {(-x, -y, -z) for x, y, z in shell}


def test_negation_is_total_involution():
    from darkpair.lattice import norm2, vneg

    for n in [(0, 0, 0), (1, -2, 3), (-4, 0, 2)]:
        assert vneg(vneg(n)) == n
        assert norm2(vneg(n)) == norm2(n)


def test_frozen_core_record(minimal_table):
    assert minimal_table.inner_points == ((0, 0, 0),)
    assert minimal_table.core_particles == 2
    assert minimal_table.core_energy == 0
    assert len(minimal_table.modes) == 4
    assert minimal_table.modes == (
        Mode(SPIN_UP, (0, 0, 1)),
        Mode(SPIN_DOWN, (0, 0, 1)),
        Mode(SPIN_UP, (0, 0, -1)),
        Mode(SPIN_DOWN, (0, 0, -1)),
    )


def test_mode_order_partition_then_zyx_then_spin(minimal_unfrozen_table):
    t = minimal_unfrozen_table
    assert t.modes == (
        Mode(SPIN_UP, (0, 0, 0)),
        Mode(SPIN_DOWN, (0, 0, 0)),
        Mode(SPIN_UP, (0, 0, 1)),
        Mode(SPIN_DOWN, (0, 0, 1)),
        Mode(SPIN_UP, (0, 0, -1)),
        Mode(SPIN_DOWN, (0, 0, -1)),
    )
    assert t.partition_of((0, 0, 0)) == INNER
    assert t.partition_of((0, 0, 1)) == SHELL_PLUS
    assert t.partition_of((0, 0, -1)) == SHELL_MINUS


def test_build_is_pure():
    cfg = LatticeConfig(kf=1.0, delta=0.25, frozen_core=True, volume=1)
    a = build_mode_table(cfg)
    b = build_mode_table(cfg)
    assert a.modes == b.modes
    assert a.shell_plus == b.shell_plus
    assert a.to_json() == b.to_json()


def test_delta_reaching_origin_rejected():
    with pytest.raises(LatticeError):
        build_mode_table(LatticeConfig(kf=0.5, delta=0.5))
    with pytest.raises(LatticeError):
        build_mode_table(LatticeConfig(kf=0.4, delta=0.5))


def test_empty_shell_rejected():
    with pytest.raises(EmptyShellError):
        build_mode_table(LatticeConfig(kf=0.5, delta=0.1))


def test_unpaired_explicit_shell_rejected():
    with pytest.raises(UnpairedModeError):
        build_mode_table(
            LatticeConfig(kf=1.2, delta=0.5, shell_points=((0, 0, 1),))
        )


def test_explicit_point_outside_band_rejected():
    with pytest.raises(LatticeError):
        build_mode_table(
            LatticeConfig(kf=1.2, delta=0.5, shell_points=((0, 0, 2), (0, 0, -2)))
        )


def test_dispersion_examples():
    cfg = LatticeConfig(kf=1.2, delta=0.5)
    assert dispersion(cfg, (0, 0, 1)) == 1
    cfg_mu = LatticeConfig(kf=1.2, delta=0.5, mu=1.0)
    assert dispersion(cfg_mu, (1, 1, 0)) == 1
    cfg_small_box = LatticeConfig(kf=2.4, delta=1.0, L=math.pi)
    assert dispersion(cfg_small_box, (0, 0, 1)) == 4


def test_boosted_partner_and_classification(boosted_table):
    t = boosted_table
    assert t.shell_plus == ((0, 0, 2),)
    assert t.shell_minus == ((0, 0, 0),)
    assert t.partner((0, 0, 2)) == (0, 0, 0)
    assert t.inner_points == ((0, 0, 1),)
    # core record at the drift point: two particles of energy 1 each
    assert t.core_particles == 2
    assert t.core_energy == 2
    assert t.core_momentum == (0, 0, 2)


def test_boosted_radial_lattice_pairs_about_drift():
    t = build_mode_table(LatticeConfig(kf=1.0, delta=0.25, boost=(0, 0, 1)))
    assert set(t.shell_all) == {
        (0, 0, 2), (0, 0, 0), (0, 1, 1), (0, -1, 1), (1, 0, 1), (-1, 0, 1)
    }
    for n in t.shell_plus:
        assert t.partner(n) in t.shell_minus


def test_boosted_twin_preserves_relative_structure(minimal_table):
    t = boosted_twin(minimal_table, (0, 0, 1))
    assert t.shell_plus == ((0, 0, 2),)
    assert t.shell_minus == ((0, 0, 0),)


def test_mode_table_json_dump(minimal_table):
    import json

    rows = json.loads(minimal_table.to_json())
    assert len(rows) == 4
    assert rows[0] == {
        "index": 0, "n": [0, 0, 1], "partition": "shell+", "spin": "up"
    }


def test_too_many_modes_rejected():
    with pytest.raises(LatticeError):
        build_mode_table(LatticeConfig(kf=3.0, delta=1.0))
