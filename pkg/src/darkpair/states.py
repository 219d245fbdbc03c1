"""Builders for the named many-body states of the pairing model.

All builders return unnormalized vectors with exact amplitudes; the
fully paired shell state has norm 2^(m/2) for m hemisphere points.
Verification always works with relative residuals, so nothing here
rescales.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Sequence

from .fock import StateVector
from .lattice import SPIN_DOWN, SPIN_UP, EmptyShellError, IVec, ModeTable
from .operators import (
    CREATE,
    OperatorExpr,
    apply_operator,
    build_gamma,
)

PairCoefficients = Mapping[IVec, tuple[complex, complex]]


def phi_core(table: ModeTable) -> StateVector:
    """Inner sphere completely filled (both spins), amplitude +1.

    With a frozen core the inner modes are not in the table, so this is
    the formal vacuum of the shell-only space; the analytic core record
    on the table carries the omitted particles and energy.
    """
    occ = 0
    if not table.config.frozen_core:
        for n in table.inner_points:
            occ |= 1 << (table.n_modes - 1 - table.mode_index(SPIN_UP, n))
            occ |= 1 << (table.n_modes - 1 - table.mode_index(SPIN_DOWN, n))
    return StateVector(table.n_modes, {occ: 1})


def fermi_state(table: ModeTable) -> StateVector:
    """Every mode within the Fermi radius occupied for both spins.

    The radius test |k - K| <= kf is relative to the drift vector, like
    all shell classification.  Amplitude normalized to +1.
    """
    kf2 = table.config.radius2_grid(table.config.kf)
    K = table.config.boost
    occ = 0
    for i, mode in enumerate(table.modes):
        u = (mode.n[0] - K[0], mode.n[1] - K[1], mode.n[2] - K[2])
        if u[0] * u[0] + u[1] * u[1] + u[2] * u[2] <= kf2:
            occ |= 1 << (table.n_modes - 1 - i)
    return StateVector(table.n_modes, {occ: 1})


def nc_state(table: ModeTable, subset: Sequence[IVec] | None = None) -> StateVector:
    """Product of antisymmetric pair creators over the plus hemisphere,
    acting on the filled core.

    ``subset`` restricts the product to an explicit list of hemisphere
    points (experimental partial-shell variant); default is the full
    hemisphere, which is what particle counting dictates.  The factors
    commute, so any order gives the same vector; the deterministic
    hemisphere order is used for reproducibility.
    """
    if not table.shell_plus:
        raise EmptyShellError("lattice has no hemisphere points to pair")
    points = table.shell_plus if subset is None else tuple(tuple(p) for p in subset)
    for p in points:
        if p not in table.shell_plus:
            raise ValueError(f"{p} is not a plus-hemisphere point")
    state = phi_core(table)
    for k in points:
        state = apply_operator(build_gamma(table, k), state)
    return state


def boosted_nc_state(table: ModeTable) -> StateVector:
    """nc_state on a drifting lattice; the pairing partner map already
    reflects about K, so the construction is identical."""
    if table.config.boost == (0, 0, 0):
        raise ValueError("table is not boosted; use nc_state")
    return nc_state(table)


def validate_pair_coefficients(
    table: ModeTable, coeffs: PairCoefficients, tol: float = 1e-9
) -> None:
    for k in table.shell_all:
        if tuple(k) not in coeffs:
            raise ValueError(f"missing pair coefficients for shell point {k}")
        u, v = coeffs[tuple(k)]
        if abs(abs(u) ** 2 + abs(v) ** 2 - 1.0) > tol:
            raise ValueError(f"coefficients at {k} are not normalized")


def bcs_state(table: ModeTable, coeffs: PairCoefficients) -> StateVector:
    """Variational product state Prod_{k in shell} (u_k + v_k a+_up,k a+_dn,pk).

    The product runs over the full shell (both hemispheres), mixing
    particle-number sectors.
    """
    validate_pair_coefficients(table, coeffs)
    state = phi_core(table)
    for k in table.shell_all:
        u, v = coeffs[tuple(k)]
        pk = table.partner(k)
        factor = OperatorExpr.identity(u) + OperatorExpr.from_monomials(
            [(v, ((CREATE, table.mode_index(SPIN_UP, k)),
                  (CREATE, table.mode_index(SPIN_DOWN, pk))))]
        )
        state = apply_operator(factor, state)
    return state


def pair_coefficients_from_angles(
    table: ModeTable, angles: Mapping[IVec, float]
) -> dict[IVec, tuple[float, float]]:
    """u = cos(theta), v = sin(theta) per shell point."""
    out = {}
    for k in table.shell_all:
        th = angles[tuple(k)]
        out[tuple(k)] = (math.cos(th), math.sin(th))
    return out


def nc_energy(table: ModeTable) -> Fraction:
    """Counting oracle for the kinetic eigenvalue of the paired state.

    Two particles per inner point plus one pair (energy eps(k)+eps(pk))
    per hemisphere point, plus the frozen-core record.
    """
    e = table.core_energy
    if not table.config.frozen_core:
        e += 2 * sum((table.epsilon(n) for n in table.inner_points), Fraction(0))
    for k in table.shell_plus:
        e += table.epsilon(k) + table.epsilon(table.partner(k))
    return e


def nc_momentum(table: ModeTable) -> IVec:
    """Counting oracle for total momentum in grid units: N * K."""
    n_tot = table.total_particles_nc()
    K = table.config.boost
    return (n_tot * K[0], n_tot * K[1], n_tot * K[2])
