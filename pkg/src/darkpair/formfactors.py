"""Interaction weights on shell pairs.

Weights are exact rationals keyed by partner-pair classes so that the
symbolic layer stays exact.  ``random_symmetric`` draws one value per
ordered pair of hemisphere representatives, which respects the sign-flip
symmetry in each argument while generally breaking exchange symmetry;
``asymmetric`` deliberately violates the sign-flip symmetry and is used
as a negative control.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

import numpy as np

from .lattice import IVec, ModeTable
from .operators import ShellDomainError, unit_formfactor

FormfactorSpec = tuple[Callable[[IVec, IVec], Fraction], str, bool]


def _rep(table: ModeTable, k: IVec) -> IVec:
    k = tuple(k)
    if k in table.shell_plus:
        return k
    if k in table.shell_minus:
        return table.partner(k)
    raise ShellDomainError(f"{k} is not a shell point of this lattice")


def unit(table: ModeTable) -> FormfactorSpec:
    return unit_formfactor, "unit", True


def random_symmetric(table: ModeTable, seed: int) -> FormfactorSpec:
    """Uniform rationals in [1/2, 2] per (rep1, rep2) hemisphere class."""
    rng = np.random.default_rng(seed)
    values: dict[tuple[IVec, IVec], Fraction] = {}
    for r1 in table.shell_plus:
        for r2 in table.shell_plus:
            values[(r1, r2)] = Fraction(int(rng.integers(32, 129)), 64)

    def g_fun(k1: IVec, k2: IVec) -> Fraction:
        return values[(_rep(table, k1), _rep(table, k2))]

    return g_fun, f"random:{seed}", True


def asymmetric(table: ModeTable, seed: int) -> FormfactorSpec:
    """Partner-asymmetric weight: breaks the sign-flip symmetry on purpose.

    The bump sits on the second argument, the one whose symmetry the
    pair-annihilation identity actually relies on, so strict-mode builds
    with this weight do not leave the paired state dark.
    """
    base, _, _ = random_symmetric(table, seed)
    minus = set(table.shell_minus)

    def g_fun(k1: IVec, k2: IVec) -> Fraction:
        bump = Fraction(1, 3) if tuple(k2) in minus else Fraction(0)
        return base(k1, k2) + bump

    return g_fun, f"asymmetric:{seed}", False


def from_spec(table: ModeTable, spec: str, master_seed: int = 0) -> FormfactorSpec:
    """Parse "unit" | "random:<seed>" | "asymmetric:<seed>".

    A missing seed falls back to the master seed so one recorded seed
    reproduces the whole run.
    """
    if spec == "unit":
        return unit(table)
    name, _, seed_text = spec.partition(":")
    seed = int(seed_text) if seed_text else master_seed
    if name == "random":
        return random_symmetric(table, seed)
    if name == "asymmetric":
        return asymmetric(table, seed)
    raise ValueError(f"unknown formfactor spec {spec!r}")
