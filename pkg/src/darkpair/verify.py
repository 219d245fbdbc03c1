"""The identity battery: run the model's operator identities as checks.

Symbolic checks are exact (rational arithmetic, tolerance 0); numerical
checks on state vectors use a 1e-12 relative tolerance.  A report is
deterministic given (config, seeds); wall times are reported in the text
rendering only, so the JSON artifact is byte-reproducible.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import formfactors
from .fock import StateVector, apply_annihilate, apply_create
from .lattice import (
    SPIN_DOWN,
    SPIN_UP,
    LatticeConfig,
    ModeTable,
    boosted_twin,
    build_mode_table,
    unfrozen_twin,
)
from .operators import (
    ANNIHILATE,
    CREATE,
    DEGREE_CAP,
    OperatorExpr,
    apply_operator,
    build_gamma,
    build_h0,
    build_momentum_op,
    build_number_op,
    build_pair,
    build_w,
    commutator,
    pair_commutator_rhs,
)
from .states import nc_energy, nc_momentum, nc_state

NUMERIC_TOL = 1e-12

CHECK_IDS = (
    "anticommutation",
    "pair_commutator",
    "gamma_commutator",
    "gamma_negation",
    "core_commutators",
    "dark_state",
    "h0_eigenstate",
    "number_eigenvalue",
    "momentum_eigenvalue",
    "coupling_independence",
)


@dataclass
class CheckResult:
    check_id: str
    lattice: str
    params: dict
    residual: float
    tolerance: float
    passed: bool
    seconds: float


@dataclass
class VerificationReport:
    lattice: str
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        # wall times are excluded on purpose: same config + seed must give
        # byte-identical JSON.
        payload = {
            "lattice": self.lattice,
            "seed": self.seed,
            "all_passed": self.all_passed,
            "checks": [
                {
                    "check_id": c.check_id,
                    "lattice": c.lattice,
                    "params": c.params,
                    "residual": c.residual,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [
            f"lattice: {self.lattice}",
            f"seed: {self.seed}",
            f"{'check':24s} {'residual':>12s} {'tol':>8s} {'pass':>5s} {'time[s]':>8s}",
        ]
        for c in self.checks:
            lines.append(
                f"{c.check_id:24s} {c.residual:12.3e} {c.tolerance:8.1e} "
                f"{'ok' if c.passed else 'FAIL':>5s} {c.seconds:8.3f}"
            )
        lines.append("overall: " + ("PASS" if self.all_passed else "FAIL"))
        return "\n".join(lines) + "\n"


def relative_dark_residual(w: OperatorExpr, state: StateVector) -> float:
    """|| W|psi> || / (||W||_1 * ||psi||), exactly zero when the map is empty."""
    image = apply_operator(w, state)
    if not image.amp:
        return 0.0
    denom = float(w.one_norm()) * state.norm()
    if denom == 0.0:
        return float(image.norm())
    return image.norm() / denom


def eigen_residual(op: OperatorExpr, state: StateVector, eigenvalue) -> float:
    """|| A|psi> - lambda|psi> || / ||psi|| with exact arithmetic inside."""
    diff = apply_operator(op, state) - state.scaled(eigenvalue)
    if not diff.amp:
        return 0.0
    return diff.norm() / state.norm()


def _anticommutation_residual(n_modes: int, samples: int, rng) -> int:
    """Exact sweep of {a_i, a+_j} s = delta_ij s on random states and modes."""
    worst = 0
    for _ in range(samples):
        occ = int(rng.integers(0, 1 << n_modes))
        i = int(rng.integers(0, n_modes))
        j = int(rng.integers(0, n_modes))
        acc: dict[int, int] = {}
        # a_i a+_j
        step = apply_create(n_modes, j, occ)
        if step is not None:
            s1, mid = step
            step2 = apply_annihilate(n_modes, i, mid)
            if step2 is not None:
                s2, res = step2
                acc[res] = acc.get(res, 0) + s1 * s2
        # a+_j a_i
        step = apply_annihilate(n_modes, i, occ)
        if step is not None:
            s1, mid = step
            step2 = apply_create(n_modes, j, mid)
            if step2 is not None:
                s2, res = step2
                acc[res] = acc.get(res, 0) + s1 * s2
        expect = {occ: 1} if i == j else {}
        for key in set(acc) | set(expect):
            worst = max(worst, abs(acc.get(key, 0) - expect.get(key, 0)))
    return worst


def run_battery(
    config: LatticeConfig,
    g_values: Sequence,
    lambda_values: Sequence,
    formfactor: str = "unit",
    seed: int = 0,
    anticommutation_samples: int = 200,
) -> VerificationReport:
    """Execute the fixed battery; one record per check id, fixed order."""
    table = build_mode_table(config)
    g_values = [Fraction(g) for g in g_values]
    lambda_values = [Fraction(l) for l in lambda_values]
    g_fun, ff_name, _ = formfactors.from_spec(table, formfactor, seed)
    symmetrize = not ff_name.startswith("asymmetric")
    rng = np.random.default_rng(seed)
    report = VerificationReport(lattice=table.descriptor(), seed=seed)

    g_ref = g_values[0] if g_values else Fraction(1)
    w_ref = build_w(table, g_ref, g_fun, symmetrize=symmetrize)
    state = nc_state(table)

    def record(check_id, params, residual, tolerance, t0):
        residual = float(residual)
        report.checks.append(
            CheckResult(
                check_id=check_id,
                lattice=table.descriptor(),
                params=params,
                residual=residual,
                tolerance=tolerance,
                passed=residual <= tolerance,
                seconds=time.perf_counter() - t0,
            )
        )

    # (1) canonical anticommutation relations on the table's modes
    t0 = time.perf_counter()
    res = _anticommutation_residual(table.n_modes, anticommutation_samples, rng)
    record("anticommutation", {"samples": anticommutation_samples}, res, 0.0, t0)

    # (2) [W, pair(k, lam)] against its closed form, every hemisphere k
    t0 = time.perf_counter()
    res = Fraction(0)
    for lam in lambda_values:
        for k in table.shell_plus:
            lhs = commutator(w_ref, build_pair(table, k, lam))
            rhs = pair_commutator_rhs(table, k, lam, g_ref, g_fun, symmetrize)
            res += (lhs - rhs).one_norm()
    record(
        "pair_commutator",
        {"lambdas": [str(l) for l in lambda_values], "g": str(g_ref),
         "formfactor": ff_name},
        res,
        0.0,
        t0,
    )

    # (3) [W, gamma_k] against the annihilator-terminated closed form; every
    # normal-ordered term must end in annihilators (no pure-creation part)
    t0 = time.perf_counter()
    res = Fraction(0)
    for k in table.shell_plus:
        lhs = commutator(w_ref, build_gamma(table, k))
        rhs = pair_commutator_rhs(table, k, Fraction(-1), g_ref, g_fun, symmetrize)
        res += (lhs - rhs).one_norm()
        res += sum(
            (abs(c) for t, c in lhs.terms.items()
             if not any(kind == ANNIHILATE for kind, _ in t)),
            Fraction(0),
        )
    record("gamma_commutator", {"g": str(g_ref), "formfactor": ff_name}, res, 0.0, t0)

    # (4) gamma at the partner point is the negative
    t0 = time.perf_counter()
    res = Fraction(0)
    for k in table.shell_plus:
        res += (build_gamma(table, table.partner(k)) + build_gamma(table, k)).one_norm()
    for k in table.shell_plus:
        for kp in table.shell_plus:
            if k != kp:
                res += commutator(build_gamma(table, k), build_gamma(table, kp)).one_norm()
    record("gamma_negation", {}, res, 0.0, t0)

    # (5) interaction and pair commutators commute with the filled core
    t0 = time.perf_counter()
    thawed = unfrozen_twin(table)
    cap = max(DEGREE_CAP, 4 + 2 * len(thawed.inner_points) + 2)
    phi = OperatorExpr.identity()
    for n in thawed.inner_points:
        phi = phi.compose(
            OperatorExpr.from_monomials(
                [(Fraction(1), ((CREATE, thawed.mode_index(SPIN_UP, n)),
                                (CREATE, thawed.mode_index(SPIN_DOWN, n))))]
            ),
            cap,
        )
    g_fun_thawed, _, _ = formfactors.from_spec(thawed, formfactor, seed)
    w_thawed = build_w(thawed, g_ref, g_fun_thawed, symmetrize=symmetrize)
    res = commutator(w_thawed, phi, cap).one_norm()
    for k in thawed.shell_plus:
        inner_comm = commutator(w_thawed, build_gamma(thawed, k), cap)
        res += commutator(inner_comm, phi, cap).one_norm()
    record("core_commutators", {"inner_points": len(thawed.inner_points)}, res, 0.0, t0)

    # (6) the paired state is dark for every coupling
    t0 = time.perf_counter()
    residuals = []
    for g in g_values:
        w = build_w(table, g, g_fun, symmetrize=symmetrize)
        residuals.append(relative_dark_residual(w, state))
    record(
        "dark_state",
        {"g": [str(g) for g in g_values], "formfactor": ff_name},
        max(residuals) if residuals else 0.0,
        NUMERIC_TOL,
        t0,
    )

    # (7) kinetic eigenstate with the counting-oracle eigenvalue
    t0 = time.perf_counter()
    e_expect = nc_energy(table) - table.core_energy  # table-space part
    res = eigen_residual(build_h0(table), state, e_expect)
    record(
        "h0_eigenstate",
        {"energy": str(nc_energy(table))},
        res,
        NUMERIC_TOL,
        t0,
    )

    # (8) particle-number eigenvalue
    t0 = time.perf_counter()
    n_total = table.total_particles_nc()
    n_table = n_total - table.core_particles
    res = eigen_residual(build_number_op(table), state, Fraction(n_table))
    record("number_eigenvalue", {"particles": n_total}, res, NUMERIC_TOL, t0)

    # (9) momentum eigenvalue, here and on a boosted twin
    t0 = time.perf_counter()
    res = _momentum_residual(table, state)
    boost_K = table.config.boost
    if boost_K == (0, 0, 0):
        btab = boosted_twin(table, (0, 0, 1))
        res = max(res, _momentum_residual(btab, nc_state(btab)))
        boost_K = (0, 0, 1)
    record(
        "momentum_eigenvalue",
        {"boost_checked": list(boost_K)},
        res,
        NUMERIC_TOL,
        t0,
    )

    # (10) one state, every coupling: residual must not depend on g
    t0 = time.perf_counter()
    res = 0.0
    for g in g_values:
        w = build_w(table, g, g_fun, symmetrize=symmetrize)
        res = max(res, relative_dark_residual(w, state))
    record(
        "coupling_independence",
        {"g": [str(g) for g in g_values]},
        res,
        NUMERIC_TOL,
        t0,
    )

    assert [c.check_id for c in report.checks] == list(CHECK_IDS)
    return report


def _momentum_residual(table: ModeTable, state: StateVector) -> float:
    p_ops = build_momentum_op(table)
    expect = nc_momentum(table)
    res = 0.0
    for axis in range(3):
        table_component = expect[axis] - table.core_momentum[axis]
        res = max(res, eigen_residual(p_ops[axis], state, Fraction(table_component)))
    return res


# ---------------------------------------------------------------------------
# continuum energy comparison (pure counting, no Fock space)
# ---------------------------------------------------------------------------

def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def _strict_below(x: Fraction) -> int:
    """Largest integer strictly less than x."""
    f = _floor_frac(x)
    return f - 1 if x == f else f


def counting_energy(kf: float, delta: float, refinement: int, c: float = 1.0) -> dict:
    """Exact lattice sums of the paired construction at one grid refinement.

    ``refinement`` scales the box so the momentum quantum is 1/refinement;
    counts and integer second moments are exact, converted to floats at
    the end.
    """
    q = Fraction(1, refinement)
    lo2 = (Fraction(kf) - Fraction(delta)) ** 2 / q**2
    hi2 = (Fraction(kf) + Fraction(delta)) ** 2 / q**2
    inner_max = _strict_below(lo2)
    shell_lo = -(-lo2.numerator // lo2.denominator)  # ceil
    shell_hi = _floor_frac(hi2)

    reach = math.isqrt(shell_hi)
    axis = np.arange(-reach, reach + 1, dtype=np.int64)
    n2 = (
        axis[:, None, None] ** 2 + axis[None, :, None] ** 2 + axis[None, None, :] ** 2
    ).ravel()
    inner_mask = n2 <= inner_max
    shell_mask = (n2 >= shell_lo) & (n2 <= shell_hi)

    inner_count = int(inner_mask.sum())
    shell_count = int(shell_mask.sum())
    inner_m2 = int(n2[inner_mask].sum())
    shell_m2 = int(n2[shell_mask].sum())

    n_particles = 2 * inner_count + shell_count
    energy = Fraction(c) * q**2 * (2 * inner_m2 + shell_m2)
    return {
        "refinement": refinement,
        "grid_points": inner_count + shell_count,
        "particles": n_particles,
        "energy": float(energy),
        "energy_per_particle": float(energy) / n_particles if n_particles else math.nan,
    }


def closed_form_energy_per_particle(kf: float, delta: float, c: float = 1.0) -> float:
    """The model's closed-form per-particle energy 0.6*Ef*(1+10r^2+5r^4)."""
    r = delta / kf
    return 0.6 * c * kf * kf * (1.0 + 10.0 * r**2 + 5.0 * r**4)


def quadrature_energy_per_particle(kf: float, delta: float, c: float = 1.0) -> float:
    """Independent continuum oracle by numerical quadrature.

    Doubly occupied ball of radius kf-delta plus singly occupied shell,
    energy and particle integrals both by radial quadrature.
    """
    from scipy.integrate import quad

    a, b = kf - delta, kf + delta
    e_inner = quad(lambda k: c * k**4, 0.0, a)[0]
    e_shell = quad(lambda k: c * k**4, a, b)[0]
    n_inner = quad(lambda k: k**2, 0.0, a)[0]
    n_shell = quad(lambda k: k**2, a, b)[0]
    return (2.0 * e_inner + e_shell) / (2.0 * n_inner + n_shell)


def continuum_energy_check(
    kf: float, delta: float, sizes: Sequence[int], c: float = 1.0
) -> list[dict]:
    """One row per grid refinement comparing counting with both candidate
    closed forms; deviations are relative."""
    closed = closed_form_energy_per_particle(kf, delta, c)
    oracle = quadrature_energy_per_particle(kf, delta, c)
    rows = []
    for size in sizes:
        rec = counting_energy(kf, delta, size, c)
        e = rec["energy_per_particle"]
        rec.update(
            {
                "kf": kf,
                "delta": delta,
                "closed_form": closed,
                "quadrature_oracle": oracle,
                "dev_closed_form": abs(e - closed) / abs(closed),
                "dev_quadrature": abs(e - oracle) / abs(oracle),
            }
        )
        rows.append(rec)
    return rows


CONTINUUM_FIELDS = (
    "kf",
    "delta",
    "refinement",
    "grid_points",
    "particles",
    "energy",
    "energy_per_particle",
    "closed_form",
    "quadrature_oracle",
    "dev_closed_form",
    "dev_quadrature",
)


def continuum_rows_to_csv(rows: list[dict]) -> str:
    out = [",".join(CONTINUUM_FIELDS)]
    for row in rows:
        out.append(",".join(repr(row[f]) if isinstance(row[f], float) else str(row[f])
                            for f in CONTINUUM_FIELDS))
    return "\n".join(out) + "\n"
