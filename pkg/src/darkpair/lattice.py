"""Discrete momentum shells around a Fermi surface.

Grid points are integer triples ``n = (nx, ny, nz)``; the physical
wavevector is ``k = (2*pi/L) * n``.  A lattice splits its points into an
inner filled region (``|k - K| < kf - delta``), a thin interacting shell
(``kf - delta <= |k - K| <= kf + delta``), and everything else, where
``K`` is an optional drift wavevector the whole construction is centred
on.  Shell points come in partner pairs ``n <-> 2K - n`` and exactly one
point of each pair is labelled SHELL_PLUS.

All membership decisions compare the integer ``|n - K|^2`` against exact
rational bounds, so boundary points are never misclassified by floating
point.  The resulting mode ordering is total and deterministic; every
fermionic sign downstream depends on it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, NamedTuple

TAU = 2.0 * math.pi

SPIN_UP = 0
SPIN_DOWN = 1
SPIN_NAMES = {SPIN_UP: "up", SPIN_DOWN: "down"}

INNER = "inner"
SHELL_PLUS = "shell+"
SHELL_MINUS = "shell-"

IVec = tuple[int, int, int]


class LatticeError(ValueError):
    """Invalid lattice configuration or classification failure."""


class EmptyShellError(LatticeError):
    """No grid point falls inside the interacting shell."""


class UnpairedModeError(LatticeError):
    """A shell point's partner 2K - n is missing from the shell."""


def vneg(n: IVec) -> IVec:
    return (-n[0], -n[1], -n[2])


def vadd(a: IVec, b: IVec) -> IVec:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vsub(a: IVec, b: IVec) -> IVec:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def norm2(n: IVec) -> int:
    return n[0] * n[0] + n[1] * n[1] + n[2] * n[2]


def zyx_key(n: IVec) -> tuple[int, int, int]:
    """Sort key used everywhere a set of grid points needs a total order."""
    return (n[2], n[1], n[0])


def hemisphere_positive(u: IVec) -> bool:
    """Tie-broken upper-hemisphere test: u_z > 0, then u_y, then u_x.

    Applied to the offset ``u = n - K`` so that exactly one point of each
    partner pair tests positive (u = 0 never occurs in a valid shell).
    """
    return u[2] > 0 or (u[2] == 0 and (u[1] > 0 or (u[1] == 0 and u[0] > 0)))


@dataclass(frozen=True)
class LatticeConfig:
    """Physical parameters of a momentum lattice.

    ``kf`` and ``delta`` are in units of 1/length; ``L`` is the box edge.
    ``c`` scales the quadratic dispersion ``eps(k) = c*|k|^2`` and ``mu``
    (if set) shifts it to ``eps - mu``.  ``boost`` recentres the whole
    shell construction on the grid point ``K``.  ``volume`` is the volume
    factor dividing the coupling in the interaction; it defaults to L^3
    but may be pinned to an exact value (tests use 1) so that interaction
    coefficients stay rational.  ``shell_points`` optionally restricts the
    shell to an explicit partner-closed subset of the radial band; the
    shell population is an experimental knob, and small fixed shells are
    how few-pair model spaces are made.
    """

    kf: float
    delta: float
    L: float = TAU
    c: float = 1.0
    mu: float | None = None
    boost: IVec = (0, 0, 0)
    frozen_core: bool = False
    shell_points: tuple[IVec, ...] | None = None
    volume: float | Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "boost", tuple(self.boost))
        if self.shell_points is not None:
            object.__setattr__(
                self, "shell_points", tuple(tuple(p) for p in self.shell_points)
            )

    def validate(self) -> None:
        if not self.delta > 0:
            raise LatticeError("delta must be positive")
        if not self.kf > self.delta:
            raise LatticeError("kf must exceed delta (shell must not reach the origin)")
        if not self.L > 0:
            raise LatticeError("box size L must be positive")

    # Exact rational views of the float fields.  Fraction(float) is the
    # exact binary value, so comparisons below are reproducible.
    @property
    def kunit2(self) -> Fraction:
        """(2*pi/L)^2 as an exact rational (1 for the default box)."""
        return (Fraction(TAU) / Fraction(self.L)) ** 2

    @property
    def volume_fraction(self) -> Fraction:
        if self.volume is not None:
            return Fraction(self.volume)
        return Fraction(self.L) ** 3

    def radius2_grid(self, radius: float | Fraction) -> Fraction:
        """(radius / kunit)^2: squared grid-norm bound for a physical radius."""
        return Fraction(radius) ** 2 / self.kunit2

    @property
    def shell_bounds2(self) -> tuple[Fraction, Fraction]:
        lo = Fraction(self.kf) - Fraction(self.delta)
        hi = Fraction(self.kf) + Fraction(self.delta)
        return self.radius2_grid(lo), self.radius2_grid(hi)

    def epsilon(self, n: IVec) -> Fraction:
        """Single-particle energy c*|k|^2 (- mu if set) at grid point n."""
        e = Fraction(self.c) * self.kunit2 * norm2(n)
        if self.mu is not None:
            e -= Fraction(self.mu)
        return e


def dispersion(config: LatticeConfig, n: IVec) -> Fraction:
    """Exact dispersion value at grid point ``n`` (mu-shifted when set)."""
    return config.epsilon(tuple(n))


class Mode(NamedTuple):
    spin: int
    n: IVec


@dataclass(frozen=True)
class ModeTable:
    """Ordered single-particle modes of a lattice plus the frozen-core record.

    Mode order is (partition INNER < SHELL_PLUS < SHELL_MINUS, then
    (n_z, n_y, n_x) lexicographic, then spin up < down).  When the core is
    frozen, inner modes are dropped from the table and summarized by
    ``core_particles`` / ``core_energy`` / ``core_momentum``.
    """

    config: LatticeConfig
    modes: tuple[Mode, ...]
    inner_points: tuple[IVec, ...]
    shell_plus: tuple[IVec, ...]
    shell_minus: tuple[IVec, ...]
    core_particles: int = 0
    core_energy: Fraction = Fraction(0)
    core_momentum: IVec = (0, 0, 0)
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._index.update({m: i for i, m in enumerate(self.modes)})

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def shell_all(self) -> tuple[IVec, ...]:
        return self.shell_plus + self.shell_minus

    def mode_index(self, spin: int, n: IVec) -> int:
        return self._index[Mode(spin, tuple(n))]

    def partner(self, n: IVec) -> IVec:
        """Pairing partner 2K - n (plain negation for an unboosted lattice)."""
        k = self.config.boost
        return (2 * k[0] - n[0], 2 * k[1] - n[1], 2 * k[2] - n[2])

    def partition_of(self, n: IVec) -> str:
        n = tuple(n)
        if n in self.inner_points:
            return INNER
        if n in self.shell_plus:
            return SHELL_PLUS
        if n in self.shell_minus:
            return SHELL_MINUS
        raise KeyError(f"grid point {n} not in table")

    def is_shell(self, n: IVec) -> bool:
        n = tuple(n)
        return n in self.shell_plus or n in self.shell_minus

    def epsilon(self, n: IVec) -> Fraction:
        return self.config.epsilon(n)

    def total_particles_nc(self) -> int:
        """Particle count of the fully paired construction, core included."""
        live_inner = 0 if self.config.frozen_core else len(self.inner_points)
        return self.core_particles + 2 * live_inner + 2 * len(self.shell_plus)

    def descriptor(self) -> str:
        return (
            f"inner={len(self.inner_points)} plus={len(self.shell_plus)} "
            f"modes={self.n_modes} frozen={self.config.frozen_core} "
            f"K={self.config.boost}"
        )

    def to_json(self) -> str:
        rows = []
        for i, m in enumerate(self.modes):
            rows.append(
                {
                    "index": i,
                    "spin": SPIN_NAMES[m.spin],
                    "n": list(m.n),
                    "partition": self.partition_of(m.n),
                }
            )
        return json.dumps(rows, indent=None, separators=(",", ":"), sort_keys=True)


def _enumerate_ball(center: IVec, max_r2: Fraction) -> Iterable[IVec]:
    reach = math.isqrt(math.floor(max_r2))
    for dz in range(-reach, reach + 1):
        for dy in range(-reach, reach + 1):
            for dx in range(-reach, reach + 1):
                n = (center[0] + dx, center[1] + dy, center[2] + dz)
                yield n


def build_mode_table(config: LatticeConfig) -> ModeTable:
    """Classify the grid and fix the global mode order.

    Pure: identical configs produce identical tables.  Raises
    EmptyShellError / UnpairedModeError / LatticeError on bad inputs.
    """
    config.validate()
    lo2, hi2 = config.shell_bounds2
    K = config.boost

    inner: list[IVec] = []
    shell: list[IVec] = []
    if config.shell_points is not None:
        seen = set()
        for n in config.shell_points:
            if n in seen:
                raise LatticeError(f"duplicate shell point {n}")
            seen.add(n)
            u2 = norm2(vsub(n, K))
            if not (lo2 <= u2 <= hi2):
                raise LatticeError(
                    f"explicit shell point {n} lies outside the shell band"
                )
            shell.append(tuple(n))
        for n in shell:
            if tuple_partner(K, n) not in seen:
                raise UnpairedModeError(f"shell point {n} has no partner in the list")
    else:
        for n in _enumerate_ball(K, hi2):
            u2 = norm2(vsub(n, K))
            if lo2 <= u2 <= hi2:
                shell.append(n)
    # Inner region is always radial.
    for n in _enumerate_ball(K, lo2):
        if norm2(vsub(n, K)) < lo2:
            inner.append(n)

    if not shell:
        raise EmptyShellError("no grid point falls inside the shell band")
    shell_set = set(shell)
    for n in shell_set:
        if tuple_partner(K, n) not in shell_set:
            raise UnpairedModeError(f"shell point {n} is unpaired")

    plus = sorted((n for n in shell if hemisphere_positive(vsub(n, K))), key=zyx_key)
    plus_set = set(plus)
    minus = sorted((n for n in shell if n not in plus_set), key=zyx_key)
    inner.sort(key=zyx_key)

    core_particles = 0
    core_energy = Fraction(0)
    core_momentum = (0, 0, 0)
    point_groups: list[list[IVec]] = [inner, plus, minus]
    if config.frozen_core:
        core_particles = 2 * len(inner)
        core_energy = 2 * sum((config.epsilon(n) for n in inner), Fraction(0))
        cm = [0, 0, 0]
        for n in inner:
            for ax in range(3):
                cm[ax] += 2 * n[ax]
        core_momentum = tuple(cm)
        point_groups = [[], plus, minus]

    modes: list[Mode] = []
    for group in point_groups:
        for n in group:
            modes.append(Mode(SPIN_UP, n))
            modes.append(Mode(SPIN_DOWN, n))
    if len(modes) > 64:
        raise LatticeError(
            f"{len(modes)} modes exceed the 64-bit occupation word; "
            "shrink the shell or freeze the core"
        )

    return ModeTable(
        config=config,
        modes=tuple(modes),
        inner_points=tuple(inner),
        shell_plus=tuple(plus),
        shell_minus=tuple(minus),
        core_particles=core_particles,
        core_energy=core_energy,
        core_momentum=core_momentum,
    )


def tuple_partner(K: IVec, n: IVec) -> IVec:
    return (2 * K[0] - n[0], 2 * K[1] - n[1], 2 * K[2] - n[2])


def unfrozen_twin(table: ModeTable) -> ModeTable:
    """Same lattice with the core thawed back into explicit modes."""
    if not table.config.frozen_core:
        return table
    return build_mode_table(replace(table.config, frozen_core=False))


def boosted_twin(table: ModeTable, K: IVec) -> ModeTable:
    """The same relative lattice recentred on drift vector K."""
    cfg = table.config
    shift = vsub(tuple(K), cfg.boost)
    pts = cfg.shell_points
    if pts is not None:
        pts = tuple(vadd(p, shift) for p in pts)
    return build_mode_table(replace(cfg, boost=tuple(K), shell_points=pts))
