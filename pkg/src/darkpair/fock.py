"""Occupation-number states over a fixed mode ordering.

A Fock state is an M-bit occupation pattern packed into a Python int,
with mode 0 at the most significant bit.  That convention makes the
integer order of packed states coincide with the lexicographic order of
their printed bitstrings (mode 0 leftmost), which is the iteration order
used for every deterministic reduction in this package.

Creation/annihilation carry the usual fermionic sign
``(-1)**(number of occupied modes with smaller index)``.
"""

from __future__ import annotations

import json
import math
from typing import Iterator

MAX_MODES = 64
BASIS_CAP = 2_000_000

Scalar = complex  # amplitudes may also be int / Fraction / float


class BasisSizeError(ValueError):
    """A requested particle-number sector exceeds the basis cap."""


def mode_bit(n_modes: int, i: int) -> int:
    return 1 << (n_modes - 1 - i)


def occupied(n_modes: int, occ: int, i: int) -> bool:
    return bool(occ & mode_bit(n_modes, i))


def parity_sign(n_modes: int, occ: int, i: int) -> int:
    """Sign from anticommuting past the occupied modes with index < i."""
    return -1 if (occ >> (n_modes - i)).bit_count() & 1 else 1


def apply_create(n_modes: int, i: int, occ: int) -> tuple[int, int] | None:
    """Create a particle in mode ``i``; None encodes Pauli exclusion."""
    bit = mode_bit(n_modes, i)
    if occ & bit:
        return None
    return parity_sign(n_modes, occ, i), occ | bit


def apply_annihilate(n_modes: int, i: int, occ: int) -> tuple[int, int] | None:
    """Remove the particle in mode ``i``; None if the mode is empty."""
    bit = mode_bit(n_modes, i)
    if not occ & bit:
        return None
    return parity_sign(n_modes, occ, i), occ & ~bit


def occ_to_bitstring(n_modes: int, occ: int) -> str:
    return format(occ, f"0{n_modes}b")


def bitstring_to_occ(bits: str) -> int:
    return int(bits, 2)


def sector_basis(n_modes: int, n_particles: int, cap: int = BASIS_CAP) -> list[int]:
    """All C(M, N) occupations with N particles, ascending.

    Enumerated with Gosper's hack so the list is produced already sorted.
    """
    if not 0 <= n_particles <= n_modes:
        return []
    size = math.comb(n_modes, n_particles)
    if size > cap:
        raise BasisSizeError(
            f"sector dimension C({n_modes},{n_particles}) = {size} exceeds cap {cap}"
        )
    if n_particles == 0:
        return [0]
    v = (1 << n_particles) - 1
    limit = 1 << n_modes
    out = []
    while v < limit:
        out.append(v)
        c = v & -v
        r = v + c
        v = (((r ^ v) >> 2) // c) | r
    return out


class StateVector:
    """Sparse amplitude map over packed Fock states.

    Amplitudes may be exact (int / Fraction) or floating complex; exact
    zeros are dropped on insertion so that "the residual vanishes" is a
    statement about an empty map, not about small numbers.
    """

    __slots__ = ("n_modes", "amp")

    def __init__(self, n_modes: int, amplitudes: dict[int, Scalar] | None = None):
        if n_modes > MAX_MODES:
            raise ValueError(f"n_modes {n_modes} exceeds {MAX_MODES}")
        self.n_modes = n_modes
        self.amp: dict[int, Scalar] = {}
        if amplitudes:
            for occ, a in amplitudes.items():
                self.add_term(occ, a)

    @classmethod
    def vacuum(cls, n_modes: int) -> "StateVector":
        return cls(n_modes, {0: 1})

    def copy(self) -> "StateVector":
        out = StateVector(self.n_modes)
        out.amp = dict(self.amp)
        return out

    def add_term(self, occ: int, value: Scalar) -> None:
        cur = self.amp.get(occ, 0) + value
        if cur == 0:
            self.amp.pop(occ, None)
        else:
            self.amp[occ] = cur

    def terms(self) -> Iterator[tuple[int, Scalar]]:
        """(occ, amplitude) pairs in ascending occupation order."""
        for occ in sorted(self.amp):
            yield occ, self.amp[occ]

    def __len__(self) -> int:
        return len(self.amp)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StateVector)
            and self.n_modes == other.n_modes
            and self.amp == other.amp
        )

    def scaled(self, factor: Scalar) -> "StateVector":
        out = StateVector(self.n_modes)
        if factor == 0:
            return out
        out.amp = {occ: a * factor for occ, a in self.amp.items()}
        return out

    def __add__(self, other: "StateVector") -> "StateVector":
        self._check_space(other)
        out = self.copy()
        for occ, a in other.amp.items():
            out.add_term(occ, a)
        return out

    def __sub__(self, other: "StateVector") -> "StateVector":
        return self + other.scaled(-1)

    def _check_space(self, other: "StateVector") -> None:
        if self.n_modes != other.n_modes:
            raise ValueError(
                f"mode table mismatch: {self.n_modes} vs {other.n_modes} modes"
            )

    def inner(self, other: "StateVector") -> Scalar:
        """<self|other> with the left argument conjugated."""
        self._check_space(other)
        if len(other.amp) < len(self.amp):
            keys = other.amp.keys() & self.amp.keys()
        else:
            keys = self.amp.keys() & other.amp.keys()
        total: Scalar = 0
        for occ in sorted(keys):
            total += self.amp[occ].conjugate() * other.amp[occ]
        return total

    def norm2(self) -> Scalar:
        total: Scalar = 0
        for occ in sorted(self.amp):
            a = self.amp[occ]
            total += a.conjugate() * a
        return total.real if isinstance(total, complex) else total

    def norm(self) -> float:
        return math.sqrt(float(self.norm2()))

    def purge(self, eps: float = 0.0) -> "StateVector":
        """Drop amplitudes with |a| <= eps (eps=0 keeps everything stored)."""
        if eps <= 0:
            return self
        out = StateVector(self.n_modes)
        out.amp = {occ: a for occ, a in self.amp.items() if abs(a) > eps}
        return out

    def particle_numbers(self) -> set[int]:
        return {occ.bit_count() for occ in self.amp}

    def to_jsonl(self) -> str:
        lines = []
        for occ, a in self.terms():
            ca = complex(a)
            lines.append(
                json.dumps(
                    {
                        "bitstring": occ_to_bitstring(self.n_modes, occ),
                        "re": ca.real,
                        "im": ca.imag,
                    },
                    separators=(",", ":"),
                )
            )
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_jsonl(cls, text: str) -> "StateVector":
        amp: dict[int, complex] = {}
        n_modes = None
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            bits = rec["bitstring"]
            if n_modes is None:
                n_modes = len(bits)
            elif n_modes != len(bits):
                raise ValueError("inconsistent bitstring widths")
            amp[bitstring_to_occ(bits)] = complex(rec["re"], rec["im"])
        if n_modes is None:
            raise ValueError("empty state serialization")
        out = cls(n_modes)
        out.amp = amp
        return out

    def __repr__(self) -> str:
        parts = [
            f"{a!r}|{occ_to_bitstring(self.n_modes, occ)}>" for occ, a in self.terms()
        ]
        return "StateVector(" + " + ".join(parts) + ")" if parts else "StateVector(0)"


def inner_product(a: StateVector, b: StateVector) -> Scalar:
    return a.inner(b)
