"""Symbolic second-quantized operators with exact coefficients.

An operator is a finite sum of monomials ``coeff * f1 f2 ... fd`` where
each factor is a creation ("c") or annihilation ("a") of one mode.  Every
stored monomial is kept in canonical normal order: all creations before
all annihilations, each block sorted by ascending mode index, signs
tracked exactly through the rewriting

    a_i a+_j = delta_ij - a+_j a_i,      a_i a_j = -a_j a_i (i != j),
    a_i a_i = 0  (same for creations).

Canonical form makes operator equality a dictionary comparison, which is
what turns commutator identities into decidable checks.  Coefficients are
exact rationals throughout this module; complex values pass through the
arithmetic unchanged if a caller supplies them.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .fock import StateVector, apply_annihilate, apply_create
from .lattice import SPIN_DOWN, SPIN_UP, IVec, ModeTable

CREATE = "c"
ANNIHILATE = "a"

Factor = tuple[str, int]
Term = tuple[Factor, ...]

DEGREE_CAP = 8


class DegreeCapError(ValueError):
    """A monomial exceeded the configured factor-count cap."""


class ShellDomainError(ValueError):
    """A pair construction was requested for a point outside the shell."""


def _normal_order_term(coeff, factors: Term, cap: int, out: dict) -> None:
    """Accumulate the normal-ordered expansion of one monomial into ``out``."""
    if len(factors) > cap:
        raise DegreeCapError(
            f"monomial degree {len(factors)} exceeds cap {cap}"
        )
    stack: list[tuple[object, Term]] = [(coeff, tuple(factors))]
    while stack:
        cf, fac = stack.pop()
        pos = 0
        resolved = True
        while pos < len(fac) - 1:
            (k1, m1), (k2, m2) = fac[pos], fac[pos + 1]
            if k1 == ANNIHILATE and k2 == CREATE:
                # a_m1 a+_m2 = delta - a+_m2 a_m1
                if m1 == m2:
                    stack.append((cf, fac[:pos] + fac[pos + 2 :]))
                stack.append(
                    (-cf, fac[:pos] + ((k2, m2), (k1, m1)) + fac[pos + 2 :])
                )
                resolved = False
                break
            if k1 == k2:
                if m1 == m2:
                    resolved = False
                    break  # nilpotent: term vanishes
                if m1 > m2:
                    stack.append(
                        (-cf, fac[:pos] + ((k2, m2), (k1, m1)) + fac[pos + 2 :])
                    )
                    resolved = False
                    break
            pos += 1
        if resolved:
            cur = out.get(fac, 0) + cf
            if cur == 0:
                out.pop(fac, None)
            else:
                out[fac] = cur


class OperatorExpr:
    """Canonical (normal-ordered) term map with exact arithmetic."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Term, object] | None = None):
        self.terms: dict[Term, object] = terms if terms is not None else {}

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls) -> "OperatorExpr":
        return cls()

    @classmethod
    def identity(cls, coeff=Fraction(1)) -> "OperatorExpr":
        return cls({(): coeff} if coeff != 0 else {})

    @classmethod
    def from_monomial(
        cls, coeff, factors: Iterable[Factor], cap: int = DEGREE_CAP
    ) -> "OperatorExpr":
        out: dict[Term, object] = {}
        if coeff != 0:
            _normal_order_term(coeff, tuple(factors), cap, out)
        return cls(out)

    @classmethod
    def from_monomials(
        cls, monomials: Iterable[tuple[object, Iterable[Factor]]], cap: int = DEGREE_CAP
    ) -> "OperatorExpr":
        out: dict[Term, object] = {}
        for coeff, factors in monomials:
            if coeff != 0:
                _normal_order_term(coeff, tuple(factors), cap, out)
        return cls(out)

    # -- linear structure ---------------------------------------------
    def __add__(self, other: "OperatorExpr") -> "OperatorExpr":
        out = dict(self.terms)
        for t, c in other.terms.items():
            cur = out.get(t, 0) + c
            if cur == 0:
                out.pop(t, None)
            else:
                out[t] = cur
        return OperatorExpr(out)

    def __sub__(self, other: "OperatorExpr") -> "OperatorExpr":
        return self + (-other)

    def __neg__(self) -> "OperatorExpr":
        return OperatorExpr({t: -c for t, c in self.terms.items()})

    def scaled(self, factor) -> "OperatorExpr":
        if factor == 0:
            return OperatorExpr()
        return OperatorExpr({t: c * factor for t, c in self.terms.items()})

    def __rmul__(self, factor) -> "OperatorExpr":
        return self.scaled(factor)

    def __mul__(self, other) -> "OperatorExpr":
        if isinstance(other, OperatorExpr):
            return self.compose(other)
        return self.scaled(other)

    def compose(self, other: "OperatorExpr", cap: int = DEGREE_CAP) -> "OperatorExpr":
        """Operator product, normal-ordered."""
        out: dict[Term, object] = {}
        for t1, c1 in self._sorted_items():
            for t2, c2 in other._sorted_items():
                _normal_order_term(c1 * c2, t1 + t2, cap, out)
        return OperatorExpr(out)

    def dagger(self) -> "OperatorExpr":
        out: dict[Term, object] = {}
        for t, c in self._sorted_items():
            flipped = tuple(
                (CREATE if k == ANNIHILATE else ANNIHILATE, m) for k, m in reversed(t)
            )
            _normal_order_term(_conj(c), flipped, max(DEGREE_CAP, len(t)), out)
        return OperatorExpr(out)

    # -- queries --------------------------------------------------------
    def _sorted_items(self) -> list[tuple[Term, object]]:
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def __iter__(self) -> Iterator[tuple[Term, object]]:
        return iter(self._sorted_items())

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, OperatorExpr) and self.terms == other.terms

    def degree(self) -> int:
        return max((len(t) for t in self.terms), default=0)

    def one_norm(self):
        """Sum of |coefficients|: a cheap, basis-free operator-size bound."""
        return sum((abs(c) for c in self.terms.values()), Fraction(0))

    def conserves_particle_number(self) -> bool:
        for t in self.terms:
            creates = sum(1 for k, _ in t if k == CREATE)
            if 2 * creates != len(t):
                return False
        return True

    def is_hermitian(self) -> bool:
        return self == self.dagger()

    # -- serialization ----------------------------------------------------
    def to_json(self) -> str:
        rows = []
        for t, c in self._sorted_items():
            if not isinstance(c, (int, Fraction)):
                raise TypeError("operator dump requires exact rational coefficients")
            c = Fraction(c)
            rows.append(
                {
                    "coeff_num": c.numerator,
                    "coeff_den": c.denominator,
                    "factors": [[k, m] for k, m in t],
                }
            )
        return json.dumps(rows, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "OperatorExpr":
        terms: dict[Term, object] = {}
        for rec in json.loads(text):
            t = tuple((k, int(m)) for k, m in rec["factors"])
            terms[t] = Fraction(rec["coeff_num"], rec["coeff_den"])
        return cls(terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "OperatorExpr(0)"
        bits = []
        for t, c in self._sorted_items()[:8]:
            fs = " ".join(f"{k}{m}" for k, m in t) or "1"
            bits.append(f"({c})*{fs}")
        more = "" if len(self.terms) <= 8 else f" ... [{len(self.terms)} terms]"
        return "OperatorExpr(" + " + ".join(bits) + more + ")"


def _conj(x):
    return x.conjugate() if isinstance(x, complex) else x


def commutator(a: OperatorExpr, b: OperatorExpr, cap: int = DEGREE_CAP) -> OperatorExpr:
    """Normal-ordered AB - BA."""
    return a.compose(b, cap) - b.compose(a, cap)


def normal_order(coeff, factors: Iterable[Factor], cap: int = DEGREE_CAP) -> OperatorExpr:
    """Canonicalize a single monomial, preserving its action exactly."""
    return OperatorExpr.from_monomial(coeff, factors, cap)


# ---------------------------------------------------------------------------
# application to state vectors
# ---------------------------------------------------------------------------

def apply_operator(expr: OperatorExpr, vec: StateVector) -> StateVector:
    """Exact linear action; factors applied right-to-left.

    Accumulation iterates states and terms in canonical order, so the
    result is reproducible bit for bit regardless of construction order.
    """
    n = vec.n_modes
    out = StateVector(n)
    terms = expr._sorted_items()
    for occ, amp in vec.terms():
        for factors, coeff in terms:
            cur = occ
            sign = 1
            dead = False
            for kind, mode in reversed(factors):
                step = (
                    apply_create(n, mode, cur)
                    if kind == CREATE
                    else apply_annihilate(n, mode, cur)
                )
                if step is None:
                    dead = True
                    break
                s, cur = step
                sign = -sign if s < 0 else sign
            if not dead:
                out.add_term(cur, coeff * amp * sign)
    return out


def matrix_in_sector(
    expr: OperatorExpr,
    basis: list[int],
    n_modes: int,
    sparse: bool = False,
):
    """Matrix entries <basis_r | expr | basis_c> on an ordered basis.

    When the basis is a fixed particle-number sector the operator must
    conserve particle number, otherwise weight would leak out of the
    block and the matrix would misrepresent the operator.
    """
    import numpy as np

    numbers = {occ.bit_count() for occ in basis}
    if len(numbers) == 1 and not expr.conserves_particle_number():
        raise ValueError(
            "operator does not conserve particle number on a number-sector basis"
        )
    index = {occ: i for i, occ in enumerate(basis)}
    dim = len(basis)
    terms = expr._sorted_items()

    if sparse:
        from scipy.sparse import csr_matrix

        data, rows, cols = [], [], []
        for col, occ in enumerate(basis):
            acc: dict[int, complex] = {}
            _apply_terms_to_occ(terms, n_modes, occ, acc)
            for res in sorted(acc):
                row = index.get(res)
                if row is not None:
                    rows.append(row)
                    cols.append(col)
                    data.append(complex(acc[res]))
        return csr_matrix((data, (rows, cols)), shape=(dim, dim), dtype=np.complex128)

    mat = np.zeros((dim, dim), dtype=np.complex128)
    for col, occ in enumerate(basis):
        acc = {}
        _apply_terms_to_occ(terms, n_modes, occ, acc)
        for res, val in acc.items():
            row = index.get(res)
            if row is not None:
                mat[row, col] = complex(val)
    return mat


def _apply_terms_to_occ(terms, n_modes: int, occ: int, acc: dict) -> None:
    for factors, coeff in terms:
        cur = occ
        sign = 1
        dead = False
        for kind, mode in reversed(factors):
            step = (
                apply_create(n_modes, mode, cur)
                if kind == CREATE
                else apply_annihilate(n_modes, mode, cur)
            )
            if step is None:
                dead = True
                break
            s, cur = step
            sign = -sign if s < 0 else sign
        if not dead:
            acc[cur] = acc.get(cur, 0) + coeff * sign


# ---------------------------------------------------------------------------
# model operator builders
# ---------------------------------------------------------------------------

Formfactor = Callable[[IVec, IVec], object]


def unit_formfactor(k1: IVec, k2: IVec):
    return Fraction(1)


def build_h0(table: ModeTable) -> OperatorExpr:
    """Kinetic term: sum of eps(k) a+ a over every table mode.

    Frozen-core energy is not part of the expression; it lives in the
    table's analytic core record.
    """
    terms: dict[Term, object] = {}
    for i, mode in enumerate(table.modes):
        e = table.epsilon(mode.n)
        if e != 0:
            terms[((CREATE, i), (ANNIHILATE, i))] = e
    return OperatorExpr(terms)


def build_number_op(table: ModeTable) -> OperatorExpr:
    terms: dict[Term, object] = {
        ((CREATE, i), (ANNIHILATE, i)): Fraction(1) for i in range(table.n_modes)
    }
    return OperatorExpr(terms)


def build_momentum_op(table: ModeTable) -> tuple[OperatorExpr, OperatorExpr, OperatorExpr]:
    """Total momentum per axis, in grid units (integer coefficients)."""
    exprs = []
    for axis in range(3):
        terms: dict[Term, object] = {}
        for i, mode in enumerate(table.modes):
            comp = mode.n[axis]
            if comp:
                terms[((CREATE, i), (ANNIHILATE, i))] = Fraction(comp)
        exprs.append(OperatorExpr(terms))
    return tuple(exprs)


def _require_shell(table: ModeTable, k: IVec) -> IVec:
    k = tuple(k)
    if not table.is_shell(k):
        raise ShellDomainError(f"{k} is not a shell point of this lattice")
    return k


def build_pair(table: ModeTable, k: IVec, lam) -> OperatorExpr:
    """Two-particle creator a+_{up,k} a+_{dn,pk} + lam a+_{up,pk} a+_{dn,k}.

    ``pk = 2K - k`` is the pairing partner; ``lam`` is an arbitrary exact
    weight on the exchanged branch.
    """
    k = _require_shell(table, k)
    pk = table.partner(k)
    up_k = table.mode_index(SPIN_UP, k)
    dn_pk = table.mode_index(SPIN_DOWN, pk)
    up_pk = table.mode_index(SPIN_UP, pk)
    dn_k = table.mode_index(SPIN_DOWN, k)
    return OperatorExpr.from_monomials(
        [
            (Fraction(1), ((CREATE, up_k), (CREATE, dn_pk))),
            (Fraction(lam), ((CREATE, up_pk), (CREATE, dn_k))),
        ]
    )


def build_gamma(table: ModeTable, k: IVec) -> OperatorExpr:
    """The antisymmetric pair creator: the lam = -1 member of build_pair."""
    return build_pair(table, k, Fraction(-1))


def symmetrized_formfactor(table: ModeTable, g_fun: Formfactor) -> Formfactor:
    """Average g_fun over partner flips of both arguments.

    The pairing interaction is only guaranteed to be nullified by the
    paired states when the formfactor is invariant under k -> 2K - k in
    each argument separately; ingestion through this wrapper enforces
    that symmetry for any user-supplied weight.
    """

    def sym(k1: IVec, k2: IVec):
        p1, p2 = table.partner(k1), table.partner(k2)
        total = g_fun(k1, k2) + g_fun(p1, k2) + g_fun(k1, p2) + g_fun(p1, p2)
        return total / 4

    return sym


def build_w(
    table: ModeTable,
    g,
    formfactor: Formfactor | None = None,
    symmetrize: bool = True,
) -> OperatorExpr:
    """Pairing interaction over the full shell (both hemispheres).

    (g / volume) * sum_{k1,k2 in shell} G(k1,k2)
        a+_{up,k1} a+_{dn,p(k1)} a_{dn,p(k2)} a_{up,k2}

    ``symmetrize=False`` uses the supplied weight verbatim (strict mode);
    an asymmetric weight then produces an interaction the paired states
    do not nullify, which is useful as a negative control.
    """
    g_fun = formfactor if formfactor is not None else unit_formfactor
    if symmetrize:
        g_fun = symmetrized_formfactor(table, g_fun)
    pref = Fraction(g) / table.config.volume_fraction
    monomials = []
    for k1 in table.shell_all:
        p1 = table.partner(k1)
        c_up = table.mode_index(SPIN_UP, k1)
        c_dn = table.mode_index(SPIN_DOWN, p1)
        for k2 in table.shell_all:
            coeff = pref * g_fun(k1, k2)
            if coeff == 0:
                continue
            p2 = table.partner(k2)
            a_dn = table.mode_index(SPIN_DOWN, p2)
            a_up = table.mode_index(SPIN_UP, k2)
            monomials.append(
                (
                    coeff,
                    (
                        (CREATE, c_up),
                        (CREATE, c_dn),
                        (ANNIHILATE, a_dn),
                        (ANNIHILATE, a_up),
                    ),
                )
            )
    return OperatorExpr.from_monomials(monomials)


def pair_commutator_rhs(
    table: ModeTable,
    k: IVec,
    lam,
    g,
    formfactor: Formfactor | None = None,
    symmetrize: bool = True,
) -> OperatorExpr:
    """Independently constructed closed form of [W, build_pair(k, lam)].

    sum_{k1} G(k1,k) (g/volume) a+_{up,k1} a+_{dn,p(k1)} *
        (1 + lam - lam n_{up,pk} - lam n_{dn,k} - n_{up,k} - n_{dn,pk})
    """
    k = _require_shell(table, k)
    g_fun = formfactor if formfactor is not None else unit_formfactor
    if symmetrize:
        g_fun = symmetrized_formfactor(table, g_fun)
    pref = Fraction(g) / table.config.volume_fraction
    lam = Fraction(lam)
    pk = table.partner(k)
    up_k = table.mode_index(SPIN_UP, k)
    dn_k = table.mode_index(SPIN_DOWN, k)
    up_pk = table.mode_index(SPIN_UP, pk)
    dn_pk = table.mode_index(SPIN_DOWN, pk)

    monomials = []
    for k1 in table.shell_all:
        coeff = pref * g_fun(k1, k)
        if coeff == 0:
            continue
        p1 = table.partner(k1)
        head = ((CREATE, table.mode_index(SPIN_UP, k1)),
                (CREATE, table.mode_index(SPIN_DOWN, p1)))
        monomials.append((coeff * (1 + lam), head))
        for weight, idx in (
            (-lam, up_pk),
            (-lam, dn_k),
            (Fraction(-1), up_k),
            (Fraction(-1), dn_pk),
        ):
            monomials.append(
                (coeff * weight, head + ((CREATE, idx), (ANNIHILATE, idx)))
            )
    return OperatorExpr.from_monomials(monomials)


def gamma_commutator_rhs(
    table: ModeTable,
    k: IVec,
    g,
    formfactor: Formfactor | None = None,
    symmetrize: bool = True,
) -> OperatorExpr:
    """Closed form of [W, gamma_k]: the lam = -1 pair commutator."""
    return pair_commutator_rhs(table, k, Fraction(-1), g, formfactor, symmetrize)
