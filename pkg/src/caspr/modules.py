"""Z-submodules of K in canonical Hermite form, and the specific modules of CASPr."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

from .intlinalg import hnf, solve_integer
from .ring import (ALPHA, BASIS, I_SQRT3, I_SQRT5, LAM, ONE, XI, RingElement,
                   dual_form)


class RankError(ValueError):
    pass


class ZModule4:
    """A finitely generated Z-submodule of K = Q^4 (coordinates over 1, xi, lam, lam*xi).

    Stored as ``(1/denominator) * span(rows)`` with ``rows`` in row Hermite
    normal form and the denominator as small as possible, so two modules are
    equal exactly when their canonical data agree.
    """

    __slots__ = ("rows", "denominator")

    def __init__(self, rows: Sequence[Sequence[int]], denominator: int = 1) -> None:
        h = hnf(rows)
        content = reduce(gcd, (x for r in h for x in r), 0)
        g = gcd(content, denominator) if content else denominator
        if g > 1:
            h = [[x // g for x in r] for r in h]
            denominator //= g
        self.rows = tuple(tuple(r) for r in h)
        self.denominator = denominator

    @classmethod
    def from_generators(cls, gens: Iterable[RingElement]) -> ZModule4:
        gens = list(gens)
        den = reduce(lcm, (c.denominator for g in gens for c in g.coords), 1)
        rows = [[int(c * den) for c in g.coords] for g in gens]
        return cls(rows, den)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def basis(self) -> list[RingElement]:
        d = self.denominator
        return [RingElement(*(Fraction(x, d) for x in r)) for r in self.rows]

    def __eq__(self, other) -> bool:
        return (isinstance(other, ZModule4) and self.rows == other.rows
                and self.denominator == other.denominator)

    def __hash__(self) -> int:
        return hash((self.rows, self.denominator))

    def __repr__(self) -> str:
        return f"ZModule4(rows={list(map(list, self.rows))}, denominator={self.denominator})"

    def covolume(self) -> Fraction:
        """Index of the module relative to Z^4 (a rational number for full rank)."""
        if self.rank != 4:
            raise RankError("covolume needs a rank-4 module")
        d = 1
        for i, r in enumerate(self.rows):
            d *= r[i]
        return Fraction(abs(d), self.denominator ** 4)

    def contains(self, x: RingElement) -> bool:
        v = [c * self.denominator for c in x.coords]
        if any(c.denominator != 1 for c in v):
            return False
        if not self.rows:
            return not any(v)
        sol = solve_integer(self.rows, [int(c) for c in v])
        return sol is not None and all(s.denominator == 1 for s in sol)

    def __contains__(self, x: RingElement) -> bool:
        return self.contains(x)

    def is_submodule_of(self, other: ZModule4) -> bool:
        return all(other.contains(b) for b in self.basis())

    def __add__(self, other: ZModule4) -> ZModule4:
        return ZModule4.from_generators(self.basis() + other.basis())

    def scaled(self, z: RingElement) -> ZModule4:
        return ZModule4.from_generators(z * b for b in self.basis())

    def reduce(self, x: RingElement) -> RingElement:
        """Canonical representative of x modulo the module (requires full rank)."""
        if self.rank != 4:
            raise RankError("reduction needs a rank-4 module")
        d = self.denominator
        v = [c * d for c in x.coords]
        out = list(v)
        for i, r in enumerate(self.rows):
            q = math.floor(out[i] / r[i])
            out = [a - q * b for a, b in zip(out, r)]
        return RingElement(*(c / d for c in out))


def module_from_generators(gens: Iterable[RingElement]) -> ZModule4:
    return ZModule4.from_generators(gens)


def equal(m: ZModule4, n: ZModule4) -> bool:
    return m == n


def contains(m: ZModule4, x: RingElement) -> bool:
    return m.contains(x)


def index(m: ZModule4, n: ZModule4) -> int:
    """[M : N] for a full-rank submodule N of M."""
    if not n.is_submodule_of(m):
        raise ValueError("second module is not contained in the first")
    q = n.covolume() / m.covolume()
    if q.denominator != 1:
        raise ArithmeticError(f"non-integral index {q}")
    return int(q)


def is_ideal(m: ZModule4) -> bool:
    """True when xi*M and lam*M lie in M (so M is a Z[xi, lam]-module)."""
    return all(m.contains(XI * b) and m.contains(LAM * b) for b in m.basis())


def gram_matrix(elements: Sequence[RingElement]) -> list[list[Fraction]]:
    return [[dual_form(x, y) for y in elements] for x in elements]


def dual_module(m: ZModule4) -> ZModule4:
    """{y in K : x.y + (x.y)' in Z for every x in M}."""
    if m.rank != 4:
        raise RankError("dual module is only defined for rank-4 modules")
    b = m.basis()
    # y = sum_j c_j e_j ; condition sum_j c_j form(b_i, e_j) in Z for all i
    a = [[dual_form(bi, ej) for ej in BASIS] for bi in b]
    inv = _inverse(a)
    # columns of inv are the dual basis coordinate vectors
    gens = [RingElement(*(inv[r][c] for r in range(4))) for c in range(4)]
    return ZModule4.from_generators(gens)


def _inverse(a: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(a)
    aug = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    for c in range(n):
        k = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[k] = aug[k], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [r[n:] for r in aug]


def ideal_generated_by(gens: Iterable[RingElement]) -> ZModule4:
    """The Z[xi, lam]-ideal generated by ``gens``."""
    return ZModule4.from_generators(g * b for g in gens for b in BASIS)


# --- the named modules ---------------------------------------------------

ORDER = ZModule4.from_generators(BASIS)

EDGE_MODULE_BASIS = (RingElement(1, 0, 0, 1), RingElement(0, -1, 1, -1),
                     RingElement(-1, -1, 1, 1), RingElement(0, 1, 2, 1))
RETURN_MODULE_BASIS = (RingElement(-1, -1, 1, -2), RingElement(2, -1, 1, 1),
                       RingElement(2, 2, 1, -2), RingElement(-2, 1, 2, 2))
#: the generators 1+xi+2lam+5lam*xi, 3xi+6lam*xi, 3lam+3lam*xi, 9lam*xi
RETURN_MODULE_ALT = (RingElement(1, 1, 2, 5), RingElement(0, 3, 0, 6),
                     RingElement(0, 0, 3, 3), RingElement(0, 0, 0, 9))

G1 = RingElement(-1, -1, 1, -2)
#: xi * G1; the printed g2 carries the opposite sign on lam*xi
G2 = XI * G1
G2_PRINTED = RingElement(1, -2, 2, 1)
G3 = RingElement(-2, 1, 2, 2)
G4 = RingElement(-2, -2, -1, 2)

EDGE_MODULE = ZModule4.from_generators(EDGE_MODULE_BASIS)
RETURN_MODULE = ZModule4.from_generators(RETURN_MODULE_BASIS)


def maximal_order() -> ZModule4:
    """O_K = <1, alpha, alpha^2/5, alpha^3/5> with alpha = sqrt5 exp(2 pi i/12)."""
    a2 = ALPHA * ALPHA
    a3 = a2 * ALPHA
    return ZModule4.from_generators([ONE, ALPHA, a2.scale(Fraction(1, 5)), a3.scale(Fraction(1, 5))])


def maximal_order_dual_expected() -> ZModule4:
    """(sqrt15 / 15) O_K."""
    return maximal_order().scaled((LAM - 4).scale(Fraction(1, 15)))


def order_dual_expected() -> ZModule4:
    """(i sqrt5 / 15) Z[xi, lam]."""
    return ORDER.scaled(I_SQRT5.scale(Fraction(1, 15)))


def return_dual_expected() -> ZModule4:
    """(i sqrt5 / 135) L."""
    return RETURN_MODULE.scaled(I_SQRT5.scale(Fraction(1, 135)))


def i_sqrt3_maximal_order() -> ZModule4:
    return maximal_order().scaled(I_SQRT3)


def alpha_generators() -> tuple[RingElement, RingElement]:
    """The alternative ideal generators (3 xi + 3 alpha + 6, 3 alpha + 3 alpha xi)."""
    return (XI.scale(3) + ALPHA.scale(3) + 6, ALPHA.scale(3) + (ALPHA * XI).scale(3))


def unit_check(x: RingElement) -> bool:
    """x is a unit of Z[xi, lam]: integral with norm +-1."""
    return ORDER.contains(x) and abs(x.norm()) == 1
