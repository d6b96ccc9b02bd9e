"""Exact arithmetic in K = Q(sqrt(-3), sqrt(-5)) over the basis (1, xi, lam, lam*xi).

Here ``xi = exp(2 pi i / 6)`` and ``lam = 4 + sqrt(15)``.  The integral points
of this basis form the order Z[xi, lam]; rational points give all of K.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Union

Number = Union[int, Fraction]

SQRT15 = math.sqrt(15.0)
XI_C = complex(0.5, math.sqrt(3.0) / 2)
LAM_F = 4.0 + SQRT15
LAM_STAR_F = 4.0 - SQRT15


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RealQuadratic:
    """An element p + q*lam of Q(sqrt(15)); conjugation sends lam to 8 - lam."""

    __slots__ = ("p", "q")

    def __init__(self, p: Number = 0, q: Number = 0) -> None:
        self.p = _frac(p)
        self.q = _frac(q)

    def __repr__(self) -> str:
        return f"RealQuadratic({self.p}, {self.q})"

    def __str__(self) -> str:
        if self.q == 0:
            return str(self.p)
        if self.p == 0:
            return f"{self.q}λ"
        return f"{self.p}{'+' if self.q > 0 else '-'}{abs(self.q)}λ"

    def _coerce(self, other) -> RealQuadratic:
        if isinstance(other, RealQuadratic):
            return other
        if isinstance(other, (int, Fraction)):
            return RealQuadratic(other, 0)
        return NotImplemented

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.p == other.p and self.q == other.q

    def __hash__(self) -> int:
        return hash((self.p, self.q))

    def __add__(self, other) -> RealQuadratic:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RealQuadratic(self.p + other.p, self.q + other.q)

    __radd__ = __add__

    def __neg__(self) -> RealQuadratic:
        return RealQuadratic(-self.p, -self.q)

    def __sub__(self, other) -> RealQuadratic:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> RealQuadratic:
        return (-self) + other

    def __mul__(self, other) -> RealQuadratic:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        # lam^2 = 8 lam - 1
        qq = self.q * other.q
        return RealQuadratic(self.p * other.p - qq,
                             self.p * other.q + self.q * other.p + 8 * qq)

    __rmul__ = __mul__

    def conjugate(self) -> RealQuadratic:
        return RealQuadratic(self.p + 8 * self.q, -self.q)

    def norm(self) -> Fraction:
        return (self * self.conjugate()).p

    def inverse(self) -> RealQuadratic:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt 15)")
        c = self.conjugate()
        return RealQuadratic(c.p / n, c.q / n)

    def __truediv__(self, other) -> RealQuadratic:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def trace(self) -> Fraction:
        return 2 * self.p + 8 * self.q

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * LAM_F

    def galois_float(self) -> float:
        return float(self.conjugate())


class RingElement:
    """Element a + b*xi + c*lam + d*lam*xi of K with exact rational coordinates.

    Products reduce with xi^2 = xi - 1 and lam^2 = 8*lam - 1.
    """

    __slots__ = ("coords", "__dict__")

    def __init__(self, a: Number = 0, b: Number = 0, c: Number = 0, d: Number = 0) -> None:
        self.coords = (_frac(a), _frac(b), _frac(c), _frac(d))

    @classmethod
    def from_coords(cls, coords: Iterable[Number]) -> RingElement:
        a, b, c, d = coords
        return cls(a, b, c, d)

    @classmethod
    def from_quadratic(cls, x: RealQuadratic) -> RingElement:
        return cls(x.p, 0, x.q, 0)

    def __repr__(self) -> str:
        return "RingElement(%s)" % ", ".join(str(c) for c in self.coords)

    def __str__(self) -> str:
        names = ("", "ξ", "λ", "λξ")
        parts = []
        for c, n in zip(self.coords, names):
            if c == 0:
                continue
            if n and abs(c) == 1:
                mag = n
            else:
                mag = f"{abs(c)}{n}"
            parts.append(("-" if c < 0 else "+") + mag)
        if not parts:
            return "0"
        s = "".join(parts)
        return s[1:] if s[0] == "+" else s

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RingElement(other)
        if not isinstance(other, RingElement):
            return False
        return self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __bool__(self) -> bool:
        return any(self.coords)

    @property
    def integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def int_coords(self) -> tuple[int, int, int, int]:
        if not self.integral:
            raise ValueError(f"{self} has non-integral coordinates")
        return tuple(int(c) for c in self.coords)

    @staticmethod
    def _coerce(other) -> RingElement:
        if isinstance(other, RingElement):
            return other
        if isinstance(other, (int, Fraction)):
            return RingElement(other)
        if isinstance(other, RealQuadratic):
            return RingElement.from_quadratic(other)
        return NotImplemented

    def __add__(self, other) -> RingElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement(*(x + y for x, y in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self) -> RingElement:
        return RingElement(*(-x for x in self.coords))

    def __sub__(self, other) -> RingElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement(*(x - y for x, y in zip(self.coords, other.coords)))

    def __rsub__(self, other) -> RingElement:
        return (-self) + other

    def __mul__(self, other) -> RingElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a1, b1, c1, d1 = self.coords
        a2, b2, c2, d2 = other.coords
        # write x = u + v*lam with u, v in Q(xi) stored as pairs (re, xi)
        u1, v1 = (a1, b1), (c1, d1)
        u2, v2 = (a2, b2), (c2, d2)
        uu = _qxi_mul(u1, u2)
        vv = _qxi_mul(v1, v2)
        uv = _qxi_add(_qxi_mul(u1, v2), _qxi_mul(v1, u2))
        # (u1 + v1 lam)(u2 + v2 lam) = uu - vv + (uv + 8 vv) lam
        const = (uu[0] - vv[0], uu[1] - vv[1])
        lin = (uv[0] + 8 * vv[0], uv[1] + 8 * vv[1])
        return RingElement(const[0], const[1], lin[0], lin[1])

    __rmul__ = __mul__

    def __pow__(self, n: int) -> RingElement:
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, k: Number) -> RingElement:
        k = _frac(k)
        return RingElement(*(k * x for x in self.coords))

    # Galois action ---------------------------------------------------
    def conj(self) -> RingElement:
        """Complex conjugation: xi -> 1 - xi, lam fixed."""
        a, b, c, d = self.coords
        return RingElement(a + b, -b, c + d, -d)

    def prime(self) -> RingElement:
        """The automorphism fixing xi and sending lam -> 8 - lam."""
        a, b, c, d = self.coords
        return RingElement(a + 8 * c, b + 8 * d, -c, -d)

    def star(self) -> RingElement:
        """Internal-space conjugate: xi -> conj(xi) and lam -> 8 - lam."""
        return self.conj().prime()

    def norm(self) -> Fraction:
        """Field norm z * conj(z) * z' * conj(z')."""
        z = self * self.conj()
        n = z * z.prime()
        assert n.coords[1:] == (0, 0, 0)
        return n.coords[0]

    def inverse(self) -> RingElement:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in K")
        rest = self.conj() * self.prime() * self.star()
        return rest.scale(Fraction(1) / n)

    def __truediv__(self, other) -> RingElement:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def trace(self) -> Fraction:
        """Absolute trace Tr_{K/Q}."""
        a, b, c, d = self.coords
        return 4 * a + 2 * b + 16 * c + 8 * d

    def real_part(self) -> RealQuadratic:
        """Re(z) as an element of Q(sqrt 15)."""
        a, b, c, d = self.coords
        return RealQuadratic(a + b / 2, c + d / 2)

    # embeddings --------------------------------------------------------
    @cached_property
    def _embed(self) -> complex:
        a, b, c, d = (float(x) for x in self.coords)
        return complex(a + c * LAM_F) + complex(b + d * LAM_F) * XI_C

    def embed(self) -> complex:
        return self._embed

    def embed_internal(self) -> complex:
        a, b, c, d = (float(x) for x in self.coords)
        return complex(a + c * LAM_STAR_F) + complex(b + d * LAM_STAR_F) * XI_C.conjugate()


def _qxi_mul(x, y):
    # (a + b xi)(c + d xi) with xi^2 = xi - 1
    a, b = x
    c, d = y
    bd = b * d
    return (a * c - bd, a * d + b * c + bd)


def _qxi_add(x, y):
    return (x[0] + y[0], x[1] + y[1])


ZERO = RingElement()
ONE = RingElement(1)
XI = RingElement(0, 1)
LAM = RingElement(0, 0, 1)
LAM_XI = RingElement(0, 0, 0, 1)
BASIS = (ONE, XI, LAM, LAM_XI)
#: i*sqrt(3) = 2 xi - 1
I_SQRT3 = RingElement(-1, 2)
#: sqrt(15) = lam - 4
SQRT_15 = RingElement(-4, 0, 1)
#: i*sqrt(5) = (2 xi - 1)(lam - 4) / 3
I_SQRT5 = (I_SQRT3 * SQRT_15).scale(Fraction(1, 3))
#: alpha = sqrt(5) exp(2 pi i / 12) = (1 + xi)(lam - 4) / 3
ALPHA = ((ONE + XI) * SQRT_15).scale(Fraction(1, 3))


def xi_power(m: int) -> RingElement:
    m %= 6
    return (ONE, XI, RingElement(-1, 1), RingElement(-1), RingElement(0, -1), RingElement(1, -1))[m]


def mul(x: RingElement, y: RingElement) -> RingElement:
    return x * y


def conj(x: RingElement) -> RingElement:
    return x.conj()


def star(x: RingElement) -> RingElement:
    return x.star()


def embed(x: RingElement) -> complex:
    return x.embed()


def embed_internal(x: RingElement) -> complex:
    return x.embed_internal()


def norm(x: RingElement) -> Fraction:
    return x.norm()


def pairing(x: RingElement, y: RingElement) -> RealQuadratic:
    """x.y = (conj(x) y + x conj(y)) / 2 = Re(conj(x) y) in Q(sqrt 15)."""
    return (x.conj() * y).real_part()


def dual_form(x: RingElement, y: RingElement) -> Fraction:
    """x.y + (x.y)', the rational form defining dual modules."""
    return pairing(x, y).trace()


def rotate(x: RingElement, m: int) -> RingElement:
    return xi_power(m) * x

