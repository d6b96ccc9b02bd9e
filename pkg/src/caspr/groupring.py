"""Matrices over Z[r]/(r^6 - 1) and their evaluations at r = xi^k.

Every evaluation lands in Q(xi) = Q(sqrt -3); elements are stored as exact
pairs ``a + b*xi``.  For k = 0, 3 the values are rational, for k = 2, 4 they
lie in Q(xi^2) = Q(xi) again, so one field covers all six characters.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

ORBIT_SIZE = {"generic": 6, "eta": 3, "pq": 2}


# --- the coefficient field Q(xi) ------------------------------------------

class QXi:
    """a + b*xi with xi^2 = xi - 1."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0) -> None:
        self.a = a if isinstance(a, Fraction) else Fraction(a)
        self.b = b if isinstance(b, Fraction) else Fraction(b)

    @staticmethod
    def _c(x) -> QXi:
        return x if isinstance(x, QXi) else QXi(x)

    def __repr__(self) -> str:
        return f"QXi({self.a}, {self.b})"

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QXi(other)
        return isinstance(other, QXi) and self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        return hash((self.a, self.b))

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __add__(self, o) -> QXi:
        o = self._c(o)
        return QXi(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o) -> QXi:
        o = self._c(o)
        return QXi(self.a - o.a, self.b - o.b)

    def __rsub__(self, o) -> QXi:
        return self._c(o) - self

    def __neg__(self) -> QXi:
        return QXi(-self.a, -self.b)

    def __mul__(self, o) -> QXi:
        o = self._c(o)
        bd = self.b * o.b
        return QXi(self.a * o.a - bd, self.a * o.b + self.b * o.a + bd)

    __rmul__ = __mul__

    def conjugate(self) -> QXi:
        return QXi(self.a + self.b, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a + self.a * self.b + self.b * self.b

    def inverse(self) -> QXi:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(xi)")
        c = self.conjugate()
        return QXi(c.a / n, c.b / n)

    def __truediv__(self, o) -> QXi:
        return self * self._c(o).inverse()

    def __complex__(self) -> complex:
        return complex(float(self.a) + 0.5 * float(self.b), float(self.b) * 0.8660254037844386)

    @property
    def is_rational(self) -> bool:
        return self.b == 0


XI_POWERS = (QXi(1), QXi(0, 1), QXi(-1, 1), QXi(-1), QXi(0, -1), QXi(1, -1))


# --- group ring ------------------------------------------------------------

@dataclass(frozen=True)
class Poly6:
    """An element sum c_i r^i of Z[r]/(r^6 - 1)."""

    coeffs: tuple[int, int, int, int, int, int] = (0, 0, 0, 0, 0, 0)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, int]]) -> Poly6:
        c = [0] * 6
        for coef, power in terms:
            c[power % 6] += coef
        return cls(tuple(c))

    @classmethod
    def parse(cls, text: str) -> Poly6:
        """Parse strings like ``"r^2-r^5"``, ``"1+r"``, ``"-r"``, ``"0"``."""
        s = text.replace(" ", "").replace("−", "-")
        if s in ("", "0"):
            return cls()
        terms = []
        i = 0
        while i < len(s):
            sign = 1
            if s[i] in "+-":
                sign = -1 if s[i] == "-" else 1
                i += 1
            j = i
            while j < len(s) and s[j] not in "+-":
                j += 1
            tok = s[i:j]
            i = j
            coef = 1
            power = 0
            if "r" in tok:
                pre, _, post = tok.partition("r")
                if pre:
                    coef = int(pre.rstrip("*"))
                power = int(post[1:]) if post.startswith("^") else 1
            else:
                coef = int(tok)
            terms.append((sign * coef, power))
        return cls.from_terms(terms)

    def __add__(self, o: Poly6) -> Poly6:
        return Poly6(tuple(x + y for x, y in zip(self.coeffs, o.coeffs)))

    def __neg__(self) -> Poly6:
        return Poly6(tuple(-x for x in self.coeffs))

    def __sub__(self, o: Poly6) -> Poly6:
        return self + (-o)

    def __mul__(self, o: Poly6) -> Poly6:
        c = [0] * 6
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(o.coeffs):
                    if y:
                        c[(i + j) % 6] += x * y
        return Poly6(tuple(c))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def bar(self) -> Poly6:
        """r -> r^{-1}."""
        c = self.coeffs
        return Poly6((c[0], c[5], c[4], c[3], c[2], c[1]))

    def shift(self, m: int) -> Poly6:
        """Multiply by r^m."""
        c = [0] * 6
        for i, x in enumerate(self.coeffs):
            c[(i + m) % 6] += x
        return Poly6(tuple(c))

    def evaluate(self, k: int) -> QXi:
        out = QXi()
        for i, x in enumerate(self.coeffs):
            if x:
                out = out + XI_POWERS[(i * k) % 6] * x
        return out

    def terms(self) -> list[tuple[int, int]]:
        return [(c, i) for i, c in enumerate(self.coeffs) if c]

    def __str__(self) -> str:
        parts = []
        for c, i in self.terms():
            mono = "1" if i == 0 else ("r" if i == 1 else f"r^{i}")
            if i and abs(c) == 1:
                body = mono
            elif i:
                body = f"{abs(c)}{mono}"
            else:
                body = str(abs(c))
            parts.append(("-" if c < 0 else "+") + body)
        if not parts:
            return "0"
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s


ZERO_POLY = Poly6()
ONE_POLY = Poly6((1, 0, 0, 0, 0, 0))


@dataclass(frozen=True)
class GroupRingMatrix:
    """Matrix with entries in Z[C6]; labels say which cell orbit each index is.

    ``row_kinds``/``col_kinds`` take values in ``ORBIT_SIZE``: a generic cell
    has six rotated copies, ``eta`` three (with r^3 acting as -1) and ``pq``
    two (r^2 acting trivially).
    """

    entries: tuple[tuple[Poly6, ...], ...]
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()
    row_kinds: tuple[str, ...] = ()
    col_kinds: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        n, m = self.shape
        if not self.row_labels:
            object.__setattr__(self, "row_labels", tuple(str(i) for i in range(n)))
        if not self.col_labels:
            object.__setattr__(self, "col_labels", tuple(str(j) for j in range(m)))
        if not self.row_kinds:
            object.__setattr__(self, "row_kinds", ("generic",) * n)
        if not self.col_kinds:
            object.__setattr__(self, "col_kinds", ("generic",) * m)

    @classmethod
    def parse(cls, rows: Sequence[Sequence[str]], **labels) -> GroupRingMatrix:
        return cls(tuple(tuple(Poly6.parse(e) for e in r) for r in rows), **labels)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.entries), len(self.entries[0]) if self.entries else 0)

    def __getitem__(self, ij) -> Poly6:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, o: GroupRingMatrix) -> GroupRingMatrix:
        n, m = self.shape
        m2, p = o.shape
        if m != m2:
            raise ValueError("shape mismatch")
        out = []
        for i in range(n):
            row = []
            for j in range(p):
                acc = ZERO_POLY
                for k in range(m):
                    if self.entries[i][k] and o.entries[k][j]:
                        acc = acc + self.entries[i][k] * o.entries[k][j]
                row.append(acc)
            out.append(tuple(row))
        return GroupRingMatrix(tuple(out), self.row_labels, o.col_labels, self.row_kinds, o.col_kinds)

    def __neg__(self) -> GroupRingMatrix:
        return self.map(lambda p: -p)

    def map(self, f) -> GroupRingMatrix:
        return GroupRingMatrix(tuple(tuple(f(e) for e in r) for r in self.entries),
                               self.row_labels, self.col_labels, self.row_kinds, self.col_kinds)

    def bar(self) -> GroupRingMatrix:
        return self.map(Poly6.bar)

    def transpose(self) -> GroupRingMatrix:
        return GroupRingMatrix(tuple(zip(*self.entries)), self.col_labels, self.row_labels,
                               self.col_kinds, self.row_kinds)

    def __eq__(self, o) -> bool:
        return isinstance(o, GroupRingMatrix) and self.entries == o.entries

    def __hash__(self) -> int:
        return hash(self.entries)


# --- evaluated matrices ----------------------------------------------------

@dataclass
class EvaluatedMatrix:
    """A matrix over Q(xi) (the value of a group-ring matrix at r = xi^k)."""

    rows: list[list[QXi]]
    k: int = 1
    row_labels: list[str] = field(default_factory=list)
    col_labels: list[str] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij) -> QXi:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, o) -> bool:
        return isinstance(o, EvaluatedMatrix) and self.rows == o.rows

    def __matmul__(self, o: EvaluatedMatrix) -> EvaluatedMatrix:
        n, m = self.shape
        p = o.shape[1]
        out = [[sum((self.rows[i][t] * o.rows[t][j] for t in range(m) if self.rows[i][t] and o.rows[t][j]), QXi())
                for j in range(p)] for i in range(n)]
        return EvaluatedMatrix(out, self.k, list(self.row_labels), list(o.col_labels))

    def drop(self, rows: Iterable[int] = (), cols: Iterable[int] = ()) -> EvaluatedMatrix:
        rs, cs = set(rows), set(cols)
        n, m = self.shape
        keep_r = [i for i in range(n) if i not in rs]
        keep_c = [j for j in range(m) if j not in cs]
        return EvaluatedMatrix([[self.rows[i][j] for j in keep_c] for i in keep_r], self.k,
                               [self.row_labels[i] for i in keep_r] if self.row_labels else [],
                               [self.col_labels[j] for j in keep_c] if self.col_labels else [])

    def to_complex(self):
        import numpy as np
        return np.array([[complex(x) for x in r] for r in self.rows], dtype=complex).reshape(self.shape)


def evaluate(m: GroupRingMatrix, k: int) -> EvaluatedMatrix:
    return EvaluatedMatrix([[e.evaluate(k) for e in r] for r in m.entries], k % 6,
                           list(m.row_labels), list(m.col_labels))


def conj_matrix(m: EvaluatedMatrix) -> EvaluatedMatrix:
    return EvaluatedMatrix([[x.conjugate() for x in r] for r in m.rows], (-m.k) % 6,
                           list(m.row_labels), list(m.col_labels))


def identity_matrix(n: int, k: int = 0) -> EvaluatedMatrix:
    return EvaluatedMatrix([[QXi(int(i == j)) for j in range(n)] for i in range(n)], k)


def zero_matrix(n: int, m: int, k: int = 0) -> EvaluatedMatrix:
    return EvaluatedMatrix([[QXi() for _ in range(m)] for _ in range(n)], k)


def _row_reduce(rows: list[list[QXi]]) -> tuple[list[list[QXi]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [list(r) for r in rows]
    n = len(a)
    m = len(a[0]) if a else 0
    piv = []
    r = 0
    for c in range(m):
        k = next((i for i in range(r, n) if a[i][c]), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        inv = a[r][c].inverse()
        a[r] = [x * inv for x in a[r]]
        for i in range(n):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv.append(c)
        r += 1
        if r == n:
            break
    return a, piv


def rank(m: EvaluatedMatrix) -> int:
    if not m.rows or not m.rows[0]:
        return 0
    return len(_row_reduce(m.rows)[1])


def row_space_basis(vectors: Sequence[Sequence[QXi]]) -> list[list[QXi]]:
    if not vectors:
        return []
    red, piv = _row_reduce([list(v) for v in vectors])
    return red[:len(piv)]


def right_kernel(m: EvaluatedMatrix) -> list[list[QXi]]:
    """Basis of column vectors x with m @ x = 0, returned as lists."""
    n, cols = m.shape
    if n == 0:
        return [[QXi(int(i == j)) for i in range(cols)] for j in range(cols)]
    red, piv = _row_reduce(m.rows)
    free = [j for j in range(cols) if j not in piv]
    basis = []
    for f in free:
        v = [QXi() for _ in range(cols)]
        v[f] = QXi(1)
        for i, p in enumerate(piv):
            v[p] = -red[i][f]
        basis.append(v)
    return basis


def left_kernel(m: EvaluatedMatrix) -> list[list[QXi]]:
    """Basis of row vectors y with y @ m = 0."""
    t = EvaluatedMatrix([list(c) for c in zip(*m.rows)], m.k) if m.rows else EvaluatedMatrix([], m.k)
    if not m.rows:
        return []
    if not m.rows[0]:
        return [[QXi(int(i == j)) for i in range(len(m.rows))] for j in range(len(m.rows))]
    return right_kernel(t)


def cokernel_basis(m: EvaluatedMatrix) -> list[list[QXi]]:
    """Standard unit row vectors completing the row space of ``m`` to the full space.

    Their classes form a basis of (row space of the target) / (rows of m).
    """
    n, cols = m.shape
    red, piv = _row_reduce(m.rows) if n else ([], [])
    return [[QXi(int(i == j)) for i in range(cols)] for j in range(cols) if j not in piv]


def vec_mat(v: Sequence[QXi], m: EvaluatedMatrix) -> list[QXi]:
    n, cols = m.shape
    out = [QXi() for _ in range(cols)]
    for i, x in enumerate(v):
        if x:
            row = m.rows[i]
            for j in range(cols):
                if row[j]:
                    out[j] = out[j] + x * row[j]
    return out


def solve_in_span(basis: Sequence[Sequence[QXi]], v: Sequence[QXi]) -> list[QXi] | None:
    """Coefficients c with sum c_i basis_i == v, or None."""
    nb = len(basis)
    if nb == 0:
        return [] if not any(v) else None
    dim = len(v)
    aug = [[basis[i][d] for i in range(nb)] + [v[d]] for d in range(dim)]
    red, piv = _row_reduce(aug)
    if nb in piv:
        return None
    sol = [QXi() for _ in range(nb)]
    for i, p in enumerate(piv):
        sol[p] = red[i][nb]
    return sol


# --- polynomials over Q(xi) -----------------------------------------------

Poly = list  # coefficient list, lowest degree first


def charpoly(m: EvaluatedMatrix) -> Poly:
    """det(t I - M) by the Faddeev-LeVerrier recursion (exact)."""
    n = m.shape[0]
    if n == 0:
        return [QXi(1)]
    coeffs = [QXi() for _ in range(n + 1)]
    coeffs[n] = QXi(1)
    ident = identity_matrix(n, m.k)
    mk = zero_matrix(n, n, m.k)
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        prev = mk
        mk = m @ prev
        c = coeffs[n - k + 1]
        mk = EvaluatedMatrix([[mk.rows[i][j] + (c if i == j else QXi()) for j in range(n)]
                              for i in range(n)], m.k)
        am = m @ mk
        tr = sum((am.rows[i][i] for i in range(n)), QXi())
        coeffs[n - k] = tr * Fraction(-1, k)
    del ident
    return coeffs


def poly_trim(p: Poly) -> Poly:
    p = list(p)
    while len(p) > 1 and not p[-1]:
        p.pop()
    return p


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    a = poly_trim([x if isinstance(x, QXi) else QXi(x) for x in a])
    b = poly_trim([x if isinstance(x, QXi) else QXi(x) for x in b])
    if len(b) == 1 and not b[0]:
        raise ZeroDivisionError("division by zero polynomial")
    q = [QXi() for _ in range(max(len(a) - len(b) + 1, 1))]
    r = list(a)
    inv = b[-1].inverse()
    while len(r) >= len(b) and any(r):
        d = len(r) - len(b)
        f = r[-1] * inv
        q[d] = f
        for i, y in enumerate(b):
            r[i + d] = r[i + d] - f * y
        r = poly_trim(r)
        if len(r) < len(b) or (len(r) == 1 and not r[0]):
            break
    return poly_trim(q), poly_trim(r)


def poly_divides(b: Poly, a: Poly) -> bool:
    _, r = poly_divmod(a, b)
    return len(r) == 1 and not r[0]


def multiplicity(factor: Poly, p: Poly) -> int:
    n = 0
    cur = poly_trim(p)
    while len(cur) > 1 and poly_divides(factor, cur):
        cur, _ = poly_divmod(cur, factor)
        n += 1
    return n


#: candidate factors used to certify eigenvalues: t-1, t+1, t^2-8t+1 (4 +- sqrt 15),
#: t^2-62t+1 ((4 +- sqrt 15)^2)
KNOWN_FACTORS = {
    "t-1": [QXi(-1), QXi(1)],
    "t+1": [QXi(1), QXi(1)],
    "t^2-8t+1": [QXi(1), QXi(-8), QXi(1)],
    "t^2-62t+1": [QXi(1), QXi(-62), QXi(1)],
}


def zero_eigen_multiplicity(p: Poly) -> int:
    n = 0
    for c in p:
        if c:
            break
        n += 1
    return n


def nonzero_eigenvalues(m: EvaluatedMatrix) -> dict[str, int]:
    """Factor the char poly over the known factors; returns {factor: multiplicity}.

    Any unexplained nonzero part is reported under the key ``"other"`` with its degree.
    """
    p = charpoly(m)
    z = zero_eigen_multiplicity(p)
    cur = poly_trim(p[z:])
    out: dict[str, int] = {}
    for name, f in KNOWN_FACTORS.items():
        k = multiplicity(f, cur)
        if k:
            out[name] = k
            for _ in range(k):
                cur, _ = poly_divmod(cur, f)
    if len(cur) > 1:
        out["other"] = len(cur) - 1
    return out


def matrix_power(m: EvaluatedMatrix, n: int) -> EvaluatedMatrix:
    out = identity_matrix(m.shape[0], m.k)
    base = m
    while n:
        if n & 1:
            out = out @ base
        base = base @ base
        n >>= 1
    return out


def eventual_rank(m: EvaluatedMatrix) -> int:
    """rank(M^n) for n = dim, which equals the number of nonzero eigenvalues with multiplicity."""
    n = m.shape[0]
    if n == 0:
        return 0
    return rank(matrix_power(m, n))


# --- integer expansion -----------------------------------------------------

def _orbit_action(kind: str, power: int) -> tuple[int, int]:
    """(index, sign) of r^power applied to the orbit generator."""
    if kind == "generic":
        return power % 6, 1
    if kind == "eta":
        return power % 3, -1 if (power // 3) % 2 else 1
    if kind == "pq":
        return power % 2, 1
    raise ValueError(kind)


def expand_integer(m: GroupRingMatrix) -> list[list[int]]:
    """Replace each entry by its integer block (the regular or twisted action of r).

    Row index (i, a) and column index (j, b) follow the labels' orbit sizes.
    Entry f(r) at (i, j) maps the b-th rotated copy of column cell j to
    f(r) r^b applied to row cell i.
    """
    n, p = m.shape
    row_off = [0]
    for kind in m.row_kinds:
        row_off.append(row_off[-1] + ORBIT_SIZE[kind])
    col_off = [0]
    for kind in m.col_kinds:
        col_off.append(col_off[-1] + ORBIT_SIZE[kind])
    out = [[0] * col_off[-1] for _ in range(row_off[-1])]
    for i in range(n):
        for j in range(p):
            poly = m.entries[i][j]
            if not poly:
                continue
            for b in range(ORBIT_SIZE[m.col_kinds[j]]):
                for coef, power in poly.terms():
                    idx, sign = _orbit_action(m.row_kinds[i], power + b)
                    out[row_off[i] + idx][col_off[j] + b] += sign * coef
    return out
