"""Exact arithmetic in real quadratic fields Q(sqrt(D)).

Numbers are stored as rational pairs ``a + b*sqrt(D)`` with ``a``, ``b``
:class:`fractions.Fraction` and a square-free ``D > 1``.  This is enough to
make boundary membership and projection-injectivity decidable for the
quadratic-field lattice schemes shipped with the package (golden mean D=5,
silver mean and eightfold symmetry D=2).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = ["QuadExact", "as_quad", "exact_det", "rational_kernel_vector"]

_RationalLike = (int, Fraction)


class QuadExact:
    """Exact value a + b*sqrt(D) with rational a, b."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a=0, b=0, D=5):
        if isinstance(a, float) or isinstance(b, float):
            raise TypeError("QuadExact components must be rational, not float")
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.D = int(D)
        if self.D <= 1:
            raise ValueError("D must be an integer > 1")

    # -- basic protocol ----------------------------------------------------
    def __repr__(self):
        return f"QuadExact({self.a}, {self.b}, D={self.D})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a}+{self.b}*sqrt({self.D})"

    def __hash__(self):
        return hash((self.a, self.b, self.D))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def _coerce(self, other):
        if isinstance(other, QuadExact):
            if other.D != self.D:
                raise ValueError(f"mixed radicands {self.D} and {other.D}")
            return other
        if isinstance(other, _RationalLike):
            return QuadExact(other, 0, self.D)
        return None

    # -- field operations --------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExact(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadExact(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExact(self.a - o.a, self.b - o.b, self.D)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExact(
            self.a * o.a + self.b * o.b * self.D,
            self.a * o.b + self.b * o.a,
            self.D,
        )

    __rmul__ = __mul__

    def conjugate(self):
        """Galois conjugate a - b*sqrt(D)."""
        return QuadExact(self.a, -self.b, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        norm = o.a * o.a - o.b * o.b * self.D
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(D))")
        num = self * o.conjugate()
        return QuadExact(num.a / norm, num.b / norm, self.D)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- comparisons -------------------------------------------------------
    def sign(self):
        """Exact sign of the real value: -1, 0 or +1."""
        a, b = self.a, self.b
        if b == 0:
            return -1 if a < 0 else (0 if a == 0 else 1)
        if a == 0:
            return -1 if b < 0 else 1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with b^2 D; sign follows the larger part
        lhs = a * a
        rhs = b * b * self.D
        if lhs == rhs:
            return 0
        bigger_is_a = lhs > rhs
        return (1 if a > 0 else -1) if bigger_is_a else (1 if b > 0 else -1)

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() >= 0


def as_quad(value, D) -> QuadExact:
    """Coerce ints, Fractions, (a, b) pairs and QuadExact to QuadExact."""
    if isinstance(value, QuadExact):
        if value.D != D:
            raise ValueError(f"mixed radicands {value.D} and {D}")
        return value
    if isinstance(value, _RationalLike):
        return QuadExact(value, 0, D)
    if isinstance(value, str):
        return QuadExact(Fraction(value), 0, D)
    if isinstance(value, (tuple, list)) and len(value) == 2:
        a, b = value
        a = Fraction(a) if isinstance(a, str) else a
        b = Fraction(b) if isinstance(b, str) else b
        return QuadExact(a, b, D)
    raise TypeError(f"cannot interpret {value!r} as an element of Q(sqrt({D}))")


def exact_det(rows: Sequence[Sequence[QuadExact]]) -> QuadExact:
    """Determinant over Q(sqrt(D)) by fraction-free-ish Gaussian elimination."""
    n = len(rows)
    m = [[x for x in row] for row in rows]
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    D = m[0][0].D
    det = QuadExact(1, 0, D)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if not m[r][col].is_zero()), None)
        if pivot_row is None:
            return QuadExact(0, 0, D)
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            det = -det
        pivot = m[col][col]
        det = det * pivot
        for r in range(col + 1, n):
            if m[r][col].is_zero():
                continue
            factor = m[r][col] / pivot
            for c in range(col, n):
                m[r][c] = m[r][c] - factor * m[col][c]
    return det


def rational_kernel_vector(rows: Iterable[Sequence[Fraction]]):
    """Integer kernel vector of a rational matrix, or None if full column rank.

    Used to decide physical-projection injectivity exactly: splitting each
    basis entry a + b*sqrt(D) into its rational parts turns "integer vector
    with zero physical image" into a rational linear system.
    """
    m = [list(map(Fraction, row)) for row in rows]
    if not m:
        return None
    ncols = len(m[0])
    pivots = {}
    row_idx = 0
    for col in range(ncols):
        pivot_row = next(
            (r for r in range(row_idx, len(m)) if m[r][col] != 0), None
        )
        if pivot_row is None:
            continue
        m[row_idx], m[pivot_row] = m[pivot_row], m[row_idx]
        pivot = m[row_idx][col]
        m[row_idx] = [x / pivot for x in m[row_idx]]
        for r in range(len(m)):
            if r != row_idx and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[row_idx])]
        pivots[col] = row_idx
        row_idx += 1
        if row_idx == len(m):
            break
    free_cols = [c for c in range(ncols) if c not in pivots]
    if not free_cols:
        return None
    # back-substitute the first free column into a rational kernel vector
    free = free_cols[0]
    vec = [Fraction(0)] * ncols
    vec[free] = Fraction(1)
    for col, r in pivots.items():
        vec[col] = -m[r][free]
    lcm = 1
    for x in vec:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return ints
