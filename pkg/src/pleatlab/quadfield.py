"""Exact arithmetic in the real quadratic field Q(sqrt d).

Elements are stored by their coordinates ``(x, y)`` in the integral basis
``{1, w}`` of the ring of integers, where ``w = sqrt d`` when d is not 1 mod 4
and ``w = (1 + sqrt d) / 2`` otherwise.  Coordinates are ``Fraction`` so that
non-integral field elements (needed for division) are representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import GeometryError


def is_squarefree(d: int) -> bool:
    if d < 2:
        return False
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class RingBasis:
    """Integral basis {1, w} with w^2 = trace * w + norm_const."""

    d: int
    trace: int
    norm_const: int

    @property
    def omega(self) -> str:
        return f"sqrt({self.d})" if self.trace == 0 else f"(1+sqrt({self.d}))/2"

    @property
    def omega_real(self) -> float:
        s = math.sqrt(self.d)
        return s if self.trace == 0 else (1.0 + s) / 2.0

    def __str__(self):
        return f"{{1, {self.omega}}}"


def ring_basis(d: int) -> RingBasis:
    """Integral basis of the ring of integers of Q(sqrt d)."""
    if not isinstance(d, int) or not is_squarefree(d):
        raise GeometryError(f"d must be a squarefree integer > 1, got {d!r}")
    if d % 4 == 1:
        return RingBasis(d, 1, (d - 1) // 4)
    return RingBasis(d, 0, d)


class QuadElem:
    """x + y w in Q(sqrt d); immutable and hashable."""

    __slots__ = ("x", "y", "basis")

    def __init__(self, x, y=0, d: int | RingBasis = 2):
        basis = d if isinstance(d, RingBasis) else ring_basis(d)
        object.__setattr__(self, "x", Fraction(x))
        object.__setattr__(self, "y", Fraction(y))
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, name, value):
        raise AttributeError("QuadElem is immutable")

    @classmethod
    def from_ab(cls, a, b, d) -> "QuadElem":
        """The element a + b sqrt(d)."""
        basis = d if isinstance(d, RingBasis) else ring_basis(d)
        a, b = Fraction(a), Fraction(b)
        if basis.trace == 0:
            return cls(a, b, basis)
        # sqrt d = 2w - 1
        return cls(a - b, 2 * b, basis)

    @property
    def d(self) -> int:
        return self.basis.d

    def ab(self) -> tuple[Fraction, Fraction]:
        """(a, b) with self = a + b sqrt(d)."""
        if self.basis.trace == 0:
            return self.x, self.y
        return self.x + self.y / 2, self.y / 2

    def _coerce(self, other) -> "QuadElem":
        if isinstance(other, QuadElem):
            if other.basis != self.basis:
                raise GeometryError(f"mixing Q(sqrt {self.d}) and Q(sqrt {other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(other, 0, self.basis)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElem(self.x + o.x, self.y + o.y, self.basis)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.x, -self.y, self.basis)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElem(self.x - o.x, self.y - o.y, self.basis)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t, n = self.basis.trace, self.basis.norm_const
        yy = self.y * o.y
        return QuadElem(self.x * o.x + n * yy, self.x * o.y + self.y * o.x + t * yy, self.basis)

    __rmul__ = __mul__

    def conj(self) -> "QuadElem":
        """Galois conjugate sqrt d -> -sqrt d."""
        if self.basis.trace == 0:
            return QuadElem(self.x, -self.y, self.basis)
        return QuadElem(self.x + self.y, -self.y, self.basis)

    def norm(self) -> Fraction:
        a, b = self.ab()
        return a * a - self.d * b * b

    def trace(self) -> Fraction:
        return 2 * self.ab()[0]

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        c = self.conj()
        return QuadElem(c.x / n, c.y / n, self.basis)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        out = QuadElem(1, 0, self.basis)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.y == 0 and self.x == other
        if isinstance(other, QuadElem):
            return self.basis == other.basis and self.x == other.x and self.y == other.y
        return NotImplemented

    def __hash__(self):
        return hash((self.x, self.y, self.basis.d))

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def sign(self) -> int:
        """Exact sign in the embedding sqrt d -> +sqrt d."""
        a, b = self.ab()
        sa, sb = _sgn(a), _sgn(b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with d b^2
        return sa * _sgn(a * a - self.d * b * b)

    def conj_sign(self) -> int:
        return self.conj().sign()

    def __float__(self):
        a, b = self.ab()
        return float(a) + float(b) * math.sqrt(self.d)

    def embed(self, sigma: int = 1) -> float:
        """Numeric value in the embedding sqrt d -> sigma * sqrt d."""
        a, b = self.ab()
        return float(a) + sigma * float(b) * math.sqrt(self.d)

    def height(self) -> Fraction:
        return max(abs(self.x), abs(self.y))

    def coords(self) -> tuple:
        return (_num(self.x), _num(self.y))

    def __repr__(self):
        return f"QuadElem({self.x}, {self.y}, d={self.d})"

    def __str__(self):
        a, b = self.ab()
        if b == 0:
            return str(a)
        return f"{a}{'+' if b >= 0 else '-'}{abs(b)}*sqrt({self.d})"


def _sgn(q) -> int:
    return (q > 0) - (q < 0)


def _num(q: Fraction):
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def zero(d) -> QuadElem:
    return QuadElem(0, 0, d)


def one(d) -> QuadElem:
    return QuadElem(1, 0, d)


def sqrt_d(d) -> QuadElem:
    return QuadElem.from_ab(0, 1, d)
