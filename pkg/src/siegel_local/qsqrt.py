"""Exact arithmetic in Q(sqrt(q)) for a prime q."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class QSqrt:
    """a + b*sqrt(q)."""

    q: int
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def power(cls, q: int, half_exp: int) -> "QSqrt":
        """q^(half_exp / 2)."""
        k, odd = divmod(half_exp, 2)
        return cls(q, 0, Fraction(q) ** k) if odd else cls(q, Fraction(q) ** k, 0)

    def _coerce(self, other) -> "QSqrt":
        if isinstance(other, QSqrt):
            if other.q != self.q:
                raise ValueError("mixing different square roots")
            return other
        return QSqrt(self.q, Fraction(other), 0)

    def __add__(self, other):
        o = self._coerce(other)
        return QSqrt(self.q, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt(self.q, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return QSqrt(self.q, self.a * o.a + self.q * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conjugate(self) -> "QSqrt":
        return QSqrt(self.q, self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.q * self.b * self.b

    def __truediv__(self, other):
        o = self._coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt q)")
        num = self * o.conjugate()
        return QSqrt(self.q, num.a / n, num.b / n)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, QSqrt):
            return self.q == other.q and self.a == other.a and self.b == other.b
        try:
            return self.b == 0 and self.a == Fraction(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.q, self.a, self.b)) if self.b else hash(self.a)

    def __bool__(self):
        return bool(self.a or self.b)

    def is_rational(self) -> bool:
        return self.b == 0

    def __str__(self):
        if not self.b:
            return str(self.a)
        if not self.a:
            return f"{self.b}*sqrt({self.q})"
        return f"{self.a} + {self.b}*sqrt({self.q})"

    def as_json(self) -> list[str]:
        return [str(self.a), str(self.b)]
