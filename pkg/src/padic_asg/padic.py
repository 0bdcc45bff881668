"""p-adic numbers in Q_p with absolute-precision bookkeeping and exact norms.

A :class:`PAdicNumber` is ``p**valuation * unit`` known modulo ``p**prec``.
Two kinds of zero exist: the exact zero (valuation and precision infinite)
and a number that is zero *to precision* N (all known digits vanish, the
true valuation is only known to be >= N).  Anything that needs a nonzero
input rejects both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Union

from sympy import isprime

DEFAULT_PRECISION = 64

Rational = Union[int, Fraction]


class PrecisionError(ArithmeticError):
    """Raised when an operation needs a value that is not provably nonzero."""


class PrimeMismatch(ValueError):
    pass


class Prime(int):
    """An integer verified prime at construction."""

    def __new__(cls, p):
        p = int(p)
        if p < 2 or not isprime(p):
            raise ValueError(f"{p} is not prime")
        return super().__new__(cls, p)

    @property
    def r_p(self) -> "PNorm":
        """Convergence radius p^(-1/(p-1)) of the exponential series."""
        return PNorm(int(self), Fraction(-1, int(self) - 1))


def valuation(x: Rational, p: int) -> Union[int, float]:
    """Exact p-adic valuation of a rational number (``inf`` for 0)."""
    x = Fraction(x)
    if x == 0:
        return math.inf
    return _vint(x.numerator, p) - _vint(x.denominator, p)


def _vint(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@total_ordering
@dataclass(frozen=True)
class PNorm:
    """The real number p**exponent, or zero when ``exponent`` is None.

    Comparisons are exact: two norms over the same prime compare by their
    rational exponents.
    """

    prime: int
    exponent: Union[Fraction, None]

    def __post_init__(self):
        if self.exponent is not None:
            object.__setattr__(self, "exponent", Fraction(self.exponent))

    @classmethod
    def zero(cls, p: int) -> "PNorm":
        return cls(int(p), None)

    @classmethod
    def one(cls, p: int) -> "PNorm":
        return cls(int(p), Fraction(0))

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def _check(self, other: "PNorm"):
        if not isinstance(other, PNorm):
            return NotImplemented
        if other.prime != self.prime:
            raise PrimeMismatch(f"norms over {self.prime} and {other.prime}")
        return None

    def __lt__(self, other: "PNorm") -> bool:
        if self._check(other) is NotImplemented:
            return NotImplemented
        if self.is_zero:
            return not other.is_zero
        if other.is_zero:
            return False
        return self.exponent < other.exponent

    def __mul__(self, other: "PNorm") -> "PNorm":
        self._check(other)
        if self.is_zero or other.is_zero:
            return PNorm.zero(self.prime)
        return PNorm(self.prime, self.exponent + other.exponent)

    def __truediv__(self, other: "PNorm") -> "PNorm":
        self._check(other)
        if other.is_zero:
            raise ZeroDivisionError("division by the zero norm")
        if self.is_zero:
            return self
        return PNorm(self.prime, self.exponent - other.exponent)

    def __pow__(self, k: Rational) -> "PNorm":
        k = Fraction(k)
        if self.is_zero:
            if k <= 0:
                raise ZeroDivisionError("zero norm to a non-positive power")
            return self
        return PNorm(self.prime, self.exponent * k)

    def log(self) -> float:
        """Natural log as a float, for display only."""
        if self.is_zero:
            return -math.inf
        return float(self.exponent) * math.log(self.prime)

    def __repr__(self):
        if self.is_zero:
            return f"PNorm({self.prime}, 0)"
        return f"PNorm({self.prime}^{self.exponent})"


@dataclass(frozen=True)
class PAdicNumber:
    """``p**valuation * unit`` known modulo ``p**prec``.

    ``unit`` is reduced modulo ``p**(prec - valuation)`` and prime to p,
    except for zeros, where it is 0.  A zero to precision N has
    ``valuation == prec == N``; the exact zero has both equal to ``inf``.
    """

    prime: int
    unit: int
    valuation: Union[int, float]
    prec: Union[int, float]

    # -- constructors -------------------------------------------------------

    @classmethod
    def exact_zero(cls, p: int) -> "PAdicNumber":
        return cls(int(p), 0, math.inf, math.inf)

    @classmethod
    def zero(cls, p: int, prec: int = DEFAULT_PRECISION) -> "PAdicNumber":
        """Zero to precision ``prec``."""
        return cls(int(p), 0, prec, prec)

    @classmethod
    def from_rational(cls, x: Rational, p: int, prec: int = DEFAULT_PRECISION) -> "PAdicNumber":
        x = Fraction(x)
        p = int(p)
        if x == 0:
            return cls.exact_zero(p)
        v = valuation(x, p)
        if v >= prec:
            return cls.zero(p, prec)
        num = x.numerator // p ** max(v, 0)
        den = x.denominator // p ** max(-v, 0)
        mod = p ** (prec - v)
        return cls(p, num * pow(den, -1, mod) % mod, v, prec)

    @classmethod
    def one(cls, p: int, prec: int = DEFAULT_PRECISION) -> "PAdicNumber":
        return cls.from_rational(1, p, prec)

    @classmethod
    def _make(cls, p: int, value: int, v: int, prec) -> "PAdicNumber":
        """Normalise ``p**v * value`` known modulo ``p**prec``."""
        if prec - v <= 0:
            return cls.zero(p, prec)
        value %= p ** (prec - v)
        if value == 0:
            return cls.zero(p, prec)
        while value % p == 0:
            value //= p
            v += 1
        return cls(p, value, v, prec)

    # -- inspection ---------------------------------------------------------

    @property
    def is_exact_zero(self) -> bool:
        return self.valuation == math.inf

    @property
    def is_zero(self) -> bool:
        """True for the exact zero and for zeros to precision."""
        return self.unit == 0

    @property
    def rel_prec(self):
        if self.is_exact_zero:
            return math.inf
        return self.prec - self.valuation

    @property
    def unit_digits(self) -> list[int]:
        """Base-p digits of the unit part, least significant first."""
        if self.is_zero:
            return []
        digits, u = [], self.unit
        for _ in range(int(self.rel_prec)):
            u, r = divmod(u, self.prime)
            digits.append(r)
        return digits

    def to_rational(self) -> Fraction:
        """The representative ``p**v * unit`` with ``0 <= unit < p**rel_prec``."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.prime) ** self.valuation

    def lift(self) -> int:
        """Integer representative in ``[0, p**prec)``; requires v >= 0."""
        if self.is_exact_zero:
            return 0
        if self.valuation < 0:
            raise ValueError("not a p-adic integer")
        if self.is_zero:
            return 0
        return self.unit * self.prime ** self.valuation

    def norm(self) -> PNorm:
        if self.is_zero:
            return PNorm.zero(self.prime)
        return PNorm(self.prime, Fraction(-self.valuation))

    def with_prec(self, prec: int) -> "PAdicNumber":
        """Forget digits beyond absolute precision ``prec``."""
        if prec >= self.prec:
            return self
        if self.is_zero:
            return PAdicNumber.zero(self.prime, prec)
        return PAdicNumber._make(self.prime, self.unit, self.valuation, prec)

    def agrees(self, other: "PAdicNumber") -> bool:
        """Equality modulo the smaller of the two precisions."""
        return (self - other).is_zero

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "PAdicNumber":
        if isinstance(other, PAdicNumber):
            if other.prime != self.prime:
                raise PrimeMismatch(f"{self.prime}-adic vs {other.prime}-adic")
            return other
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return PAdicNumber.exact_zero(self.prime)
            v = valuation(other, self.prime)
            # enough digits that the conversion never limits precision
            prec = max(self.prec if self.prec != math.inf else DEFAULT_PRECISION, v + 1)
            if self.valuation != math.inf:
                prec = max(prec, self.rel_prec + v)
            return PAdicNumber.from_rational(other, self.prime, int(prec))
        return NotImplemented

    def __neg__(self) -> "PAdicNumber":
        if self.is_zero:
            return self
        return PAdicNumber(self.prime, (-self.unit) % self.prime ** self.rel_prec,
                           self.valuation, self.prec)

    def __add__(self, other) -> "PAdicNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        p = self.prime
        prec = min(self.prec, other.prec)
        v0 = min(self.valuation, other.valuation)
        if v0 >= prec:
            return PAdicNumber.zero(p, prec)
        s = self.unit * p ** (self.valuation - v0) + other.unit * p ** (other.valuation - v0)
        return PAdicNumber._make(p, s, v0, prec)

    __radd__ = __add__

    def __sub__(self, other) -> "PAdicNumber":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "PAdicNumber":
        return (-self) + other

    def __mul__(self, other) -> "PAdicNumber":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.prime
        if self.is_exact_zero or other.is_exact_zero:
            return PAdicNumber.exact_zero(p)
        prec = min(self.prec + other.valuation, other.prec + self.valuation)
        v = self.valuation + other.valuation
        if self.is_zero or other.is_zero:
            return PAdicNumber.zero(p, prec)
        return PAdicNumber._make(p, self.unit * other.unit, v, prec)

    __rmul__ = __mul__

    def scale(self, c: Rational) -> "PAdicNumber":
        """Multiply by an exact rational; precision shifts by v_p(c) exactly."""
        c = Fraction(c)
        p = self.prime
        if c == 0 or self.is_exact_zero:
            return PAdicNumber.exact_zero(p)
        k = valuation(c, p)
        if self.is_zero:
            return PAdicNumber.zero(p, self.prec + k)
        num = c.numerator // p ** max(k, 0)
        den = c.denominator // p ** max(-k, 0)
        mod = p ** self.rel_prec
        return PAdicNumber(p, self.unit * num * pow(den, -1, mod) % mod,
                           self.valuation + k, self.prec + k)

    def inverse(self) -> "PAdicNumber":
        if self.is_zero:
            raise PrecisionError("inverse of a number that is not provably nonzero")
        rel = self.rel_prec
        mod = self.prime ** rel
        return PAdicNumber(self.prime, pow(self.unit, -1, mod), -self.valuation,
                           -self.valuation + rel)

    def __truediv__(self, other) -> "PAdicNumber":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by exact zero")
            return self.scale(1 / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> "PAdicNumber":
        return self.inverse() * other

    def __pow__(self, n: int) -> "PAdicNumber":
        n = int(n)
        p = self.prime
        if n == 0:
            rel = self.rel_prec
            return PAdicNumber.one(p, DEFAULT_PRECISION if rel == math.inf else max(int(rel), 1))
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_exact_zero:
            return self
        if self.is_zero:
            return PAdicNumber.zero(p, n * self.prec)
        # (u + p^r e)^n = u^n + O(p^(r + v_p(n)))
        rel = self.rel_prec + _vint(n, p)
        mod = p ** rel
        v = n * self.valuation
        return PAdicNumber(p, pow(self.unit, n, mod), v, v + rel)

    # -- Teichmueller -------------------------------------------------------

    def teichmuller(self) -> "PAdicNumber":
        """The root of unity congruent to this unit (mod p, or mod 4 if p=2)."""
        if self.is_zero or self.valuation != 0:
            raise ValueError("Teichmueller lift needs a unit")
        p, N = self.prime, int(self.prec)
        mod = p ** N
        if p == 2:
            return PAdicNumber.from_rational(1 if self.unit % 4 == 1 else -1, 2, N)
        # x^(p^(N-1)) is congruent to omega(x) mod p^N
        return PAdicNumber(p, pow(self.unit % p, p ** (N - 1), mod), 0, N)

    def __repr__(self):
        if self.is_exact_zero:
            return f"PAdicNumber(0, p={self.prime}, exact)"
        if self.is_zero:
            return f"PAdicNumber(O({self.prime}^{self.prec}))"
        return (f"PAdicNumber({self.prime}^{self.valuation} * {self.unit} "
                f"+ O({self.prime}^{self.prec}))")


def padic(x: Union[Rational, PAdicNumber], p: int, prec: int = DEFAULT_PRECISION) -> PAdicNumber:
    if isinstance(x, PAdicNumber):
        if x.prime != p:
            raise PrimeMismatch(f"{x.prime}-adic given where {p}-adic expected")
        return x
    return PAdicNumber.from_rational(x, p, prec)


# module-level operations, for callers that prefer functions

def add(x: PAdicNumber, y: PAdicNumber) -> PAdicNumber:
    return x + y


def mul(x: PAdicNumber, y: PAdicNumber) -> PAdicNumber:
    return x * y


def inv(x: PAdicNumber) -> PAdicNumber:
    return x.inverse()


def norm(x: PAdicNumber) -> PNorm:
    return x.norm()


def in_ball(xs: Iterable[PAdicNumber], radius: PNorm, strict: bool = True) -> bool:
    """Whether every coordinate has norm < radius (<= when not strict)."""
    for x in xs:
        nx = x.norm()
        if strict and not nx < radius:
            return False
        if not strict and nx > radius:
            return False
    return True
