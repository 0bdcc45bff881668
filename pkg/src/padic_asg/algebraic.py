"""Exact algebraic numbers with a chosen p-adic embedding, and Weil heights.

A :class:`NumberField` is Q(theta) for theta a root of an irreducible
primitive integer polynomial, together with one root of that polynomial in
Q_p (found by Hensel lifting), i.e. a place of K above p with K_v = Q_p.
Elements are :class:`AlgebraicNumber` values in the power basis of theta.

Elements of one field combine by polynomial arithmetic modulo the defining
polynomial; elements of different fields combine through resultants, the
result living in a fresh field generated by it (degree capped at 16).
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Optional, Sequence, Union

import mpmath
import sympy
from sympy import Poly, cyclotomic_poly, factor_list, resultant, sqf_part, totient
from sympy.abc import x as _X, y as _Y

from .linalg import det
from .padic import DEFAULT_PRECISION, PAdicNumber, PNorm, Prime, Rational, valuation

DEGREE_CAP = 16


class HenselError(ValueError):
    """The seed residue does not lift to a p-adic root."""


class FieldMismatch(ValueError):
    pass


# -- dense polynomials over Q, coefficient lists low -> high ---------------------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _pdivmod(a, b):
    a = [Fraction(c) for c in _trim(a)]
    b = _trim(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = Fraction(b[-1])
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] / lead
        q[k] = c
        for i, bi in enumerate(b):
            a[i + k] -= c * bi
        a = _trim(a)
    return q, a


def _pgcdex_inverse(a, f):
    """Inverse of a modulo f over Q (f irreducible, a nonzero mod f)."""
    r0, r1 = [Fraction(c) for c in f], [Fraction(c) for c in _trim(a)]
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        qs = _pmul(q, s1)
        s_new = [Fraction(0)] * max(len(s0), len(qs))
        for i, c in enumerate(s0):
            s_new[i] += c
        for i, c in enumerate(qs):
            s_new[i] -= c
        s0, s1 = s1, _trim(s_new)
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible")
    c = r0[0]
    return [v / c for v in s0]


def _primitive_int(coeffs) -> list[int]:
    cs = [Fraction(c) for c in coeffs]
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in cs), 1)
    ints = [int(c * den) for c in cs]
    g = reduce(math.gcd, ints, 0)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def _to_sympy(coeffs, var=_X) -> Poly:
    return Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction)
                               else sympy.Integer(c) for c in coeffs])), var, domain="QQ")


def _from_sympy(P: Poly) -> list[int]:
    cs = [Fraction(int(c.p), int(c.q)) for c in reversed(P.all_coeffs())]
    return _primitive_int(cs)


def _peval_padic(coeffs, x: PAdicNumber) -> PAdicNumber:
    acc = PAdicNumber.exact_zero(x.prime)
    for c in reversed(coeffs):
        acc = acc * x + PAdicNumber.from_rational(c, x.prime, int(x.prec) + 8) if c else acc * x
    return acc


# -- number fields ----------------------------------------------------------------

class NumberField:
    """Q(theta) with theta embedded in Q_p via a Hensel-certified root."""

    def __init__(self, minpoly: Sequence[int], prime: int, approx: Union[int, PAdicNumber, None] = None,
                 check_irreducible: bool = True):
        f = _primitive_int(minpoly)
        if len(f) < 2:
            raise ValueError("defining polynomial must have degree >= 1")
        self.poly = tuple(f)
        self.degree = len(f) - 1
        self.prime = int(Prime(prime))
        if check_irreducible and self.degree > 1:
            _, factors = factor_list(_to_sympy(f).as_expr(), _X)
            if len(factors) != 1 or factors[0][1] != 1:
                raise ValueError(f"{list(f)} is not irreducible over Q")
        if self.degree == 1:
            approx = PAdicNumber.from_rational(Fraction(-f[0], f[1]), self.prime, DEFAULT_PRECISION) \
                if f[0] else PAdicNumber.exact_zero(self.prime)
        self._approx = approx
        if self.degree > 1:
            self._check_hensel(approx)
        self._cache: dict[int, PAdicNumber] = {}

    # the rationals, embedded trivially at p
    @classmethod
    def rationals(cls, prime: int) -> "NumberField":
        return _rationals(int(prime))

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def _check_hensel(self, approx):
        p = self.prime
        if approx is None:
            raise HenselError("a seed residue or p-adic approximation is required")
        if isinstance(approx, int):
            x0 = PAdicNumber.from_rational(approx % p, p, 2)
        else:
            x0 = approx
        fv = _peval_padic(self.poly, x0)
        dfv = _peval_padic(_deriv(self.poly), x0)
        if dfv.is_zero:
            raise HenselError(f"seed {approx} is not a simple root of {list(self.poly)} mod {p}")
        if fv.is_zero and fv.prec <= 2 * dfv.valuation:
            raise HenselError(f"seed {approx} does not isolate a root at its precision")
        if not fv.is_zero and not fv.valuation > 2 * dfv.valuation:
            raise HenselError(f"seed {approx} is not a root of {list(self.poly)} mod {p}")

    def theta(self, prec: int = DEFAULT_PRECISION) -> PAdicNumber:
        """The embedded generator to absolute precision at least ``prec``."""
        if self.degree == 1:
            c = Fraction(-self.poly[0], self.poly[1])
            return PAdicNumber.from_rational(c, self.prime, prec) if c else PAdicNumber.exact_zero(self.prime)
        have = [N for N in self._cache if N >= prec]
        if have:
            return self._cache[min(have)].with_prec(prec)
        root = _hensel_lift(self.poly, self.prime, self._approx, prec)
        self._cache[prec] = root
        return root

    def __call__(self, coeffs) -> "AlgebraicNumber":
        if isinstance(coeffs, AlgebraicNumber):
            return self.coerce(coeffs)
        if isinstance(coeffs, (int, Fraction)):
            coeffs = [coeffs]
        return AlgebraicNumber(self, tuple(Fraction(c) for c in coeffs))

    def gen(self) -> "AlgebraicNumber":
        if self.degree == 1:
            return self([Fraction(-self.poly[0], self.poly[1])])
        return self([0, 1])

    def coerce(self, a: "AlgebraicNumber") -> "AlgebraicNumber":
        if a.field is self:
            return a
        if a.field.is_rational or a.is_rational:
            return self(a.as_rational())
        if a.field == self:
            return AlgebraicNumber(self, a.coeffs)
        raise FieldMismatch("element of a different number field")

    def __eq__(self, other):
        return (isinstance(other, NumberField) and self.poly == other.poly and self.prime == other.prime
                and (self.degree == 1 or self.theta(8).agrees(other.theta(8))))

    def __hash__(self):
        return hash((self.poly, self.prime))

    def __repr__(self):
        return f"NumberField({list(self.poly)}, p={self.prime})"


@lru_cache(maxsize=None)
def _rationals(p: int) -> NumberField:
    return NumberField([0, 1], p)


def _deriv(coeffs):
    return [i * c for i, c in enumerate(coeffs)][1:]


def _hensel_lift(poly, p: int, approx, prec: int) -> PAdicNumber:
    """Newton iteration from a Hensel-isolated approximation."""
    if isinstance(approx, int):
        x = PAdicNumber.from_rational(approx % p, p, 1)
    else:
        x = approx
    df = _deriv(poly)
    target = prec
    work = max(int(x.prec), 1)
    while True:
        work = min(2 * work + 2, target + 4 * _vdf(df, x) + 4)
        xw = PAdicNumber.from_rational(x.to_rational(), p, work + 8)
        fx = _peval_padic(poly, xw)
        dfx = _peval_padic(df, xw)
        x_new = xw - fx / dfx
        x = x_new.with_prec(work)
        if not (x.prec < target or _peval_padic(poly, PAdicNumber.from_rational(x.to_rational(), p, target + 8))
                .valuation < target + 2 * _vdf(df, x)):
            break
    return x.with_prec(prec) if x.prec > prec else x


def _vdf(df, x) -> int:
    v = _peval_padic(df, x).valuation
    return 0 if v == math.inf else int(v)


def hensel_embed(minpoly: Sequence[int], prime: int, seed_residue: int,
                 prec: int = DEFAULT_PRECISION) -> "AlgebraicNumber":
    """The p-adic root of ``minpoly`` lifting a simple root ``seed_residue`` mod p."""
    p = int(Prime(prime))
    f = _primitive_int(minpoly)
    seed = seed_residue % p
    fs = sum(c * seed ** i for i, c in enumerate(f)) % p
    dfs = sum(c * seed ** i for i, c in enumerate(_deriv(f))) % p
    if fs != 0:
        raise HenselError(f"{seed_residue} is not a root of {f} mod {p}")
    if dfs == 0:
        raise HenselError(f"{seed_residue} is a multiple root of {f} mod {p}")
    K = NumberField(f, p, seed)
    K.theta(prec)
    return K.gen()


# -- elements ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AlgebraicNumber:
    field: NumberField
    coeffs: tuple  # Fractions, power basis of theta, length <= degree

    def __post_init__(self):
        cs = _trim(self.coeffs)
        if len(cs) > self.field.degree:
            _, cs = _pdivmod(cs, self.field.poly)
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in cs))

    # construction
    @classmethod
    def rational(cls, r: Rational, prime: int) -> "AlgebraicNumber":
        return NumberField.rationals(prime)(r)

    # inspection
    @property
    def prime(self) -> int:
        return self.field.prime

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_rational(self) -> bool:
        return len(self.coeffs) <= 1

    def as_rational(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("not a rational number")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def coordinates(self) -> list[Fraction]:
        """Power-basis coordinates, padded to the field degree."""
        return list(self.coeffs) + [Fraction(0)] * (self.field.degree - len(self.coeffs))

    # arithmetic
    def _other(self, other):
        if isinstance(other, (int, Fraction)):
            return self.field(other), None
        if not isinstance(other, AlgebraicNumber):
            return None, None
        try:
            return self.field.coerce(other), None
        except FieldMismatch:
            pass
        try:
            return None, other.field.coerce(self)
        except FieldMismatch:
            return None, "resultant"

    def __add__(self, other):
        o, alt = self._other(other)
        if o is not None:
            n = max(len(self.coeffs), len(o.coeffs))
            a = list(self.coeffs) + [0] * (n - len(self.coeffs))
            b = list(o.coeffs) + [0] * (n - len(o.coeffs))
            return AlgebraicNumber(self.field, tuple(x + y for x, y in zip(a, b)))
        if isinstance(alt, AlgebraicNumber):
            return alt + other
        if alt == "resultant":
            return combine(self, other, "+")
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(self.field, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, AlgebraicNumber)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o, alt = self._other(other)
        if o is not None:
            prod = _pmul(list(self.coeffs), list(o.coeffs))
            return AlgebraicNumber(self.field, tuple(prod))
        if isinstance(alt, AlgebraicNumber):
            return alt * other
        if alt == "resultant":
            return combine(self, other, "*")
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicNumber":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        if self.field.degree == 1:
            return self.field(1 / self.as_rational())
        return AlgebraicNumber(self.field, tuple(_pgcdex_inverse(self.coeffs, self.field.poly)))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, AlgebraicNumber):
            o, alt = self._other(other)
            if o is not None:
                return self * o.inverse()
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int) -> "AlgebraicNumber":
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational and self.as_rational() == other
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        o, alt = self._other(other)
        if o is not None:
            return self.coeffs == o.coeffs
        return (self - other).is_zero

    def __hash__(self):
        if self.is_rational:
            return hash(self.as_rational())
        return hash((self.field, self.coeffs))

    # embeddings
    def padic(self, prec: int = DEFAULT_PRECISION) -> PAdicNumber:
        """Image in Q_p under the field's embedding, to absolute precision >= prec
        whenever that is attainable (trimmed to ``prec``)."""
        p = self.prime
        if self.is_zero:
            return PAdicNumber.exact_zero(p)
        if self.is_rational:
            return PAdicNumber.from_rational(self.as_rational(), p, prec)
        margin = max([0] + [-valuation(c, p) for c in self.coeffs if c])
        th = self.field.theta(prec + margin + 2)
        acc = PAdicNumber.exact_zero(p)
        power = None
        for i, c in enumerate(self.coeffs):
            power = PAdicNumber.one(p, prec + margin + 2) if i == 0 else power * th
            if c:
                acc = acc + power.scale(c)
        return acc.with_prec(prec)

    def valuation(self) -> int:
        """Exact v_p of this nonzero element at the chosen place."""
        if self.is_zero:
            return math.inf
        prec = DEFAULT_PRECISION
        while True:
            a = self.padic(prec)
            if not a.is_zero:
                return int(a.valuation)
            prec *= 2

    def norm(self) -> PNorm:
        if self.is_zero:
            return PNorm.zero(self.prime)
        return PNorm(self.prime, -self.valuation())

    # algebraic invariants
    def mult_matrix(self) -> list[list[Fraction]]:
        """Matrix of multiplication by self in the power basis (columns = images)."""
        d = self.field.degree
        cols = []
        for i in range(d):
            img = AlgebraicNumber(self.field, tuple(_pmul([0] * i + [1], list(self.coeffs))))
            cols.append(img.coordinates())
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def minpoly(self) -> tuple:
        """Primitive integer minimal polynomial, low -> high, positive leading coefficient."""
        return _minpoly_cached(self.field, self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.minpoly()) - 1

    def field_norm(self) -> Fraction:
        return det(self.mult_matrix())

    def is_algebraic_integer(self) -> bool:
        return self.minpoly()[-1] == 1

    def torsion_order(self) -> Optional[int]:
        """Multiplicative order if this is a root of unity, else None (exact)."""
        if self.is_zero:
            return None
        return _cyclotomic_order(self.minpoly())

    def is_root_of_unity(self) -> bool:
        return self.torsion_order() is not None

    def height(self) -> "HeightValue":
        return weil_height(self)

    def __repr__(self):
        if self.is_rational:
            return f"AlgebraicNumber({self.as_rational()})"
        terms = " + ".join(f"{c}*t^{i}" for i, c in enumerate(self.coeffs) if c)
        return f"AlgebraicNumber({terms} in {self.field})"


@lru_cache(maxsize=4096)
def _minpoly_cached(K: NumberField, coeffs: tuple) -> tuple:
    a = AlgebraicNumber(K, coeffs)
    if a.is_rational:
        return tuple(_primitive_int([-a.as_rational(), 1]))
    M = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in a.mult_matrix()])
    cp = M.charpoly(_X)
    return tuple(_from_sympy(Poly(sqf_part(cp.as_expr()), _X, domain="QQ")))


@lru_cache(maxsize=None)
def _cyclotomic_order(f: tuple) -> Optional[int]:
    if f[-1] != 1:
        return None
    d = len(f) - 1
    # phi(n) = d forces n <= 2 d^2 + 2 (phi(n) >= sqrt(n/2))
    for n in range(1, 2 * d * d + 3):
        if totient(n) == d:
            if tuple(_from_sympy(Poly(cyclotomic_poly(n, _X), _X, domain="QQ"))) == f:
                return n
    return None


def combine(a: AlgebraicNumber, b: AlgebraicNumber, op: str) -> AlgebraicNumber:
    """a op b for elements of different fields, via resultants.

    The minimal polynomial of the result is the irreducible factor of the
    resultant that vanishes at the p-adic image of a op b; the result is
    the generator of a new field with that polynomial.
    """
    if a.prime != b.prime:
        raise FieldMismatch("elements embedded at different primes")
    if a.degree * b.degree > DEGREE_CAP:
        raise ValueError(f"degree {a.degree * b.degree} exceeds cap {DEGREE_CAP}")
    fa = _to_sympy(a.minpoly(), _Y).as_expr()
    fb = _to_sympy(b.minpoly(), _X).as_expr()
    if op == "+":
        R = resultant(fa, fb.subs(_X, _X - _Y), _Y)
    elif op == "*":
        deg_b = len(b.minpoly()) - 1
        R = resultant(fa, sympy.expand(_Y ** deg_b * fb.subs(_X, _X / _Y)), _Y)
    else:
        raise ValueError(op)
    prec = DEFAULT_PRECISION
    while True:
        ap, bp = a.padic(prec), b.padic(prec)
        val = ap + bp if op == "+" else ap * bp
        _, factors = factor_list(sympy.expand(R), _X)
        scores = []
        for g, _mult in factors:
            gi = _from_sympy(Poly(g, _X, domain="QQ"))
            scores.append((_peval_padic(gi, val), gi))
        candidates = [g for v, g in scores if v.is_zero or v.valuation >= prec // 2]
        if len(candidates) == 1:
            g = candidates[0]
            if len(g) == 2:
                return NumberField.rationals(a.prime)(Fraction(-g[0], g[1]))
            return NumberField(g, a.prime, val, check_irreducible=False).gen()
        prec *= 2
        if prec > 4096:
            raise ValueError("could not isolate the factor of the resultant")


# -- heights ----------------------------------------------------------------------

_GRID = 2 ** 256


@dataclass(frozen=True)
class HeightValue:
    """A real number known to lie in [lo, hi] (rational endpoints)."""

    lo: Fraction
    hi: Fraction
    note: str = ""

    def __post_init__(self):
        # outward rounding keeps denominators small without losing certification
        if self.lo.denominator > _GRID or self.hi.denominator > _GRID:
            object.__setattr__(self, "lo", Fraction(math.floor(self.lo * _GRID), _GRID))
            object.__setattr__(self, "hi", Fraction(math.ceil(self.hi * _GRID), _GRID))

    @property
    def value(self) -> float:
        return float((self.lo + self.hi) / 2)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __add__(self, other: "HeightValue") -> "HeightValue":
        return HeightValue(self.lo + other.lo, self.hi + other.hi)

    def scale(self, k: Rational) -> "HeightValue":
        k = Fraction(k)
        a, b = self.lo * k, self.hi * k
        return HeightValue(min(a, b), max(a, b), self.note)

    @classmethod
    def exact_zero(cls) -> "HeightValue":
        return cls(Fraction(0), Fraction(0))


@contextmanager
def _iv_prec(dps=None, prec=None):
    iv = mpmath.iv
    saved = iv.prec
    if prec is None:
        iv.dps = dps
    else:
        iv.prec = prec
    try:
        yield
    finally:
        iv.prec = saved


def _raw_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    if not man and exp:
        raise ArithmeticError("non-finite interval endpoint")
    val = Fraction(man) * Fraction(2) ** exp
    return -val if sign else val


def _endpoints(v) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of an mpmath interval."""
    a, b = v._mpi_
    return _raw_to_fraction(a), _raw_to_fraction(b)


def _mpf_to_fraction(v) -> Fraction:
    return _raw_to_fraction(mpmath.mpf(v)._mpf_)


def _ivlog(x: mpmath.ctx_iv.ivmpf):
    return mpmath.iv.log(x)


def log_enclosure(n: Rational) -> HeightValue:
    """Certified enclosure of log(n) for a positive rational."""
    n = Fraction(n)
    with _iv_prec(prec=200):
        v = mpmath.iv.log(mpmath.iv.mpf(n.numerator)) - mpmath.iv.log(mpmath.iv.mpf(n.denominator))
        return HeightValue(*_endpoints(v))


def _iv_frac(q: Fraction):
    return mpmath.iv.mpf(q.numerator) / q.denominator


def _iv_box(z, r: Fraction):
    """Complex interval box containing the closed disk of radius r about z."""
    iv = mpmath.iv
    rr = _iv_frac(r)
    re, im = iv.mpf(z.real), iv.mpf(z.imag)
    return iv.mpc(iv.mpf([(re - rr).a, (re + rr).b]), iv.mpf([(im - rr).a, (im + rr).b]))


def root_enclosures(poly: Sequence[int], dps: int = 60):
    """Disjoint inclusion disks (center, radius), one root each.

    Centres come from mpmath's polyroots; radii d*|f(z)|/(|a_d| prod|z - z_j|)
    are computed in interval arithmetic and kept as exact rational upper
    bounds.  When the disks are pairwise disjoint each holds exactly one root.
    """
    iv = mpmath.iv
    d = len(poly) - 1
    coeffs_hi = list(reversed([int(c) for c in poly]))
    while True:
        with mpmath.workdps(dps + 20), _iv_prec(dps=dps + 20):
            zs = mpmath.polyroots(coeffs_hi, maxsteps=400, extraprec=4 * dps, error=False)
            if not isinstance(zs, list):
                zs = [zs]
            zs = [mpmath.mpc(z) for z in zs]
            pts = [iv.mpc(iv.mpf(z.real), iv.mpf(z.imag)) for z in zs]
            radii = []
            for i, zi in enumerate(pts):
                fz = iv.mpc(0, 0)
                for c in coeffs_hi:
                    fz = fz * zi + c
                den = iv.mpf(abs(coeffs_hi[0]))
                for j, wj in enumerate(pts):
                    if j != i:
                        den = den * abs(zi - wj)
                radii.append(_endpoints(d * abs(fz) / den)[1])
            ok = all(_endpoints(abs(pts[i] - pts[j]))[0] > radii[i] + radii[j]
                     for i in range(d) for j in range(i + 1, d))
        if ok and all(r < Fraction(1, 10 ** (dps // 3)) for r in radii):
            return list(zip(zs, radii))
        dps *= 2
        if dps > 4000:
            raise ArithmeticError("root isolation failed")


def mahler_log(poly: Sequence[int], tol: float = 1e-15) -> HeightValue:
    """Certified enclosure of log M(f) for an integer polynomial f."""
    iv = mpmath.iv
    poly = [int(c) for c in _trim(poly)]
    lead = abs(poly[-1])
    if len(poly) == 2:
        return log_enclosure(max(abs(poly[0]), lead))
    dps = 60
    while True:
        disks = root_enclosures(poly, dps)
        with _iv_prec(dps=dps + 20):
            total = iv.log(iv.mpf(lead))
            for z, r in disks:
                a = abs(_iv_box(z, r))
                lo, hi = _endpoints(a)
                if hi > 1:
                    total = total + iv.log(iv.mpf([max(a.a, 1), a.b]))
            lo_f, hi_f = _endpoints(total)
        if hi_f - lo_f < Fraction(tol) * max(1, abs(hi_f)):
            return HeightValue(max(lo_f, Fraction(0)), hi_f, "log Mahler measure")
        dps *= 2


def weil_height(alpha: AlgebraicNumber) -> HeightValue:
    """Absolute logarithmic Weil height, log M(minpoly) / degree."""
    if alpha.is_zero or alpha.is_root_of_unity():
        return HeightValue.exact_zero()
    f = alpha.minpoly()
    d = len(f) - 1
    if d == 1:
        r = Fraction(-f[0], f[1])
        return log_enclosure(max(abs(r.numerator), r.denominator))
    m = mahler_log(f)
    return HeightValue(m.lo / d, m.hi / d, f"log M({list(f)}) / {d}")


def poly_height(coeffs: Sequence) -> HeightValue:
    """Projective height of a coefficient vector.

    Rational coefficients: exact, log(max |c_i| / gcd) after clearing
    denominators.  Coefficients in a number field K of degree D: the
    archimedean part (1/D) sum_sigma log max_i |sigma(c_i)| is enclosed
    numerically; the finite part is -(1/D) log N(a) for the ideal a
    generated by the (integral-scaled) coefficients, bounded between
    -(1/D) log gcd_i |N(c_i)| and 0.
    """
    cs = [c for c in coeffs if not (c == 0)]
    if not cs:
        raise ValueError("the zero polynomial has no height")
    if all(isinstance(c, (int, Fraction)) or (isinstance(c, AlgebraicNumber) and c.is_rational) for c in cs):
        rs = [Fraction(c) if not isinstance(c, AlgebraicNumber) else c.as_rational() for c in cs]
        ints = _primitive_vector(rs)
        return log_enclosure(max(abs(v) for v in ints))
    K = next(c.field for c in cs if isinstance(c, AlgebraicNumber) and not c.is_rational)
    els = [K(c) if not isinstance(c, AlgebraicNumber) else K.coerce(c) for c in cs]
    # clear denominators so every coefficient is an algebraic integer
    den = 1
    for e in els:
        mp = e.minpoly()
        # lead(minpoly) * e is integral
        den = den * mp[-1] // math.gcd(den, mp[-1])
    els = [e * den for e in els]
    D = K.degree
    disks = root_enclosures(K.poly)
    iv = mpmath.iv
    with _iv_prec(dps=80):
        arch = iv.mpf(0)
        for z, r in disks:
            zi = _iv_box(z, r)
            lo_best = hi_best = None
            for e in els:
                val = iv.mpc(0, 0)
                for c in reversed(e.coordinates()):
                    val = val * zi + _iv_frac(c)
                lo, hi = _endpoints(abs(val))
                lo_best = lo if lo_best is None else max(lo_best, lo)
                hi_best = hi if hi_best is None else max(hi_best, hi)
            if lo_best <= 0:
                raise ArithmeticError("coefficient enclosure too wide")
            arch = arch + iv.log(iv.mpf([_iv_frac(lo_best).a, _iv_frac(hi_best).b]))
        arch = arch / D
        lo_arch, hi_arch = _endpoints(arch)
    g = 0
    for e in els:
        g = math.gcd(g, abs(int(e.field_norm())))
    fin = log_enclosure(g).scale(Fraction(1, D))
    return HeightValue(lo_arch - fin.hi, hi_arch, "projective height over K")


def _primitive_vector(rs: Sequence[Fraction]) -> list[int]:
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (r.denominator for r in rs), 1)
    ints = [int(r * den) for r in rs]
    g = reduce(math.gcd, ints, 0)
    return [v // g for v in ints]


def liouville_lower_bound(alpha: AlgebraicNumber, prime: Optional[int] = None) -> PNorm:
    """Certified B with |alpha|_p >= B, from log|alpha|_p >= -deg(alpha) h(alpha).

    The exponent is rounded down to a rational with denominator 10^12.
    """
    if alpha.is_zero:
        raise ValueError("Liouville bound needs a nonzero number")
    p = alpha.prime if prime is None else int(prime)
    if p != alpha.prime:
        raise ValueError("number is embedded at a different prime")
    h = weil_height(alpha)
    deg = alpha.degree
    with _iv_prec(prec=200):
        logp = mpmath.iv.log(mpmath.iv.mpf(p))
        e = -(mpmath.iv.mpf(deg) * mpmath.iv.mpf(h.hi.numerator) / h.hi.denominator) / logp
        lo = _endpoints(e)[0]
    scale = 10 ** 12
    return PNorm(p, Fraction(math.floor(lo * scale), scale))
