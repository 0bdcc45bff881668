"""One-variable p-adic power series, exp/log, disk norms and the Schwarz check.

Coefficients are exact rationals.  A series is a truncation plus a
certified bound on the omitted tail: for every closed disk of radius
rho below ``limit`` the bound ``sup_{n>M} |a_n|_p rho^n`` is computed
exactly as a rational p-exponent, which dominates both the tail's
values and the tail's Taylor coefficients anywhere on that disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional, Sequence, Union

from .padic import (
    DEFAULT_PRECISION,
    PAdicNumber,
    PNorm,
    Prime,
    Rational,
    padic,
    valuation,
)


class DomainError(ValueError):
    """Evaluation or norm requested outside the certified disk."""


def _vfact(n: int, p: int) -> int:
    """v_p(n!) by Legendre's formula."""
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


def _radius_exponent(x: PAdicNumber) -> Fraction:
    # zero to precision N only has |x| <= p^-N
    return Fraction(-x.valuation)


@dataclass(frozen=True)
class PowerSeries:
    prime: int
    coefficients: tuple
    limit: Optional[PNorm] = None
    # maps e with rho = p^-e (rho < limit) to the exponent of a bound on
    # sup_{n>M} |a_n| rho^n; None means the series is a polynomial
    tail: Optional[Callable[[Fraction], Optional[Fraction]]] = field(default=None, compare=False)

    @classmethod
    def polynomial(cls, p: int, coefficients: Sequence[Rational]) -> "PowerSeries":
        return cls(int(p), tuple(Fraction(c) for c in coefficients))

    @property
    def truncation(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_polynomial(self) -> bool:
        return self.tail is None

    def _check_radius(self, r: PNorm):
        if self.limit is not None and not r < self.limit:
            raise DomainError(f"radius {r} outside the certified disk |x| < {self.limit}")

    def tail_bound(self, r: PNorm) -> PNorm:
        """Certified bound on the omitted tail over the closed disk of radius r."""
        self._check_radius(r)
        if self.tail is None or r.is_zero:
            return PNorm.zero(self.prime)
        e = self.tail(-r.exponent)
        return PNorm.zero(self.prime) if e is None else PNorm(self.prime, e)

    def derivative(self) -> "PowerSeries":
        """Derivative of the truncation; the tail is not carried over."""
        cs = [n * c for n, c in enumerate(self.coefficients)][1:] or [Fraction(0)]
        return PowerSeries(self.prime, tuple(cs))

    def __call__(self, x: Union[Rational, PAdicNumber], prec: int = DEFAULT_PRECISION) -> PAdicNumber:
        return evaluate(self, x, prec)


def evaluate(f: PowerSeries, x: Union[Rational, PAdicNumber], prec: int = DEFAULT_PRECISION) -> PAdicNumber:
    """Evaluate f at x; the result carries the tail into its precision."""
    p = f.prime
    x = padic(x, p, prec)
    if x.is_exact_zero:
        return PAdicNumber.from_rational(f.coefficients[0], p, prec)
    r = PNorm(p, _radius_exponent(x))
    tail = f.tail_bound(r)
    total = PAdicNumber.exact_zero(p)
    power = None
    for n, c in enumerate(f.coefficients):
        power = PAdicNumber.one(p, max(int(x.prec), prec)) if n == 0 else (x if n == 1 else power * x)
        if c:
            total = total + power.scale(c)
    if not tail.is_zero:
        total = total.with_prec(math.ceil(-tail.exponent))
    if total.is_exact_zero:
        total = PAdicNumber.zero(p, int(x.prec))
    return total


# -- exponential and logarithm --------------------------------------------------

def _exp_tail(p: int, M: int):
    def tail(e: Fraction):
        # |1/n!| rho^n <= p^((n-1)/(p-1) - e n), decreasing in n for e > 1/(p-1)
        return Fraction(M, p - 1) - e * (M + 1)
    return tail


def _log_tail(p: int, M: int):
    def tail(e: Fraction):
        # |x^n / n| <= p^(floor(log_p n) - e n) over blocks p^k <= n < p^(k+1)
        k = 0
        while p ** (k + 1) <= M + 1:
            k += 1
        best = None
        while True:
            n = max(M + 1, p ** k)
            val = k - e * n
            best = val if best is None else max(best, val)
            if p ** k >= M + 1 and e * (p ** (k + 1) - p ** k) >= 1:
                return best
            k += 1
    return tail


def exp_series(p: int, truncation: int) -> PowerSeries:
    """exp(x) truncated at degree ``truncation``; tail certified for rho < r_p."""
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    p = Prime(p)
    cs = [Fraction(1, math.factorial(n)) for n in range(truncation + 1)]
    return PowerSeries(int(p), tuple(cs), p.r_p, _exp_tail(int(p), truncation))


def log_series(p: int, truncation: int) -> PowerSeries:
    """log(1+x) truncated at degree ``truncation``; tail certified for rho < 1."""
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    p = Prime(p)
    cs = [Fraction(0)] + [Fraction((-1) ** (n + 1), n) for n in range(1, truncation + 1)]
    return PowerSeries(int(p), tuple(cs), PNorm.one(int(p)), _log_tail(int(p), truncation))


def _terms_needed(p: int, v: int, prec, kind: str) -> int:
    """Smallest truncation whose tail at |x| = p^-v is below p^-prec."""
    M = 1
    series_tail = _exp_tail if kind == "exp" else _log_tail
    while series_tail(p, M)(Fraction(v)) > -prec:
        M = M * 2 if M < 16 else M + 16
    lo, hi = max(M // 2, 1), M
    while lo < hi:
        mid = (lo + hi) // 2
        if series_tail(p, mid)(Fraction(v)) <= -prec:
            hi = mid
        else:
            lo = mid + 1
    return hi


def padic_exp(x: PAdicNumber) -> PAdicNumber:
    """exp(x) for |x|_p < r_p, to the precision of x."""
    p = x.prime
    if x.is_exact_zero:
        return PAdicNumber.one(p)
    if not x.norm() < Prime(p).r_p:
        raise DomainError(f"exp needs |x|_p < r_p, got {x.norm()}")
    M = _terms_needed(p, int(x.valuation), x.prec, "exp")
    return evaluate(exp_series(p, M), x, int(x.prec))


def padic_log1p(y: PAdicNumber) -> PAdicNumber:
    """log(1+y) for |y|_p < 1, to the precision of y."""
    p = y.prime
    if y.is_exact_zero:
        return PAdicNumber.exact_zero(p)
    if not y.norm() < PNorm.one(p):
        raise DomainError(f"log(1+y) needs |y|_p < 1, got {y.norm()}")
    if y.is_zero:
        return PAdicNumber.zero(p, y.prec)
    M = _terms_needed(p, int(y.valuation), y.prec, "log")
    return evaluate(log_series(p, M), y, int(y.prec))


def padic_log(x: PAdicNumber) -> PAdicNumber:
    """log(x) for |x - 1|_p < 1."""
    return padic_log1p(x - 1)


def iwasawa_log(x: Union[PAdicNumber, Rational], p: Optional[int] = None,
                prec: int = DEFAULT_PRECISION) -> PAdicNumber:
    """Logarithm of a unit, killing its Teichmueller component.

    x = zeta * u with zeta a root of unity and u = 1 mod p (mod 4 for p=2);
    the result is log(u), zero to precision exactly when x is a root of unity.
    """
    if not isinstance(x, PAdicNumber):
        x = padic(x, p, prec)
    if x.is_zero or x.valuation != 0:
        raise ValueError(f"iwasawa_log needs a unit, got {x!r}")
    zeta = x.teichmuller()
    return padic_log1p(x / zeta - 1)


# -- norms on disks -------------------------------------------------------------

@dataclass(frozen=True)
class DiskNorm:
    radius: PNorm
    value: PNorm
    exact: bool = True  # False: the tail was not dominated, value is an upper bound


def _truncation_sup(f: PowerSeries, r: PNorm) -> PNorm:
    p = f.prime
    best = PNorm.zero(p)
    for n, c in enumerate(f.coefficients):
        if c:
            term = PNorm(p, -valuation(c, p)) * (r ** n if n else PNorm.one(p))
            best = max(best, term)
    return best


def disk_sup_norm(f: PowerSeries, r: PNorm) -> DiskNorm:
    """|f|_r = max_n |a_n|_p r^n, with the tail shown to be dominated."""
    f._check_radius(r)
    if r.is_zero:
        raise DomainError("radius must be positive")
    trunc = _truncation_sup(f, r)
    tail = f.tail_bound(r)
    if tail < trunc or tail.is_zero:
        return DiskNorm(r, trunc, True)
    return DiskNorm(r, max(trunc, tail), False)


# -- Schwarz lemma --------------------------------------------------------------

class SchwarzPreconditionError(ValueError):
    pass


@dataclass
class SchwarzReport:
    s: PNorm
    t: PNorm
    q: int
    l: int
    delta: PNorm
    mu: PNorm
    lhs: PNorm            # |f|_s
    growth_term: PNorm    # (s/t)^(ql) |f|_t
    value_term: PNorm     # mu (s/delta)^(ql-1) r_p^-(q-1)
    verdict: str          # "holds", "violated" or "undetermined"

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    @property
    def rhs(self) -> PNorm:
        return max(self.growth_term, self.value_term)


def _rational_point(g, p: int) -> Fraction:
    if isinstance(g, PAdicNumber):
        if g.prime != p:
            raise SchwarzPreconditionError("point over the wrong prime")
        return g.to_rational()
    return Fraction(g)


def _eval_poly(cs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(cs):
        acc = acc * x + c
    return acc


def _rnorm(x: Fraction, p: int) -> PNorm:
    return PNorm.zero(p) if x == 0 else PNorm(p, -valuation(x, p))


def schwarz_check(f: PowerSeries, s: PNorm, t: PNorm, q: int, points: Sequence) -> SchwarzReport:
    """Evaluate both sides of the p-adic Schwarz inequality exactly.

    |f|_s <= max{ (s/t)^(ql) |f|_t , mu (s/delta)^(ql-1) r_p^-(q-1) }

    where l = #points, delta is their minimal mutual distance and mu the
    largest |f^(m)(g)|_p over m < q and g in points.  Points given as
    p-adic numbers are used through their rational representatives.
    """
    p = f.prime
    r_p = Prime(p).r_p
    if q < 1:
        raise SchwarzPreconditionError("q must be a positive integer")
    if s.is_zero or t.is_zero:
        raise SchwarzPreconditionError("radii must be positive")
    if t < s:
        raise SchwarzPreconditionError(f"need t >= s, got s={s}, t={t}")
    gammas = [_rational_point(g, p) for g in points]
    l = len(gammas)
    if l < 2:
        raise SchwarzPreconditionError(f"need at least two points, got {l}")
    if len(set(gammas)) != l:
        raise SchwarzPreconditionError("points must be distinct")
    for g in gammas:
        if _rnorm(g, p) > s:
            raise SchwarzPreconditionError(f"point {g} outside the closed ball of radius {s}")
    delta = min(_rnorm(a - b, p) for a, b in combinations(gammas, 2))
    if delta > PNorm.one(p):
        raise SchwarzPreconditionError(f"minimal distance {delta} exceeds 1")

    fs = disk_sup_norm(f, s)
    ft = disk_sup_norm(f, t)
    tail_t = f.tail_bound(t)

    # mu from the truncation; the tail's m-th derivative on the closed t-disk
    # around g is bounded by tail_t / t^m (Cauchy; |m!|_p <= 1)
    mu_hi = PNorm.zero(p)
    mu_lo = PNorm.zero(p)
    deriv = list(f.coefficients)
    for m in range(q):
        err = tail_t / (t ** m) if not tail_t.is_zero else PNorm.zero(p)
        for g in gammas:
            val = _rnorm(_eval_poly(deriv, g), p)
            mu_hi = max(mu_hi, val, err)
            if err < val:
                mu_lo = max(mu_lo, val)
        deriv = [n * c for n, c in enumerate(deriv)][1:] or [Fraction(0)]

    def value_term(mu):
        return mu * (s / delta) ** (q * l - 1) * r_p ** (-(q - 1))

    ft_lo = ft.value if ft.exact else PNorm.zero(p)
    growth = (s / t) ** (q * l) * ft.value
    hi_rhs = max(growth, value_term(mu_hi))
    lo_rhs = max((s / t) ** (q * l) * ft_lo, value_term(mu_lo))
    if fs.value <= lo_rhs:
        verdict = "holds"
    elif fs.exact and fs.value > hi_rhs:
        verdict = "violated"
    else:
        verdict = "undetermined"
    return SchwarzReport(s, t, q, l, delta, mu_hi, fs.value, growth, value_term(mu_hi), verdict)


# -- randomized instances -------------------------------------------------------

SCHWARZ_PRIMES = (2, 3, 5, 7)


def random_schwarz_instance(rng, p: Optional[int] = None):
    """A random (f, s, t, q, points) with l in {2,3,4} and q <= 4.

    Half of the instances vanish to order q at every point, so the growth
    term alone has to carry the inequality.
    """
    p = p or rng.choice(SCHWARZ_PRIMES)
    l = rng.choice((2, 3, 4))
    q = rng.randint(1, 4)
    a = rng.randint(-1, 2)  # s = p^-a
    s = PNorm(p, -a)
    t = s * PNorm(p, Fraction(rng.randint(0, 4), rng.choice((1, 2))))
    scale = Fraction(p) ** a
    while True:
        pts: list = []
        while len(pts) < l:
            g = scale * rng.randint(-3 * p, 3 * p)
            if g not in pts:
                pts.append(g)
        if min(_rnorm(x - y, p) for x, y in combinations(pts, 2)) <= PNorm.one(p):
            break
    if rng.random() < 0.5:
        cs = [Fraction(1)]
        for g in pts:
            for _ in range(q):
                cs = [Fraction(0)] + cs
                cs = [cs[i] - g * (cs[i + 1] if i + 1 < len(cs) else 0) for i in range(len(cs))]
        extra = [Fraction(rng.randint(-9, 9), rng.choice((1, 1, p, 2))) for _ in range(rng.randint(1, 3))]
        if not any(extra):
            extra[0] = Fraction(1)
        prod = [Fraction(0)] * (len(cs) + len(extra) - 1)
        for i, c in enumerate(cs):
            for j, e in enumerate(extra):
                prod[i + j] += c * e
        cs = prod
    else:
        deg = rng.randint(1, 12)
        cs = [Fraction(rng.randint(-20, 20), rng.choice((1, 1, p, p * p, 3))) for _ in range(deg + 1)]
        if not any(cs):
            cs[0] = Fraction(1)
    return PowerSeries.polynomial(p, cs), s, t, q, pts


def schwarz_suite(count: int = 1000, seed: int = 1) -> dict:
    """Run ``count`` random instances; any violated or undetermined case is listed."""
    import random

    rng = random.Random(seed)
    verdicts = {"holds": 0, "violated": 0, "undetermined": 0}
    failures = []
    for i in range(count):
        f, s, t, q, pts = random_schwarz_instance(rng)
        rep = schwarz_check(f, s, t, q, pts)
        verdicts[rep.verdict] += 1
        if not rep.holds:
            failures.append({"index": i, "prime": f.prime, "coefficients": [str(c) for c in f.coefficients],
                             "s": repr(s), "t": repr(t), "q": q, "points": [str(g) for g in pts],
                             "verdict": rep.verdict})
    return {"count": count, "seed": seed, "verdicts": verdicts, "failures": failures}
