"""Split commutative groups G = G_a^a x G_m^b and their p-adic Lie theory.

Coordinates are ordered additive first, then multiplicative.  The
identity-vanishing chart is xi = x on G_a and xi = t - 1 on G_m, so the
invariant derivations d/dx and t d/dt act by xi -> 1 and xi -> xi + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Optional, Sequence, Union

from .algebraic import AlgebraicNumber, HeightValue, NumberField, log_enclosure, poly_height
from .analytic import DomainError, iwasawa_log, padic_exp
from .linalg import nullspace, rank, rref
from .padic import DEFAULT_PRECISION, PAdicNumber, PNorm, Prime, valuation

Coordinate = Union[PAdicNumber, AlgebraicNumber]


class BlockStructureError(ValueError):
    """A homomorphism mixes additive and multiplicative coordinates."""


@dataclass(frozen=True)
class SplitGroup:
    additive_rank: int
    multiplicative_rank: int

    def __post_init__(self):
        if self.additive_rank < 0 or self.multiplicative_rank < 0 or self.dim < 1:
            raise ValueError("a split group needs a, b >= 0 and a + b >= 1")

    @classmethod
    def torus(cls, b: int) -> "SplitGroup":
        return cls(0, b)

    @property
    def dim(self) -> int:
        return self.additive_rank + self.multiplicative_rank

    @property
    def is_torus(self) -> bool:
        return self.additive_rank == 0

    def is_multiplicative(self, i: int) -> bool:
        return i >= self.additive_rank

    def identity(self, prime: int) -> "GroupPoint":
        one = NumberField.rationals(prime)
        return GroupPoint(self, tuple([one(0)] * self.additive_rank + [one(1)] * self.multiplicative_rank))

    def __str__(self):
        parts = []
        if self.additive_rank:
            parts.append(f"G_a^{self.additive_rank}")
        if self.multiplicative_rank:
            parts.append(f"G_m^{self.multiplicative_rank}")
        return " x ".join(parts)


def _as_coord(c, prime: Optional[int]) -> Coordinate:
    if isinstance(c, (PAdicNumber, AlgebraicNumber)):
        return c
    if prime is None:
        raise ValueError("a prime is needed to interpret rational coordinates")
    return NumberField.rationals(prime)(Fraction(c))


@dataclass(frozen=True, eq=False)
class GroupPoint:
    group: SplitGroup
    coords: tuple

    def __init__(self, group: SplitGroup, coords: Sequence, prime: Optional[int] = None):
        if len(coords) != group.dim:
            raise ValueError(f"{group} needs {group.dim} coordinates, got {len(coords)}")
        if prime is None:
            prime = next((c.prime for c in coords if isinstance(c, (PAdicNumber, AlgebraicNumber))), None)
        cs = tuple(_as_coord(c, prime) for c in coords)
        if len({c.prime for c in cs}) > 1:
            raise ValueError("coordinates embedded at different primes")
        for i, c in enumerate(cs):
            if group.is_multiplicative(i) and c.is_zero:
                raise ValueError("multiplicative coordinates must be invertible")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "coords", cs)

    @property
    def prime(self) -> int:
        return self.coords[0].prime

    @property
    def additive(self) -> tuple:
        return self.coords[:self.group.additive_rank]

    @property
    def multiplicative(self) -> tuple:
        return self.coords[self.group.additive_rank:]

    @property
    def is_algebraic(self) -> bool:
        return all(isinstance(c, AlgebraicNumber) for c in self.coords)

    @property
    def in_finite_type(self) -> bool:
        """Membership in G(F)_f: every multiplicative coordinate is a unit."""
        return all(c.norm() == PNorm.one(self.prime) for c in self.multiplicative)

    def __mul__(self, other: "GroupPoint") -> "GroupPoint":
        if other.group != self.group:
            raise ValueError("points of different groups")
        a = self.group.additive_rank
        cs = [x + y if i < a else x * y for i, (x, y) in enumerate(zip(self.coords, other.coords))]
        return GroupPoint(self.group, cs)

    def inverse(self) -> "GroupPoint":
        a = self.group.additive_rank
        return GroupPoint(self.group, [-x if i < a else x.inverse() for i, x in enumerate(self.coords)])

    def __pow__(self, k: int) -> "GroupPoint":
        a = self.group.additive_rank
        return GroupPoint(self.group, [x * k if i < a else x ** k for i, x in enumerate(self.coords)])

    def padic(self, prec: int = DEFAULT_PRECISION) -> "GroupPoint":
        return GroupPoint(self.group, [c.padic(prec) if isinstance(c, AlgebraicNumber) else c
                                       for c in self.coords])

    def __eq__(self, other):
        return isinstance(other, GroupPoint) and self.group == other.group and all(
            x == y for x, y in zip(self.coords, other.coords))

    __hash__ = None

    def __repr__(self):
        return f"GroupPoint({self.group}, {list(self.coords)})"


def _padic_coord(c: Coordinate, prec: int) -> PAdicNumber:
    return c.padic(prec) if isinstance(c, AlgebraicNumber) else c


# -- logarithm and exponential ------------------------------------------------------

def group_log(x: GroupPoint, prec: int = DEFAULT_PRECISION) -> list[PAdicNumber]:
    """log_G(x) in Lie(G) (x) Q_p, standard coordinates."""
    if not x.in_finite_type:
        raise DomainError("group_log needs every multiplicative coordinate to be a unit")
    out = []
    for i, c in enumerate(x.coords):
        v = _padic_coord(c, prec)
        if x.group.is_multiplicative(i):
            out.append(iwasawa_log(v, prec=prec))
        elif v.is_exact_zero:
            out.append(v)
        else:
            out.append(v.with_prec(prec) if v.prec > prec else v)
    return out


def group_exp(group: SplitGroup, u: Sequence[PAdicNumber]) -> GroupPoint:
    """exp_G(u) for |u_i|_p < r_p; the inverse of group_log on that disk."""
    if len(u) != group.dim:
        raise ValueError("dimension mismatch")
    r = Prime(u[0].prime).r_p
    for i, ui in enumerate(u):
        if not ui.norm() < r:
            raise DomainError(f"coordinate {i} has |u|_p = {ui.norm()}, outside the disk of radius r_p")
    return GroupPoint(group, [padic_exp(ui) if group.is_multiplicative(i) else ui for i, ui in enumerate(u)])


@dataclass(frozen=True)
class TorsionVerdict:
    is_torsion: bool
    order: Optional[int] = None

    def __bool__(self):
        return self.is_torsion


def _padic_root_order(x: PAdicNumber) -> Optional[int]:
    """Order of x as a root of unity in Q_p, decided to the precision of x."""
    p = x.prime
    if x.is_zero or x.valuation != 0:
        return None
    zeta = x.teichmuller()
    if not (x - zeta).is_zero:
        return None
    m = 2 if p == 2 else p - 1
    for k in sorted(d for d in range(1, m + 1) if m % d == 0):
        if (x ** k - 1).is_zero:
            return k
    return None


def is_torsion(x: GroupPoint) -> TorsionVerdict:
    """Exact for algebraic points; to the stated precision for p-adic ones."""
    for c in x.additive:
        if not c.is_zero:
            return TorsionVerdict(False)
    orders = []
    for c in x.multiplicative:
        k = c.torsion_order() if isinstance(c, AlgebraicNumber) else _padic_root_order(c)
        if k is None:
            return TorsionVerdict(False)
        orders.append(k)
    order = reduce(lambda a, b: a * b // math.gcd(a, b), orders, 1)
    if x.is_algebraic:
        assert x ** order == x.group.identity(x.prime)
    return TorsionVerdict(True, order)


# -- homomorphisms ------------------------------------------------------------------

@dataclass(frozen=True)
class Homomorphism:
    """Block-diagonal homomorphism G -> G'.

    ``matrix`` is dim G' x dim G.  The additive block acts linearly, the
    multiplicative block as the monomial map t -> (prod_j t_j^{m_ij})_i.
    """

    source: SplitGroup
    target: SplitGroup
    matrix: tuple

    def __init__(self, source: SplitGroup, target: SplitGroup, matrix: Sequence[Sequence]):
        M = tuple(tuple(row) for row in matrix)
        if len(M) != target.dim or any(len(row) != source.dim for row in M):
            raise ValueError("matrix shape does not match the groups")
        a, a2 = source.additive_rank, target.additive_rank
        for i, row in enumerate(M):
            for j, v in enumerate(row):
                if v and (i < a2) != (j < a):
                    raise BlockStructureError(f"entry ({i},{j}) mixes G_a and G_m")
                if v and i >= a2 and Fraction(v).denominator != 1:
                    raise ValueError("monomial exponents must be integers")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", M)


def hom_apply(phi: Homomorphism, x: GroupPoint) -> GroupPoint:
    if x.group != phi.source:
        raise ValueError("point is not on the source group")
    a, a2 = phi.source.additive_rank, phi.target.additive_rank
    out = []
    for i, row in enumerate(phi.matrix):
        if i < a2:
            acc = None
            for j in range(a):
                if row[j]:
                    term = x.coords[j] * Fraction(row[j])
                    acc = term if acc is None else acc + term
            out.append(acc if acc is not None else _zero_like(x))
        else:
            acc = None
            for j in range(a, phi.source.dim):
                if row[j]:
                    term = x.coords[j] ** int(row[j])
                    acc = term if acc is None else acc * term
            out.append(acc if acc is not None else _one_like(x))
    return GroupPoint(phi.target, out)


def _zero_like(x: GroupPoint):
    c = x.coords[0]
    return PAdicNumber.exact_zero(x.prime) if isinstance(c, PAdicNumber) else NumberField.rationals(x.prime)(0)


def _one_like(x: GroupPoint):
    c = x.coords[0]
    return PAdicNumber.one(x.prime) if isinstance(c, PAdicNumber) else NumberField.rationals(x.prime)(1)


def hom_tangent(phi: Homomorphism) -> list[list[Fraction]]:
    """Differential of phi at the identity, in standard coordinates."""
    return [[Fraction(v) for v in row] for row in phi.matrix]


def tangent_apply(M: Sequence[Sequence[Fraction]], u: Sequence[PAdicNumber]) -> list[PAdicNumber]:
    p = u[0].prime
    out = []
    for row in M:
        acc = PAdicNumber.exact_zero(p)
        for m, ui in zip(row, u):
            if m:
                acc = acc + ui.scale(m)
        out.append(acc)
    return out


# -- subgroups and Lie subspaces ----------------------------------------------------

@dataclass(frozen=True)
class SubgroupLattice:
    """Algebraic subgroup H of G_a^a x G_m^b.

    H = {x : c . x_add = 0 for c in additive_forms,
             (prod_i x_i^{m_i})^w = 1 for m in rows}.
    The identity component is the subtorus cut out by the saturation of
    ``rows``; ``torsion_order`` w allows the finitely many torsion
    translates needed to contain a given point.
    """

    group: SplitGroup
    rows: tuple = ()
    additive_forms: tuple = ()
    torsion_order: int = 1

    def __post_init__(self):
        b, a = self.group.multiplicative_rank, self.group.additive_rank
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        forms = tuple(tuple(Fraction(v) for v in r) for r in self.additive_forms)
        if any(len(r) != b for r in rows) or any(len(r) != a for r in forms):
            raise ValueError("lattice rows do not match the group")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "additive_forms", forms)

    @property
    def dim(self) -> int:
        r1 = rank([list(r) for r in self.rows]) if self.rows else 0
        r2 = rank([list(r) for r in self.additive_forms]) if self.additive_forms else 0
        return self.group.dim - r1 - r2

    def lie_basis(self) -> list[list[Fraction]]:
        """Rational basis of Lie(H) in standard coordinates."""
        a, n = self.group.additive_rank, self.group.dim
        constraints = [list(f) + [Fraction(0)] * (n - a) for f in self.additive_forms]
        constraints += [[Fraction(0)] * a + [Fraction(v) for v in r] for r in self.rows]
        constraints = [c for c in constraints if any(c)]
        return nullspace(constraints, n) if constraints else nullspace([], n)

    def annihilates(self, v: Sequence) -> bool:
        a = self.group.additive_rank
        ok = all(sum((Fraction(c) * x for c, x in zip(f, v[:a])), Fraction(0)) == 0 for f in self.additive_forms)
        return ok and all(sum((m * x for m, x in zip(r, v[a:])), 0) == 0 for r in self.rows)


def character_value(x: GroupPoint, m: Sequence[int]):
    acc = None
    for c, e in zip(x.multiplicative, m):
        if e:
            term = c ** int(e)
            acc = term if acc is None else acc * term
    return acc if acc is not None else _one_like(x)


def subgroup_membership(x: GroupPoint, H: SubgroupLattice) -> bool:
    """Exact test x in H for an algebraic point."""
    if not x.is_algebraic:
        raise TypeError("exact membership needs algebraic coordinates")
    if x.group != H.group:
        return False
    for f in H.additive_forms:
        s = None
        for c, xi in zip(f, x.additive):
            if c:
                s = xi * c if s is None else s + xi * c
        if s is not None and not s.is_zero:
            return False
    for m in H.rows:
        if not (character_value(x, m) ** H.torsion_order == 1):
            return False
    return True


class LieSubspace:
    """A subspace of Lie(G) = K^n given by independent basis rows.

    Entries are rationals or elements of one number field K.
    """

    def __init__(self, rows: Sequence[Sequence], ambient_dim: Optional[int] = None, prime: Optional[int] = None):
        rows = [list(r) for r in rows]
        if ambient_dim is None:
            if not rows:
                raise ValueError("ambient dimension required for the zero subspace")
            ambient_dim = len(rows[0])
        self.ambient_dim = ambient_dim
        fields = {x.field for r in rows for x in r if isinstance(x, AlgebraicNumber) and not x.is_rational}
        if len(fields) > 1:
            raise ValueError("entries from several number fields")
        self.field: Optional[NumberField] = fields.pop() if fields else None
        norm = []
        for r in rows:
            if len(r) != ambient_dim:
                raise ValueError("row length differs from the ambient dimension")
            norm.append([_normalize_entry(x, self.field) for x in r])
        if rank(norm) != len(norm):
            raise ValueError("basis rows are linearly dependent")
        self.rows = norm
        self.prime = prime if prime is not None else (self.field.prime if self.field else None)

    @classmethod
    def full(cls, n: int) -> "LieSubspace":
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], n)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def is_rational(self) -> bool:
        return self.field is None

    def coordinate_matrix(self) -> list[list[Fraction]]:
        """Rows expanded over Q: each row splits into degree-many rational rows
        (one per power-basis coordinate)."""
        if self.field is None:
            return [list(r) for r in self.rows]
        d = self.field.degree
        out = []
        for r in self.rows:
            coords = [x.coordinates() if isinstance(x, AlgebraicNumber) else [x] + [Fraction(0)] * (d - 1)
                      for x in r]
            for k in range(d):
                out.append([c[k] for c in coords])
        return out

    def contains(self, v: Sequence) -> bool:
        """Exact membership of a vector with rational or K entries."""
        vv = [_normalize_entry(x, self.field) for x in v]
        return rank(self.rows + [vv]) == self.dim

    def contains_padic(self, u: Sequence[PAdicNumber], prec: int) -> bool:
        """Whether u lies in V (x) Q_p, to the precision of u.

        Decided by reducing u against a p-adic echelon form of the basis.
        """
        if self.dim == 0:
            return all(x.is_zero for x in u)
        p = u[0].prime
        R, piv = rref(self.rows)
        resid = list(u)
        for row, c in zip(R, piv):
            coef = resid[c]
            if coef.is_zero:
                continue
            for j in range(self.ambient_dim):
                e = row[j]
                if e == 0:
                    continue
                ep = e.padic(prec) if isinstance(e, AlgebraicNumber) else PAdicNumber.from_rational(e, p, prec)
                resid[j] = resid[j] - coef * ep
        return all(x.is_zero for x in resid)

    def height_record(self) -> HeightValue:
        """b = max h(x_ij) over the basis entries."""
        from .algebraic import weil_height
        best = HeightValue.exact_zero()
        for r in self.rows:
            for x in r:
                h = weil_height(x) if isinstance(x, AlgebraicNumber) else _rational_height(x)
                if h.hi > best.hi:
                    best = h
        return best

    def integral_rows(self) -> list[list]:
        """Basis rows scaled so that every entry is an algebraic integer."""
        out = []
        for r in self.rows:
            den = 1
            for x in r:
                if isinstance(x, AlgebraicNumber):
                    lead = x.minpoly()[-1]
                    den = den * lead // math.gcd(den, lead)
                else:
                    den = den * x.denominator // math.gcd(den, x.denominator)
            out.append([x * den for x in r])
        return out

    def __repr__(self):
        return f"LieSubspace(dim={self.dim}, n={self.ambient_dim}, rows={self.rows})"


def _normalize_entry(x, K: Optional[NumberField]):
    if isinstance(x, AlgebraicNumber):
        if x.is_rational:
            return x.as_rational()
        return K.coerce(x)
    return Fraction(x)


def _rational_height(r: Fraction) -> HeightValue:
    r = Fraction(r)
    if r == 0:
        return HeightValue.exact_zero()
    return log_enclosure(max(abs(r.numerator), r.denominator))


# -- multivariate polynomials -------------------------------------------------------

class MPoly:
    """Sparse polynomial in T_1..T_n: {exponent tuple: coefficient}.

    Coefficients may be ints, Fractions or AlgebraicNumbers.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[dict] = None):
        self.nvars = nvars
        self.terms = {k: v for k, v in (terms or {}).items() if not (v == 0)}

    @classmethod
    def constant(cls, n: int, c) -> "MPoly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, n: int, i: int) -> "MPoly":
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __add__(self, other: "MPoly") -> "MPoly":
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t[k] + v if k in t else v
        return MPoly(self.nvars, t)

    def __neg__(self):
        return MPoly(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "MPoly":
        if not isinstance(other, MPoly):
            return MPoly(self.nvars, {k: v * other for k, v in self.terms.items()})
        t: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                prod = v1 * v2
                t[k] = t[k] + prod if k in t else prod
        return MPoly(self.nvars, t)

    __rmul__ = __mul__

    def diff(self, i: int) -> "MPoly":
        t = {}
        for k, v in self.terms.items():
            if k[i]:
                e = list(k)
                e[i] -= 1
                t[tuple(e)] = v * k[i]
        return MPoly(self.nvars, t)

    def __call__(self, point: Sequence):
        acc = None
        for k, v in sorted(self.terms.items()):
            term = v
            for x, e in zip(point, k):
                if e:
                    term = term * (x ** e)
            acc = term if acc is None else acc + term
        return acc if acc is not None else 0

    def coefficients(self) -> list:
        return [self.terms[k] for k in sorted(self.terms)]

    def __eq__(self, other):
        return isinstance(other, MPoly) and self.nvars == other.nvars and (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            mono = "*".join(f"T{i + 1}^{e}" if e > 1 else f"T{i + 1}" for i, e in enumerate(k) if e)
            parts.append(f"({self.terms[k]})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


# -- derivation calculus ------------------------------------------------------------

@dataclass(frozen=True)
class DerivationData:
    """The polynomials P_{i,L(j)} with L(j) xi_i = P_{i,L(j)}(xi) and the
    constants attached to them.  Real constants are certified enclosures."""

    group: SplitGroup
    L: tuple
    polys: tuple  # polys[j][i] = P_{i,L(j)}
    C1: int
    C2: HeightValue
    delta: int
    e_L: int
    log_delta: HeightValue
    log_C1: HeightValue
    omega: HeightValue
    prime: int

    def P(self, i: int, j: int) -> MPoly:
        return self.polys[j][i]


def derivation_data(G: SplitGroup, L: Optional[Sequence[Sequence]] = None, prime: int = 2) -> DerivationData:
    """Derivation polynomials for the basis L(j) = sum_i L[j][i] D_i of
    invariant derivations (D_i = d/dx_i on G_a, t_i d/dt_i on G_m)."""
    n = G.dim
    if L is None:
        L = [[int(i == j) for j in range(n)] for i in range(n)]
    Lf = [[Fraction(v) for v in row] for row in L]
    if len(Lf) != n or any(len(r) != n for r in Lf) or rank(Lf) != n:
        raise ValueError("L must be an invertible n x n matrix")
    polys = []
    for j in range(n):
        row = []
        for i in range(n):
            c = Lf[j][i]
            if G.is_multiplicative(i):
                row.append(MPoly.var(n, i) * c + MPoly.constant(n, c))
            else:
                row.append(MPoly.constant(n, c))
        polys.append(tuple(row))
    nonzero = [P for row in polys for P in row if not P.is_zero()]
    C1 = max((P.degree for P in nonzero), default=0)
    C2 = HeightValue.exact_zero()
    for P in nonzero:
        h = poly_height(P.coefficients())
        if h.hi > C2.hi:
            C2 = h
    delta = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for r in Lf for v in r), 1)
    e_L = int(valuation(delta, prime))
    log_delta = log_enclosure(delta)
    log_C1 = log_enclosure(C1) if C1 > 0 else HeightValue.exact_zero()
    omega = (C2 + log_delta + log_C1).scale(max(1, e_L))
    return DerivationData(G, tuple(tuple(r) for r in Lf), tuple(polys), C1, C2, delta, e_L,
                          log_delta, log_C1, omega, int(prime))


def apply_derivation(P: MPoly, j: int, data: DerivationData) -> MPoly:
    """L(j) applied to P(xi): sum_i dP/dT_i * P_{i,L(j)}."""
    out = MPoly(P.nvars)
    for i in range(P.nvars):
        dP = P.diff(i)
        if not dP.is_zero():
            out = out + dP * data.polys[j][i]
    return out


def coordinate_smallness_check(G: SplitGroup, points: Iterable[Sequence[PAdicNumber]],
                               data: Optional[DerivationData] = None) -> bool:
    """|xi_i(Exp(z))|_p < 1 for z in the ball of radius |delta_L|_p r_p.

    Exp is taken in the basis L: z maps to sum_j z_j L(j) in standard
    coordinates before exponentiating.
    """
    ok = True
    for z in points:
        p = z[0].prime
        if data is None:
            data = derivation_data(G, prime=p)
        radius = PNorm(p, -data.e_L) * Prime(p).r_p
        for i, zi in enumerate(z):
            if not zi.norm() < radius:
                raise DomainError(f"coordinate {i} lies outside the ball of radius {radius}")
        u = [PAdicNumber.exact_zero(p)] * G.dim
        for j, zj in enumerate(z):
            for i in range(G.dim):
                if data.L[j][i]:
                    u[i] = u[i] + zj.scale(data.L[j][i])
        for i, ui in enumerate(u):
            f = (padic_exp(ui) - 1) if G.is_multiplicative(i) else ui
            if not f.norm() < PNorm.one(p):
                ok = False
    return ok
