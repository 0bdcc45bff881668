"""Integer lattices: LLL, small solutions of linear systems, and the
torus case of the analytic subgroup theorem via relations among p-adic
logarithms.

p-adic numerics only propose candidate relations; every certificate is
re-verified by exact arithmetic in the number field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional, Sequence

from sympy import totient

from .algebraic import AlgebraicNumber, NumberField, weil_height
from .analytic import iwasawa_log
from .groups import GroupPoint, LieSubspace, SplitGroup, SubgroupLattice, group_log, is_torsion
from .linalg import independent_rows, integer_kernel, primitive, saturate


class DependentRowsError(ValueError):
    pass


class PrecisionGuardError(ValueError):
    """The requested p-adic precision is below the relation-detection guard."""


class HypothesisError(ValueError):
    """log(gamma) does not lie in V (x) Q_p at the working precision."""


# -- LLL ----------------------------------------------------------------------------

@dataclass
class LLLResult:
    basis: list        # reduced rows
    transform: list    # unimodular U with basis = U * input
    delta: Fraction
    swaps: int


def _dot(u, v) -> int:
    return sum(a * b for a, b in zip(u, v))


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> LLLResult:
    """Integral LLL (all Gram-Schmidt data kept as integers).

    Rows must be linearly independent.  The transform is recorded so the
    caller can check that the lattice is unchanged.
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta <= 1:
        raise ValueError("delta must lie in (1/4, 1]")
    a, bden = delta.numerator, delta.denominator
    b = [list(map(int, r)) for r in basis]
    n = len(b)
    if n == 0:
        return LLLResult([], [], delta, 0)
    H = [[int(i == j) for j in range(n)] for i in range(n)]
    # 1-based bookkeeping: d[0] = 1, lam[k][j] for j < k
    d = [1] + [0] * n
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    swaps = 0

    def bb(i):
        return b[i - 1]

    d[1] = _dot(bb(1), bb(1))
    if d[1] == 0:
        raise DependentRowsError("zero basis vector")
    k, kmax = 2, 1

    def redi(k, l):
        if 2 * abs(lam[k][l]) > d[l]:
            q = (2 * lam[k][l] + d[l]) // (2 * d[l])
            H[k - 1] = [x - q * y for x, y in zip(H[k - 1], H[l - 1])]
            b[k - 1] = [x - q * y for x, y in zip(b[k - 1], b[l - 1])]
            lam[k][l] -= q * d[l]
            for i in range(1, l):
                lam[k][i] -= q * lam[l][i]

    def swapi(k):
        H[k - 1], H[k - 2] = H[k - 2], H[k - 1]
        b[k - 1], b[k - 2] = b[k - 2], b[k - 1]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        B = (d[k - 2] * d[k] + lm * lm) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - lm * t) // d[k - 1]
            lam[i][k - 1] = (B * t + lm * lam[i][k]) // d[k]
        d[k - 1] = B

    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = _dot(bb(k), bb(j))
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise DependentRowsError("basis rows are linearly dependent")
                    d[k] = u
        while True:
            redi(k, k - 1)
            if bden * d[k] * d[k - 2] < a * d[k - 1] ** 2 - bden * lam[k][k - 1] ** 2:
                swapi(k)
                swaps += 1
                k = max(2, k - 1)
            else:
                for l in range(k - 2, 0, -1):
                    redi(k, l)
                k += 1
                break
    return LLLResult(b, H, delta, swaps)


def gram_schmidt(basis: Sequence[Sequence[int]]):
    """Exact Gram-Schmidt: (squared norms B_i, coefficients mu[i][j])."""
    n = len(basis)
    bstar: list = []
    Bs: list = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        v = [Fraction(x) for x in basis[i]]
        for j in range(i):
            mu[i][j] = sum((Fraction(x) * y for x, y in zip(basis[i], bstar[j])), Fraction(0)) / Bs[j]
            v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
        bstar.append(v)
        Bs.append(sum((x * x for x in v), Fraction(0)))
    return Bs, mu


def is_lll_reduced(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> bool:
    Bs, mu = gram_schmidt(basis)
    n = len(basis)
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for k in range(1, n):
        if Bs[k] < (Fraction(delta) - mu[k][k - 1] ** 2) * Bs[k - 1]:
            return False
    return True


# -- short vectors in the sup norm --------------------------------------------------

def _inf(v) -> int:
    return max((abs(x) for x in v), default=0)


def _normalize_sign(v):
    lead = next((x for x in v if x), 0)
    return [-x for x in v] if lead < 0 else list(v)


@dataclass
class ShortVector:
    vector: list
    exhaustive: bool
    nodes: int


def shortest_inf_vector(basis: Sequence[Sequence[int]], node_cap: int = 200_000) -> ShortVector:
    """Nonzero lattice vector of least sup norm (ties: lexicographically
    smallest with positive leading entry), by Fincke-Pohst enumeration on
    the LLL-reduced basis with radius dim * best_inf^2."""
    red = lll_reduce(basis).basis
    k = len(red)
    dim = len(red[0])
    Bs, mu = gram_schmidt(red)
    best = min((_normalize_sign(v) for v in red), key=lambda v: (_inf(v), v))
    best_inf = _inf(best)
    nodes = 0
    exhaustive = True
    c = [0] * k

    def radius2():
        return Fraction(dim * best_inf * best_inf)

    def rec(j, partial: Fraction):
        nonlocal best, best_inf, nodes, exhaustive
        if nodes > node_cap:
            exhaustive = False
            return
        center = -sum((mu[i][j] * c[i] for i in range(j + 1, k)), Fraction(0))
        room = radius2() - partial
        if room < 0:
            return
        r2 = room / Bs[j]
        # integer candidates with (x - center)^2 <= r2
        span = math.isqrt(math.ceil(r2)) + 1
        lo, hi = math.floor(center) - span, math.ceil(center) + span
        for x in sorted(range(lo, hi + 1), key=lambda t: (abs(t - center), t)):
            diff = x - center
            if diff * diff > r2:
                continue
            nodes += 1
            c[j] = x
            new_partial = partial + diff * diff * Bs[j]
            if j == 0:
                if any(c):
                    v = [sum(c[i] * red[i][t] for i in range(k)) for t in range(dim)]
                    v = _normalize_sign(v)
                    key = (_inf(v), v)
                    if key < (best_inf, best):
                        best, best_inf = v, key[0]
            else:
                rec(j - 1, new_partial)
            if nodes > node_cap:
                exhaustive = False
                break
        c[j] = 0

    rec(k - 1, Fraction(0))
    return ShortVector(best, exhaustive, nodes)


# -- Siegel's lemma -----------------------------------------------------------------

@dataclass
class SiegelSolution:
    x: list
    height: float          # log ||x||_inf
    bound_exponent: Fraction  # m / (n - m)
    bound_base: int        # n * max |a_ij|
    within_bound: bool
    exhaustive: bool
    kernel_rank: int

    @property
    def bound(self) -> float:
        return float(self.bound_exponent) * math.log(self.bound_base)

    def as_dict(self) -> dict:
        return {"x": self.x, "log_sup_norm": self.height, "bound": self.bound,
                "bound_formula": f"({self.bound_exponent}) * log({self.bound_base})",
                "within_bound": self.within_bound, "exhaustive_search": self.exhaustive}


def siegel_solve(A: Sequence[Sequence[int]], node_cap: int = 200_000) -> SiegelSolution:
    """Nonzero integer x with A x = 0 and small sup norm.

    The implemented bound is log||x||_inf <= (m/(n-m)) log(n max|a_ij|),
    checked exactly as ||x||^(n-m) <= (n max|a|)^m.
    """
    A = [[int(v) for v in row] for row in A]
    m = len(A)
    n = len(A[0]) if A else 0
    if m >= n:
        raise ValueError("Siegel's lemma needs fewer equations than unknowns")
    amax = max((abs(v) for row in A for v in row), default=0)
    if amax == 0:
        raise ValueError("the zero system has no meaningful bound")
    rows = [A[i] for i in independent_rows(A)]
    K = integer_kernel(rows, n)
    sv = shortest_inf_vector(K, node_cap)
    x = sv.vector
    assert any(x) and all(_dot(row, x) == 0 for row in A)
    base = n * amax
    within = _inf(x) ** (n - m) <= base ** m
    return SiegelSolution(x, math.log(_inf(x)), Fraction(m, n - m), base, within, sv.exhaustive, len(K))


# -- relations among p-adic logarithms ----------------------------------------------

@dataclass(frozen=True)
class RelationCertificate:
    """prod alpha_i^{exponents_i} is a root of unity of order ``torsion_order``,
    so prod alpha_i^{powered_exponents_i} = 1 exactly."""

    exponents: tuple
    torsion_order: int
    powered_exponents: tuple
    transcript: str

    def verify(self, alphas: Sequence[AlgebraicNumber]) -> bool:
        """Independent exact re-check (no p-adic data involved)."""
        return _product(alphas, self.powered_exponents) == 1 and (
            _product(alphas, self.exponents).torsion_order() == self.torsion_order)

    def as_dict(self) -> dict:
        return {"exponents": list(self.exponents), "torsion_order": self.torsion_order,
                "powered_exponents": list(self.powered_exponents), "verification": self.transcript}


def _product(alphas, exps):
    acc = None
    for a, e in zip(alphas, exps):
        if e:
            t = a ** int(e)
            acc = t if acc is None else acc * t
    return acc if acc is not None else NumberField.rationals(alphas[0].prime)(1)


def common_field(alphas: Sequence[AlgebraicNumber]) -> NumberField:
    fields = {a.field for a in alphas if not a.is_rational}
    if len(fields) > 1:
        raise ValueError("inputs must lie in a single number field")
    return fields.pop() if fields else NumberField.rationals(alphas[0].prime)


@dataclass
class GuardRecord:
    precision: int
    degree: int
    cyclotomic_degree: int
    max_height: Fraction
    sup_bound: int
    formula: str


def precision_guard(alphas: Sequence[AlgebraicNumber], M: int) -> GuardRecord:
    """Digits N' after which every lattice vector of sup norm <= M_eff with
    sum m_i log alpha_i = 0 mod p^N' is a genuine relation.

    With beta = prod alpha_i^{m_i} = zeta * u (zeta the Teichmueller part),
    u lies in K(zeta) of degree <= d * phi(w), has height h(beta) and
    u = 1 mod p.  Liouville gives v(u - 1) <= D (h(beta) + log 2) / log p
    unless u = 1, and v(log u) = v(u - 1).  M_eff = M * 2^((n-1)/2) * sqrt(n)
    covers the LLL approximation factor so that planted relations of sup
    norm <= M are recovered.
    """
    p = alphas[0].prime
    n = len(alphas)
    K = common_field(alphas)
    d = K.degree
    w = 2 if p == 2 else p - 1
    phi = 1 if p == 2 else int(totient(w))
    H = max((weil_height(a).hi for a in alphas), default=Fraction(0))
    M_eff = math.ceil(M * math.sqrt(n * 2 ** (n - 1)))
    digits = d * phi * (M_eff * n * float(H) + math.log(2)) / math.log(p)
    N = math.ceil(digits) + 32
    formula = (f"N' = ceil(d*phi(w)*(M_eff*n*max h + log 2)/log p) + 32 with d={d}, phi(w)={phi}, "
               f"M_eff={M_eff}, n={n}, max h<={float(H):.6f}")
    return GuardRecord(N, d, phi, H, M_eff, formula)


def _verify_candidate(alphas, m) -> Optional[RelationCertificate]:
    beta = _product(alphas, m)
    order = beta.torsion_order()
    if order is None:
        return None
    powered = tuple(order * x for x in m)
    assert _product(alphas, powered) == 1
    text = f"prod alpha_i^{list(m)} has minimal polynomial {list(beta.minpoly())}, a root of unity of order {order}"
    return RelationCertificate(tuple(m), order, powered, text)


@dataclass
class RelationSearch:
    certificates: list
    guard: GuardRecord
    precision: int
    candidates: list
    rejected: list


def detect_log_relations(alphas: Sequence[AlgebraicNumber], M: int = 10, N: Optional[int] = None,
                         ) -> RelationSearch:
    """Integer relations sum m_i log_p(alpha_i) = 0 with exact certificates.

    Returns a basis of the full relation lattice {m : prod alpha^m is a root
    of unity} when the guard precision is met; each basis vector carries a
    certificate verified in the number field.
    """
    alphas = list(alphas)
    if not alphas:
        raise ValueError("no inputs")
    p = alphas[0].prime
    n = len(alphas)
    for a in alphas:
        if a.prime != p:
            raise ValueError("inputs embedded at different primes")
        if a.is_zero or a.valuation() != 0:
            raise ValueError(f"{a!r} is not a p-adic unit")
    guard = precision_guard(alphas, M)
    if N is None:
        N = guard.precision
    elif N < guard.precision:
        raise PrecisionGuardError(f"precision {N} is below the guard {guard.precision} ({guard.formula})")
    logs = [iwasawa_log(a.padic(N + 8), prec=N) for a in alphas]
    nonzero = [i for i, l in enumerate(logs) if not l.is_zero]
    candidates: list = []
    if not nonzero:
        candidates = [[int(i == j) for j in range(n)] for i in range(n)]
    else:
        v0 = min(int(logs[i].valuation) for i in nonzero)
        j = next(i for i in nonzero if logs[i].valuation == v0)
        Nw = N - v0
        mod = p ** Nw
        mu = [(l.lift() // p ** v0) % mod if not l.is_zero else 0 for l in logs]
        inv_j = pow(mu[j], -1, mod)
        basis = []
        for i in range(n):
            if i == j:
                continue
            row = [0] * n
            row[i] = 1
            row[j] = (-mu[i] * inv_j) % mod
            if row[j] > mod // 2:
                row[j] -= mod
            basis.append(row)
        last = [0] * n
        last[j] = mod
        basis.append(last)
        red = lll_reduce(basis).basis
        candidates = [_normalize_sign(v) for v in red if _inf(v) <= guard.sup_bound]
    verified, rejected = [], []
    for m in candidates:
        m = primitive(m)
        cert = _verify_candidate(alphas, m)
        (verified if cert else rejected).append(m)
    certificates = []
    if verified:
        sat = saturate(verified, n)
        sat = lll_reduce(sat).basis if sat else []
        for m in sorted((_normalize_sign(v) for v in sat), key=lambda v: (_inf(v), v)):
            cert = _verify_candidate(alphas, m)
            assert cert is not None, "saturated relation failed exact verification"
            certificates.append(cert)
    return RelationSearch(certificates, guard, N, candidates, rejected)


# -- the torus case of the subgroup theorem ------------------------------------------

TORSION = "Torsion"
SUBGROUP = "Subgroup"
NOT_FOUND = "NotFoundUpToBound"


@dataclass
class SubgroupResult:
    kind: str
    lattice: Optional[SubgroupLattice] = None
    certificates: list = field(default_factory=list)
    torsion_order: Optional[int] = None
    lie_basis: list = field(default_factory=list)
    membership: Optional[bool] = None
    lie_in_V: Optional[bool] = None
    note: str = ""

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "note": self.note}
        if self.kind == TORSION:
            out["torsion_order"] = self.torsion_order
        if self.lattice is not None:
            out["character_rows"] = [list(r) for r in self.lattice.rows]
            out["torsion_order"] = self.lattice.torsion_order
            out["dim_H"] = self.lattice.dim
            out["lie_H"] = [[str(x) for x in r] for r in self.lie_basis]
            out["gamma_in_H"] = self.membership
            out["lie_H_in_V"] = self.lie_in_V
            out["certificates"] = [c.as_dict() for c in self.certificates]
        return out


def asg_find_subgroup(G: SplitGroup, gamma: GroupPoint, V: LieSubspace, M: int = 10,
                      N: Optional[int] = None, hypothesis_precision: int = 64) -> SubgroupResult:
    """H with gamma in H and Lie(H) in V, for a torus G and algebraic gamma."""
    if not G.is_torus:
        raise NotImplementedError("only split tori are supported")
    if gamma.group != G or not gamma.is_algebraic:
        raise ValueError("gamma must be an algebraic point of G")
    tv = is_torsion(gamma)
    if tv:
        return SubgroupResult(TORSION, torsion_order=tv.order, note="gamma is a torsion point")
    u = group_log(gamma, hypothesis_precision)
    if not V.contains_padic(u, hypothesis_precision):
        raise HypothesisError(f"log(gamma) is not in V (x) Q_p at precision {hypothesis_precision}")
    search = detect_log_relations(list(gamma.multiplicative), M, N)
    rows = [c.exponents for c in search.certificates]
    w = reduce(lambda a, b: a * b // math.gcd(a, b), (c.torsion_order for c in search.certificates), 1)
    H = SubgroupLattice(G, tuple(tuple(r) for r in rows), (), w)
    lie = H.lie_basis()
    from .groups import subgroup_membership
    member = subgroup_membership(gamma, H)
    inside = all(V.contains(v) for v in lie)
    assert member, "gamma must satisfy its own certified relations"
    if inside:
        return SubgroupResult(SUBGROUP, H, search.certificates, lie_basis=lie, membership=member,
                              lie_in_V=True, note=f"relations certified up to sup norm {M}")
    return SubgroupResult(NOT_FOUND, H, search.certificates, lie_basis=lie, membership=member, lie_in_V=False,
                          note=f"relations up to sup norm {M} do not force Lie(H) into V")
