"""The index tau(G, V), semistability over rational quotients, and
semistable reduction, for split tori.

Quotients of G_m^n up to isogeny correspond to rational subspaces W of
Q^n (the Lie algebra of the kernel), and isogenies do not change tau, so
everything here is exact linear algebra over Q or over the field of V.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Optional, Sequence

from .groups import LieSubspace, SplitGroup
from .linalg import independent_rows, integer_kernel, mat_mul, nullspace, primitive, rank, rref, saturate

NOT_SEMISTABLE = "NotSemistable"
CERTIFIED = "SemistableCertified"
UP_TO_BOUND = "SemistableUpToBound"


class RationalityError(ValueError):
    pass


def tau(G: SplitGroup, V: LieSubspace) -> Fraction:
    if G.dim == 0:
        return Fraction(1)
    return Fraction(V.dim, G.dim)


def _require_torus(G: SplitGroup):
    if not G.is_torus:
        raise NotImplementedError("semistability is implemented for split tori only")


def _rational_rows(W: Sequence[Sequence]) -> list[list[Fraction]]:
    out = []
    for r in W:
        row = []
        for x in r:
            if hasattr(x, "is_rational"):
                if not x.is_rational:
                    raise RationalityError("kernel subspace must be defined over Q")
                x = x.as_rational()
            row.append(Fraction(x))
        out.append(row)
    return out


def intersection_dim(V: LieSubspace, W: Sequence[Sequence[Fraction]]) -> int:
    """dim (V cap W) over the field of V, W rational."""
    W = [list(r) for r in W]
    if not W or V.dim == 0:
        return 0
    dim_w = rank(W)
    return V.dim + dim_w - rank(V.rows + W)


def quotient_tau(G: SplitGroup, V: LieSubspace, W: Sequence[Sequence]) -> Fraction:
    """tau of (G/H, pi_* V) where Lie(H) = W (rational rows)."""
    _require_torus(G)
    W = _rational_rows(W)
    dim_w = rank(W) if W else 0
    if dim_w < 1 or dim_w > G.dim:
        raise ValueError("kernel must have dimension between 1 and dim G")
    n_q = G.dim - dim_w
    if n_q == 0:
        return Fraction(1)
    return Fraction(V.dim - intersection_dim(V, W), n_q)


# -- rational structure of V -------------------------------------------------------

def rational_hull(V: LieSubspace) -> list[list[Fraction]]:
    """Basis of the smallest rational subspace containing V."""
    M = V.coordinate_matrix()
    R, _ = rref(M) if M else ([], [])
    return [[Fraction(x) for x in r] for r in R]


def rational_part(V: LieSubspace) -> list[list[Fraction]]:
    """Basis of V cap Q^n."""
    if V.is_rational:
        R, _ = rref(V.rows)
        return [list(r) for r in R]
    if V.dim == 0:
        return []
    ann = nullspace(V.rows, V.ambient_dim)  # K-vectors a with V a = 0 ... as rows of the annihilator
    # x in Q^n lies in V iff a . x = 0 for every annihilator a; expand over the power basis
    d = V.field.degree
    eqs = []
    for a in ann:
        coords = [x.coordinates() if hasattr(x, "coordinates") else [Fraction(x)] + [Fraction(0)] * (d - 1)
                  for x in a]
        for k in range(d):
            eqs.append([c[k] for c in coords])
    eqs = [e for e in eqs if any(e)]
    if not eqs:
        return [[Fraction(int(i == j)) for j in range(V.ambient_dim)] for i in range(V.ambient_dim)]
    basis = nullspace(eqs, V.ambient_dim)
    R, _ = rref(basis) if basis else ([], [])
    return [list(r) for r in R]


def _dot(c, v):
    return sum((Fraction(a) * Fraction(b) for a, b in zip(c, v)), Fraction(0))


# -- candidate family --------------------------------------------------------------

def primitive_vectors(n: int, B: int):
    """Primitive integer vectors with entries in [-B, B] and positive first
    nonzero entry, in lexicographic order."""
    from math import gcd
    for v in product(range(-B, B + 1), repeat=n):
        lead = next((x for x in v if x), 0)
        if lead <= 0:
            continue
        g = 0
        for x in v:
            g = gcd(g, x)
        if g == 1:
            yield list(v)


@dataclass(frozen=True)
class Candidate:
    label: str
    rows: tuple  # rational basis of W
    tau: Fraction


@dataclass
class SemistabilityReport:
    verdict: str
    tau: Fraction
    witness: Optional[Candidate] = None
    reason: str = ""
    bound: int = 0
    candidates: list = field(default_factory=list)

    @property
    def is_semistable(self) -> bool:
        return self.verdict != NOT_SEMISTABLE

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "tau": str(self.tau),
            "reason": self.reason,
            "bound": self.bound,
            "witness": None if self.witness is None else {
                "label": self.witness.label,
                "kernel": [[str(x) for x in r] for r in self.witness.rows],
                "quotient_tau": str(self.witness.tau),
            },
            "searched": len(self.candidates),
        }


def _candidate_family(G: SplitGroup, V: LieSubspace, B: int):
    """Sigma_B as (label, rows, quotient tau), structured candidates first."""
    n, k = G.dim, V.dim
    hull = rational_hull(V)
    rpart = rational_part(V)
    hull_rank = len(hull)
    seen = set()

    def emit(label, rows, t):
        key = tuple(tuple(r) for r in rref(rows)[0])
        if key in seen:
            return None
        seen.add(key)
        return Candidate(label, tuple(tuple(r) for r in saturate(rows, n)), t)

    structured = []
    if V.is_rational and k:
        structured.append(("V", [list(r) for r in V.rows]))
    if hull and hull_rank:
        structured.append(("rational hull of V", hull))
    if rpart:
        structured.append(("rational part of V", rpart))
    for size in range(1, n + 1):
        for S in combinations(range(n), size):
            structured.append((f"coordinates {list(S)}", [[Fraction(int(i == j)) for j in range(n)] for i in S]))
    for label, rows in structured:
        c = emit(label, rows, quotient_tau(G, V, rows))
        if c:
            yield c

    # lines: x meets V iff x lies in the rational part
    for x in primitive_vectors(n, B):
        inside = bool(rpart) and rank(rpart + [x]) == len(rpart)
        t = Fraction(1) if n == 1 else Fraction(k - int(inside), n - 1)
        c = emit(f"line {x}", [x], t)
        if c:
            yield c
    # hyperplanes ker c: c is orthogonal to V iff it is orthogonal to the hull
    if n >= 3:
        for cvec in primitive_vectors(n, B):
            W = [[Fraction(v) for v in w] for w in nullspace([cvec], n)]
            perp = all(_dot(cvec, h) == 0 for h in hull)
            t = Fraction(k - (k if perp else k - 1), 1)
            c = emit(f"kernel of {cvec}", W, t)
            if c:
                yield c


def _certificate(G: SplitGroup, V: LieSubspace) -> Optional[str]:
    n, k = G.dim, V.dim
    if k == n:
        return "V = Lie(G)"
    if k == 0:
        return "dim V = 0"
    if k == 1 and not V.is_rational and len(rational_hull(V)) == n:
        return "irrational line whose rational hull is Lie(G)" if n > 2 else "n <= 2 and V an irrational line"
    if k == n - 1 and not rational_part(V):
        return "hyperplane containing no rational vector"
    return None


def is_semistable(G: SplitGroup, V: LieSubspace, B: int = 5) -> SemistabilityReport:
    """Search Sigma_B for a quotient lowering tau."""
    _require_torus(G)
    if B < 1:
        raise ValueError("search bound must be >= 1")
    t0 = tau(G, V)
    best: Optional[Candidate] = None
    seen = []
    for c in _candidate_family(G, V, B):
        seen.append(c)
        if c.tau < t0 and (best is None or c.tau < best.tau):
            best = c
    if best is not None:
        return SemistabilityReport(NOT_SEMISTABLE, t0, best, "quotient lowers tau", B, seen)
    reason = _certificate(G, V)
    if reason:
        return SemistabilityReport(CERTIFIED, t0, None, reason, B, seen)
    return SemistabilityReport(UP_TO_BOUND, t0, None, f"no witness with entries <= {B}", B, seen)


@dataclass
class Reduction:
    kernel: list          # integer basis of the total kernel W* (rows)
    projection: list      # integer matrix pi with ker pi = W*
    quotient: SplitGroup
    image: LieSubspace    # pi_* V
    tau: Fraction
    steps: list           # reports of each round
    final: SemistabilityReport


def project(V: LieSubspace, pi: Sequence[Sequence[int]]) -> LieSubspace:
    """pi_* V as a subspace of K^{rows(pi)}."""
    m = len(pi)
    if V.dim == 0:
        return LieSubspace([], m)
    imgs = [[sum((x * c for x, c in zip(v, prow)), Fraction(0)) for prow in pi] for v in V.rows]
    keep = independent_rows(imgs)
    return LieSubspace([imgs[i] for i in keep], m)


def semistable_reduction(G: SplitGroup, V: LieSubspace, B: int = 5) -> Reduction:
    """Quotient minimizing tau over Sigma_B, iterated until the result re-tests
    as not NotSemistable."""
    report = is_semistable(G, V, B)
    if report.is_semistable:
        raise ValueError("pair is already semistable up to the bound")
    n = G.dim
    pi_total = [[int(i == j) for j in range(n)] for i in range(n)]
    cur_G, cur_V = G, V
    steps = [report]
    while not report.is_semistable:
        W = [primitive(r) for r in report.witness.rows]
        pi = integer_kernel(W, cur_G.dim)  # rows c with c . w = 0 for w in W
        pi_total = mat_mul(pi, pi_total) if pi else []
        if not pi:
            cur_G, cur_V = None, None
            break
        cur_V = project(cur_V, pi)
        cur_G = SplitGroup.torus(len(pi))
        report = is_semistable(cur_G, cur_V, B)
        steps.append(report)
    kernel = integer_kernel(pi_total, n) if pi_total else [[int(i == j) for j in range(n)] for i in range(n)]
    if cur_G is None:
        # quotient of dimension 0: tau = 1 by convention
        final = SemistabilityReport(CERTIFIED, Fraction(1), None, "quotient of dimension 0", B, [])
        return Reduction(kernel, [], None, None, Fraction(1), steps, final)
    return Reduction(kernel, pi_total, cur_G, cur_V, tau(cur_G, cur_V), steps, report)
