import random
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from padic_asg.algebraic import AlgebraicNumber, NumberField
from padic_asg.groups import GroupPoint, LieSubspace, SplitGroup
from padic_asg.siegel_lattice import (NOT_FOUND, SUBGROUP, TORSION, DependentRowsError, HypothesisError,
                                      PrecisionGuardError, asg_find_subgroup, detect_log_relations,
                                      is_lll_reduced, lll_reduce, siegel_solve)

from _oracles import shortest_kernel_vector_bruteforce


def R(r, p):
    return AlgebraicNumber.rational(r, p)


def _matmul(U, B):
    return [[sum(U[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(U))]


def _l2(v):
    return sum(x * x for x in v)


def test_lll_identity_and_small_example():
    I3 = [[int(i == j) for j in range(3)] for i in range(3)]
    assert lll_reduce(I3).basis == I3
    res = lll_reduce([[1, 0], [4, 1]])
    assert _l2(res.basis[0]) <= min(_l2([1, 0]), _l2([4, 1]))
    # shortest nonzero vector of this lattice (= Z^2) by exhaustion
    shortest = min(_l2([a + 4 * b, b]) for a in range(-5, 6) for b in range(-5, 6) if (a, b) != (0, 0))
    assert _l2(res.basis[0]) == shortest


def test_lll_dependent_rows():
    with pytest.raises(DependentRowsError):
        lll_reduce([[1, 2], [2, 4]])


def _scrambled_identity(rng, n, steps=30):
    B = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-3, 3)
        B[i] = [a + c * b for a, b in zip(B[i], B[j])]
    return B


def test_lll_recovers_scrambled_identity():
    rng = random.Random(5)
    for _ in range(10):
        B = _scrambled_identity(rng, 5)
        res = lll_reduce(B)
        # Z^5 has minimum 1 with exactly 10 minimal vectors; the reduced basis must consist of them
        assert sorted(_l2(v) for v in res.basis) == [1] * 5


@settings(max_examples=40)
@given(st.integers(0, 10_000), st.integers(2, 4))
def test_lll_preserves_lattice(seed, n):
    rng = random.Random(seed)
    while True:
        B = [[rng.randint(-20, 20) for _ in range(n)] for _ in range(n)]
        if round(np.linalg.det(np.array(B, dtype=float))) != 0:
            break
    res = lll_reduce(B)
    assert abs(round(np.linalg.det(np.array(res.transform, dtype=float)))) == 1
    assert _matmul(res.transform, B) == res.basis
    assert is_lll_reduced(res.basis)


def test_siegel_examples():
    assert siegel_solve([[1, 1]]).x == [1, -1]
    s = siegel_solve([[1, 2, 3]])
    assert s.x == [1, 1, -1] and s.within_bound
    assert shortest_kernel_vector_bruteforce([[1, 2, 3]], 2) == max(abs(v) for v in s.x)


def test_siegel_rejects_bad_shapes():
    with pytest.raises(ValueError):
        siegel_solve([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        siegel_solve([[0, 0, 0]])


@settings(max_examples=60)
@given(st.lists(st.integers(-3, 3), min_size=8, max_size=8))
def test_siegel_matches_bruteforce_minimum(entries):
    A = [entries[:4], entries[4:]]
    if not any(entries):
        return
    s = siegel_solve(A)
    assert all(sum(a * x for a, x in zip(r, s.x)) == 0 for r in A)
    assert s.within_bound
    best = max(abs(v) for v in s.x)
    assert shortest_kernel_vector_bruteforce(A, best) == best


def test_relation_examples():
    s = detect_log_relations([R(6, 5), R(216, 5)])
    assert [c.exponents for c in s.certificates] == [(3, -1)]
    assert s.certificates[0].torsion_order == 1
    assert detect_log_relations([R(6, 5), R(26, 5)], M=10).certificates == []
    cert = detect_log_relations([R(-1, 3)]).certificates[0]
    assert cert.torsion_order == 2 and cert.powered_exponents == (2,)
    alphas = [R(2, 7), R(5, 7), R(Fraction(-32, 125), 7)]
    cert = detect_log_relations(alphas).certificates[0]
    assert cert.exponents == (5, -3, -1) and cert.torsion_order == 2
    assert cert.verify(alphas)


def test_relation_errors():
    with pytest.raises(ValueError):
        detect_log_relations([R(5, 5), R(6, 5)])
    with pytest.raises(PrecisionGuardError):
        detect_log_relations([R(6, 5), R(216, 5)], N=10)


def test_no_relation_up_to_ten_in_exact_arithmetic():
    # (6, 26) at p = 5: no exponent vector with entries <= 10 gives a root of unity
    for a, b in product(range(-10, 11), repeat=2):
        if (a, b) == (0, 0):
            continue
        v = Fraction(6) ** a * Fraction(26) ** b
        assert v not in (1, -1)


def test_quadratic_field_relation():
    K = NumberField([-2, 0, 1], 7, 3)
    r2 = K.gen()
    u = r2 + 1   # unit of norm -1
    alphas = [u, u ** 4 * (-1)]
    s = detect_log_relations(alphas)
    assert len(s.certificates) == 1
    c = s.certificates[0]
    assert c.verify(alphas) and c.exponents == (4, -1) and c.torsion_order == 2


def test_subgroup_examples():
    G = SplitGroup.torus(2)
    res = asg_find_subgroup(G, GroupPoint(G, [R(6, 5), R(216, 5)]), LieSubspace([[1, 3]], 2))
    assert res.kind == SUBGROUP
    assert [list(r) for r in res.lattice.rows] == [[3, -1]]
    assert res.membership and res.lie_in_V
    assert LieSubspace([[1, 3]], 2).contains(res.lie_basis[0])
    res = asg_find_subgroup(G, GroupPoint(G, [R(-1, 5), R(1, 5)]), LieSubspace([[1, 0]], 2))
    assert res.kind == TORSION and res.torsion_order == 2
    res = asg_find_subgroup(G, GroupPoint(G, [R(6, 5), R(26, 5)]), LieSubspace([[1, 0], [0, 1]], 2))
    assert res.kind == SUBGROUP and res.lattice.dim == 2


def test_subgroup_hypothesis_violation():
    G = SplitGroup.torus(2)
    with pytest.raises(HypothesisError):
        asg_find_subgroup(G, GroupPoint(G, [R(6, 5), R(216, 5)]), LieSubspace([[1, 2]], 2))


def test_subgroup_not_found_when_search_too_small():
    # 6^11 = c: at M = 1 the relation (11, -1) lies beyond the candidate filter
    G = SplitGroup.torus(2)
    gamma = GroupPoint(G, [R(6, 5), R(6 ** 11, 5)])
    res = asg_find_subgroup(G, gamma, LieSubspace([[1, 11]], 2), M=1)
    assert res.kind == NOT_FOUND
    assert res.lie_in_V is False and res.membership
    res = asg_find_subgroup(G, gamma, LieSubspace([[1, 11]], 2), M=11)
    assert res.kind == SUBGROUP and [list(r) for r in res.lattice.rows] == [[11, -1]]
