from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from _oracles import semistable_oracle
from padic_asg.algebraic import NumberField
from padic_asg.groups import LieSubspace, SplitGroup
from padic_asg.semistability import (CERTIFIED, NOT_SEMISTABLE, UP_TO_BOUND, RationalityError, is_semistable,
                                     quotient_tau, semistable_reduction, tau)

F = Fraction
GM2, GM3 = SplitGroup.torus(2), SplitGroup.torus(3)
K = NumberField([-2, 0, 1], 7, 3)
R2 = K.gen()


def line(*v):
    return LieSubspace([[F(x) for x in v]], len(v))


def test_tau_examples():
    assert tau(GM2, line(1, 1)) == F(1, 2)
    assert tau(GM3, LieSubspace([[F(1), F(0), F(0)], [F(0), F(1), F(0)]], 3)) == F(2, 3)
    assert quotient_tau(GM2, line(1, 1), [[1, 0], [0, 1]]) == 1


def test_quotient_tau_examples():
    assert quotient_tau(GM2, line(1, 1), [[1, 1]]) == 0
    V = LieSubspace([[K(1), R2]], 2)
    for W in ([[1, 0]], [[0, 1]], [[1, 1]], [[3, -5]]):
        assert quotient_tau(GM2, V, W) == 1
    with pytest.raises(RationalityError):
        quotient_tau(GM2, line(1, 1), [[K(1), R2]])
    with pytest.raises(ValueError):
        quotient_tau(GM2, line(1, 1), [[0, 0]])


def test_is_semistable_examples():
    rep = is_semistable(GM2, line(1, 1))
    assert rep.verdict == NOT_SEMISTABLE and rep.witness.tau == 0 and rep.witness.label == "V"
    rep = is_semistable(GM2, LieSubspace([[K(1), R2]], 2))
    assert rep.verdict == CERTIFIED
    assert is_semistable(GM3, LieSubspace.full(3)).verdict == CERTIFIED
    assert is_semistable(GM3, LieSubspace([], 3)).verdict == CERTIFIED
    with pytest.raises(ValueError):
        is_semistable(GM2, line(1, 1), 0)


def test_irrational_plane_with_rational_line_is_not_semistable():
    V = LieSubspace([[K(1), 3 * R2, K(0)], [K(0), K(1), R2]], 3)
    rep = is_semistable(GM3, V)
    assert rep.verdict == NOT_SEMISTABLE
    assert rep.witness.rows == ((1, 0, -6),) and rep.witness.tau == F(1, 2)


def test_up_to_bound_verdict():
    # semistable (no rational line inside V, rational hull is everything) but no exact rule covers n = 4, k = 2
    G4 = SplitGroup.torus(4)
    V = LieSubspace([[K(1), R2, K(0), K(0)], [K(0), K(0), K(1), R2 + 1]], 4)
    rep = is_semistable(G4, V, 2)
    assert rep.verdict == UP_TO_BOUND and rep.bound == 2


def test_reduction_examples():
    r = semistable_reduction(GM2, line(1, 1))
    assert r.kernel == [[1, 1]] and r.tau == 0 and r.final.verdict != NOT_SEMISTABLE
    r = semistable_reduction(GM2, line(1, 0))
    assert r.kernel == [[1, 0]] and r.tau == 0
    plane = LieSubspace([[F(1), F(1), F(0)], [F(0), F(1), F(1)]], 3)
    r = semistable_reduction(GM3, plane)
    assert r.tau == 0 and r.quotient.dim == 1
    with pytest.raises(ValueError):
        semistable_reduction(GM2, LieSubspace([[K(1), R2]], 2))


rows_strategy = st.integers(2, 3).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n),
                                             min_size=0, max_size=n)))


@settings(max_examples=30)
@given(rows_strategy)
def test_oracle_agreement(data):
    n, rows = data
    from padic_asg.linalg import independent_rows
    rows = [r for r in rows if any(r)]
    rows = [rows[i] for i in independent_rows(rows)] if rows else []
    V = LieSubspace([[F(x) for x in r] for r in rows], n)
    G = SplitGroup.torus(n)
    rep = is_semistable(G, V, 5)
    ok, best = semistable_oracle(n, rows, 5)
    assert rep.is_semistable == ok
    if not ok:
        assert rep.witness.tau <= best
    if 0 < len(rows) < n:
        assert rep.verdict == NOT_SEMISTABLE and quotient_tau(G, V, rows) == 0


@settings(max_examples=15)
@given(rows_strategy)
def test_reduction_retests_semistable(data):
    n, rows = data
    from padic_asg.linalg import independent_rows
    rows = [r for r in rows if any(r)]
    rows = [rows[i] for i in independent_rows(rows)] if rows else []
    V = LieSubspace([[F(x) for x in r] for r in rows], n)
    G = SplitGroup.torus(n)
    if is_semistable(G, V, 3).is_semistable:
        return
    red = semistable_reduction(G, V, 3)
    assert red.final.verdict != NOT_SEMISTABLE
    assert red.tau <= tau(G, V)
