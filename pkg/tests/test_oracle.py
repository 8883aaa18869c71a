from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from oracle_algebra.oracle import (
    NOT_YET,
    BudgetExhausted,
    Dovetailer,
    Found,
    MalformedJoin,
    OracleSet,
    OutOfBound,
    SearchTask,
    dovetail,
    join,
    split,
)


def finds_at(step, witness="w"):
    def body():
        for _ in range(step - 1):
            yield NOT_YET
        yield Found(witness)

    return SearchTask(body())


def never():
    def body():
        while True:
            yield NOT_YET

    return SearchTask(body())


@pytest.mark.parametrize(
    "D,members",
    [(set(), {1, 3}), ({0}, {0, 3}), ({0, 1}, {0, 2})],
)
def test_join_examples(D, members):
    assert join(OracleSet(2, D), 2).support == frozenset(members)


def test_split_examples():
    assert split(OracleSet(4, {1, 3})).support == frozenset()
    assert split(OracleSet(4, {0, 3})).support == frozenset({0})
    with pytest.raises(MalformedJoin):
        split(OracleSet(4, {0, 1}))
    with pytest.raises(MalformedJoin):
        split(OracleSet(3, {0}))


def test_oracle_bounds():
    with pytest.raises(OutOfBound):
        OracleSet(2, {2})
    X = OracleSet(4, {1})
    assert X.query(1) and not X.query(0)
    with pytest.raises(OutOfBound):
        X.query(4)


sets = st.integers(0, 10).flatmap(
    lambda n: st.builds(lambda s: OracleSet(n, s), st.frozensets(st.integers(0, n - 1)) if n else st.just(frozenset()))
)


@given(sets)
def test_split_inverts_join(D):
    Y = join(D, D.bound)
    assert split(Y) == D
    assert len(Y) == D.bound
    for n in range(D.bound):
        assert (2 * n in Y) != (2 * n + 1 in Y)


@given(sets)
def test_json_roundtrip(D):
    assert OracleSet.from_json(D.to_json()) == D


def test_dovetail_examples():
    assert dovetail([finds_at(3), never()], 100) == (0, "w")
    assert dovetail([never(), finds_at(5, "x")], 100) == (1, "x")
    with pytest.raises(BudgetExhausted):
        dovetail([never(), never()], 10)


@given(st.lists(st.one_of(st.none(), st.integers(1, 30)), min_size=1, max_size=6))
def test_dovetail_is_fair(schedule):
    """Round robin: task j finding at step s halts by global step s * n."""
    tasks = [never() if s is None else finds_at(s, j) for j, s in enumerate(schedule)]
    n = len(tasks)
    halting = [(s - 1) * n + j for j, s in enumerate(schedule) if s is not None]
    if not halting:
        with pytest.raises(BudgetExhausted):
            dovetail(tasks, 40 * n)
        return
    idx, w = dovetail(tasks, 40 * n)
    assert (schedule[idx] - 1) * n + idx == min(halting)
    assert w == idx


def test_dovetailer_reports_all_winners():
    d = Dovetailer([finds_at(2, "a"), never(), finds_at(1, "b")])
    assert list(d.run(50)) == [(2, "b"), (0, "a")]
