import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dsaplan.model import Job
from dsaplan.sweep import (
    Classification, EmptyInput, EventKind, build_events, count_conflicts, events_in_order,
    max_live_count, pop_all, profile,
)
from oracles import brute_conflicts, brute_max_load

jobs_strategy = st.lists(
    st.tuples(st.integers(1, 50), st.integers(0, 30), st.integers(1, 10)),
    min_size=1, max_size=40,
).map(lambda rows: [Job(i, sz, s, s + d) for i, (sz, s, d) in enumerate(rows)])


def test_dealloc_before_alloc_at_same_time():
    a, b = Job(0, 1, 0, 5), Job(1, 1, 5, 9)
    kinds = [(e.time, e.kind) for e in pop_all(build_events([b, a], 3))]
    assert kinds == [(0, EventKind.Alloc), (5, EventKind.Dealloc), (5, EventKind.Alloc),
                     (9, EventKind.Dealloc)]


def test_heap_and_sort_agree():
    jobs = [Job(i, 1, i % 4, i % 4 + 2) for i in range(12)]
    assert [e[:2] for e in pop_all(build_events(jobs, 1))] == \
        [e[:2] for e in events_in_order(jobs, 1)]


def test_touching_jobs_are_no_overlaps():
    p = profile([Job(0, 3, 0, 2), Job(1, 5, 2, 4)])
    assert p.classification is Classification.NoOverlaps
    assert p.max_load == 5
    assert p.conflicts == 0


def test_uniform_and_general():
    assert profile([Job(0, 3, 0, 3), Job(1, 3, 1, 4)]).classification is Classification.UniformSize
    p = profile([Job(0, 3, 0, 3), Job(1, 4, 1, 4)])
    assert p.classification is Classification.General
    assert p.max_load == 7 and p.r == Fraction(4, 3)
    assert p.interference == {0: [1], 1: [0]}
    assert p.horizon == (0, 4)


def test_empty_input():
    with pytest.raises(EmptyInput):
        profile([])


@settings(max_examples=200)
@given(jobs_strategy)
def test_profile_matches_brute_force(jobs):
    p = profile(jobs, random.Random(0))
    assert p.max_load == brute_max_load(jobs)
    assert p.conflicts == brute_conflicts(jobs) == count_conflicts(jobs)
    for j in jobs:
        expect = {o.id for o in jobs if o is not j and o.start < j.end and j.start < o.end}
        assert set(p.interference[j.id]) == expect


@given(jobs_strategy)
def test_max_live_count(jobs):
    brute = max(sum(1 for j in jobs if j.start <= t < j.end) for t in range(0, 41))
    assert max_live_count(jobs) == brute
