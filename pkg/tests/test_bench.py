from dsaplan.bench import core_latency, run_benchmark
from dsaplan.generate import disjoint, general
from dsaplan.planner import PlanConfig


def test_repeats_give_rows():
    rows = run_benchmark([("g", general(80, 1))], PlanConfig(max_iterations=2, seed=3), repeats=10)
    assert len(rows) == 10 and [r.run for r in rows] == list(range(10))
    assert all(r.micros > 0 for r in rows)


def test_elementary_rows():
    rows = run_benchmark([("d", disjoint(40, 2))], PlanConfig(seed=1), repeats=3)
    assert all(r.F == 0 and r.iterations == 0 for r in rows)


def test_tiny_timeout_fails():
    rows = run_benchmark([("big", general(3000, 1))], PlanConfig(seed=1), timeout=0.001)
    assert rows[0].failed


def test_core_latency():
    micros, makespan = core_latency(general(500, 3), 1)
    assert micros > 0 and makespan > 0
