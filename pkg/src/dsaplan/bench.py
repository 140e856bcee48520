"""Benchmark harness: timed plan() runs with an optional wall-clock timeout."""
from __future__ import annotations

import csv
import multiprocessing as mp
import os
import random
import time
from dataclasses import dataclass, replace
from typing import Optional

from .boxing import calibrate_epsilon, ensure_ratio_condition
from .io import parse_instance
from .heuristics import slff
from .planner import PlanConfig, plan, run_iteration
from .sweep import Classification, profile

COLUMNS = ("benchmark", "run", "makespan", "F", "micros", "iterations")
FAILED = "Failed"


@dataclass
class BenchRow:
    benchmark: str
    run: int
    makespan: object
    F: object
    micros: object
    iterations: object

    @property
    def failed(self) -> bool:
        return self.F == FAILED

    def as_dict(self):
        return {c: getattr(self, c) for c in COLUMNS}


def _timed_plan(jobs, cfg):
    t0 = time.perf_counter_ns()
    res = plan(jobs, cfg)
    micros = (time.perf_counter_ns() - t0) // 1000
    return res.placement.makespan, res.fragmentation, micros, res.iterations_used


def _child(conn, jobs, cfg):
    try:
        conn.send(("ok", _timed_plan(jobs, cfg)))
    except Exception as exc:  # reported back as a failed row
        conn.send(("error", repr(exc)))
    finally:
        conn.close()


def _run_once(jobs, cfg, timeout):
    if timeout is None:
        return _timed_plan(jobs, cfg)
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    recv, send = ctx.Pipe(duplex=False)
    proc = ctx.Process(target=_child, args=(send, jobs, cfg), daemon=True)
    proc.start()
    send.close()
    got = recv.recv() if recv.poll(timeout) else None
    if got is None:
        proc.terminate()
    proc.join()
    if got is None or got[0] != "ok":
        return None
    return got[1]


def run_benchmark(instances, config: Optional[PlanConfig] = None, repeats: int = 1,
                  timeout: Optional[float] = None) -> list[BenchRow]:
    """Run ``plan`` ``repeats`` times per instance; timing excludes file I/O.

    ``instances`` holds paths or ``(name, jobs)`` pairs. Each repeat gets a
    fresh seed (derived from ``config.seed`` when it is set). Timeouts and
    crashes become Failed rows.
    """
    cfg = config or PlanConfig()
    seeder = random.Random(cfg.seed)
    rows = []
    for inst in instances:
        if isinstance(inst, tuple):
            name, jobs = inst
            start = cfg.start_address
        else:
            name = os.path.basename(str(inst))
            jobs, _, start = parse_instance(inst)
            start = cfg.start_address or start
        for run in range(repeats):
            rc = replace(cfg, seed=seeder.getrandbits(32), start_address=start)
            out = _run_once(jobs, rc, timeout)
            if out is None:
                rows.append(BenchRow(name, run, FAILED, FAILED, FAILED, FAILED))
            else:
                rows.append(BenchRow(name, run, *out))
    return rows


def core_latency(jobs, seed=None) -> tuple[int, int]:
    """Microseconds for the prelude plus one uncapped box, unbox, squeeze pass.

    The prelude is profiling, padding, epsilon calibration and the
    bootstrap heuristic. Returns ``(micros, makespan)``; elementary inputs
    stop after profiling.
    """
    rnd = random.Random(seed)
    t0 = time.perf_counter_ns()
    prof = profile(jobs, rnd)
    if prof.classification is not Classification.General:
        return (time.perf_counter_ns() - t0) // 1000, prof.max_load
    slff(jobs, prof.interference, 0, rnd)
    boxed, _ = ensure_ratio_condition(jobs, prof)
    eps, _ = calibrate_epsilon(boxed)
    pl = run_iteration(jobs, boxed, eps, prof.interference, 0, None, rnd.getrandbits(64))
    return (time.perf_counter_ns() - t0) // 1000, pl.makespan


def write_rows(rows, dst):
    with open(dst, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow(r.as_dict())
