"""Sort-then-fit placement heuristics and greedy interval graph coloring."""
from __future__ import annotations

import enum
import heapq
import random
from dataclasses import dataclass, field
from typing import Optional

from .model import Job, Placement, align_up
from .sweep import EventKind, _rng, events_in_order, profile


class SortStrategy(enum.Enum):
    SizeFirst = "SizeFirst"
    RandomShuffle = "RandomShuffle"
    SLFF = "SLFF"
    ByOffset = "ByOffset"


@dataclass
class Row:
    index: int
    members: list = field(default_factory=list)


def igc(jobs, rng=None) -> list[Row]:
    """Greedy interval graph coloring; each allocation takes the lowest free row."""
    jobs = list(jobs)
    if len(jobs) == 1:
        return [Row(0, jobs)]
    rows: list[Row] = []
    assigned = {}
    free: list[int] = []
    for ev in events_in_order(jobs, rng):
        j = ev.job
        if ev.kind is EventKind.Alloc:
            if free:
                k = heapq.heappop(free)
            else:
                k = len(rows)
                rows.append(Row(k))
            rows[k].members.append(j)
            assigned[id(j)] = k
        else:
            heapq.heappush(free, assigned.pop(id(j)))
    return rows


def order_jobs(jobs, strategy: SortStrategy, rng=None, offsets: Optional[dict] = None) -> list[Job]:
    """Traversal order for the fitting step; ties are broken at random."""
    r = _rng(rng)
    jobs = list(jobs)
    if strategy is SortStrategy.RandomShuffle:
        r.shuffle(jobs)
        return jobs
    keys = {id(j): r.random() for j in jobs}
    if strategy is SortStrategy.SizeFirst:
        jobs.sort(key=lambda j: (-j.size, keys[id(j)]))
    elif strategy is SortStrategy.SLFF:
        # Longer-lived jobs first among equal sizes.
        jobs.sort(key=lambda j: (-j.size, -j.lifespan, keys[id(j)]))
    elif strategy is SortStrategy.ByOffset:
        if offsets is None:
            raise ValueError("ByOffset ordering needs offsets")
        jobs.sort(key=lambda j: (offsets[j.id], keys[id(j)]))
    return jobs


def first_fit(jobs, interference: dict, start_address: int = 0,
              cap: Optional[int] = None) -> Optional[Placement]:
    """Place ``jobs`` in the given order at the lowest feasible offset.

    Only already-placed neighbours in the interference graph are scanned,
    in ascending offset order. Returns None as soon as some job would end
    above ``cap`` (the caller's current record).
    """
    placed: dict = {}
    ends: dict = {}
    makespan = 0
    for j in jobs:
        size = j.size
        align = j.alignment
        busy = []
        for other in interference.get(j.id, ()):
            o = placed.get(other)
            if o is not None:
                busy.append((o, ends[other]))
        busy.sort()
        run = align_up(0, align, start_address) if align and align > 1 else 0
        for lo, hi in busy:
            if lo >= run + size:
                break
            if hi > run:
                run = hi
                if align and align > 1:
                    run = align_up(run, align, start_address)
        top = run + size
        if cap is not None and top > cap:
            return None
        placed[j.id] = run
        ends[j.id] = top
        if top > makespan:
            makespan = top
    return Placement(placed, makespan, start_address)


def best_fit(jobs, interference: dict, start_address: int = 0) -> Placement:
    """Place each job into the tightest feasible gap among its placed neighbours."""
    placed: dict = {}
    ends: dict = {}
    makespan = 0
    for j in jobs:
        size = j.size
        align = j.alignment
        busy = sorted((placed[o], ends[o]) for o in interference.get(j.id, ()) if o in placed)
        best = None
        best_waste = None
        cursor = 0
        for lo, hi in busy:
            if lo > cursor:
                cand = align_up(cursor, align, start_address)
                if cand + size <= lo:
                    waste = lo - cursor - size
                    if best_waste is None or waste < best_waste:
                        best, best_waste = cand, waste
            cursor = max(cursor, hi)
        if best is None:
            best = align_up(cursor, align, start_address)
        placed[j.id] = best
        ends[j.id] = best + size
        makespan = max(makespan, best + size)
    return Placement(placed, makespan, start_address)


def _graph(jobs, interference):
    return profile(jobs).interference if interference is None else interference


def slff(jobs, interference: Optional[dict] = None, start_address: int = 0, rng=None) -> Placement:
    """Sort by size, break ties by lifespan, first-fit ("big rocks first")."""
    g = _graph(jobs, interference)
    return first_fit(order_jobs(jobs, SortStrategy.SLFF, rng), g, start_address)


def sizefirst(jobs, interference=None, start_address=0, rng=None) -> Placement:
    g = _graph(jobs, interference)
    return first_fit(order_jobs(jobs, SortStrategy.SizeFirst, rng), g, start_address)


def randomfirst(jobs, interference=None, start_address=0, rng=None) -> Placement:
    g = _graph(jobs, interference)
    return first_fit(order_jobs(jobs, SortStrategy.RandomShuffle, rng), g, start_address)


def sizebest(jobs, interference=None, start_address=0, rng=None) -> Placement:
    g = _graph(jobs, interference)
    return best_fit(order_jobs(jobs, SortStrategy.SizeFirst, rng), g, start_address)


def randombest(jobs, interference=None, start_address=0, rng=None) -> Placement:
    g = _graph(jobs, interference)
    return best_fit(order_jobs(jobs, SortStrategy.RandomShuffle, rng), g, start_address)


HEURISTICS = {
    "sizefirst": sizefirst,
    "randomfirst": randomfirst,
    "sizebest": sizebest,
    "randombest": randombest,
    "slff": slff,
}
