"""Event traversal and the single-pass instance profile."""
from __future__ import annotations

import enum
import heapq
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple, Optional

from .model import Job


class EventKind(enum.IntEnum):
    # Deallocations sort before allocations at equal timestamps.
    Dealloc = 0
    Alloc = 1


class Event(NamedTuple):
    time: int
    kind: EventKind
    # Random tie-break among events with equal (time, kind); equal events have
    # no meaningful order and we do not pretend otherwise.
    tie: float
    job: Job


def _rng(rng) -> random.Random:
    if rng is None:
        return random.Random()
    if isinstance(rng, random.Random):
        return rng
    return random.Random(rng)


def build_events(jobs, rng=None) -> list[Event]:
    """Heap of 2N events; pop with ``heapq.heappop``."""
    r = _rng(rng).random
    evts = []
    for j in jobs:
        evts.append(Event(j.start, EventKind.Alloc, r(), j))
        evts.append(Event(j.end, EventKind.Dealloc, r(), j))
    heapq.heapify(evts)
    return evts


def pop_all(evts: list[Event]) -> Iterator[Event]:
    while evts:
        yield heapq.heappop(evts)


def events_in_order(jobs, rng=None) -> list[Event]:
    """Same order as draining :func:`build_events`, but via one sort."""
    r = _rng(rng).random
    evts = []
    for j in jobs:
        evts.append(Event(j.start, EventKind.Alloc, r(), j))
        evts.append(Event(j.end, EventKind.Dealloc, r(), j))
    evts.sort()
    return evts


class Classification(enum.Enum):
    NoOverlaps = "NoOverlaps"
    UniformSize = "UniformSize"
    General = "General"


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class InstanceProfile:
    max_load: int
    h_min: int
    h_max: int
    classification: Classification
    interference: dict
    horizon: tuple

    @property
    def r(self) -> Fraction:
        return Fraction(self.h_max, self.h_min)

    @property
    def conflicts(self) -> int:
        return sum(len(v) for v in self.interference.values()) // 2


def profile(jobs, rng=None, with_graph: bool = True) -> InstanceProfile:
    """Max load, height extrema, elementary case and interference graph."""
    jobs = list(jobs)
    if not jobs:
        raise EmptyInput("cannot profile an empty instance")
    graph = {j.id: [] for j in jobs} if with_graph else {}
    live: dict = {}
    load = max_load = 0
    max_live = 0
    h_min = h_max = jobs[0].size
    t0 = jobs[0].start
    t1 = jobs[0].end
    for ev in events_in_order(jobs, rng):
        j = ev.job
        if ev.kind is EventKind.Alloc:
            size = j.size
            load += size
            if load > max_load:
                max_load = load
            if size < h_min:
                h_min = size
            elif size > h_max:
                h_max = size
            if j.start < t0:
                t0 = j.start
            if with_graph and live:
                mine = graph[j.id]
                jid = j.id
                for other in live:
                    mine.append(other)
                    graph[other].append(jid)
            live[j.id] = None
            if len(live) > max_live:
                max_live = len(live)
        else:
            load -= j.size
            del live[j.id]
            if j.end > t1:
                t1 = j.end
    if max_live <= 1:
        cls = Classification.NoOverlaps
    elif h_min == h_max:
        cls = Classification.UniformSize
    else:
        cls = Classification.General
    return InstanceProfile(max_load, h_min, h_max, cls, graph, (t0, t1))


def max_load(jobs) -> int:
    load = best = 0
    for ev in events_in_order(jobs, 0):
        if ev.kind is EventKind.Alloc:
            load += ev.job.size
            best = max(best, load)
        else:
            load -= ev.job.size
    return best


def max_live_count(jobs) -> int:
    live = best = 0
    for ev in events_in_order(jobs, 0):
        if ev.kind is EventKind.Alloc:
            live += 1
            best = max(best, live)
        else:
            live -= 1
    return best


def count_conflicts(jobs) -> int:
    """Number of unordered overlapping pairs."""
    live = total = 0
    for ev in events_in_order(jobs, 0):
        if ev.kind is EventKind.Alloc:
            total += live
            live += 1
        else:
            live -= 1
    return total
