"""Random instance generators used by tests and the benchmark harness."""
from __future__ import annotations

import random

from .model import Job


def general(n: int, rng=None, horizon: int = None, max_life: int = 40,
            sizes=(1, 4096), alignments=None) -> list[Job]:
    """Mixed sizes and lifetimes; average concurrency stays near ``max_life/2``
    per unit of density so large ``n`` stays tractable."""
    r = rng if isinstance(rng, random.Random) else random.Random(rng)
    horizon = horizon or max(2, n)
    lo, hi = sizes
    jobs = []
    for i in range(n):
        s = r.randrange(horizon)
        e = s + r.randint(1, max_life)
        size = int(lo * (hi / lo) ** r.random()) if lo > 0 else r.randint(1, hi)
        a = r.choice(alignments) if alignments else None
        jobs.append(Job(i, max(1, size), s, e, alignment=a))
    return jobs


def disjoint(n: int, rng=None) -> list[Job]:
    """Jobs laid end to end in time (touching endpoints do not overlap)."""
    r = rng if isinstance(rng, random.Random) else random.Random(rng)
    jobs, t = [], r.randint(0, 5)
    for i in range(n):
        e = t + r.randint(1, 10)
        jobs.append(Job(i, r.randint(1, 1000), t, e))
        t = e + r.randint(0, 3)
    r.shuffle(jobs)
    return jobs


def uniform(n: int, rng=None, size: int = None) -> list[Job]:
    r = rng if isinstance(rng, random.Random) else random.Random(rng)
    size = size or r.randint(1, 512)
    horizon = max(2, n // 2)
    jobs = []
    for i in range(n):
        s = r.randrange(horizon)
        jobs.append(Job(i, size, s, s + r.randint(1, 30)))
    return jobs


def layered(n: int, rng=None, base: int = 64, menu=(1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64),
            skip_rate: float = 0.15, alignments=None) -> list[Job]:
    """Computation-graph-like trace.

    One operator per time step emits one to three buffers. Most die after
    a few steps; a fraction lives long (skip connections, saved
    activations). Sizes come from a small menu scaled by ``base``.
    """
    r = rng if isinstance(rng, random.Random) else random.Random(rng)
    jobs = []
    t = 0
    while len(jobs) < n:
        for _ in range(min(r.randint(1, 3), n - len(jobs))):
            if r.random() < skip_rate:
                life = r.randint(10, 120)
            else:
                life = r.randint(1, 6)
            size = base * r.choice(menu)
            a = r.choice(alignments) if alignments else None
            jobs.append(Job(len(jobs), size, t, t + life, alignment=a))
        t += 1
    return jobs
