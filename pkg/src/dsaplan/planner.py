"""Public planning entry point: prelude, bootstrap and the box/unbox/squeeze loop."""
from __future__ import annotations

import logging
import math
import multiprocessing as mp
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .boxing import box_all, calibrate_epsilon, ensure_ratio_condition
from .heuristics import SortStrategy, first_fit, igc, order_jobs, slff
from .model import Job, Placement, align_up, validate_jobs
from .sweep import Classification, profile
from .unboxing import squeeze, unbox_all

log = logging.getLogger(__name__)


@dataclass
class PlanConfig:
    max_iterations: int = 100
    frag_target: float = 0
    start_address: int = 0
    seed: Optional[int] = None
    parallelism: int = 1

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be at least 1")
        if self.start_address < 0:
            raise ValueError("start_address must be non-negative")


@dataclass
class PlanResult:
    placement: Placement
    fragmentation: int
    iterations_used: int
    bootstrap_makespan: int
    max_load: int = 0
    per_iteration_makespans: list = field(default_factory=list)
    epsilon: Optional[float] = None
    dummy_added: bool = False


def _aligned(jobs, offsets, start_address) -> bool:
    return all(align_up(offsets[j.id], j.alignment, start_address) == offsets[j.id] for j in jobs)


def _elementary(jobs, prof, start_address, rng) -> Placement:
    if prof.classification is Classification.NoOverlaps:
        offsets = {j.id: 0 for j in jobs}
    else:
        offsets = {}
        for row in igc(jobs, rng):
            for j in row.members:
                offsets[j.id] = row.index * prof.h_min
    if _aligned(jobs, offsets, start_address):
        return Placement.from_offsets(jobs, offsets, start_address)
    order = order_jobs(jobs, SortStrategy.ByOffset, rng, offsets)
    return first_fit(order, prof.interference, start_address)


def run_iteration(jobs, boxed_input, eps, interference, start_address, cap, seed):
    """One box, unbox, squeeze pass. Returns a Placement or None if over ``cap``."""
    rnd = random.Random(seed)
    res = box_all(boxed_input, eps, rnd)
    sparse = unbox_all(res.boxes, 0, rnd)
    return squeeze(jobs, sparse, interference, start_address, cap, rnd)


# Worker-side state for parallel iterations; set once per process.
_shared: dict = {}


def _init_worker(jobs, boxed_input, eps, interference, start_address, record):
    _shared.update(jobs=jobs, boxed=boxed_input, eps=eps, graph=interference,
                   start=start_address, record=record)


def _worker(seed):
    s = _shared
    record = s["record"]
    cap = record.value - 1
    pl = run_iteration(s["jobs"], s["boxed"], s["eps"], s["graph"], s["start"], cap, seed)
    if pl is None:
        return None
    with record.get_lock():
        if pl.makespan < record.value:
            record.value = pl.makespan
    return pl.makespan, pl.offsets


def plan(jobs, config: Optional[PlanConfig] = None) -> PlanResult:
    """Find a placement for ``jobs``; never worse than the bootstrap heuristic."""
    cfg = config or PlanConfig()
    jobs = validate_jobs(jobs)
    rnd = random.Random(cfg.seed)
    prof = profile(jobs, rnd)
    L = prof.max_load
    S = cfg.start_address

    if prof.classification is not Classification.General:
        pl = _elementary(jobs, prof, S, rnd)
        return PlanResult(pl, pl.makespan - L, 0, pl.makespan, L)

    # The bootstrap draws from its own stream so that slff(jobs, rng=seed)
    # reproduces it exactly.
    boot_rng = random.Random(cfg.seed) if cfg.seed is not None else rnd
    best = slff(jobs, prof.interference, S, boot_rng)
    boot = best.makespan
    result = PlanResult(best, boot - L, 0, boot, L)
    if boot - L <= cfg.frag_target:
        return result

    boxed, dummy = ensure_ratio_condition(jobs, prof)
    eps, r_star = calibrate_epsilon(boxed)
    result.epsilon = eps
    result.dummy_added = dummy is not None
    log.debug("epsilon=%.4f r*=%.4f dummy=%s", eps, r_star, dummy is not None)
    seeds = [rnd.getrandbits(64) for _ in range(cfg.max_iterations)]

    if cfg.parallelism == 1:
        for seed in seeds:
            pl = run_iteration(jobs, boxed, eps, prof.interference, S, best.makespan - 1, seed)
            result.iterations_used += 1
            result.per_iteration_makespans.append(None if pl is None else pl.makespan)
            if pl is not None and pl.makespan < best.makespan:
                best = pl
            if best.makespan - L <= cfg.frag_target:
                break
    else:
        best = _plan_parallel(jobs, boxed, eps, prof, S, best, seeds, L, cfg, result)

    result.placement = best
    result.fragmentation = best.makespan - L
    return result


def _plan_parallel(jobs, boxed, eps, prof, S, best, seeds, L, cfg, result):
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    record = ctx.Value("q", best.makespan)
    with ProcessPoolExecutor(cfg.parallelism, mp_context=ctx, initializer=_init_worker,
                             initargs=(jobs, boxed, eps, prof.interference, S, record)) as pool:
        futures = [pool.submit(_worker, s) for s in seeds]
        for fut in futures:
            got = fut.result()
            result.iterations_used += 1
            result.per_iteration_makespans.append(None if got is None else got[0])
            if got is not None and got[0] < best.makespan:
                best = Placement(got[1], got[0], S)
            if best.makespan - L <= cfg.frag_target:
                for f in futures:
                    f.cancel()
                break
    return best


def hardness(jobs) -> int:
    """Fragmentation left by the bootstrap heuristic; 0 for elementary inputs."""
    jobs = list(jobs)
    prof = profile(jobs, 0)
    if prof.classification is not Classification.General:
        return 0
    return slff(jobs, prof.interference, 0, random.Random(0)).makespan - prof.max_load
