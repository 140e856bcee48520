"""Turn a box hierarchy into sparse offsets, then squeeze them with first-fit."""
from __future__ import annotations

from collections import defaultdict
from typing import Optional

from .heuristics import SortStrategy, first_fit, igc, order_jobs
from .model import DUMMY_ID, Placement
from .sweep import _rng


def unbox_all(jobs, w: int = 0, rng=None) -> dict:
    """Sparse, collision-free offsets for every leaf below ``jobs``.

    The padding job is skipped at every level as if it were not there.
    """
    out: dict = {}
    _unbox(list(jobs), w, _rng(rng), out)
    return out


def _visible(jobs):
    return [j for j in jobs if j.id != DUMMY_ID]


def _pairwise_disjoint(jobs) -> bool:
    edge = None
    for j in sorted(jobs, key=lambda j: j.start):
        if edge is not None and j.start < edge:
            return False
        edge = j.end if edge is None else max(edge, j.end)
    return True


def _unbox(jobs, w, rnd, out) -> int:
    """Place ``jobs`` at watermark ``w``; return the highest address used."""
    jobs = _visible(jobs)
    if not jobs:
        return w
    if len({j.size for j in jobs}) == 1:
        return _same_sizes(jobs, w, rnd, out)
    if _pairwise_disjoint(jobs):
        return _row(jobs, w, rnd, out)
    parts = defaultdict(list)
    for j in jobs:
        parts[j.size].append(j)
    for size in sorted(parts, reverse=True):
        w = _same_sizes(parts[size], w, rnd, out)
    return w


def _row(members, w, rnd, out) -> int:
    top = w
    for m in members:
        if m.contents:
            top = max(top, _unbox(m.contents, w, rnd, out))
        else:
            out[m.id] = w
            top = max(top, w + m.size)
    return top


def _same_sizes(jobs, w, rnd, out) -> int:
    for row in igc(jobs, rnd):
        w = _row(row.members, w, rnd, out)
    return w


def place_same_sizes(jobs, w: int = 0, rng=None) -> dict:
    """IGC rows stacked from ``w``; each row starts at the previous row's tip."""
    out: dict = {}
    _same_sizes(_visible(jobs), w, _rng(rng), out)
    return out


def squeeze(jobs, offsets: dict, interference: dict, start_address: int = 0,
            cap: Optional[int] = None, rng=None) -> Optional[Placement]:
    """First-fit in ascending sparse offset; None once ``cap`` is exceeded."""
    jobs = _visible(jobs)
    order = order_jobs(jobs, SortStrategy.ByOffset, rng, offsets)
    return first_fit(order, interference, start_address, cap)
