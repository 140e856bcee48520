"""Recursive boxing of jobs into same-height Matryoshka boxes.

The chain, bottom-up:

* :func:`box_live_group` boxes unit-height jobs that are all live at one
  coordinate, leaving the two outer strips unresolved.
* :func:`box_unit_class` boxes one rounded size class by recursively
  splitting time at critical coordinates.
* :func:`box_by_size_class` rounds heights to geometric classes and boxes
  every class independently.
* :func:`box_all` repeatedly boxes the smallest jobs until the height ratio
  is small, then boxes everything once more so the top level is uniform.

Critical coordinates are handled on a doubled integer grid inside
:func:`box_unit_class`, so "just after time s" is the exact integer 2s+1.
"""
from __future__ import annotations

import math
import random
from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .heuristics import igc
from .model import DUMMY_ID, InvariantViolation, Job, make_box
from .sweep import _rng

PHI = (math.sqrt(5) - 1) / 2
# The ratio threshold as an exact fraction: 2216.53.
RATIO_NUM, RATIO_DEN = 221653, 100
_FLOAT_SLACK = 1e-9


class ZeroUnitCount(InvariantViolation):
    """A size class does not fit even once into the box height."""


@dataclass
class BoxingConfig:
    epsilon: float
    height: int
    unit_count: int = 1
    bounding_interval: Optional[tuple] = None
    critical_points: tuple = ()


@dataclass
class BoxingStats:
    """Optional audit trail filled in while boxing."""
    strip_calls: list = field(default_factory=list)  # (unresolved, bound)
    rounds: list = field(default_factory=list)  # BoxingConfig per small-job round


@dataclass
class BoxingResult:
    boxes: list
    r_star: float
    mu_star: float
    height: int
    rounds: list


def epsilon_bounds(r: float) -> tuple[float, float]:
    """Legal range of the error parameter for height ratio ``r``."""
    lg = math.log2(r)
    return (lg ** 14 / r) ** (1 / 6), PHI * lg * lg


def ratio_ok(h_min: int, h_max: int) -> bool:
    return h_max * RATIO_DEN >= -(-RATIO_NUM * h_min // RATIO_DEN) * RATIO_DEN


def dummy_height(h_min: int) -> int:
    return -(-RATIO_NUM * h_min // RATIO_DEN)


def round_height(h: int, eps: float) -> int:
    """Round ``h`` up to floor((1+eps)^i), the smallest power reaching ``h``."""
    if h <= 1:
        return 1
    b = 1.0 + eps
    i = max(0, math.ceil(math.log(h) / math.log(b)))
    # Float log drift: fix i so that b^(i-1) < h <= b^i holds exactly.
    while b ** i < h:
        i += 1
    while i > 0 and b ** (i - 1) >= h:
        i -= 1
    return math.floor(b ** i)


# ---------------------------------------------------------------------------
# Strip boxing of jobs live at one coordinate


def box_live_group(jobs, unit_count: int, height: int, eps: float, rng=None,
                   stats: Optional[BoxingStats] = None) -> tuple[list, list]:
    """Box jobs that share a live coordinate; return (boxes, unresolved).

    The earliest-starting and then latest-ending ``unit_count*ceil(1/eps^2)``
    jobs stay unresolved. The rest is cut into alternating vertical and
    horizontal strips of ``unit_count*ceil(1/eps)`` jobs; vertical strips are
    boxed by decreasing end, horizontal strips by increasing start, in groups
    of ``unit_count``.
    """
    jobs = list(jobs)
    outer = unit_count * math.ceil(1 / (eps * eps))
    inner = unit_count * math.ceil(1 / eps)
    if stats is not None:
        stats.strip_calls.append((min(len(jobs), 2 * outer), 2 * outer))
    if len(jobs) <= 2 * outer:
        return [], jobs
    r = _rng(rng).random
    keys = {id(j): r() for j in jobs}
    by_start = sorted(jobs, key=lambda j: (j.start, keys[id(j)]))
    by_end = sorted(jobs, key=lambda j: (-j.end, keys[id(j)]))
    taken = set()
    cursors = [0, 0]

    def take(k, which):
        seq = by_start if which == 0 else by_end
        out = []
        i = cursors[which]
        while len(out) < k and i < len(seq):
            j = seq[i]
            i += 1
            if id(j) not in taken:
                taken.add(id(j))
                out.append(j)
        cursors[which] = i
        return out

    unresolved = take(outer, 0) + take(outer, 1)
    boxes = []
    remaining = len(jobs) - len(unresolved)
    vertical = True
    while remaining > 0:
        strip = take(inner, 0 if vertical else 1)
        remaining -= len(strip)
        if vertical:
            strip.sort(key=lambda j: (-j.end, keys[id(j)]))
        else:
            strip.sort(key=lambda j: (j.start, keys[id(j)]))
        for g in range(0, len(strip), unit_count):
            boxes.append(make_box(strip[g:g + unit_count], height))
        vertical = not vertical
    return boxes, unresolved


# ---------------------------------------------------------------------------
# One size class


def _descend(s2: int, e2: int, pts: list) -> int:
    """Index of the critical point a crossing job is assigned to.

    Mirrors the recursive split: test the ceil-middle point, then go left
    for jobs ending before it and right for jobs starting after it.
    """
    a, b = 0, len(pts) - 1
    while a <= b:
        n = b - a + 1
        mid = a + (n + 1) // 2 - 1
        t = pts[mid]
        if s2 < t < e2:
            return mid
        if e2 <= t:
            b = mid - 1
        else:
            a = mid + 1
    raise InvariantViolation("crossing job matches no critical point")


def box_unit_class(jobs, unit_count: int, height: int, eps: float,
                   interval: Optional[tuple] = None, points=(), rng=None,
                   stats: Optional[BoxingStats] = None) -> list:
    """Box a single rounded size class into boxes of ``height``.

    ``unit_count`` jobs of the class fit into one box. ``interval`` bounds
    every lifetime, ``points`` are the initial critical coordinates (time
    units; half-integers allowed). Whenever no critical point has a live
    job, the coordinate just after a randomly chosen job's allocation is
    injected.
    """
    jobs = list(jobs)
    if not jobs:
        return []
    if unit_count < 1:
        raise ZeroUnitCount(f"unit count {unit_count} for box height {height}")
    cls_height = max(j.size for j in jobs)
    if cls_height * unit_count > height:
        raise InvariantViolation(
            f"{unit_count} jobs of height {cls_height} overflow a box of {height}")
    rnd = _rng(rng)
    if interval is None:
        interval = (min(j.start for j in jobs), max(j.end for j in jobs))
    lo, hi = 2 * interval[0], 2 * interval[1]
    pts0 = sorted({int(round(2 * p)) for p in points if interval[0] < p < interval[1]})
    for j in jobs:
        if j.start < interval[0] or j.end > interval[1]:
            raise InvariantViolation(f"{j!r} escapes bounding interval {interval}")

    out = []
    stack = [(jobs, lo, hi, pts0)]
    while stack:
        xs, lo, hi, pts = stack.pop()
        if pts:
            crossing, segments = _split(xs, pts)
        else:
            crossing = None
        if not crossing:
            t = INJECT(xs, rnd)
            pts = sorted(set(pts) | {t})
            crossing, segments = _split(xs, pts)
        if len(pts) == 1:
            groups = {0: crossing}
        else:
            groups = defaultdict(list)
            for j in crossing:
                groups[_descend(2 * j.start, 2 * j.end, pts)].append(j)
        unresolved = []
        for k in sorted(groups):
            boxes, left = box_live_group(groups[k], unit_count, height, eps, rnd, stats)
            out.extend(boxes)
            unresolved.extend(left)
        if unresolved:
            rows = igc(unresolved, rnd)
            for g in range(0, len(rows), unit_count):
                members = [m for row in rows[g:g + unit_count] for m in row.members]
                out.append(make_box(members, height))
        bounds = [lo] + pts + [hi]
        for idx, seg in segments.items():
            stack.append((seg, bounds[idx], bounds[idx + 1], []))
    return out


def _inject_random(xs, rnd):
    return 2 * xs[rnd.randrange(len(xs))].start + 1


INJECT = _inject_random


def _split(xs, pts):
    crossing = []
    segments = defaultdict(list)
    if len(pts) == 1:
        t = pts[0]
        left, right = segments[0], segments[1]
        for j in xs:
            if 2 * j.end <= t:
                left.append(j)
            elif 2 * j.start >= t:
                right.append(j)
            else:
                crossing.append(j)
        return crossing, {k: v for k, v in segments.items() if v}
    for j in xs:
        s2 = 2 * j.start
        k = bisect_right(pts, s2)
        if k < len(pts) and pts[k] < 2 * j.end:
            crossing.append(j)
        else:
            segments[k].append(j)
    return crossing, segments


# ---------------------------------------------------------------------------
# Size classes


def box_by_size_class(jobs, height: int, eps: float, rng=None,
                      stats: Optional[BoxingStats] = None) -> list:
    """Round heights into classes and box each class into ``height`` boxes."""
    classes = defaultdict(list)
    rounded = {}
    for j in jobs:
        h = rounded.get(j.size)
        if h is None:
            h = rounded[j.size] = round_height(j.size, eps)
        classes[h].append(j)
    rnd = _rng(rng)
    out = []
    # Classes are independent; order does not matter.
    for h in sorted(classes):
        k = height // h
        if k < 1:
            raise ZeroUnitCount(f"size class {h} does not fit in box height {height}")
        out.extend(box_unit_class(classes[h], k, height, eps, rng=rnd, stats=stats))
    return out


# ---------------------------------------------------------------------------
# Whole-instance loop


def _round_params(h_min: int, h_max: int, eps: float):
    """(mu, H) for the next small-job round, or None when the loop is done."""
    lg = math.log2(h_max / h_min)
    lg2 = lg * lg
    if lg2 < 1 / eps:
        return None
    mu = eps / lg2
    return mu, math.ceil(mu ** 5 * h_max / lg2)


def _is_small(h: int, mu: float, height: int) -> bool:
    # Jobs whose rounded class would not fit the box stay large; without this
    # the class would get a zero unit count once mu grows past the golden ratio.
    return h <= mu * height * (1 + _FLOAT_SLACK) and round_height(h, mu) <= height


def final_mu(r: float, eps: float) -> float:
    lg = math.log2(r)
    if lg == 0:
        return PHI
    return min(eps / (lg * lg), PHI)


def loop_ratio(sizes, eps: float) -> float:
    """Height ratio left after the small-job rounds, tracking heights only."""
    heights = set(sizes)
    while True:
        h_min, h_max = min(heights), max(heights)
        params = _round_params(h_min, h_max, eps)
        if params is None:
            return h_max / h_min
        mu, H = params
        small = {h for h in heights if _is_small(h, mu, H)}
        if not small:
            raise InvariantViolation(f"no job fits below mu*H={mu * H:.3f} (eps={eps})")
        heights = (heights - small) | {H}
        n_min, n_max = min(heights), max(heights)
        if n_max * h_min >= h_max * n_min:
            raise InvariantViolation("height ratio did not shrink")


def box_all(jobs, eps: float, rng=None, stats: Optional[BoxingStats] = None) -> BoxingResult:
    """Box ``jobs`` into a set of top-level boxes that all share one height."""
    xs = list(jobs)
    if not xs:
        return BoxingResult([], 1.0, PHI, 0, [])
    rnd = _rng(rng)
    rounds = []
    h_min = min(j.size for j in xs)
    h_max = max(j.size for j in xs)
    while True:
        params = _round_params(h_min, h_max, eps)
        if params is None:
            break
        mu, H = params
        small, large = [], []
        for j in xs:
            (small if _is_small(j.size, mu, H) else large).append(j)
        if not small:
            raise InvariantViolation(f"no job fits below mu*H={mu * H:.3f} (eps={eps})")
        cfg = BoxingConfig(mu, H)
        rounds.append(cfg)
        if stats is not None:
            stats.rounds.append(cfg)
        xs = box_by_size_class(small, H, mu, rnd, stats) + large
        n_min = min(j.size for j in xs)
        n_max = max(j.size for j in xs)
        if n_max * h_min >= h_max * n_min:
            raise InvariantViolation("height ratio did not shrink")
        h_min, h_max = n_min, n_max
    r_star = h_max / h_min
    mu_star = final_mu(r_star, eps)
    height = math.ceil(h_max / mu_star)
    boxes = box_by_size_class(xs, height, mu_star, rnd, stats)
    return BoxingResult(boxes, r_star, mu_star, height, rounds)


# ---------------------------------------------------------------------------
# Preparation


def ensure_ratio_condition(jobs, prof) -> tuple[list, Optional[int]]:
    """Append a full-horizon padding job if the height ratio is too small."""
    jobs = list(jobs)
    if ratio_ok(prof.h_min, prof.h_max):
        return jobs, None
    t0, t1 = prof.horizon
    h = dummy_height(prof.h_min)
    jobs.append(Job(DUMMY_ID, h, t0, t1, req_size=h))
    return jobs, DUMMY_ID


def calibrate_epsilon(jobs, steps: int = 100) -> tuple[float, float]:
    """Sweep the legal error-parameter range; keep the one minimising r*.

    Returns ``(epsilon, r_star)``. Ties keep the smallest epsilon; probes
    on which the boxing loop cannot make progress are skipped.
    """
    sizes = {j.size for j in jobs}
    h_min, h_max = min(sizes), max(sizes)
    if h_min == h_max:
        return PHI, 1.0
    low, up = epsilon_bounds(h_max / h_min)
    if low > up:
        raise InvariantViolation(f"empty epsilon range [{low}, {up}]")
    best = None
    for k in range(steps + 1):
        eps = low + (up - low) * k / steps
        try:
            r = loop_ratio(sizes, eps)
        except InvariantViolation:
            continue
        if best is None or r < best[1]:
            best = (eps, r)
    if best is None:
        raise InvariantViolation("no epsilon in range lets the boxing loop progress")
    return best


def leaves(boxes):
    """Yield every original job below ``boxes``."""
    stack = list(boxes)
    while stack:
        j = stack.pop()
        if j.contents:
            stack.extend(j.contents)
        else:
            yield j
