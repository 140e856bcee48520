"""Core domain types: jobs, lifetime semantics and placements.

Internally every lifetime is exclusive on both ends: a job allocated at
``start`` and freed at ``end`` is live on the open interval ``(start, end)``.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

U64_MAX = 2**64 - 1

# Reserved id for the padding job added when the height ratio is too small.
DUMMY_ID = -1

# Boxes get negative ids below the dummy sentinel so they never collide with
# user ids (which are non-negative).
_box_ids = itertools.count(-2, -1)


class ValidationError(ValueError):
    """A job violates one of the input rules."""

    rule = "Invalid"

    def __init__(self, message: str = "", job: Optional["Job"] = None):
        super().__init__(message or self.rule)
        self.job = job


class ZeroSize(ValidationError):
    rule = "ZeroSize"


class NonPositiveLifetime(ValidationError):
    rule = "NonPositiveLifetime"


class ZeroAlignment(ValidationError):
    rule = "ZeroAlignment"


class NonEmptyContents(ValidationError):
    rule = "NonEmptyContents"


class AllocatedLtRequested(ValidationError):
    rule = "AllocatedLtRequested"


class DegenerateLifetime(ValidationError):
    rule = "DegenerateLifetime"


class Overflow(ValidationError):
    rule = "Overflow"


class InvariantViolation(RuntimeError):
    """Internal consistency check of the boxing chain failed."""


class Semantics(enum.Enum):
    In = "In"
    InEx = "InEx"
    Ex = "Ex"

    @classmethod
    def parse(cls, text: str) -> "Semantics":
        for s in cls:
            if s.value.lower() == text.strip().lower():
                return s
        raise ValueError(f"unknown semantics {text!r}")


@dataclass(frozen=True, eq=False, slots=True)
class Job:
    """A buffer, or a box holding other jobs.

    ``eq=False`` keeps identity hashing: boxes can be large trees and two
    distinct buffers with equal fields are still distinct jobs.
    """

    id: int
    size: int
    start: int
    end: int
    req_size: Optional[int] = None
    alignment: Optional[int] = None
    contents: tuple = ()

    @property
    def requested(self) -> int:
        return self.size if self.req_size is None else self.req_size

    @property
    def lifespan(self) -> int:
        return self.end - self.start - 1

    @property
    def is_box(self) -> bool:
        return bool(self.contents)

    def live_at(self, t) -> bool:
        return self.start < t < self.end

    def __repr__(self) -> str:
        tag = f" box[{len(self.contents)}]" if self.contents else ""
        return f"Job(id={self.id}, size={self.size}, ({self.start}, {self.end}){tag})"


def make_box(contents: Iterable[Job], height: int) -> Job:
    contents = tuple(contents)
    return Job(
        id=next(_box_ids),
        size=height,
        req_size=height,
        start=min(j.start for j in contents),
        end=max(j.end for j in contents),
        contents=contents,
    )


def validate_job(j: Job) -> None:
    """Raise the first violated input rule, if any."""
    if j.size < 1:
        raise ZeroSize(f"job {j.id}: size must be positive", j)
    if j.start >= j.end:
        raise NonPositiveLifetime(f"job {j.id}: start {j.start} >= end {j.end}", j)
    if j.alignment is not None and j.alignment < 1:
        raise ZeroAlignment(f"job {j.id}: alignment must be positive", j)
    if j.contents:
        raise NonEmptyContents(f"job {j.id}: input jobs cannot carry contents", j)
    if j.size < j.requested:
        raise AllocatedLtRequested(f"job {j.id}: size {j.size} < requested {j.requested}", j)
    if j.start < 0 or j.id < 0:
        raise ValidationError(f"job {j.id}: ids and times must be non-negative", j)
    if max(j.size, j.end, j.id) > U64_MAX:
        raise Overflow(f"job {j.id}: value exceeds 64-bit range", j)


def validate_jobs(jobs: Iterable[Job]) -> list[Job]:
    jobs = list(jobs)
    seen = set()
    for j in jobs:
        validate_job(j)
        if j.id in seen:
            raise ValidationError(f"duplicate id {j.id}", j)
        seen.add(j.id)
    return jobs


# End-time shift needed to go from each semantics to InEx (== Ex).
_TO_EX_SHIFT = {Semantics.In: 1, Semantics.InEx: 0, Semantics.Ex: 0}


def convert(jobs: Iterable[Job], src: Semantics, dst: Semantics) -> list[Job]:
    """Re-express lifetimes from ``src`` semantics into ``dst``.

    In <-> InEx moves the end by one; InEx and Ex share the same endpoints.
    """
    shift = _TO_EX_SHIFT[src] - _TO_EX_SHIFT[dst]
    if shift == 0:
        return list(jobs)
    # Inclusive lifetimes may be a single instant (start == end).
    min_span = 0 if dst is Semantics.In else 1
    out = []
    for j in jobs:
        end = j.end + shift
        if end - j.start < min_span:
            raise DegenerateLifetime(
                f"job {j.id}: ({j.start}, {j.end}) has no {dst.value} equivalent", j)
        if end > U64_MAX:
            raise Overflow(f"job {j.id}: end overflows", j)
        out.append(replace(j, end=end))
    return out


def overlaps(a: Job, b: Job) -> bool:
    return b.end > a.start and b.start < a.end


def align_up(offset: int, alignment: Optional[int], start_address: int = 0) -> int:
    """Smallest ``o >= offset`` with ``(start_address + o) % alignment == 0``."""
    if not alignment or alignment == 1:
        return offset
    rem = (start_address + offset) % alignment
    return offset if rem == 0 else offset + alignment - rem


@dataclass
class Placement:
    offsets: dict
    makespan: int
    start_address: int = 0
    semantics: Semantics = Semantics.Ex
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_offsets(cls, jobs: Iterable[Job], offsets: dict, start_address: int = 0,
                     semantics: Semantics = Semantics.Ex) -> "Placement":
        m = 0
        for j in jobs:
            m = max(m, offsets[j.id] + j.size)
        return cls(dict(offsets), m, start_address, semantics)

    def fragmentation(self, max_load: int) -> int:
        return self.makespan - max_load
