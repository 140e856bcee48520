"""Instance and solution files, the solution analyzer and tournament scoring.

Instance file::

    semantics=In,start_address=64
    # id,start,end,size[,alignment]
    0,0,4,16
    1,2,5,8,4

The header line is optional (defaults: Ex semantics, start address 0).
Solution file: ``id,offset`` lines followed by ``makespan=M``.
"""
from __future__ import annotations

import contextlib
import csv
import io
import os
from dataclasses import dataclass, field
from typing import Optional

from .model import Job, Semantics, ValidationError, align_up, convert, validate_job
from .sweep import EventKind, count_conflicts, events_in_order, max_load


class MalformedLine(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateId(ValidationError):
    rule = "DuplicateId"


class IdMismatch(ValueError):
    pass


@contextlib.contextmanager
def _open(src, mode="r"):
    if isinstance(src, (str, os.PathLike)):
        with open(src, mode, newline="") as fh:
            yield fh
    else:
        yield src


def _header(text: str, lineno: int) -> dict:
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise MalformedLine(lineno, f"bad header field {part!r}")
        k, v = (x.strip() for x in part.split("=", 1))
        out[k] = v
    return out


def parse_instance(src, semantics: Optional[Semantics] = None):
    """Read an instance; return ``(jobs, semantics, start_address)``.

    Jobs come back in internal Ex semantics. ``semantics`` overrides the
    header tag. Errors carry the 1-based line number.
    """
    with _open(src) as fh:
        lines = fh.read().splitlines()
    declared = Semantics.Ex
    start_address = 0
    jobs: list[Job] = []
    seen: dict = {}
    first = True
    for lineno, raw in enumerate(lines, 1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        if first and "=" in text:
            first = False
            hdr = _header(text, lineno)
            try:
                if "semantics" in hdr:
                    declared = Semantics.parse(hdr["semantics"])
                start_address = int(hdr.get("start_address", 0))
            except ValueError as exc:
                raise MalformedLine(lineno, str(exc)) from None
            continue
        first = False
        fields = [f.strip() for f in text.split(",")]
        if len(fields) not in (4, 5):
            raise MalformedLine(lineno, f"expected 4 or 5 fields, got {len(fields)}")
        try:
            nums = [int(f) for f in fields]
        except ValueError:
            raise MalformedLine(lineno, f"non-integer field in {text!r}") from None
        jid, s, e, size = nums[:4]
        align = nums[4] if len(nums) == 5 else None
        if jid in seen:
            raise DuplicateId(f"line {lineno}: id {jid} already defined on line {seen[jid]}")
        seen[jid] = lineno
        job = Job(jid, size, s, e, req_size=size, alignment=align)
        try:
            job = convert([job], semantics or declared, Semantics.Ex)[0]
            validate_job(job)
        except ValidationError as exc:
            err = type(exc)(f"line {lineno}: {exc}", exc.job)
            err.line = lineno
            raise err from None
        jobs.append(job)
    return jobs, semantics or declared, start_address


def write_instance(jobs, dst, semantics: Semantics = Semantics.Ex, start_address: int = 0):
    """Write Ex-semantics ``jobs`` re-encoded under ``semantics``."""
    out = convert(jobs, Semantics.Ex, semantics)
    with _open(dst, "w") as fh:
        fh.write(f"semantics={semantics.value},start_address={start_address}\n")
        for j in out:
            row = [j.id, j.start, j.end, j.size]
            if j.alignment is not None:
                row.append(j.alignment)
            fh.write(",".join(map(str, row)) + "\n")


def write_solution(offsets: dict, makespan: int, dst):
    with _open(dst, "w") as fh:
        for jid in sorted(offsets):
            fh.write(f"{jid},{offsets[jid]}\n")
        fh.write(f"makespan={makespan}\n")


def parse_solution(src) -> tuple[dict, Optional[int]]:
    offsets: dict = {}
    makespan = None
    with _open(src) as fh:
        for lineno, raw in enumerate(fh.read().splitlines(), 1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            if text.startswith("makespan="):
                try:
                    makespan = int(text.split("=", 1)[1])
                except ValueError:
                    raise MalformedLine(lineno, "bad makespan") from None
                continue
            parts = text.split(",")
            try:
                jid, off = (int(p) for p in parts)
            except ValueError:
                raise MalformedLine(lineno, f"expected id,offset in {text!r}") from None
            if jid in offsets:
                raise MalformedLine(lineno, f"offset for id {jid} given twice")
            offsets[jid] = off
    return offsets, makespan


@dataclass
class Report:
    max_load: int
    makespan: int
    fragmentation: int
    conflicts: int
    valid: bool
    violations: list = field(default_factory=list)

    def lines(self):
        yield f"L={self.max_load}"
        yield f"M={self.makespan}"
        yield f"F={self.fragmentation}"
        yield f"conflicts={self.conflicts}"
        yield f"valid={str(self.valid).lower()}"
        for v in self.violations:
            yield "violation " + " ".join(map(str, v))


def analyze(jobs, offsets: dict, reported_makespan: Optional[int] = None,
            start_address: int = 0) -> Report:
    """Recompute L, M, F and conflicts; list every broken placement rule.

    Violations are tuples: ``("overlap", a, b)``, ``("alignment", id)``,
    ``("negative", id)`` and ``("makespan", reported, actual)``.
    """
    jobs = list(jobs)
    ids = {j.id for j in jobs}
    if ids != set(offsets):
        missing = sorted(ids - set(offsets))[:5]
        extra = sorted(set(offsets) - ids)[:5]
        raise IdMismatch(f"solution ids differ from instance (missing {missing}, extra {extra})")
    L = max_load(jobs)
    conflicts = count_conflicts(jobs)
    violations = []
    M = 0
    for j in jobs:
        o = offsets[j.id]
        M = max(M, o + j.size)
        if o < 0:
            violations.append(("negative", j.id))
        if align_up(o, j.alignment, start_address) != o:
            violations.append(("alignment", j.id))
    live: dict = {}
    for ev in events_in_order(jobs, 0):
        j = ev.job
        if ev.kind is EventKind.Dealloc:
            del live[j.id]
            continue
        lo, hi = offsets[j.id], offsets[j.id] + j.size
        for other in live.values():
            olo = offsets[other.id]
            if olo < hi and lo < olo + other.size:
                violations.append(("overlap", min(j.id, other.id), max(j.id, other.id)))
        live[j.id] = j
    if reported_makespan is not None and reported_makespan < M:
        violations.append(("makespan", reported_makespan, M))
    return Report(L, M, M - L, conflicts, not violations, violations)


# ---------------------------------------------------------------------------
# Tournament


@dataclass(frozen=True)
class RaceResult:
    allocator: str
    fragmentation: Optional[float] = None  # None means the run failed

    @property
    def failed(self) -> bool:
        return self.fragmentation is None


def score_benchmark(results) -> dict:
    """Points for one benchmark.

    A failed allocator loses one point per finisher. A finisher earns one
    point per allocator with strictly larger fragmentation plus one per
    failed allocator, so exact ties outperform nobody.
    """
    results = list(results)
    done = [r for r in results if not r.failed]
    n_failed = len(results) - len(done)
    points = {}
    for r in results:
        if r.failed:
            points[r.allocator] = -len(done)
        else:
            beaten = sum(1 for o in done if o.fragmentation > r.fragmentation)
            points[r.allocator] = beaten + n_failed
    return points


def score_tournament(results: dict) -> tuple[dict, dict]:
    """``results`` maps benchmark name to its RaceResults.

    Returns ``(per_benchmark_points, totals)``.
    """
    per = {}
    totals: dict = {}
    for bench, rows in results.items():
        pts = score_benchmark(rows)
        per[bench] = pts
        for a, p in pts.items():
            totals[a] = totals.get(a, 0) + p
    return per, totals


def parse_race_csv(src) -> dict:
    """Read ``benchmark,allocator,F`` rows; ``F`` of FAIL or empty marks a failure."""
    out: dict = {}
    with _open(src) as fh:
        for row in csv.DictReader(fh):
            raw = (row.get("F") or "").strip()
            frag = None if raw == "" or raw.upper().startswith("FAIL") else float(raw)
            out.setdefault(row["benchmark"], []).append(RaceResult(row["allocator"], frag))
    return out


def instance_text(jobs, semantics=Semantics.Ex, start_address=0) -> str:
    buf = io.StringIO()
    write_instance(jobs, buf, semantics, start_address)
    return buf.getvalue()
