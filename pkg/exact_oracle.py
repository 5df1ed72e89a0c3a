"""
Exact Oracle - Exhaustive search over interval mappings with replication
Pareto fronts and constrained optima for small instances; the reference
every polynomial solver is checked against.
"""
import math
from dataclasses import dataclass
from itertools import permutations
from math import comb
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import pandas as pd
from rich.console import Console

from config import DEFAULT_ENUM_LIMITS, DEFAULT_REPORT_CONFIG, EnumLimits, fmt, within
from metrics import evaluate, latency_heterogeneous, failure_probability
from platform_model import Evaluation, Interval, Mapping, PipelineSpec, PlatformSpec

console = Console(stderr=True)

# Enumerations above this size announce themselves on stderr
ANNOUNCE_THRESHOLD = 100_000

CSV_COLUMNS = ["latency", "failure_prob", "p", "intervals", "allocations"]


class LimitsExceeded(RuntimeError):
    """The instance is too large for exhaustive enumeration"""

    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class ParetoEntry:
    """A mapping with its objective values"""
    mapping: Mapping
    evaluation: Evaluation


@dataclass(frozen=True)
class ParetoFront:
    """Mutually non-dominated entries, latency ascending, failure probability descending"""
    entries: Tuple[ParetoEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ParetoEntry]:
        return iter(self.entries)

    def points(self) -> List[Tuple[float, float]]:
        return [(e.evaluation.latency, e.evaluation.failure_prob) for e in self.entries]

    def min_fp_under_latency(self, max_latency: float) -> Optional[ParetoEntry]:
        """Most reliable entry whose latency fits the bound."""
        best = None
        for entry in self.entries:
            if within(entry.evaluation.latency, max_latency):
                best = entry  # failure probability decreases along the front
        return best

    def min_latency_under_fp(self, max_fp: float) -> Optional[ParetoEntry]:
        """Fastest entry whose failure probability fits the bound."""
        for entry in self.entries:
            if within(entry.evaluation.failure_prob, max_fp):
                return entry
        return None

    def to_frame(self, digits: int = DEFAULT_REPORT_CONFIG.significant_digits) -> pd.DataFrame:
        rows = []
        for entry in self.entries:
            intervals = entry.mapping.intervals
            rows.append({
                "latency": fmt(entry.evaluation.latency, digits),
                "failure_prob": fmt(entry.evaluation.failure_prob, digits),
                "p": len(intervals),
                "intervals": ";".join(f"{iv.d}-{iv.e}" for iv in intervals),
                "allocations": ";".join(" ".join(iv.alloc) for iv in intervals),
            })
        return pd.DataFrame(rows, columns=CSV_COLUMNS)

    def to_csv(self, path: Path, digits: int = DEFAULT_REPORT_CONFIG.significant_digits) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame(digits).to_csv(path, index=False)
        return path


def pareto_filter(entries: Iterable[ParetoEntry]) -> ParetoFront:
    """
    Keep the non-dominated entries. Infeasible entries are dropped; among
    entries with identical objectives the earliest one wins.
    """
    indexed = [
        (e.evaluation.latency, e.evaluation.failure_prob, i, e)
        for i, e in enumerate(entries)
        if e.evaluation.feasible
    ]
    indexed.sort(key=lambda t: t[:3])

    front = []
    best_fp = math.inf
    for _, fp, _, entry in indexed:
        if fp < best_fp:
            front.append(entry)
            best_fp = fp
    return ParetoFront(tuple(front))


def ordered_disjoint_subsets(m: int, p: int) -> int:
    """Ordered p-tuples of pairwise-disjoint non-empty subsets of m processors."""
    return sum((-1) ** i * comb(p, i) * (p + 1 - i) ** m for i in range(p + 1))


def count_interval_mappings(n: int, m: int, max_intervals: Optional[int] = None) -> int:
    """Number of interval mappings with disjoint replication sets."""
    top = min(n, m, max_intervals or n)
    return sum(comb(n - 1, p - 1) * ordered_disjoint_subsets(m, p) for p in range(1, top + 1))


def check_limits(pipeline: PipelineSpec, platform: PlatformSpec, limits: EnumLimits) -> int:
    """Refuse instances beyond the limits; return the enumeration size."""
    n, m = pipeline.n, platform.m
    estimate = count_interval_mappings(n, m, limits.max_intervals)
    if n > limits.max_stages:
        raise LimitsExceeded(
            f"{n} stages exceeds max_stages={limits.max_stages} "
            f"(~{estimate:,} interval mappings)", estimate
        )
    if m > limits.max_processors:
        raise LimitsExceeded(
            f"{m} processors exceeds max_processors={limits.max_processors} "
            f"(~{estimate:,} interval mappings)", estimate
        )
    if estimate > limits.max_candidates:
        raise LimitsExceeded(
            f"{estimate:,} interval mappings exceeds max_candidates={limits.max_candidates:,}",
            estimate,
        )
    return estimate


def stage_partitions(n: int, max_intervals: Optional[int] = None) -> Iterator[List[Tuple[int, int]]]:
    """Partitions of 1..n into consecutive runs, by binary cut mask ascending."""
    for mask in range(2 ** (n - 1)):
        bounds = []
        start = 1
        for stage in range(1, n):
            if mask >> (stage - 1) & 1:
                bounds.append((start, stage))
                start = stage + 1
        bounds.append((start, n))
        if max_intervals is None or len(bounds) <= max_intervals:
            yield bounds


def _subsets(pool: Sequence[str]) -> Iterator[Tuple[str, ...]]:
    """Non-empty subsets in lexicographic order: (a), (a, b), (a, b, c), (a, c), (b), ..."""
    for i, head in enumerate(pool):
        yield (head,)
        for tail in _subsets(pool[i + 1:]):
            yield (head, *tail)


def _allocations(pool: Tuple[str, ...], count: int) -> Iterator[Tuple[Tuple[str, ...], ...]]:
    if count == 0:
        yield ()
        return
    for subset in _subsets(pool):
        if len(pool) - len(subset) < count - 1:
            continue
        taken = set(subset)
        rest = tuple(u for u in pool if u not in taken)
        for tail in _allocations(rest, count - 1):
            yield (subset, *tail)


def enumerate_interval_mappings(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    limits: EnumLimits = DEFAULT_ENUM_LIMITS,
) -> Iterator[Mapping]:
    """
    Every interval mapping with pairwise-disjoint replication sets.

    Partitions come by cut mask ascending; for each, the intervals take
    subsets of the still-unused processors in lexicographic order of ids.
    """
    check_limits(pipeline, platform, limits)
    ids = platform.ids
    for bounds in stage_partitions(pipeline.n, limits.max_intervals):
        if len(bounds) > len(ids):
            continue
        for alloc in _allocations(ids, len(bounds)):
            yield Mapping(tuple(Interval(d, e, a) for (d, e), a in zip(bounds, alloc)))


def pareto_front(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    limits: EnumLimits = DEFAULT_ENUM_LIMITS,
) -> ParetoFront:
    """Exact Pareto front over all interval mappings within the limits."""
    estimate = check_limits(pipeline, platform, limits)
    if estimate >= ANNOUNCE_THRESHOLD:
        console.print(f"[dim]Enumerating {estimate:,} interval mappings...[/dim]")
    return pareto_filter(
        ParetoEntry(mapping, evaluate(pipeline, platform, mapping))
        for mapping in enumerate_interval_mappings(pipeline, platform, limits)
    )


def min_fp_under_latency(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    max_latency: float,
    limits: EnumLimits = DEFAULT_ENUM_LIMITS,
) -> Optional[ParetoEntry]:
    """Minimum failure probability with latency <= max_latency; None if infeasible."""
    return pareto_front(pipeline, platform, limits).min_fp_under_latency(max_latency)


def min_latency_under_fp(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    max_fp: float,
    limits: EnumLimits = DEFAULT_ENUM_LIMITS,
) -> Optional[ParetoEntry]:
    """Minimum latency with failure probability <= max_fp; None if infeasible."""
    return pareto_front(pipeline, platform, limits).min_latency_under_fp(max_fp)


def min_latency_one_to_one(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    limits: EnumLimits = DEFAULT_ENUM_LIMITS,
) -> Optional[ParetoEntry]:
    """
    Best one-to-one mapping (each stage alone on its own processor) by
    per-link latency. None when n > m or no assignment has all its links.
    """
    n, m = pipeline.n, platform.m
    if n > m:
        return None
    candidates = math.perm(m, n)
    if candidates > limits.max_candidates:
        raise LimitsExceeded(
            f"{candidates:,} one-to-one assignments exceeds max_candidates={limits.max_candidates:,}",
            candidates,
        )

    best_mapping, best_latency = None, math.inf
    for assignment in permutations(platform.ids, n):
        mapping = Mapping.one_to_one(assignment)
        value = latency_heterogeneous(pipeline, platform, mapping)
        if value < best_latency:
            best_mapping, best_latency = mapping, value
    if best_mapping is None:
        return None
    return ParetoEntry(
        best_mapping,
        Evaluation(best_latency, failure_probability(best_mapping, platform)),
    )
