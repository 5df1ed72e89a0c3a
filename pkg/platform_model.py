"""
Platform Model - Pipelines, processors, platforms and interval mappings
Domain types shared by every solver, plus platform-class detection and
mapping validation.
"""
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

# Virtual gateway endpoints holding the initial input and receiving the result
IN = "in"
OUT = "out"

HOMOGENEOUS = "homogeneous"
HETEROGENEOUS = "heterogeneous"


def id_key(proc_id: str) -> Tuple:
    """Natural sort key, so P2 sorts before P10."""
    return tuple(
        (0, int(part), "") if part.isdigit() else (1, 0, part)
        for part in re.findall(r"\d+|\D+", proc_id)
    )


@dataclass(frozen=True)
class PipelineSpec:
    """A linear pipeline of n stages"""
    w: Tuple[float, ...]      # computation per stage, w[0] is stage 1
    delta: Tuple[float, ...]  # delta[0] is the initial input, delta[n] the final output

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(float(x) for x in self.w))
        object.__setattr__(self, "delta", tuple(float(x) for x in self.delta))
        if len(self.w) < 1:
            raise ValueError("Pipeline needs at least one stage")
        if len(self.delta) != len(self.w) + 1:
            raise ValueError(
                f"delta must have n+1 = {len(self.w) + 1} entries (got {len(self.delta)})"
            )
        for i, x in enumerate(self.w, 1):
            if not x > 0 or math.isinf(x):
                raise ValueError(f"w[{i}] must be a positive finite number (got {x})")
        for k, x in enumerate(self.delta):
            if not x >= 0 or math.isinf(x):
                raise ValueError(f"delta[{k}] must be a non-negative finite number (got {x})")

    @property
    def n(self) -> int:
        return len(self.w)

    def work(self, d: int, e: int) -> float:
        """Total computation of stages d..e (1-based, inclusive)."""
        if d == e:
            return self.w[d - 1]
        return math.fsum(self.w[d - 1:e])

    @property
    def total_work(self) -> float:
        return self.work(1, self.n)


@dataclass(frozen=True)
class Processor:
    """A processor with a speed and a whole-run failure probability"""
    id: str
    speed: float
    failure_prob: float

    def __post_init__(self):
        if not self.id or self.id in (IN, OUT):
            raise ValueError(f"Invalid processor id: {self.id!r}")
        if not self.speed > 0 or math.isinf(self.speed):
            raise ValueError(f"Processor {self.id}: speed must be positive (got {self.speed})")
        if not 0 <= self.failure_prob <= 1:
            raise ValueError(
                f"Processor {self.id}: failure_prob must be in [0, 1] (got {self.failure_prob})"
            )


@dataclass(frozen=True)
class PlatformClass:
    """Uniformity of links, speeds and failure probabilities"""
    links: str
    speeds: str
    failures: str

    @property
    def fully_homogeneous(self) -> bool:
        return self.links == HOMOGENEOUS and self.speeds == HOMOGENEOUS

    @property
    def communication_homogeneous(self) -> bool:
        """Identical links (speeds may differ)"""
        return self.links == HOMOGENEOUS

    @property
    def failure_homogeneous(self) -> bool:
        return self.failures == HOMOGENEOUS

    @property
    def name(self) -> str:
        if self.fully_homogeneous:
            return "Fully Homogeneous"
        if self.links == HOMOGENEOUS:
            return "Communication Homogeneous"
        return "Fully Heterogeneous"

    @property
    def label(self) -> str:
        failures = "Failure Homogeneous" if self.failure_homogeneous else "Failure Heterogeneous"
        return f"{self.name} / {failures}"


@dataclass(frozen=True)
class PlatformSpec:
    """
    m processors plus a directed bandwidth table.

    Keys of `bandwidth` are (source, target) pairs over processor ids and
    the IN / OUT gateways. A missing key is an unusable link.
    """
    processors: Tuple[Processor, ...]
    bandwidth: Dict[Tuple[str, str], float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "processors", tuple(self.processors))
        object.__setattr__(
            self, "bandwidth", {(u, v): float(b) for (u, v), b in dict(self.bandwidth).items()}
        )
        if not self.processors:
            raise ValueError("Platform needs at least one processor")
        ids = [p.id for p in self.processors]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise ValueError(f"Duplicate processor ids: {', '.join(duplicates)}")

        known = set(ids)
        for (u, v), b in self.bandwidth.items():
            if u not in known and u != IN:
                raise ValueError(f"Link {u}->{v}: unknown source {u!r}")
            if v not in known and v != OUT:
                raise ValueError(f"Link {u}->{v}: unknown target {v!r}")
            if u == v:
                raise ValueError(f"Link {u}->{v}: self-links are not links")
            if u == IN and v == OUT:
                raise ValueError("Link in->out bypasses the pipeline")
            if not b > 0:
                raise ValueError(f"Link {u}->{v}: bandwidth must be positive (got {b})")

        if not any((IN, u) in self.bandwidth for u in ids):
            raise ValueError("No processor can receive the input (no in->P link)")
        if not any((u, OUT) in self.bandwidth for u in ids):
            raise ValueError("No processor can emit the output (no P->out link)")

    @classmethod
    def with_uniform_bandwidth(cls, processors: Iterable[Processor], bandwidth: float) -> "PlatformSpec":
        """Full clique plus gateway links, every link at one bandwidth."""
        processors = tuple(processors)
        ids = [p.id for p in processors]
        links = {(u, v): bandwidth for u in ids for v in ids if u != v}
        links.update({(IN, u): bandwidth for u in ids})
        links.update({(u, OUT): bandwidth for u in ids})
        return cls(processors=processors, bandwidth=links)

    @property
    def m(self) -> int:
        return len(self.processors)

    @cached_property
    def ids(self) -> Tuple[str, ...]:
        """Processor ids in natural order"""
        return tuple(sorted((p.id for p in self.processors), key=id_key))

    @cached_property
    def by_id(self) -> Dict[str, Processor]:
        return {p.id: p for p in self.processors}

    def processor(self, proc_id: str) -> Processor:
        return self.by_id[proc_id]

    def bw(self, u: str, v: str) -> Optional[float]:
        return self.bandwidth.get((u, v))

    @cached_property
    def platform_class(self) -> PlatformClass:
        return classify_platform(self)

    @cached_property
    def common_bandwidth(self) -> float:
        """The single bandwidth of a homogeneous-link platform."""
        values = set(self.bandwidth.values())
        if len(values) != 1:
            raise ValueError("Platform links are heterogeneous")
        return next(iter(values))

    def is_uniform_clique(self) -> bool:
        """True when the platform equals its scalar-bandwidth expansion."""
        values = set(self.bandwidth.values())
        if len(values) != 1:
            return False
        return self == PlatformSpec.with_uniform_bandwidth(self.processors, next(iter(values)))


@dataclass(frozen=True)
class Interval:
    """Stages d..e (1-based, inclusive) replicated on alloc"""
    d: int
    e: int
    alloc: Tuple[str, ...]

    @property
    def k(self) -> int:
        return len(self.alloc)

    def describe(self) -> str:
        stages = f"S{self.d}" if self.d == self.e else f"S{self.d}-S{self.e}"
        return f"{stages} @ {{{', '.join(self.alloc)}}}"


@dataclass(frozen=True)
class Mapping:
    """Interval mapping: consecutive stage ranges, each on a replication set"""
    intervals: Tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))

    @classmethod
    def single(cls, n: int, alloc: Sequence[str]) -> "Mapping":
        """The whole pipeline as one interval."""
        return cls((Interval(1, n, tuple(alloc)),))

    @classmethod
    def one_to_one(cls, assignment: Sequence[str]) -> "Mapping":
        """Stage i alone on assignment[i-1]."""
        return cls(tuple(Interval(i, i, (u,)) for i, u in enumerate(assignment, 1)))

    @property
    def p(self) -> int:
        return len(self.intervals)

    @property
    def used_processors(self) -> Tuple[str, ...]:
        return tuple(u for iv in self.intervals for u in iv.alloc)

    def describe(self) -> str:
        return "; ".join(iv.describe() for iv in self.intervals)


@dataclass(frozen=True)
class Evaluation:
    """(latency, failure probability) of a mapping; latency is inf when infeasible"""
    latency: float
    failure_prob: float

    @property
    def feasible(self) -> bool:
        return not math.isinf(self.latency)

    def dominates(self, other: "Evaluation") -> bool:
        """At least as good on both objectives and strictly better on one."""
        return (
            self.latency <= other.latency
            and self.failure_prob <= other.failure_prob
            and (self.latency < other.latency or self.failure_prob < other.failure_prob)
        )


@dataclass(frozen=True)
class MappingViolation:
    """First reason a mapping is not valid on an instance"""
    interval: int  # 1-based interval index, 0 when not tied to one interval
    kind: str      # gap, overlap, empty-interval, empty-alloc, duplicate, unknown, missing-link
    reason: str

    def __str__(self) -> str:
        where = f"interval {self.interval}" if self.interval else "mapping"
        return f"{where}: {self.kind}: {self.reason}"


class MappingError(ValueError):
    """Raised by check_mapping for an invalid mapping"""

    def __init__(self, violation: MappingViolation):
        super().__init__(str(violation))
        self.violation = violation


def classify_platform(platform: PlatformSpec) -> PlatformClass:
    """
    Detect link, speed and failure uniformity from the data (exact comparison).

    Links are homogeneous only when every processor pair and every gateway
    link is present at one bandwidth; a missing link counts as a different one.
    """
    def uniformity(values: Iterable[float]) -> str:
        return HOMOGENEOUS if len(set(values)) <= 1 else HETEROGENEOUS

    m = platform.m
    complete = len(platform.bandwidth) == m * (m - 1) + 2 * m
    links = uniformity(platform.bandwidth.values()) if complete else HETEROGENEOUS

    return PlatformClass(
        links=links,
        speeds=uniformity(p.speed for p in platform.processors),
        failures=uniformity(p.failure_prob for p in platform.processors),
    )


def mapping_links(mapping: Mapping) -> List[Tuple[int, str, str]]:
    """Every (interval index, source, target) link the mapping sends data over."""
    links = []
    first = mapping.intervals[0]
    links.extend((1, IN, u) for u in first.alloc)
    for j, (iv, nxt) in enumerate(zip(mapping.intervals, mapping.intervals[1:]), 1):
        links.extend((j, u, v) for u in iv.alloc for v in nxt.alloc if u != v)
    last = mapping.intervals[-1]
    links.extend((mapping.p, u, OUT) for u in last.alloc)
    return links


def validate_mapping(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    mapping: Mapping,
) -> Optional[MappingViolation]:
    """
    Check a mapping against an instance.

    Returns None when the mapping is a partition of 1..n into intervals on
    pairwise-disjoint, non-empty sets of known processors whose links all
    exist; otherwise the first violation found.
    """
    if not mapping.intervals:
        return MappingViolation(0, "gap", "mapping has no intervals")

    expected = 1
    for j, iv in enumerate(mapping.intervals, 1):
        if iv.d > iv.e:
            return MappingViolation(j, "empty-interval", f"first stage {iv.d} after last stage {iv.e}")
        if iv.d > expected:
            return MappingViolation(j, "gap", f"stages {expected}..{iv.d - 1} are not mapped")
        if iv.d < expected:
            return MappingViolation(j, "overlap", f"stage {iv.d} is already mapped")
        if iv.e > pipeline.n:
            return MappingViolation(j, "overlap", f"last stage {iv.e} beyond n = {pipeline.n}")
        expected = iv.e + 1
    if expected <= pipeline.n:
        return MappingViolation(
            mapping.p, "gap", f"stages {expected}..{pipeline.n} are not mapped"
        )

    seen: Dict[str, int] = {}
    for j, iv in enumerate(mapping.intervals, 1):
        if not iv.alloc:
            return MappingViolation(j, "empty-alloc", "no processor assigned")
        for u in iv.alloc:
            if u not in platform.by_id:
                return MappingViolation(j, "unknown", f"processor {u!r} is not on the platform")
            if u in seen:
                where = "twice in this interval" if seen[u] == j else f"already used by interval {seen[u]}"
                return MappingViolation(j, "duplicate", f"processor {u} {where}")
            seen[u] = j

    for j, u, v in mapping_links(mapping):
        if platform.bw(u, v) is None:
            return MappingViolation(j, "missing-link", f"no link {u}->{v}")
    return None


def check_mapping(pipeline: PipelineSpec, platform: PlatformSpec, mapping: Mapping) -> Mapping:
    """validate_mapping, raising MappingError on the first violation."""
    violation = validate_mapping(pipeline, platform, mapping)
    if violation is not None:
        raise MappingError(violation)
    return mapping
