"""
Polynomial Solvers - Closed-form optimizers for the homogeneous platform classes
On Fully Homogeneous platforms, and on Communication Homogeneous platforms
with identical failure probabilities, some optimal mapping is a single
interval; the solvers only pick how many (and which) processors replicate it.
"""
import math
from typing import List, Optional

from config import within
from exact_oracle import ParetoEntry, ParetoFront, pareto_filter
from metrics import evaluate, failure_probability, latency_homogeneous_links
from platform_model import Mapping, PipelineSpec, PlatformSpec, id_key


def _most_reliable(platform: PlatformSpec) -> List[str]:
    """Processor ids by failure probability ascending, ties by id"""
    return [
        p.id for p in sorted(platform.processors, key=lambda p: (p.failure_prob, id_key(p.id)))
    ]


def _fastest(platform: PlatformSpec) -> List[str]:
    """Processor ids by speed descending, ties by id"""
    return [p.id for p in sorted(platform.processors, key=lambda p: (-p.speed, id_key(p.id)))]


def _require_fully_homogeneous(platform: PlatformSpec, solver: str):
    cls = platform.platform_class
    if not cls.fully_homogeneous:
        raise ValueError(f"{solver} needs a Fully Homogeneous platform (got {cls.label})")


def _require_comm_hom_failure_hom(platform: PlatformSpec, solver: str):
    cls = platform.platform_class
    if not (cls.communication_homogeneous and cls.failure_homogeneous):
        raise ValueError(
            f"{solver} needs identical links and identical failure probabilities (got {cls.label})"
        )


def min_fp_unconstrained(pipeline: PipelineSpec, platform: PlatformSpec) -> Mapping:
    """Replicate the whole pipeline on every processor."""
    return Mapping.single(pipeline.n, platform.ids)


def min_latency_comm_hom(pipeline: PipelineSpec, platform: PlatformSpec) -> Mapping:
    """Whole pipeline on one fastest processor (identical links required)."""
    if not platform.platform_class.communication_homogeneous:
        raise ValueError("min_latency_comm_hom needs identical link bandwidths")
    return Mapping.single(pipeline.n, _fastest(platform)[:1])


def _largest_prefix_within(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    order: List[str],
    max_latency: float,
) -> Optional[Mapping]:
    # Feasibility need not be monotone in k: the k-th prefix may add a slower processor
    best = None
    for k in range(1, len(order) + 1):
        mapping = Mapping.single(pipeline.n, order[:k])
        if within(latency_homogeneous_links(pipeline, platform, mapping), max_latency):
            best = mapping
    return best


def _smallest_prefix_within(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    order: List[str],
    max_fp: float,
) -> Optional[Mapping]:
    for k in range(1, len(order) + 1):
        mapping = Mapping.single(pipeline.n, order[:k])
        if within(failure_probability(mapping, platform), max_fp):
            return mapping
    return None


def alg1_min_fp_given_latency(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    max_latency: float,
) -> Optional[Mapping]:
    """
    Fully Homogeneous: minimize FP subject to latency <= max_latency.

    The largest k with k * delta_0 / b + W / s + delta_n / b <= L is

        k = floor( (b / delta_0) * (L - delta_n / b - W / s) )

    capped at m (every k fits when delta_0 = 0 and the fixed terms do).
    The pipeline is replicated on the k most reliable processors.
    """
    _require_fully_homogeneous(platform, "alg1_min_fp_given_latency")
    order = _most_reliable(platform)
    m = len(order)
    b = platform.common_bandwidth
    s = platform.processors[0].speed
    fixed = pipeline.total_work / s + pipeline.delta[pipeline.n] / b
    delta0 = pipeline.delta[0]

    if delta0 == 0 or math.isinf(max_latency):
        k = m
    else:
        k = min(m, max(0, math.floor(b / delta0 * (max_latency - fixed))))

    def fits(count: int) -> bool:
        mapping = Mapping.single(pipeline.n, order[:count])
        return within(latency_homogeneous_links(pipeline, platform, mapping), max_latency)

    # The closed form can be off by one at the boundary; settle on the evaluated latency
    while k < m and fits(k + 1):
        k += 1
    while k >= 1 and not fits(k):
        k -= 1
    if k < 1:
        return None
    return Mapping.single(pipeline.n, order[:k])


def alg2_min_latency_given_fp(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    max_fp: float,
) -> Optional[Mapping]:
    """
    Fully Homogeneous: minimize latency subject to FP <= max_fp.
    Smallest k whose k most reliable processors fail together with
    probability at most max_fp.
    """
    _require_fully_homogeneous(platform, "alg2_min_latency_given_fp")
    return _smallest_prefix_within(pipeline, platform, _most_reliable(platform), max_fp)


def alg3_min_fp_given_latency_commhom(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    max_latency: float,
) -> Optional[Mapping]:
    """
    Communication Homogeneous, identical failure probabilities: minimize FP
    subject to latency <= max_latency. Replicates on the largest prefix of
    the fastest processors whose latency, paced by its slowest member, fits.
    """
    _require_comm_hom_failure_hom(platform, "alg3_min_fp_given_latency_commhom")
    return _largest_prefix_within(pipeline, platform, _fastest(platform), max_latency)


def alg4_min_latency_given_fp_commhom(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    max_fp: float,
) -> Optional[Mapping]:
    """
    Communication Homogeneous, identical failure probabilities: minimize
    latency subject to FP <= max_fp, on the k fastest processors.
    """
    _require_comm_hom_failure_hom(platform, "alg4_min_latency_given_fp_commhom")
    return _smallest_prefix_within(pipeline, platform, _fastest(platform), max_fp)


def _single_interval_order(platform: PlatformSpec) -> List[str]:
    cls = platform.platform_class
    if cls.fully_homogeneous:
        return _most_reliable(platform)
    if cls.communication_homogeneous and cls.failure_homogeneous:
        return _fastest(platform)
    raise ValueError(
        f"A single interval is not always optimal on {cls.label} platforms"
    )


def collapse_to_single_interval(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    mapping: Mapping,
) -> Mapping:
    """
    Rewrite a mapping as one interval that is no worse on either objective.

    Fully Homogeneous: the k_1 = |alloc(1)| most reliable processors.
    Communication Homogeneous with identical failures: the k = min_j k_j
    fastest processors.
    """
    order = _single_interval_order(platform)
    if platform.platform_class.fully_homogeneous:
        k = mapping.intervals[0].k
    else:
        k = min(iv.k for iv in mapping.intervals)
    return Mapping.single(pipeline.n, order[:k])


def single_interval_front(pipeline: PipelineSpec, platform: PlatformSpec) -> ParetoFront:
    """
    Pareto front in O(m) evaluations on the classes where a single
    interval is always optimal: one candidate per replication count k.
    """
    order = _single_interval_order(platform)
    candidates = []
    for k in range(1, len(order) + 1):
        mapping = Mapping.single(pipeline.n, order[:k])
        candidates.append(ParetoEntry(mapping, evaluate(pipeline, platform, mapping)))
    return pareto_filter(candidates)
