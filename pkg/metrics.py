"""
Metrics - Worst-case latency and global failure probability of a mapping
Latency uses the one-port cost model: replicated incoming transfers are
serialized, computation is paced by the slowest replica.
"""
import math
from typing import Iterable

from platform_model import (
    HOMOGENEOUS,
    IN,
    OUT,
    Evaluation,
    Mapping,
    PipelineSpec,
    PlatformSpec,
)


def replica_failure(failure_probs: Iterable[float]) -> float:
    """Probability that every replica fails: the product of the f_u."""
    logs = []
    for f in failure_probs:
        if f == 0:
            return 0.0
        logs.append(math.log(f))
    return math.exp(math.fsum(logs))


def failure_probability(mapping: Mapping, platform: PlatformSpec) -> float:
    """
    Global failure probability: the run fails as soon as one interval
    loses all of its replicas.

        FP = 1 - prod_j (1 - prod_{u in alloc(j)} f_u)
    """
    survival = 1.0
    for iv in mapping.intervals:
        q = replica_failure(platform.by_id[u].failure_prob for u in iv.alloc)
        survival *= 1.0 - q
    return min(1.0, max(0.0, 1.0 - survival))


def latency_homogeneous_links(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    mapping: Mapping,
) -> float:
    """
    Latency on a platform whose links share one bandwidth b:

        T = sum_j ( k_j * delta[d_j - 1] / b + W_j / min_{u in alloc(j)} s_u ) + delta[n] / b
    """
    if platform.platform_class.links != HOMOGENEOUS:
        raise ValueError("latency_homogeneous_links needs identical link bandwidths")
    b = platform.common_bandwidth

    total = 0.0
    for iv in mapping.intervals:
        slowest = min(platform.by_id[u].speed for u in iv.alloc)
        total += iv.k * pipeline.delta[iv.d - 1] / b + pipeline.work(iv.d, iv.e) / slowest
    total += pipeline.delta[pipeline.n] / b
    return total


def latency_heterogeneous(
    pipeline: PipelineSpec,
    platform: PlatformSpec,
    mapping: Mapping,
) -> float:
    """
    Latency with per-link bandwidths; math.inf when a needed link is absent.

        T = sum_{u in alloc(1)} delta[0] / b(in, u)
            + sum_j max_{u in alloc(j)} ( W_j / s_u + sum_{v in alloc(j+1)} delta[e_j] / b(u, v) )

    with alloc(p+1) = {out}. A transfer from a processor to itself costs nothing.
    """
    intervals = mapping.intervals

    total = 0.0
    for u in intervals[0].alloc:
        b = platform.bw(IN, u)
        if b is None:
            return math.inf
        total += pipeline.delta[0] / b

    for j, iv in enumerate(intervals):
        targets = intervals[j + 1].alloc if j + 1 < len(intervals) else (OUT,)
        volume = pipeline.delta[iv.e]
        work = pipeline.work(iv.d, iv.e)
        worst = 0.0
        for u in iv.alloc:
            cost = work / platform.by_id[u].speed
            for v in targets:
                if u == v:
                    continue
                b = platform.bw(u, v)
                if b is None:
                    return math.inf
                cost += volume / b
            worst = max(worst, cost)
        total += worst
    return total


def latency(pipeline: PipelineSpec, platform: PlatformSpec, mapping: Mapping) -> float:
    """Latency by the formula matching the platform's link class."""
    if platform.platform_class.links == HOMOGENEOUS:
        return latency_homogeneous_links(pipeline, platform, mapping)
    return latency_heterogeneous(pipeline, platform, mapping)


def evaluate(pipeline: PipelineSpec, platform: PlatformSpec, mapping: Mapping) -> Evaluation:
    """(latency, failure probability) of a validated mapping."""
    return Evaluation(
        latency=latency(pipeline, platform, mapping),
        failure_prob=failure_probability(mapping, platform),
    )
