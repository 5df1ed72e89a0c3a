import math

import numpy as np
import pytest

from exact_oracle import enumerate_interval_mappings
from metrics import (
    evaluate,
    failure_probability,
    latency,
    latency_heterogeneous,
    latency_homogeneous_links,
    replica_failure,
)
from platform_model import Interval, Mapping, PlatformSpec, Processor


class TestFailureProbability:
    def test_two_interval_reliable_split(self, reliable_platform, reliable_mapping):
        fp = failure_probability(reliable_mapping, reliable_platform)
        assert fp == pytest.approx(1 - 0.9 * (1 - 0.8 ** 10), rel=1e-9)
        assert fp == pytest.approx(0.19663676416, rel=1e-9)

    def test_single_interval_on_two_fast(self, reliable_platform):
        mapping = Mapping.single(2, ("fast1", "fast2"))
        assert failure_probability(mapping, reliable_platform) == pytest.approx(0.64, rel=1e-9)

    def test_perfect_replica_masks_interval(self):
        platform = PlatformSpec.with_uniform_bandwidth(
            [Processor("P1", 1, 0.0), Processor("P2", 1, 0.9)], 1
        )
        assert failure_probability(Mapping.single(1, ("P1", "P2")), platform) == 0.0

    def test_certain_failure(self):
        platform = PlatformSpec.with_uniform_bandwidth(
            [Processor("P1", 1, 1.0), Processor("P2", 1, 0.0)], 1
        )
        mapping = Mapping((Interval(1, 1, ("P1",)), Interval(2, 2, ("P2",))))
        assert failure_probability(mapping, platform) == 1.0

    def test_replica_product_ignores_order(self):
        probs = [0.3, 0.7, 0.11, 0.9, 0.05]
        assert replica_failure(probs) == replica_failure(reversed(probs))
        assert replica_failure(probs) == pytest.approx(np.prod(probs), rel=1e-12)

    def test_more_replicas_never_hurt(self, reliable_platform, fast_ids):
        values = [
            failure_probability(Mapping.single(2, fast_ids[:k]), reliable_platform)
            for k in range(1, len(fast_ids) + 1)
        ]
        assert values == sorted(values, reverse=True)
        assert all(0 <= v <= 1 for v in values)


class TestLatency:
    def test_single_processor_mappings_cost_105(self, split_pipeline, split_platform):
        for u in ("P1", "P2"):
            assert latency(split_pipeline, split_platform, Mapping.single(2, (u,))) == pytest.approx(105)

    def test_split_mapping_costs_7(self, split_pipeline, split_platform, split_mapping):
        assert latency_heterogeneous(split_pipeline, split_platform, split_mapping) == pytest.approx(7)

    def test_missing_link_is_infinite(self, split_pipeline, split_platform):
        backwards = Mapping.one_to_one(("P2", "P1"))
        assert math.isinf(latency_heterogeneous(split_pipeline, split_platform, backwards))

    def test_replicated_input_is_serialized(self, reliable_pipeline, reliable_platform, reliable_mapping):
        # 10 + 1 for the slow stage, 10 * 1 + 100 / 100 for the replicated one, no output data
        value = latency_homogeneous_links(reliable_pipeline, reliable_platform, reliable_mapping)
        assert value == pytest.approx(22, rel=1e-9)

    def test_slowest_replica_paces_the_interval(self, reliable_pipeline, reliable_platform):
        mapping = Mapping.single(2, ("slow", "fast1"))
        # 2 * 10 input transfers, 101 work units at speed 1
        assert latency(reliable_pipeline, reliable_platform, mapping) == pytest.approx(121)

    def test_homogeneous_formula_needs_identical_links(self, split_pipeline, split_platform, split_mapping):
        with pytest.raises(ValueError):
            latency_homogeneous_links(split_pipeline, split_platform, split_mapping)

    def test_dispatch_by_link_class(self, reliable_pipeline, reliable_platform):
        mapping = Mapping.single(2, ("fast1", "fast2"))
        evaluation = evaluate(reliable_pipeline, reliable_platform, mapping)
        assert evaluation.latency == pytest.approx(21.01, rel=1e-9)
        assert evaluation.failure_prob == pytest.approx(0.64, rel=1e-9)

    def test_both_formulas_agree_without_replication(self, make_instance):
        rng = np.random.default_rng(7)
        for _ in range(30):
            pipeline, platform = make_instance(rng, "comm-hom", max_stages=3, max_procs=3)
            for mapping in enumerate_interval_mappings(pipeline, platform):
                if any(iv.k > 1 for iv in mapping.intervals):
                    continue
                assert latency_heterogeneous(pipeline, platform, mapping) == pytest.approx(
                    latency_homogeneous_links(pipeline, platform, mapping), rel=1e-9
                )
