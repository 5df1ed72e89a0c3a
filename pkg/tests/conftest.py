import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from platform_model import IN, OUT, Interval, Mapping, PipelineSpec, PlatformSpec, Processor  # noqa: E402

FAILURE_CHOICES = (0.05, 0.1, 0.2, 0.25, 0.5, 0.75)


# Two stages, two processors; each processor has one fast and one slow gateway link
@pytest.fixture
def split_pipeline():
    return PipelineSpec(w=(2, 2), delta=(100, 100, 100))


@pytest.fixture
def split_platform():
    return PlatformSpec(
        processors=(Processor("P1", 1, 0.1), Processor("P2", 1, 0.1)),
        bandwidth={
            (IN, "P1"): 100,
            ("P1", "P2"): 100,
            ("P2", OUT): 100,
            (IN, "P2"): 1,
            ("P1", OUT): 1,
        },
    )


@pytest.fixture
def split_mapping():
    return Mapping.one_to_one(("P1", "P2"))


# One slow reliable processor and ten fast unreliable ones on a unit-bandwidth clique
@pytest.fixture
def reliable_pipeline():
    return PipelineSpec(w=(1, 100), delta=(10, 1, 0))


@pytest.fixture
def fast_ids():
    return tuple(f"fast{i}" for i in range(1, 11))


@pytest.fixture
def reliable_platform(fast_ids):
    processors = [Processor("slow", 1, 0.1)]
    processors += [Processor(u, 100, 0.8) for u in fast_ids]
    return PlatformSpec.with_uniform_bandwidth(processors, 1)


@pytest.fixture
def reliable_mapping(fast_ids):
    return Mapping((Interval(1, 1, ("slow",)), Interval(2, 2, fast_ids)))


@pytest.fixture
def make_instance():
    """
    Factory for small random instances with integer costs.

    kind: "fully-hom" (one speed, one bandwidth), "comm-hom" (one bandwidth,
    one failure probability) or "hetero" (everything drawn per processor/link).
    """
    def factory(rng: np.random.Generator, kind: str, max_stages: int = 4, max_procs: int = 5):
        n = int(rng.integers(1, max_stages + 1))
        m = int(rng.integers(1, max_procs + 1))
        pipeline = PipelineSpec(
            w=tuple(int(x) for x in rng.integers(1, 10, n)),
            delta=tuple(int(x) for x in rng.integers(0, 10, n + 1)),
        )
        ids = [f"P{i}" for i in range(1, m + 1)]
        if kind == "fully-hom":
            speed = int(rng.integers(1, 5))
            processors = [Processor(u, speed, float(rng.choice(FAILURE_CHOICES))) for u in ids]
            return pipeline, PlatformSpec.with_uniform_bandwidth(processors, int(rng.integers(1, 5)))
        if kind == "comm-hom":
            f = float(rng.choice(FAILURE_CHOICES))
            processors = [Processor(u, int(rng.integers(1, 6)), f) for u in ids]
            return pipeline, PlatformSpec.with_uniform_bandwidth(processors, int(rng.integers(1, 5)))
        if kind == "hetero":
            processors = [
                Processor(u, int(rng.integers(1, 6)), float(rng.choice(FAILURE_CHOICES))) for u in ids
            ]
            uniform = PlatformSpec.with_uniform_bandwidth(processors, 1)
            links = {link: int(rng.integers(1, 8)) for link in sorted(uniform.bandwidth)}
            return pipeline, PlatformSpec(processors=tuple(processors), bandwidth=links)
        raise ValueError(f"unknown instance kind {kind!r}")

    return factory
