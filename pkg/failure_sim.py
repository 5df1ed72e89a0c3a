"""
Failure Simulator - Monte Carlo check of the analytic failure probability
Each trial draws one independent fail/survive outcome per processor for the
whole run; the run fails when some interval has lost every replica.

Randomness: numpy PCG64 generators. The trials are cut into chunks of
`chunk_size`; chunk c draws from SeedSequence(seed).spawn(...)[c], so
every chunk is an independent stream and the estimate depends only on
(mapping, platform, trials, seed, chunk_size).
"""
import math
from dataclasses import dataclass
from typing import List

import numpy as np
from rich.console import Console
from rich.progress import track

from config import DEFAULT_SIMULATION_CONFIG
from platform_model import Mapping, PlatformSpec

console = Console(stderr=True)


@dataclass(frozen=True)
class SimulationResult:
    """Observed failure frequency over independent trials"""
    estimate: float
    stderr: float
    trials: int
    failures: int
    seed: int

    def z_score(self, analytic: float) -> float:
        """Deviation from the analytic value in standard errors."""
        gap = self.estimate - analytic
        if self.stderr == 0:
            return 0.0 if gap == 0 else math.copysign(math.inf, gap)
        return gap / self.stderr


def _chunk_sizes(trials: int, chunk_size: int) -> List[int]:
    full, rest = divmod(trials, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _count_failures(
    rng: np.random.Generator,
    size: int,
    fail_probs: np.ndarray,
    groups: List[np.ndarray],
) -> int:
    # random() is in [0, 1): f = 1 always fails, f = 0 never does
    failed = rng.random((size, len(fail_probs))) < fail_probs
    app_failed = np.zeros(size, dtype=bool)
    for cols in groups:
        app_failed |= failed[:, cols].all(axis=1)
    return int(app_failed.sum())


def simulate_failure_probability(
    mapping: Mapping,
    platform: PlatformSpec,
    trials: int = DEFAULT_SIMULATION_CONFIG.trials,
    seed: int = DEFAULT_SIMULATION_CONFIG.seed,
    chunk_size: int = DEFAULT_SIMULATION_CONFIG.chunk_size,
    show_progress: bool = False,
) -> SimulationResult:
    """Estimate the failure probability of a validated mapping by sampling."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1 (got {trials})")
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1 (got {chunk_size})")

    used = list(mapping.used_processors)
    column = {u: c for c, u in enumerate(used)}
    fail_probs = np.array([platform.by_id[u].failure_prob for u in used])
    groups = [np.array([column[u] for u in iv.alloc]) for iv in mapping.intervals]

    sizes = _chunk_sizes(trials, chunk_size)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    chunks = zip(sizes, streams)
    if show_progress:
        chunks = track(list(chunks), description="Sampling failures...", transient=True, console=console)

    failures = sum(
        _count_failures(np.random.default_rng(stream), size, fail_probs, groups)
        for size, stream in chunks
    )
    estimate = failures / trials
    return SimulationResult(
        estimate=estimate,
        stderr=math.sqrt(estimate * (1 - estimate) / trials),
        trials=trials,
        failures=failures,
        seed=seed,
    )
