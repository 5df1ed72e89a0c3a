"""
Pipeline Mapper - Configuration
"""
from pathlib import Path
from pydantic import BaseModel, PositiveInt, PositiveFloat
from typing import Optional

# Paths
PROJECT_ROOT = Path(__file__).parent
SCENARIO_DIR = PROJECT_ROOT / "scenarios"


class EnumLimits(BaseModel):
    """Size guard for the exhaustive oracle"""
    max_stages: PositiveInt = 6
    max_processors: PositiveInt = 7
    max_candidates: PositiveInt = 10**7  # enumerated mappings, hard cap
    max_intervals: Optional[PositiveInt] = None  # None = bounded by m only


class ToleranceConfig(BaseModel):
    """Threshold comparisons: value <= bound + epsilon * |bound|"""
    epsilon: PositiveFloat = 1e-9


class SimulationConfig(BaseModel):
    """Monte Carlo failure sampling"""
    trials: PositiveInt = 100_000
    seed: int = 0
    chunk_size: PositiveInt = 50_000  # trials per independent stream


class ReportConfig(BaseModel):
    """Report and CSV formatting"""
    significant_digits: PositiveInt = 12
    console_width: PositiveInt = 100  # fixed so reports are byte-stable


# Default configs
DEFAULT_ENUM_LIMITS = EnumLimits()
DEFAULT_TOLERANCE = ToleranceConfig()
DEFAULT_SIMULATION_CONFIG = SimulationConfig()
DEFAULT_REPORT_CONFIG = ReportConfig()


def within(value: float, bound: float, epsilon: float = DEFAULT_TOLERANCE.epsilon) -> bool:
    """True when value <= bound up to a relative tolerance."""
    return value <= bound + epsilon * abs(bound)


def fmt(value: float, digits: int = DEFAULT_REPORT_CONFIG.significant_digits) -> str:
    """Format a number with a fixed count of significant digits."""
    return format(value, f".{digits}g")
