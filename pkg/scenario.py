"""
Scenario Files - JSON scenario format for pipelines, platforms and mappings

    {
      "name": "optional label",
      "pipeline": {"w": [1, 100], "delta": [10, 1, 0]},
      "platform": {
        "processors": [{"id": "P1", "speed": 1, "failure_prob": 0.1}, ...],
        "bandwidth": 1                      # scalar: full clique + gateways
                   | {"in->P1": 100, "P1->P2": 100, "P2->out": 100, ...}
      },
      "mapping": {"intervals": [{"from": 1, "to": 1, "procs": ["P1"]}, ...]},
      "thresholds": {"max_latency": 22, "max_failure_prob": 0.2},
      "limits": {"max_processors": 11, "max_intervals": 2}
    }

Only `pipeline` and `platform` are required. Links missing from a
bandwidth table are unusable.
"""
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from config import EnumLimits
from platform_model import (
    IN,
    OUT,
    Interval,
    Mapping,
    PipelineSpec,
    PlatformSpec,
    Processor,
    id_key,
)

ARROW = "->"


class ScenarioError(ValueError):
    """A scenario file that cannot be turned into an instance"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.line = line
        self.column = column


class PipelineFile(BaseModel):
    model_config = ConfigDict(extra="forbid")
    w: List[float] = Field(min_length=1)
    delta: List[float]

    @model_validator(mode="after")
    def delta_has_n_plus_one_entries(self):
        if len(self.delta) != len(self.w) + 1:
            raise ValueError(
                f"delta must have n+1 = {len(self.w) + 1} entries (got {len(self.delta)})"
            )
        return self


class ProcessorFile(BaseModel):
    model_config = ConfigDict(extra="forbid")
    id: str
    speed: float = Field(gt=0)
    failure_prob: float = Field(ge=0, le=1)


class PlatformFile(BaseModel):
    model_config = ConfigDict(extra="forbid")
    processors: List[ProcessorFile] = Field(min_length=1)
    bandwidth: Union[float, Dict[str, float]]


class IntervalFile(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)
    from_: int = Field(alias="from")
    to: int
    procs: List[str]


class MappingFile(BaseModel):
    model_config = ConfigDict(extra="forbid")
    intervals: List[IntervalFile]


class ThresholdsFile(BaseModel):
    model_config = ConfigDict(extra="forbid")
    max_latency: Optional[float] = Field(default=None, ge=0)
    max_failure_prob: Optional[float] = Field(default=None, ge=0)


class ScenarioFile(BaseModel):
    model_config = ConfigDict(extra="forbid")
    name: Optional[str] = None
    pipeline: PipelineFile
    platform: PlatformFile
    mapping: Optional[MappingFile] = None
    thresholds: Optional[ThresholdsFile] = None
    limits: Optional[EnumLimits] = None


@dataclass(frozen=True)
class Thresholds:
    max_latency: Optional[float] = None
    max_failure_prob: Optional[float] = None


@dataclass(frozen=True)
class Scenario:
    """A problem instance, optionally with a mapping to evaluate"""
    pipeline: PipelineSpec
    platform: PlatformSpec
    mapping: Optional[Mapping] = None
    thresholds: Thresholds = Thresholds()
    limits: Optional[EnumLimits] = None
    name: Optional[str] = None


def parse_link(key: str) -> tuple:
    """'P1->P2' -> ('P1', 'P2')"""
    parts = key.split(ARROW)
    if len(parts) != 2 or not all(part.strip() for part in parts):
        raise ValueError(f"bandwidth key {key!r} is not of the form 'A->B'")
    return parts[0].strip(), parts[1].strip()


def _build(data: ScenarioFile) -> Scenario:
    pipeline = PipelineSpec(w=tuple(data.pipeline.w), delta=tuple(data.pipeline.delta))
    processors = [Processor(p.id, p.speed, p.failure_prob) for p in data.platform.processors]

    if isinstance(data.platform.bandwidth, dict):
        links = {parse_link(key): value for key, value in data.platform.bandwidth.items()}
        platform = PlatformSpec(processors=tuple(processors), bandwidth=links)
    else:
        platform = PlatformSpec.with_uniform_bandwidth(processors, data.platform.bandwidth)

    mapping = None
    if data.mapping is not None:
        mapping = Mapping(tuple(
            Interval(iv.from_, iv.to, tuple(iv.procs)) for iv in data.mapping.intervals
        ))

    thresholds = Thresholds()
    if data.thresholds is not None:
        thresholds = Thresholds(data.thresholds.max_latency, data.thresholds.max_failure_prob)

    return Scenario(
        pipeline=pipeline,
        platform=platform,
        mapping=mapping,
        thresholds=thresholds,
        limits=data.limits,
        name=data.name,
    )


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    """
    Parse a scenario document.

    Raises ScenarioError with line/column for syntax errors and with the
    offending field path for schema errors. Mapping semantics are not
    checked here (see platform_model.validate_mapping).
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{source}:{e.lineno}:{e.colno}: {e.msg}", e.lineno, e.colno) from e

    try:
        data = ScenarioFile.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "(document)"
        raise ScenarioError(f"{source}: {where}: {first['msg']}") from e

    try:
        return _build(data)
    except ValueError as e:
        raise ScenarioError(f"{source}: {e}") from e


def load_scenario(path: Path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), source=str(path))


def _endpoint_key(proc_id: str) -> tuple:
    if proc_id == IN:
        return (0, ())
    if proc_id == OUT:
        return (2, ())
    return (1, id_key(proc_id))


def _link_order(link: tuple) -> tuple:
    return tuple(_endpoint_key(end) for end in link)


def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    platform = scenario.platform
    if platform.is_uniform_clique():
        bandwidth: Union[float, Dict[str, float]] = platform.common_bandwidth
    else:
        bandwidth = {
            f"{u}{ARROW}{v}": platform.bandwidth[(u, v)]
            for u, v in sorted(platform.bandwidth, key=_link_order)
        }

    doc: Dict[str, Any] = {}
    if scenario.name is not None:
        doc["name"] = scenario.name
    doc["pipeline"] = {"w": list(scenario.pipeline.w), "delta": list(scenario.pipeline.delta)}
    doc["platform"] = {
        "processors": [
            {"id": p.id, "speed": p.speed, "failure_prob": p.failure_prob}
            for p in platform.processors
        ],
        "bandwidth": bandwidth,
    }
    if scenario.mapping is not None:
        doc["mapping"] = {
            "intervals": [
                {"from": iv.d, "to": iv.e, "procs": list(iv.alloc)}
                for iv in scenario.mapping.intervals
            ]
        }
    thresholds = {
        key: value
        for key, value in (
            ("max_latency", scenario.thresholds.max_latency),
            ("max_failure_prob", scenario.thresholds.max_failure_prob),
        )
        if value is not None
    }
    if thresholds:
        doc["thresholds"] = thresholds
    if scenario.limits is not None:
        doc["limits"] = scenario.limits.model_dump(exclude_none=True)
    return doc


def serialize_scenario(scenario: Scenario) -> str:
    """Scenario back to the file format; parse_scenario reads it back unchanged."""
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


def save_scenario(scenario: Scenario, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_scenario(scenario), encoding="utf-8")
    return path
