"""
General Latency - Latency-optimal general mappings on any platform
A layered DAG has one vertex per (stage, processor) pair; a source-to-sink
path picks a processor for every stage, and its weight is the latency.
The same processor may serve non-consecutive stages, so the result is a
general mapping, not necessarily an interval mapping.
"""
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from platform_model import IN, OUT, Interval, Mapping, PipelineSpec, PlatformSpec

Vertex = Tuple[int, str]  # (layer, processor id); layer 0 is the source, n+1 the sink


@dataclass
class LayeredGraph:
    """Stage-by-processor DAG with edges only from layer i to layer i+1"""
    n: int
    processors: Tuple[str, ...]
    adj: Dict[Vertex, List[Tuple[Vertex, float]]] = field(default_factory=lambda: defaultdict(list))

    @property
    def source(self) -> Vertex:
        return (0, IN)

    @property
    def sink(self) -> Vertex:
        return (self.n + 1, OUT)

    @property
    def vertex_count(self) -> int:
        return self.n * len(self.processors) + 2

    @property
    def edge_count(self) -> int:
        return sum(len(edges) for edges in self.adj.values())

    def add_edge(self, u: Vertex, v: Vertex, weight: float):
        self.adj[u].append((v, weight))

    def weight(self, u: Vertex, v: Vertex) -> Optional[float]:
        for target, w in self.adj.get(u, ()):
            if target == v:
                return w
        return None

    def layer(self, i: int) -> List[Vertex]:
        if i == 0:
            return [self.source]
        if i == self.n + 1:
            return [self.sink]
        return [(i, u) for u in self.processors]

    def dump(self) -> str:
        """One edge per line: layer, source processor, target processor, weight."""
        lines = []
        for i in range(self.n + 1):
            for u in self.layer(i):
                for (_, v), w in self.adj.get(u, ()):
                    lines.append(f"{i} {u[1]} {v} {w!r}")
        return "\n".join(lines) + "\n"

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dump(), encoding="utf-8")
        return path


@dataclass(frozen=True)
class GeneralMapping:
    """Stage -> processor assignment with its latency"""
    assignment: Tuple[str, ...]  # assignment[i-1] runs stage i
    latency: float

    def runs(self) -> List[Tuple[int, int, str]]:
        """Maximal runs of consecutive stages on one processor: (d, e, processor)."""
        runs = []
        for stage, u in enumerate(self.assignment, 1):
            if runs and runs[-1][2] == u:
                runs[-1] = (runs[-1][0], stage, u)
            else:
                runs.append((stage, stage, u))
        return runs

    @property
    def is_interval_mapping(self) -> bool:
        procs = [u for _, _, u in self.runs()]
        return len(procs) == len(set(procs))

    def to_mapping(self) -> Mapping:
        """The equivalent interval mapping (only when is_interval_mapping)."""
        if not self.is_interval_mapping:
            raise ValueError("A processor serves non-consecutive stages; not an interval mapping")
        return Mapping(tuple(Interval(d, e, (u,)) for d, e, u in self.runs()))

    def describe(self) -> str:
        return ", ".join(f"S{i}->{u}" for i, u in enumerate(self.assignment, 1))


def build_layered_graph(pipeline: PipelineSpec, platform: PlatformSpec) -> LayeredGraph:
    """
    Edge weights:
      source -> V(1,v):    delta_0 / b(in, v)
      V(i,u) -> V(i+1,v):  w_i / s_u + delta_i / b(u, v), no transfer term when u == v
      V(n,u) -> sink:      w_n / s_u + delta_n / b(u, out)
    Absent links give absent edges.
    """
    n = pipeline.n
    ids = platform.ids
    graph = LayeredGraph(n=n, processors=ids)

    for v in ids:
        b = platform.bw(IN, v)
        if b is not None:
            graph.add_edge(graph.source, (1, v), pipeline.delta[0] / b)

    for i in range(1, n):
        for u in ids:
            compute = pipeline.w[i - 1] / platform.by_id[u].speed
            for v in ids:
                if u == v:
                    graph.add_edge((i, u), (i + 1, v), compute)
                    continue
                b = platform.bw(u, v)
                if b is not None:
                    graph.add_edge((i, u), (i + 1, v), compute + pipeline.delta[i] / b)

    for u in ids:
        b = platform.bw(u, OUT)
        if b is not None:
            compute = pipeline.w[n - 1] / platform.by_id[u].speed
            graph.add_edge((n, u), graph.sink, compute + pipeline.delta[n] / b)
    return graph


def shortest_path(graph: LayeredGraph) -> Tuple[float, List[Vertex]]:
    """
    Forward relaxation in layer order. Equal distances keep the first
    predecessor relaxed, i.e. the one with the smaller processor id.
    Returns (inf, []) when the sink is unreachable.
    """
    dist: Dict[Vertex, float] = {graph.source: 0.0}
    pred: Dict[Vertex, Vertex] = {}
    for i in range(graph.n + 1):
        for u in graph.layer(i):
            if u not in dist:
                continue
            for v, w in graph.adj.get(u, ()):
                candidate = dist[u] + w
                if candidate < dist.get(v, math.inf):
                    dist[v] = candidate
                    pred[v] = u

    if graph.sink not in dist:
        return math.inf, []
    path = [graph.sink]
    while path[-1] != graph.source:
        path.append(pred[path[-1]])
    path.reverse()
    return dist[graph.sink], path


def min_latency_general(pipeline: PipelineSpec, platform: PlatformSpec) -> Optional[GeneralMapping]:
    """Latency-optimal general mapping; None when no path reaches the output."""
    graph = build_layered_graph(pipeline, platform)
    total, path = shortest_path(graph)
    if not path:
        return None
    return GeneralMapping(assignment=tuple(u for _, u in path[1:-1]), latency=total)


def path_latency(pipeline: PipelineSpec, platform: PlatformSpec, assignment: Tuple[str, ...]) -> float:
    """Latency of a general mapping, summing edge weights along its path."""
    graph = build_layered_graph(pipeline, platform)
    path = [graph.source, *((i, u) for i, u in enumerate(assignment, 1)), graph.sink]
    total = 0.0
    for u, v in zip(path, path[1:]):
        w = graph.weight(u, v)
        if w is None:
            return math.inf
        total += w
    return total
