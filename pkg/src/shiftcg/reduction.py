"""Score-driven graph reduction and training-data extraction.

The reducer keeps the top tau percent of edges by externally supplied scores
while unconditionally preserving each request's depot-pickup-dropoff-depot
arcs, so every request stays individually servable on the reduced graph.

Label extraction turns a recorded solve trace into per-edge binary labels
under five nested classes: all generated routes, routes actually used by
any master solution, and the top 80/50/30 percent of used edges by how many
master solves used them.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .graph import DEST_DEPOT, DROPOFF, ORIGIN_DEPOT, PICKUP, RoutingGraph
from .instance import Instance
from .master import EPS_INT

LABEL_CLASSES = ("a", "u", "u80", "u50", "u30")

Edge = tuple[int, int]


class ReductionError(ValueError):
    pass


def load_scores(path: str | Path) -> dict[Edge, float]:
    scores: dict[Edge, float] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["i", "j", "score"]:
            raise ReductionError(f"{path}: expected header 'i,j,score'")
        for row in reader:
            if not row:
                continue
            scores[(int(row[0]), int(row[1]))] = float(row[2])
    return scores


def save_scores(scores: dict[Edge, float], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "score"])
        for (i, j) in sorted(scores):
            writer.writerow([i, j, repr(scores[(i, j)])])


def reduce_graph(graph: RoutingGraph, scores: dict[Edge, float], tau: float) -> RoutingGraph:
    """Keep the ceil(tau percent) best-scored edges plus all mandatory edges."""
    if not 0.0 <= tau <= 100.0:
        raise ReductionError(f"tau must lie in [0, 100], got {tau}")
    universe = set(graph.edges)
    missing = universe - set(scores)
    if missing:
        raise ReductionError(
            f"score map is missing {len(missing)} edges, e.g. {sorted(missing)[:3]}"
        )
    extra = set(scores) - universe
    if extra:
        raise ReductionError(
            f"score map has {len(extra)} edges outside the graph, e.g. {sorted(extra)[:3]}"
        )
    bad = {e: p for e, p in scores.items() if not 0.0 <= p <= 1.0}
    if bad:
        raise ReductionError(f"scores outside [0, 1] for {len(bad)} edges")

    keep_count = math.ceil(tau * len(universe) / 100.0)
    ranked = sorted(universe, key=lambda e: (-scores[e], e))
    kept = set(ranked[:keep_count]) | graph.mandatory_edges()
    return graph.with_edges({e: graph.edges[e] for e in kept})


@dataclass(frozen=True)
class EdgeLabelSet:
    a: frozenset[Edge]
    u: frozenset[Edge]
    u80: frozenset[Edge]
    u50: frozenset[Edge]
    u30: frozenset[Edge]
    usage_counts: dict[Edge, int]

    def for_class(self, label_class: str) -> frozenset[Edge]:
        key = label_class.lower().replace("-", "")
        if key not in LABEL_CLASSES:
            raise ValueError(f"unknown label class {label_class!r}; pick from {LABEL_CLASSES}")
        return getattr(self, key)


def _column_edges(stops: list[int]) -> list[Edge]:
    return list(zip(stops, stops[1:]))


def compute_label_sets(trace: dict) -> EdgeLabelSet:
    """Derive every label class from a recorded solve trace."""
    if not trace.get("columns"):
        raise ReductionError("trace holds no columns; was the solve recorded?")
    edges_by_column: dict[int, list[Edge]] = {
        int(c["id"]): _column_edges([int(s) for s in c["stops"]]) for c in trace["columns"]
    }

    all_edges: set[Edge] = set()
    for edges in edges_by_column.values():
        all_edges.update(edges)

    used_edges: set[Edge] = set()
    usage: dict[Edge, int] = {}
    for solve in trace.get("solves", []):
        in_this_solve: set[Edge] = set()
        for cid_str, value in solve.items():
            if float(value) > EPS_INT:
                in_this_solve.update(edges_by_column[int(cid_str)])
        used_edges.update(in_this_solve)
        for e in in_this_solve:
            usage[e] = usage.get(e, 0) + 1

    ranked = sorted(used_edges, key=lambda e: (-usage[e], e))

    def top(percent: int) -> frozenset[Edge]:
        return frozenset(ranked[: math.ceil(percent * len(ranked) / 100.0)])

    return EdgeLabelSet(
        a=frozenset(all_edges),
        u=frozenset(used_edges),
        u80=top(80),
        u50=top(50),
        u30=top(30),
        usage_counts=usage,
    )


def extract_labels(trace: dict, label_class: str) -> frozenset[Edge]:
    return compute_label_sets(trace).for_class(label_class)


def _scale(values: list[float]) -> list[float]:
    lo, hi = min(values), max(values)
    if hi <= lo:
        return [0.0 for _ in values]  # degenerate range maps to 0
    return [(v - lo) / (hi - lo) for v in values]


NODE_FEATURE_NAMES = (
    "lat",
    "lon",
    "window_open",
    "window_close",
    "is_pickup",
    "is_dropoff",
    "is_depot",
)
EDGE_FEATURE_NAMES = ("travel_time", "same_trip")


def export_training_sample(
    instance: Instance,
    graph: RoutingGraph,
    labels: frozenset[Edge] | None = None,
) -> dict:
    """Sample payload for the edge-score trainer; continuous features are
    min-max scaled to [0, 1] within this instance."""
    from .graph import node_positions

    pos = node_positions(instance)
    lats = _scale([p[0] for p in pos])
    lons = _scale([p[1] for p in pos])
    opens = _scale([float(nd.window[0]) for nd in graph.nodes])
    closes = _scale([float(nd.window[1]) for nd in graph.nodes])

    node_features = []
    for nd in graph.nodes:
        one_hot = [
            1.0 if nd.kind == PICKUP else 0.0,
            1.0 if nd.kind == DROPOFF else 0.0,
            1.0 if nd.kind in (ORIGIN_DEPOT, DEST_DEPOT) else 0.0,
        ]
        node_features.append(
            [lats[nd.index], lons[nd.index], opens[nd.index], closes[nd.index], *one_hot]
        )

    edge_list = sorted(graph.edges)
    times = _scale([float(graph.edges[e]) for e in edge_list])
    n = graph.n
    edge_features = []
    for k, (i, j) in enumerate(edge_list):
        same_trip = 1.0 if 1 <= i <= n and j == i + n else 0.0
        edge_features.append([times[k], same_trip])

    sample = {
        "format_version": 1,
        "n_requests": n,
        "node_feature_names": list(NODE_FEATURE_NAMES),
        "edge_feature_names": list(EDGE_FEATURE_NAMES),
        "node_features": node_features,
        "edges": [list(e) for e in edge_list],
        "edge_features": edge_features,
    }
    if labels is not None:
        sample["labels"] = [1 if e in labels else 0 for e in edge_list]
    return sample
