"""Empirical weighted variable-interaction graph.

Edge weights are running means of the positive pairwise-probe observations
recorded during search.  Vertices are 0-based here; serialized files use
1-based indices.
"""

from __future__ import annotations

import json

from .core import EPS, RNG_ALGORITHM, TOOL_VERSION
from .serialize import canonical_dumps

import numpy as np


class EdgeStat:
    """Mean of the observations recorded for one edge."""

    __slots__ = ("total", "count")

    def __init__(self, total=0.0, count=0):
        self.total = total
        self.count = count

    @property
    def weight(self):
        return self.total / self.count

    def __repr__(self):
        return f"EdgeStat(total={self.total!r}, count={self.count})"


class EmpiricalVigw:
    """Sparse symmetric weighted graph over n_vertices variables."""

    def __init__(self, n_vertices):
        self.n_vertices = n_vertices
        self.edges = {}  # (u, v) with u < v -> EdgeStat
        self.adj = [dict() for _ in range(n_vertices)]  # vertex -> {other: EdgeStat}

    def record_interaction(self, g, h, value):
        """Fold one positive observation into edge (g, h)'s running mean."""
        if g == h:
            raise ValueError("self-loops are not allowed")
        if value <= EPS:
            raise ValueError(f"observation must exceed {EPS}, got {value}")
        key = (g, h) if g < h else (h, g)
        stat = self.edges.get(key)
        if stat is None:
            stat = EdgeStat()
            self.edges[key] = stat
            self.adj[g][h] = stat
            self.adj[h][g] = stat
        stat.total += value
        stat.count += 1

    def edge(self, g, h):
        """EdgeStat for (g, h) in either order, or None."""
        key = (g, h) if g < h else (h, g)
        return self.edges.get(key)

    def neighbors_sorted(self, i):
        """Neighbors of vertex i as (vertex, weight), ascending by weight,
        ties by vertex index."""
        if not 0 <= i < self.n_vertices:
            raise ValueError(f"vertex {i} out of range")
        items = [(v, stat.weight) for v, stat in self.adj[i].items()]
        items.sort(key=lambda t: (t[1], t[0]))
        return items

    def edge_set(self):
        return set(self.edges.keys())

    def coverage(self, truth):
        """Fraction of the reference edge set present in this graph."""
        truth = {tuple(sorted(e)) for e in truth}
        if not truth:
            raise ValueError("reference edge set is empty")
        return len(self.edge_set() & truth) / len(truth)

    def sorted_edges(self):
        return sorted(self.edges.items())

    def to_json(self, extra=None):
        doc = {
            "format": "vigw",
            "version": 1,
            "tool_version": TOOL_VERSION,
            "rng_algorithm": RNG_ALGORITHM,
            "n_vertices": self.n_vertices,
            "edges": [
                {
                    "u": u + 1,
                    "v": v + 1,
                    "weight": stat.weight,
                    "sum": stat.total,
                    "count": stat.count,
                }
                for (u, v), stat in self.sorted_edges()
            ],
        }
        if extra:
            doc.update(extra)
        return canonical_dumps(doc)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        if doc.get("format") != "vigw":
            raise ValueError("not a vigw document")
        g = cls(doc["n_vertices"])
        for e in doc["edges"]:
            u, v = e["u"] - 1, e["v"] - 1
            stat = EdgeStat(total=e["sum"], count=e["count"])
            key = (u, v) if u < v else (v, u)
            g.edges[key] = stat
            g.adj[u][v] = stat
            g.adj[v][u] = stat
        return g


def threshold_computation(weights):
    """Box-plot outlier bound over an ascending weight sample.

    For n >= 4 this is the upper Tukey fence Q3 + 1.5*(Q3 - Q1) with
    quartiles by linear interpolation; smaller samples fall back to the
    maximum, so only the strongest neighbor passes.
    """
    if len(weights) == 0:
        raise ValueError("weight sample is empty")
    if len(weights) < 4:
        return float(max(weights))
    q1, q3 = np.quantile(np.asarray(weights, dtype=float), [0.25, 0.75])
    return float(q3 + 1.5 * (q3 - q1))


def _scaled_widths(stats, lo=1.0, hi=5.0):
    weights = [s.weight for s in stats]
    wmin, wmax = min(weights), max(weights)
    if wmax - wmin < 1e-15:
        return [lo for _ in weights]
    return [lo + (hi - lo) * (w - wmin) / (wmax - wmin) for w in weights]


def top_edges(graph):
    """Edges whose weight strictly exceeds the Tukey fence over all edge
    weights; the single strongest edge always survives."""
    items = graph.sorted_edges()
    if not items:
        return []
    weights = sorted(stat.weight for _, stat in items)
    beta = threshold_computation(weights)
    strongest = max(items, key=lambda kv: (kv[1].weight, kv[0]))
    kept = [(key, stat) for key, stat in items if stat.weight > beta]
    if not kept:
        kept = [strongest]
    return kept


def export_graph(graph, fmt, annotations=None, top_edges_only=False):
    """Serialize the graph as 'dot', 'graphml' or 'json' text.

    annotations maps 0-based vertex -> {"label": str, "size": float}; DOT pen
    widths scale linearly with edge weight over the exported edges.
    """
    annotations = annotations or {}
    items = top_edges(graph) if top_edges_only else graph.sorted_edges()

    if fmt == "json":
        if top_edges_only:
            sub = EmpiricalVigw(graph.n_vertices)
            for (u, v), stat in items:
                sub.edges[(u, v)] = stat
                sub.adj[u][v] = stat
                sub.adj[v][u] = stat
            return sub.to_json()
        return graph.to_json()

    if fmt == "dot":
        widths = _scaled_widths([s for _, s in items]) if items else []
        lines = ["graph vigw {"]
        for i in range(graph.n_vertices):
            ann = annotations.get(i, {})
            attrs = [f'label="{ann.get("label", f"x{i + 1}")}"']
            if "size" in ann:
                attrs.append(f'width={ann["size"]:.4f}')
            lines.append(f'  {i + 1} [{", ".join(attrs)}];')
        for ((u, v), stat), pw in zip(items, widths):
            lines.append(
                f"  {u + 1} -- {v + 1} "
                f'[weight="{stat.weight:.6g}", count={stat.count}, penwidth={pw:.3f}];'
            )
        lines.append("}")
        return "\n".join(lines) + "\n"

    if fmt == "graphml":
        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
            '  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>',
            '  <key id="count" for="edge" attr.name="count" attr.type="int"/>',
            '  <key id="label" for="node" attr.name="label" attr.type="string"/>',
            '  <graph id="vigw" edgedefault="undirected">',
        ]
        for i in range(graph.n_vertices):
            label = annotations.get(i, {}).get("label", f"x{i + 1}")
            lines.append(f'    <node id="n{i + 1}">')
            lines.append(f'      <data key="label">{label}</data>')
            lines.append("    </node>")
        for (u, v), stat in items:
            lines.append(f'    <edge source="n{u + 1}" target="n{v + 1}">')
            lines.append(f'      <data key="weight">{stat.weight:.12g}</data>')
            lines.append(f'      <data key="count">{stat.count}</data>')
            lines.append("    </edge>")
        lines.append("  </graph>")
        lines.append("</graphml>")
        return "\n".join(lines) + "\n"

    raise ValueError(f"unknown export format: {fmt!r}")
