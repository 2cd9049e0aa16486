"""Connectivity and enhanced-distinguishability graphs of an interferometer.

The connectivity graph is bipartite: a solid vertex per input port, a dashed
vertex per output port, and an edge (solid j, dashed i) whenever the
amplitude ``U[i, j]`` is nonzero. Lifting every solid-dashed-solid path to a
solid-solid edge gives the minor; keeping only occupied inputs, relabelled
by photon, gives the enhanced-distinguishability graph.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import networkx as nx
import numpy as np

from .engine import ScatteringMatrix, input_config
from .errors import ValidationError

ZERO_THRESHOLD = 1e-12


@dataclass(frozen=True)
class ConnectivityGraph:
    m: int
    edges: frozenset  # of (solid input, dashed output), 1-based

    @classmethod
    def from_edges(cls, m: int, edges) -> "ConnectivityGraph":
        es = frozenset((int(a), int(b)) for a, b in edges)
        for a, b in es:
            if not (1 <= a <= m and 1 <= b <= m):
                raise ValidationError(f"edge {(a, b)} outside 1..{m}")
        return cls(m, es)

    def outputs_of(self, solid: int) -> frozenset:
        return frozenset(d for s, d in self.edges if s == solid)

    def restrict_outputs(self, keep: Sequence[int]) -> "ConnectivityGraph":
        """Delete the dashed vertices not listed in ``keep`` (their edges go too)."""
        keep = set(keep)
        return ConnectivityGraph(self.m, frozenset(e for e in self.edges if e[1] in keep))

    def to_json(self) -> dict:
        return {"m": self.m, "edges": [list(e) for e in sorted(self.edges)]}


@dataclass(frozen=True)
class EDGraph:
    """Simple undirected graph on vertices ``1..n`` (solids of a minor, or photons)."""

    n: int
    edges: frozenset  # of (i, j) with i < j

    @classmethod
    def from_edges(cls, n: int, edges) -> "EDGraph":
        es = set()
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValidationError(f"self-loop at vertex {a}")
            if not (1 <= a <= n and 1 <= b <= n):
                raise ValidationError(f"edge {(a, b)} outside 1..{n}")
            es.add((min(a, b), max(a, b)))
        return cls(n, frozenset(es))

    def neighbours(self, x: int) -> list:
        return sorted({b for a, b in self.edges if a == x} | {a for a, b in self.edges if b == x})

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(1, self.n + 1))
        g.add_edges_from(self.edges)
        return g

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}


def connectivity_graph(U, threshold: float = ZERO_THRESHOLD) -> ConnectivityGraph:
    """Accepts a certified unitary or any square matrix (e.g. a non-unitary pattern)."""
    A = U.entries if isinstance(U, ScatteringMatrix) else np.asarray(U, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"need a square matrix, got shape {A.shape}")
    rows, cols = np.nonzero(np.abs(A) > threshold)
    return ConnectivityGraph(A.shape[0], frozenset(zip((cols + 1).tolist(), (rows + 1).tolist())))


def minor_graph(gc: ConnectivityGraph) -> EDGraph:
    by_output: dict = {}
    for s, d in gc.edges:
        by_output.setdefault(d, set()).add(s)
    edges = set()
    for solids in by_output.values():
        ss = sorted(solids)
        edges.update((a, b) for i, a in enumerate(ss) for b in ss[i + 1:])
    return EDGraph(gc.m, frozenset(edges))


def enhanced_graph(gmc: EDGraph, v: Sequence[int]) -> EDGraph:
    v = input_config(v, gmc.n)
    photon_of = {port: i for i, port in enumerate(v, start=1)}
    edges = {(photon_of[a], photon_of[b]) for a, b in gmc.edges if a in photon_of and b in photon_of}
    return EDGraph.from_edges(len(v), edges)


def enhanced_graph_of(U, v: Sequence[int], threshold: float = ZERO_THRESHOLD) -> EDGraph:
    return enhanced_graph(minor_graph(connectivity_graph(U, threshold)), v)


def output_sets(gc: ConnectivityGraph, v: Sequence[int]) -> dict:
    """``O_{i,j}``: dashed vertices adjacent to both ``v_i`` and ``v_j``, per interfering pair."""
    v = input_config(v, gc.m)
    reach = [gc.outputs_of(p) for p in v]
    out = {}
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            shared = reach[i] & reach[j]
            if shared:
                out[(i + 1, j + 1)] = frozenset(shared)
    return out


def _canonical_cycle(cyc: Sequence[int]) -> tuple:
    k = cyc.index(min(cyc))
    rot = list(cyc[k:]) + list(cyc[:k])
    if len(rot) > 2 and rot[-1] < rot[1]:
        rot = [rot[0]] + rot[1:][::-1]
    return tuple(rot)


@dataclass(frozen=True)
class CycleVerdict:
    is_pure_cycle: bool
    cycle: tuple | None
    short_cycles: tuple

    def __bool__(self):
        return self.is_pure_cycle


def pure_cycle_check(ge: EDGraph) -> CycleVerdict:
    """Is ``ge`` a single cycle through all of its vertices?

    The cycle is returned starting at vertex 1, oriented so that its second
    vertex is the smaller neighbour. Otherwise every cycle shorter than ``n``
    is listed.
    """
    g = ge.to_networkx()
    n = ge.n
    if n >= 3 and all(d == 2 for _, d in g.degree()) and nx.is_connected(g):
        cyc = [1]
        prev, cur = None, 1
        while True:
            nxt = [x for x in ge.neighbours(cur) if x != prev]
            step = min(nxt) if prev is None else nxt[0]
            if step == 1:
                break
            cyc.append(step)
            prev, cur = cur, step
        return CycleVerdict(True, tuple(cyc), ())
    short = sorted({_canonical_cycle(c) for c in nx.simple_cycles(g, length_bound=max(n - 1, 0))
                    if len(c) >= 3})
    return CycleVerdict(False, None, tuple(short))


def to_dot(graph, name: str | None = None) -> str:
    """Graphviz DOT text; vertices are emitted in sorted order."""
    lines = []
    if isinstance(graph, ConnectivityGraph):
        lines.append(f"graph {name or 'connectivity'} {{")
        lines.append("  rankdir=LR;")
        lines.append("  node [shape=circle];")
        for i in range(1, graph.m + 1):
            lines.append(f'  s{i} [label="{i}", style=filled, fillcolor=lightgrey];')
        for i in range(1, graph.m + 1):
            lines.append(f'  d{i} [label="{i}", style=dashed];')
        for s, d in sorted(graph.edges):
            lines.append(f"  s{s} -- d{d};")
    elif isinstance(graph, EDGraph):
        lines.append(f"graph {name or 'enhanced'} {{")
        if pure_cycle_check(graph):
            lines.append("  layout=circo;")
        lines.append("  node [shape=circle, style=filled, fillcolor=lightgrey];")
        for i in range(1, graph.n + 1):
            lines.append(f"  {i};")
        for a, b in sorted(graph.edges):
            lines.append(f"  {a} -- {b};")
    else:
        raise TypeError(f"cannot render {type(graph).__name__} as DOT")
    lines.append("}")
    return "\n".join(lines) + "\n"
