"""Causal DAG over named variables.

The graph carries the protected attribute (a root node), the outcome, the set
of resolving variables and optional per-variable adaptation parent sets. All
queries are read-only; instances are immutable after construction.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import GraphError

__all__ = [
    "CausalGraph",
    "parse_graph",
    "serialize",
    "path_coefficient_sum",
]


@dataclass(frozen=True)
class CausalGraph:
    """Validated causal DAG with fairness annotations.

    ``aps_overrides`` holds only the explicit adaptation-parent-set entries;
    defaults (all parents for non-resolving nodes, empty for resolving ones)
    are derived on query so that graph files stay minimal.
    """

    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    protected: str
    outcome: str
    resolving: frozenset[str] = frozenset()
    aps_overrides: tuple[tuple[str, tuple[str, ...]], ...] = ()
    validation_warnings: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def build(
        cls,
        nodes: Iterable[str],
        edges: Iterable[tuple[str, str]],
        protected: str,
        outcome: str,
        resolving: Iterable[str] = (),
        aps: Mapping[str, Iterable[str]] | None = None,
    ) -> "CausalGraph":
        nodes = tuple(nodes)
        edge_set = frozenset((str(u), str(v)) for u, v in edges)
        aps_items = tuple(
            (str(k), tuple(str(p) for p in v)) for k, v in sorted((aps or {}).items())
        )
        graph = cls(
            nodes=nodes,
            edges=edge_set,
            protected=str(protected),
            outcome=str(outcome),
            resolving=frozenset(str(r) for r in resolving),
            aps_overrides=aps_items,
        )
        warnings = graph._validate()
        object.__setattr__(graph, "validation_warnings", tuple(warnings))
        return graph

    # --- structure queries ---------------------------------------------

    def parents(self, node: str) -> tuple[str, ...]:
        self._require_node(node)
        return tuple(sorted(u for (u, v) in self.edges if v == node))

    def children(self, node: str) -> tuple[str, ...]:
        self._require_node(node)
        return tuple(sorted(v for (u, v) in self.edges if u == node))

    def descendants(self, node: str) -> frozenset[str]:
        """Nodes reachable from ``node`` by a directed path, excluding it."""
        self._require_node(node)
        seen: set[str] = set()
        frontier = [node]
        while frontier:
            cur = frontier.pop()
            for child in self.children(cur):
                if child not in seen:
                    seen.add(child)
                    frontier.append(child)
        return frozenset(seen)

    def topological_order(self) -> tuple[str, ...]:
        """Kahn's algorithm with lexicographic tie-breaking (deterministic)."""
        indeg = {v: 0 for v in self.nodes}
        for _, v in self.edges:
            indeg[v] += 1
        ready = [v for v in self.nodes if indeg[v] == 0]
        heapq.heapify(ready)
        order: list[str] = []
        while ready:
            cur = heapq.heappop(ready)
            order.append(cur)
            for child in self.children(cur):
                indeg[child] -= 1
                if indeg[child] == 0:
                    heapq.heappush(ready, child)
        if len(order) != len(self.nodes):  # unreachable after validation
            raise GraphError("cycle detected")
        return tuple(order)

    def aps(self, node: str) -> tuple[str, ...]:
        """Adaptation parent set: parents whose adapted values feed ``node``."""
        self._require_node(node)
        if node in self.resolving:
            return ()
        for name, parents in self.aps_overrides:
            if name == node:
                return parents
        return self.parents(node)

    def with_resolving(self, resolving: Iterable[str]) -> "CausalGraph":
        """Same graph with a different resolving set (revalidated)."""
        return CausalGraph.build(
            self.nodes,
            self.edges,
            self.protected,
            self.outcome,
            resolving=resolving,
            aps={k: v for k, v in self.aps_overrides if k not in set(resolving)},
        )

    # --- validation ------------------------------------------------------

    def _require_node(self, node: str) -> None:
        if node not in self.nodes:
            raise GraphError(f"unknown node name: {node!r}")

    def _validate(self) -> list[str]:
        warnings: list[str] = []
        if len(set(self.nodes)) != len(self.nodes):
            dupes = sorted({n for n in self.nodes if self.nodes.count(n) > 1})
            raise GraphError(f"duplicate node names: {dupes}")
        if not self.nodes:
            raise GraphError("graph has no nodes")
        for u, v in self.edges:
            for name in (u, v):
                if name not in self.nodes:
                    raise GraphError(f"edge ({u}, {v}) references unknown node {name!r}")
            if u == v:
                raise GraphError(f"self loop on node {u!r}")
        if self.protected not in self.nodes:
            raise GraphError(f"protected attribute {self.protected!r} not declared")
        if self.outcome not in self.nodes:
            raise GraphError("outcome not declared")
        if self.protected == self.outcome:
            raise GraphError("protected attribute and outcome must differ")

        # acyclicity, via Kahn's count
        indeg = {v: 0 for v in self.nodes}
        for _, v in self.edges:
            indeg[v] += 1
        ready = [v for v in self.nodes if indeg[v] == 0]
        seen = 0
        while ready:
            cur = ready.pop()
            seen += 1
            for child in self.children(cur):
                indeg[child] -= 1
                if indeg[child] == 0:
                    ready.append(child)
        if seen != len(self.nodes):
            cyclic = sorted(v for v, d in indeg.items() if d > 0)
            raise GraphError(f"cycle detected among nodes {cyclic}")

        if self.parents(self.protected):
            raise GraphError(
                f"protected attribute has a parent: "
                f"{' ,'.join(self.parents(self.protected))} -> {self.protected}"
            )

        de_a = self.descendants(self.protected)
        for r in sorted(self.resolving):
            if r not in self.nodes:
                raise GraphError(f"resolving set references unknown node {r!r}")
            if r not in de_a:
                raise GraphError(
                    f"resolving node {r!r} is not a descendant of {self.protected!r}"
                )
        if self.outcome in self.resolving:
            warnings.append(
                f"outcome {self.outcome!r} declared resolving: it will be left "
                "unchanged by adaptation"
            )

        for name, parents in self.aps_overrides:
            if name not in self.nodes:
                raise GraphError(f"aps entry references unknown node {name!r}")
            if name in self.resolving:
                raise GraphError(
                    f"aps declared for resolving node {name!r} (must be empty)"
                )
            actual = set(self.parents(name))
            for p in parents:
                if p not in actual:
                    raise GraphError(
                        f"aps for {name!r} references non-parent {p!r}"
                    )
            if len(set(parents)) != len(parents):
                raise GraphError(f"aps for {name!r} lists a parent twice")
        return warnings


def parse_graph(text: str) -> CausalGraph:
    """Parse and validate the JSON graph-file format.

    Expected shape::

        { "nodes": [...], "edges": [["A","X1"], ...], "protected": "A",
          "outcome": "Y", "resolving": [...], "aps": {"C": ["P"]} }

    ``resolving`` and ``aps`` are optional.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"graph file is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise GraphError("graph file must contain a JSON object")
    for key in ("nodes", "edges", "protected"):
        if key not in obj:
            raise GraphError(f"graph file missing {key!r}")
    if "outcome" not in obj:
        raise GraphError("outcome not declared")
    edges = obj["edges"]
    if not all(isinstance(e, (list, tuple)) and len(e) == 2 for e in edges):
        raise GraphError("edges must be [parent, child] pairs")
    return CausalGraph.build(
        nodes=[str(n) for n in obj["nodes"]],
        edges=[(str(u), str(v)) for u, v in edges],
        protected=obj["protected"],
        outcome=obj["outcome"],
        resolving=obj.get("resolving", ()),
        aps=obj.get("aps"),
    )


def serialize(graph: CausalGraph) -> str:
    """Graph-file text such that ``parse_graph(serialize(g)) == g``."""
    obj: dict = {
        "nodes": list(graph.nodes),
        "edges": sorted([u, v] for (u, v) in graph.edges),
        "protected": graph.protected,
        "outcome": graph.outcome,
    }
    if graph.resolving:
        obj["resolving"] = sorted(graph.resolving)
    if graph.aps_overrides:
        obj["aps"] = {k: list(v) for k, v in graph.aps_overrides}
    return json.dumps(obj, indent=2)


def path_coefficient_sum(
    graph: CausalGraph,
    sem_betas: Mapping[tuple[str, str], float],
    target: str,
    resolving: Iterable[str] | None = None,
) -> float:
    """Sum over directed protected->target paths avoiding resolvers of the
    product of edge coefficients along each path.

    A path is counted only if none of its nodes after the protected root
    (including ``target`` itself) is resolving. Raises if an edge on a
    counted path has no coefficient.
    """
    graph._require_node(target)
    blocked = frozenset(resolving) if resolving is not None else graph.resolving
    if target in blocked or target == graph.protected:
        return 0.0

    total = 0.0
    stack: list[tuple[str, float]] = [(graph.protected, 1.0)]
    while stack:
        node, prod = stack.pop()
        for child in graph.children(node):
            if child in blocked:
                continue
            if (node, child) not in sem_betas:
                # only an error if this edge can actually reach the target
                if child == target or target in graph.descendants(child):
                    raise GraphError(
                        f"missing coefficient for edge ({node}, {child}) on a "
                        f"path to {target}"
                    )
                continue
            p = prod * float(sem_betas[(node, child)])
            if child == target:
                total += p
            elif target in graph.descendants(child):
                stack.append((child, p))
    return total
