"""Dependency graphs, stratification and rule safety."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import NamedTuple

from ..errors import Unstratifiable, UnsafeRule
from .terms import Program, Rule, atom_vars

BUILTINS = frozenset({"distinct"})


class Edge(NamedTuple):
    src: str
    dst: str
    negated: bool


@dataclass(frozen=True)
class DepGraph:
    nodes: frozenset
    edges: frozenset

    def successors(self, p: str) -> set[str]:
        return {e.dst for e in self.edges if e.src == p}


@dataclass(frozen=True)
class Strata:
    """Ordered partition of predicates; ``layers[i]`` is stratum ``i``."""

    layers: tuple

    def level(self, predicate: str) -> int:
        for i, layer in enumerate(self.layers):
            if predicate in layer:
                return i
        return 0

    def __len__(self) -> int:
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)


def dependency_graph(p: Program) -> DepGraph:
    nodes = set(p.predicates())
    edges = set()
    for r in p.rules:
        for lit in r.body:
            edges.add(Edge(r.head.predicate, lit.atom.predicate, not lit.positive))
    return DepGraph(frozenset(nodes), frozenset(edges))


def _reaches(graph: dict, start: str, goal: str):
    """Shortest path start -> goal as a list of nodes, or None."""
    prev = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if u == goal:
            path = []
            while u is not None:
                path.append(u)
                u = prev[u]
            return path[::-1]
        for v in graph.get(u, ()):
            if v not in prev:
                prev[v] = u
                queue.append(v)
    return None


def stratify(p: Program) -> Strata:
    """Assign each predicate the lowest stratum consistent with its rules."""
    g = dependency_graph(p)
    succ = defaultdict(set)
    for e in g.edges:
        succ[e.src].add(e.dst)
    level = {n: 0 for n in g.nodes}
    limit = len(g.nodes)
    changed = True
    while changed:
        changed = False
        for e in sorted(g.edges):
            need = level[e.dst] + (1 if e.negated else 0)
            if level[e.src] < need:
                level[e.src] = need
                changed = True
                if need > limit:
                    raise Unstratifiable(_negative_cycle(g, succ))
    layers = defaultdict(set)
    for n, lv in level.items():
        layers[lv].add(n)
    top = max(layers, default=-1)
    return Strata(tuple(frozenset(layers.get(i, ())) for i in range(top + 1)))


def _negative_cycle(g: DepGraph, succ) -> list[str]:
    for e in sorted(g.edges):
        if e.negated:
            back = _reaches(succ, e.dst, e.src)
            if back is not None:
                return [e.src] + back
    return []


def check_stratified(p: Program, strata: Strata) -> None:
    """Raise AssertionError if some rule violates the strata ordering."""
    for r in p.rules:
        h = strata.level(r.head.predicate)
        for lit in r.body:
            b = strata.level(lit.atom.predicate)
            if lit.positive:
                assert b <= h, f"{r}: {lit.atom.predicate} above head"
            else:
                assert b < h, f"{r}: negated {lit.atom.predicate} not strictly below head"


def rule_safety_violation(r: Rule):
    """First variable of ``r`` not bound by a positive ordinary literal."""
    bound = set()
    for lit in r.body:
        if lit.positive and lit.atom.predicate not in BUILTINS:
            bound.update(atom_vars(lit.atom))
    for v in atom_vars(r.head):
        if v not in bound:
            return v
    for lit in r.body:
        if not lit.positive or lit.atom.predicate in BUILTINS:
            for v in atom_vars(lit.atom):
                if v not in bound:
                    return v
    return None


def validate_safety(p: Program) -> None:
    for r in p.rules:
        v = rule_safety_violation(r)
        if v is not None:
            raise UnsafeRule(r, v.name)
