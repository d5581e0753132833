"""Unimodal graph structure over arms and the dichotomous exploration sets.

Arms are indexed ``0 .. n_arms - 1``. User-facing messages and files use
1-based ids.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class GraphKind(enum.Enum):
    PATH = "path"
    TREE = "tree"
    GENERAL = "general"


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class UnimodalGraph:
    n_arms: int
    edges: frozenset
    kind: GraphKind
    adjacency: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_arms < 1:
            raise GraphError("a graph needs at least one arm")
        adj: list[list[int]] = [[] for _ in range(self.n_arms)]
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"self-loop on arm {u + 1}")
            if not (0 <= u < self.n_arms and 0 <= v < self.n_arms):
                raise GraphError(f"edge ({u + 1}, {v + 1}) references an arm outside 1..{self.n_arms}")
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))
        if self.kind is GraphKind.PATH:
            if self.edges != _path_edges(self.n_arms):
                raise GraphError("path graph must have exactly the edges (i, i+1)")
        elif self.kind is GraphKind.TREE:
            if len(self.edges) != self.n_arms - 1 or not self._connected():
                raise GraphError("tree graph must be connected and acyclic")

    @classmethod
    def path(cls, n_arms: int) -> "UnimodalGraph":
        return cls(n_arms, _path_edges(n_arms), GraphKind.PATH)

    @classmethod
    def from_edges(cls, n_arms: int, edges: Iterable[Sequence[int]], kind: GraphKind | str = GraphKind.TREE) -> "UnimodalGraph":
        kind = GraphKind(kind) if isinstance(kind, str) else kind
        normalized = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            normalized.add((min(u, v), max(u, v)))
        return cls(n_arms, frozenset(normalized), kind)

    def _connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.n_arms

    @property
    def is_tree(self) -> bool:
        if self.kind is not GraphKind.GENERAL:
            return True
        return len(self.edges) == self.n_arms - 1 and self._connected()


def _path_edges(n_arms: int) -> frozenset:
    return frozenset((i, i + 1) for i in range(n_arms - 1))


def _check_arm(g: UnimodalGraph, a: int) -> None:
    if not 0 <= a < g.n_arms:
        raise GraphError(f"arm index {a} outside 0..{g.n_arms - 1}")


def neighbors(g: UnimodalGraph, a: int) -> tuple:
    _check_arm(g, a)
    return g.adjacency[a]


def max_degree(g: UnimodalGraph) -> int:
    return max(len(n) for n in g.adjacency)


def validate_unimodal(g: UnimodalGraph, means: Sequence[float]) -> str | None:
    """Return ``None`` if ``means`` is unimodal on ``g``, else a violation message.

    Unimodal means a unique maximum and, from every other arm, a path along
    edges whose means strictly increase up to the maximum. Reachability is
    computed backwards from the optimum, walking to strictly lower neighbours.
    """
    if len(means) != g.n_arms:
        return f"expected {g.n_arms} means, got {len(means)}"
    best = max(means)
    if sum(1 for m in means if m == best) > 1:
        return "duplicate maximum"
    top = list(means).index(best)
    reached = {top}
    queue = deque([top])
    while queue:
        v = queue.popleft()
        for u in g.adjacency[v]:
            if u not in reached and means[u] < means[v]:
                reached.add(u)
                queue.append(u)
    for a in range(g.n_arms):
        if a not in reached:
            return f"arm {a + 1} has no strictly increasing path to the optimal arm {top + 1}"
    return None


def subtree_after_cut(g: UnimodalGraph, a_prime: int, hub: int) -> frozenset:
    """Component containing ``a_prime`` once the edge ``(a_prime, hub)`` is removed."""
    _check_arm(g, a_prime)
    _check_arm(g, hub)
    if not g.is_tree:
        raise GraphError("subtree_after_cut requires a tree")
    if hub not in g.adjacency[a_prime]:
        raise GraphError(f"({a_prime + 1}, {hub + 1}) is not an edge")
    seen = {a_prime}
    queue = deque([a_prime])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if v in seen or (u == a_prime and v == hub):
                continue
            seen.add(v)
            queue.append(v)
    return frozenset(seen)


def dichotomous_subset(lo: int, hi: int) -> frozenset:
    """Arms picked from ``[lo, hi]`` by closing in from both ends towards the middle."""
    if lo >= hi:
        raise ValueError(f"dichotomous_subset needs lo < hi, got ({lo}, {hi})")
    out = set()
    while hi - lo >= 4:
        out.update((lo, hi))
        q = (hi - lo) // 4
        lo, hi = lo + q, hi - q
    out.update(range(lo, hi + 1))
    return frozenset(out)


@dataclass
class DichotomyState:
    """Current candidate set plus the stacks of past sets and their anchor arms."""

    current_set: frozenset
    set_list: list
    anchor_list: list

    @classmethod
    def initial(cls, n_arms: int) -> "DichotomyState":
        if n_arms < 2:
            raise ValueError("dichotomy needs at least two arms")
        s = dichotomous_subset(0, n_arms - 1)
        anchor = _lower_median(s)
        return cls(s, [s], [anchor])


def _lower_median(s: Iterable[int]) -> int:
    ordered = sorted(s)
    return ordered[(len(ordered) - 1) // 2]


def update_dichotomy(state: DichotomyState, leader: int, n_arms: int) -> DichotomyState:
    """Advance the dynamic sequence of subsets for the current leader (in place)."""
    if not 0 <= leader < n_arms:
        raise GraphError(f"arm index {leader} outside 0..{n_arms - 1}")
    if leader not in state.current_set:
        return state
    try:
        i = state.anchor_list.index(leader)
    except ValueError:
        i = -1
    if i >= 0:
        state.current_set = state.set_list[i]
        del state.set_list[i + 1:]
        del state.anchor_list[i + 1:]
        return state
    others = state.current_set - {leader}
    delta = min(abs(a - leader) for a in others)
    lo, hi = max(leader - delta, 0), min(leader + delta, n_arms - 1)
    if lo < hi:
        state.current_set = state.current_set | dichotomous_subset(lo, hi)
    state.set_list.append(state.current_set)
    state.anchor_list.append(leader)
    return state


def second_order_set(state: DichotomyState, a_underline: int, leader: int) -> frozenset:
    if a_underline == leader:
        raise ValueError("second-order set is undefined when the anchor is the leader")
    if a_underline < leader:
        picked = {a for a in state.current_set if a < a_underline}
    else:
        picked = {a for a in state.current_set if a > a_underline}
    picked.add(a_underline)
    return frozenset(picked)
