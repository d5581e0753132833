"""IMED-UB, KLUCB-UB, d-IMED-UB, OSUB and plain IMED over a shared state.

Every argmin/argmax breaks ties by the lowest arm index. Unpulled arms get
index ``-inf`` under IMED-style rules and ``+inf`` under UCB-style rules, so
each candidate is tried once before indices are compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .graph import (
    DichotomyState,
    GraphKind,
    UnimodalGraph,
    max_degree,
    second_order_set,
    subtree_after_cut,
    update_dichotomy,
)
from .kl import INF, Family, kl, kl_plus, kl_upper_bound, ucb_solve

POLICY_NAMES = ("imed-ub", "klucb-ub", "dimed-ub", "osub", "imed")


@dataclass
class PolicyState:
    """What a policy may observe: pull counts, reward sums and empirical means.

    ``means[a]`` is 0 for an arm that has never been pulled.
    """

    family: Family
    pulls: list
    sums: list
    means: list
    t: int = 0
    leader_counts: list = field(default_factory=list)
    dichotomy: DichotomyState | None = None

    @classmethod
    def fresh(cls, family: Family, n_arms: int) -> "PolicyState":
        return cls(family, [0] * n_arms, [0.0] * n_arms, [0.0] * n_arms, 0, [0] * n_arms)

    @property
    def n_arms(self) -> int:
        return len(self.pulls)


def update(state: PolicyState, arm: int, reward: float) -> PolicyState:
    n = state.pulls[arm] + 1
    s = state.sums[arm] + reward
    state.pulls[arm] = n
    state.sums[arm] = s
    state.means[arm] = s / n
    state.t += 1
    return state


def current_leader(state: PolicyState) -> int:
    """Empirically best arm; ties go to the fewest pulls, then the lowest index."""
    means = state.means
    best = max(means)
    if means.count(best) == 1:
        return means.index(best)
    pulls = state.pulls
    return min((a for a, m in enumerate(means) if m == best), key=lambda a: (pulls[a], a))


def _candidates(graph: UnimodalGraph, leader: int) -> list:
    return sorted((leader, *graph.adjacency[leader]))


def _argmin(values: dict) -> int:
    # dict preserves insertion order; callers insert arms in increasing order
    best_arm, best_val = None, None
    for a, v in values.items():
        if best_val is None or v < best_val:
            best_arm, best_val = a, v
    return best_arm


def _argmax(values: dict) -> int:
    best_arm, best_val = None, None
    for a, v in values.items():
        if best_val is None or v > best_val:
            best_arm, best_val = a, v
    return best_arm


def _imed(family: Family, n: int, mean: float, best: float) -> float:
    if n == 0:
        return -INF
    d = kl(family, mean, best)
    if d == 0.0:
        return math.log(n)
    return n * d + math.log(n)


def imed_index(state: PolicyState, a: int) -> float:
    """``N_a KL(mean_a | best mean) + log N_a``; ``-inf`` for an unpulled arm."""
    return _imed(state.family, state.pulls[a], state.means[a], max(state.means))


def imed_ub_choose(state: PolicyState, graph: UnimodalGraph) -> int:
    leader = current_leader(state)
    best = state.means[leader]
    fam, pulls, means = state.family, state.pulls, state.means
    return _argmin({a: _imed(fam, pulls[a], means[a], best) for a in _candidates(graph, leader)})


def imed_choose(state: PolicyState) -> int:
    """Unstructured IMED: minimum index over every arm."""
    best = max(state.means)
    fam, pulls, means = state.family, state.pulls, state.means
    if 0 in pulls:
        return pulls.index(0)
    best_arm, best_val = 0, INF
    if fam is Family.GAUSSIAN:
        # same arithmetic as _imed, inlined since this loop covers every arm
        log = math.log
        for a, (n, m) in enumerate(zip(pulls, means)):
            d = best - m
            v = n * (0.5 * d * d) + log(n) if d else log(n)
            if v < best_val:
                best_arm, best_val = a, v
        return best_arm
    for a in range(len(pulls)):
        v = _imed(fam, pulls[a], means[a], best)
        if v < best_val:
            best_arm, best_val = a, v
    return best_arm


def klucb_ub_index(state: PolicyState, a: int, leader: int) -> float:
    """Largest ``u`` with ``N_a KL(mean_a|u) + log N_a <= log N_leader``."""
    n = state.pulls[a]
    if n == 0:
        return INF
    n_leader = state.pulls[leader]
    if n_leader == 0:
        return state.means[a]
    return ucb_solve(state.family, state.means[a], n, math.log(n_leader))


def klucb_ub_choose(state: PolicyState, graph: UnimodalGraph) -> int:
    leader = current_leader(state)
    return _argmax({a: klucb_ub_index(state, a, leader) for a in _candidates(graph, leader)})


def second_order_index(state: PolicyState, a: int, anchor: int) -> float:
    """IMED index of ``a`` measured against ``anchor`` with the truncated divergence."""
    n = state.pulls[a]
    if n == 0:
        return -INF
    d = kl_plus(state.family, state.means[a], state.means[anchor])
    if d == 0.0:
        return math.log(n)
    return n * d + math.log(n)


@dataclass
class DimedStep:
    """Quantities d-IMED-UB computed for one decision."""

    leader: int
    anchor: int
    second_order: frozenset | None
    arm: int


def dimed_ub_plan(state: PolicyState, graph: UnimodalGraph) -> DimedStep:
    """Run one d-IMED-UB decision and return its leader, anchor and candidate set.

    On path graphs the dichotomy state in ``state`` is advanced; on other trees
    the whole cut subtree is the second-order candidate set.
    """
    leader = current_leader(state)
    best = state.means[leader]
    fam, pulls, means = state.family, state.pulls, state.means
    anchor = _argmin({a: _imed(fam, pulls[a], means[a], best) for a in _candidates(graph, leader)})

    if graph.kind is GraphKind.PATH:
        if state.dichotomy is None:
            state.dichotomy = DichotomyState.initial(graph.n_arms)
        if state.t >= 2:
            update_dichotomy(state.dichotomy, leader, graph.n_arms)
    elif not graph.is_tree:
        raise ValueError("d-IMED-UB requires a path or a tree")

    if anchor == leader:
        return DimedStep(leader, anchor, None, leader)
    if graph.kind is GraphKind.PATH:
        candidates = second_order_set(state.dichotomy, anchor, leader)
    else:
        candidates = subtree_after_cut(graph, anchor, leader)
    arm = _argmin({a: second_order_index(state, a, anchor) for a in sorted(candidates)})
    return DimedStep(leader, anchor, candidates, arm)


def dimed_ub_choose(state: PolicyState, graph: UnimodalGraph) -> int:
    return dimed_ub_plan(state, graph).arm


def osub_level(leader_count: int, c: float = 0.0) -> float:
    """Exploration level ``log(L) + c log log(L)``, clamped so small ``L`` stay finite."""
    return math.log(max(leader_count, 1)) + c * math.log(math.log(max(leader_count, math.e)))


def osub_index(state: PolicyState, a: int, level: float) -> float:
    n = state.pulls[a]
    if n == 0:
        return INF
    return kl_upper_bound(state.family, state.means[a], n, level)


def osub_choose(state: PolicyState, graph: UnimodalGraph, c: float = 0.0) -> int:
    """OSUB: play the leader on every (d+1)-th leadership, else the best UCB.

    The UCB argmax runs over the leader and its neighbours. Increments the
    leader's leadership count, so call it once per decision.
    """
    leader = current_leader(state)
    state.leader_counts[leader] += 1
    count = state.leader_counts[leader]
    if (count - 1) % (max_degree(graph) + 1) == 0:
        return leader
    level = osub_level(count, c)
    return _argmax({a: osub_index(state, a, level) for a in _candidates(graph, leader)})


@dataclass(frozen=True)
class PolicySpec:
    name: str
    c: float = 0.0

    def __post_init__(self):
        if self.name not in POLICY_NAMES:
            raise ValueError(f"unknown policy {self.name!r}; choose from {', '.join(POLICY_NAMES)}")

    @property
    def label(self) -> str:
        if self.name == "osub" and self.c != 0.0:
            return f"osub(c={self.c:g})"
        return self.name


def make_chooser(spec: PolicySpec | str, graph: UnimodalGraph) -> Callable[[PolicyState], int]:
    if isinstance(spec, str):
        spec = PolicySpec(spec)
    if spec.name == "imed-ub":
        return lambda s: imed_ub_choose(s, graph)
    if spec.name == "klucb-ub":
        return lambda s: klucb_ub_choose(s, graph)
    if spec.name == "dimed-ub":
        if graph.kind is not GraphKind.PATH and not graph.is_tree:
            raise ValueError("d-IMED-UB requires a path or a tree")
        return lambda s: dimed_ub_choose(s, graph)
    if spec.name == "osub":
        c = spec.c
        return lambda s: osub_choose(s, graph, c)
    return imed_choose
