"""Runtime checks of the empirical pull-count bounds each strategy guarantees.

The checks run on the state a policy saw when it picked ``chosen``. An
inequality that involves an unpulled arm is skipped (``log 0`` is undefined);
those steps are counted separately.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .graph import GraphKind, UnimodalGraph, second_order_set, subtree_after_cut
from .kl import kl, kl_plus
from .policies import PolicyState, current_leader

TOLERANCE = 1e-9

# neighbour_index: log N_chosen <= IMED index of each neighbour of the leader
# leader_pulls:    N_chosen <= N_leader
# cost_log_t:      N_chosen KL(mean_chosen | best) <= log t
# the second_order / anchor names are the same inequalities taken relative to
# the anchor arm (truncated KL), plus the anchor's own cost against log t
BOUNDS = {
    "imed-ub": ("neighbour_index", "leader_pulls", "cost_log_t"),
    "klucb-ub": ("neighbour_index", "leader_pulls", "cost_log_t"),
    "dimed-ub": ("neighbour_index", "leader_pulls", "second_order_index", "anchor_pulls",
                 "anchor_cost_log_t", "second_order_cost_log_anchor", "second_order_cost_loglog_t"),
}


@dataclass
class Violation:
    bound: str
    t: int
    chosen: int
    leader: int
    lhs: float
    rhs: float
    pulls: tuple
    means: tuple


@dataclass
class MonitorReport:
    checks: Counter = field(default_factory=Counter)
    violations: Counter = field(default_factory=Counter)
    skipped_steps: int = 0
    gamma_zero_steps: int = 0
    steps: int = 0
    log: list = field(default_factory=list)

    def merge(self, other: "MonitorReport") -> "MonitorReport":
        self.checks.update(other.checks)
        self.violations.update(other.violations)
        self.skipped_steps += other.skipped_steps
        self.gamma_zero_steps += other.gamma_zero_steps
        self.steps += other.steps
        self.log.extend(other.log)
        return self

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())


class _Checker:
    def __init__(self, state: PolicyState, chosen: int, leader: int, report: MonitorReport | None):
        self.state, self.chosen, self.leader = state, chosen, leader
        self.report = report
        self.found: list[Violation] = []
        self.skipped = False

    def __call__(self, bound: str, lhs: float, rhs: float, *arms: int) -> None:
        if any(self.state.pulls[a] == 0 for a in arms):
            self.skipped = True
            return
        if self.report is not None:
            self.report.checks[bound] += 1
        if lhs > rhs + TOLERANCE:
            s = self.state
            self.found.append(Violation(bound, s.t, self.chosen, self.leader, lhs, rhs,
                                        tuple(s.pulls), tuple(s.means)))


def _log(n: int) -> float:
    return math.log(n) if n > 0 else -math.inf


def _imed(state: PolicyState, a: int, best: float) -> float:
    n = state.pulls[a]
    return n * kl(state.family, state.means[a], best) + _log(n) if n else -math.inf


def check_empirical_bounds(policy: str, state: PolicyState, chosen: int, graph: UnimodalGraph,
                           report: MonitorReport | None = None) -> list:
    """Return the empirical-bound inequalities that ``chosen`` violates.

    ``state`` must be the pre-update state the policy decided on (for d-IMED-UB
    its dichotomy already advanced for this step). Policies without guarantees
    return an empty list.
    """
    if policy not in BOUNDS:
        return []
    s = state
    t = s.t
    leader = current_leader(s)
    best = s.means[leader]
    fam = s.family
    n_c = s.pulls[chosen]
    log_c = _log(n_c)
    cost_c = n_c * kl(fam, s.means[chosen], best) if n_c else 0.0
    nbrs = graph.adjacency[leader]
    check = _Checker(s, chosen, leader, report)

    if policy == "imed-ub":
        for a in nbrs:
            check("neighbour_index", log_c, _imed(s, a, best), chosen, a)
        check("leader_pulls", n_c, s.pulls[leader], chosen, leader)
        check("cost_log_t", cost_c, math.log(t), chosen)

    elif policy == "klucb-ub":
        check("leader_pulls", n_c, s.pulls[leader], chosen, leader)
        check("cost_log_t", cost_c, math.log(t), chosen)
        if n_c:
            gamma = s.means[chosen] == best or log_c <= cost_c
            if gamma:
                for a in nbrs:
                    check("neighbour_index", log_c, _imed(s, a, best), chosen, a)
            elif report is not None:
                report.gamma_zero_steps += 1

    elif policy == "dimed-ub":
        candidates = sorted((leader, *nbrs))
        idx = {a: _imed(s, a, best) for a in candidates}
        anchor = min(candidates, key=lambda a: (idx[a], a))
        for a in nbrs:
            check("neighbour_index", log_c, idx[a], chosen, a)
        check("leader_pulls", n_c, s.pulls[leader], chosen, leader)
        n_anchor = s.pulls[anchor]
        anchor_cost = n_anchor * kl(fam, s.means[anchor], best) if n_anchor else 0.0
        check("anchor_cost_log_t", anchor_cost, math.log(t), anchor)
        if anchor != leader:
            if graph.kind is GraphKind.PATH and s.dichotomy is not None:
                second = second_order_set(s.dichotomy, anchor, leader)
            else:
                second = subtree_after_cut(graph, anchor, leader)
            m_anchor = s.means[anchor]
            for a in sorted(second):
                n_a = s.pulls[a]
                rhs = n_a * kl_plus(fam, s.means[a], m_anchor) + _log(n_a) if n_a else -math.inf
                check("second_order_index", log_c, rhs, chosen, a)
            check("anchor_pulls", n_c, n_anchor, chosen, anchor)
            check("anchor_pulls", n_anchor, s.pulls[leader], anchor, leader)
            cost2 = n_c * kl_plus(fam, s.means[chosen], m_anchor) if n_c else 0.0
            check("second_order_cost_log_anchor", cost2, _log(n_anchor), chosen, anchor)
            gap_cost = kl(fam, m_anchor, best)
            # only meaningful while the anchor's cost is finite and positive
            if t >= 2 and 0.0 < gap_cost < math.inf:
                check("second_order_cost_loglog_t", cost2, math.log(math.log(t) / gap_cost), chosen, anchor)

    if report is not None:
        report.steps += 1
        if check.skipped:
            report.skipped_steps += 1
        for v in check.found:
            report.violations[v.bound] += 1
        report.log.extend(check.found)
    return check.found
