import math
import zlib

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import naive_choose
from unibandit.graph import DichotomyState, UnimodalGraph
from unibandit.kl import INF, Family, ucb_solve
from unibandit.policies import (
    PolicySpec,
    PolicyState,
    current_leader,
    dimed_ub_choose,
    dimed_ub_plan,
    imed_choose,
    imed_index,
    imed_ub_choose,
    klucb_ub_choose,
    klucb_ub_index,
    make_chooser,
    osub_choose,
    osub_index,
    osub_level,
    second_order_index,
    update,
)

G = Family.GAUSSIAN


def make_state(means, pulls, family=G):
    pulls = list(pulls)
    means = [float(m) if n else 0.0 for m, n in zip(means, pulls)]
    sums = [m * n for m, n in zip(means, pulls)]
    return PolicyState(family, pulls, sums, means, sum(pulls), [0] * len(pulls))


def test_update():
    s = PolicyState.fresh(G, 3)
    update(s, 1, 0.7)
    assert s.means[1] == 0.7 and s.t == 1
    s2 = PolicyState.fresh(G, 2)
    update(s2, 0, 0.0)
    update(s2, 0, 1.0)
    assert s2.means[0] == 0.5
    assert sum(s2.pulls) == s2.t == 2


def test_current_leader():
    assert current_leader(make_state((0.2, 0.8, 0.5), (3, 3, 3))) == 1
    assert current_leader(make_state((0.8, 0.8, 0.5), (7, 3, 3))) == 1
    assert current_leader(make_state((0.8, 0.8, 0.5), (3, 3, 9))) == 0


def test_imed_index():
    s = make_state((0.5, 0.8), (5, 10))
    assert imed_index(s, 1) == pytest.approx(math.log(10))
    assert imed_index(s, 0) == pytest.approx(1.8344379124341003, abs=1e-12)
    assert imed_index(make_state((0.5, 0.8), (0, 10)), 0) == -INF


def test_imed_index_bernoulli_infinite_cost():
    s = make_state((0.5, 1.0), (4, 3), Family.BERNOULLI)
    assert imed_index(s, 0) == INF


def test_imed_ub_choose_examples():
    g = UnimodalGraph.path(3)
    assert imed_ub_choose(make_state((0.2, 0.8, 0.5), (5, 5, 5)), g) == 1
    assert imed_ub_choose(make_state((0.2, 0.8, 0.5), (5, 100, 5)), g) == 2


def test_imed_ub_candidate_restriction():
    g = UnimodalGraph.path(5)
    # leader is arm 3 (index 2); arms 1 and 5 unpulled would win any global argmin
    s = make_state((0.0, 0.5, 0.9, 0.4, 0.0), (0, 50, 60, 50, 0))
    assert imed_ub_choose(s, g) in (1, 2, 3)
    assert klucb_ub_choose(s, g) in (1, 2, 3)


def test_klucb_ub_index():
    s = make_state((0.0, 0.8), (4, 100))
    assert klucb_ub_index(s, 1, 1) == 0.8
    assert klucb_ub_index(s, 0, 1) == pytest.approx(1.2686362411795197, abs=1e-12)
    assert klucb_ub_index(make_state((0.0, 0.8), (0, 100)), 0, 1) == INF


def test_klucb_ub_choose_examples():
    g = UnimodalGraph.path(3)
    assert klucb_ub_choose(make_state((0.2, 0.8, 0.5), (5, 5, 5)), g) == 1
    s = make_state((0.2, 0.8, 0.5), (5, 100, 5))
    assert klucb_ub_index(s, 0, 1) == pytest.approx(1.2946656610223947, abs=1e-12)
    assert klucb_ub_index(s, 2, 1) == pytest.approx(1.5946656610223947, abs=1e-12)
    assert klucb_ub_choose(s, g) == 2
    assert klucb_ub_choose(make_state((0.2, 0.8, 0.5), (5, 100, 0)), g) == 2


def test_second_order_index():
    s = make_state((0.1, 0.5, 0.9), (8, 8, 8))
    assert second_order_index(s, 1, 1) == pytest.approx(math.log(8))
    assert second_order_index(s, 0, 1) == pytest.approx(2.7194415416798357, abs=1e-12)
    assert second_order_index(s, 2, 1) == pytest.approx(math.log(8))
    assert second_order_index(make_state((0.1, 0.5), (0, 3)), 0, 1) == -INF


def test_dimed_leader_branch():
    g = UnimodalGraph.path(3)
    s = make_state((0.2, 0.8, 0.5), (5, 5, 5))
    step = dimed_ub_plan(s, g)
    assert step.anchor == step.leader == step.arm == 1
    assert step.second_order is None


def test_dimed_unpulled_far_arm_first():
    g = UnimodalGraph.path(11)
    means = (0.0, 0.1, 0.2, 0.3, 0.4, 0.9, 0.5, 0.3, 0.2, 0.1, 0.0)
    pulls = (0, 3, 3, 3, 4, 40, 40, 3, 3, 3, 3)
    s = make_state(means, pulls)
    s.dichotomy = DichotomyState.initial(11)
    step = dimed_ub_plan(s, g)
    assert (step.leader, step.anchor) == (5, 4)
    assert step.second_order == {0, 2, 3, 4}
    assert step.arm == 0


def test_dimed_second_order_example():
    g = UnimodalGraph.path(5)
    means = (0.1, 0.6, 0.9, 0.2, 0.0)
    pulls = (4, 9, 100, 100, 50)
    s = make_state(means, pulls)
    s.dichotomy = DichotomyState.initial(5)
    step = dimed_ub_plan(s, g)
    assert (step.leader, step.anchor) == (2, 1)
    assert step.second_order == {0, 1}
    assert second_order_index(s, 0, 1) == pytest.approx(1.8862943611198906, abs=1e-12)
    assert second_order_index(s, 1, 1) == pytest.approx(math.log(9))
    assert step.arm == 0


def test_dimed_tree_fallback():
    # star centre 0 (best), leaf 1 has a child 4
    g = UnimodalGraph.from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 4)], "tree")
    s = make_state((1.0, 0.9, 0.3, 0.2, 0.1), (100, 5, 100, 100, 3))
    step = dimed_ub_plan(s, g)
    assert step.anchor == 1
    assert step.second_order == {1, 4}
    assert step.arm == dimed_ub_choose(make_state((1.0, 0.9, 0.3, 0.2, 0.1), (100, 5, 100, 100, 3)), g)


def test_osub_forced_schedule():
    g = UnimodalGraph.path(3)
    s = make_state((0.2, 0.8, 0.5), (5, 100, 5))
    assert osub_choose(s, g) == 1  # L = 1
    assert s.leader_counts[1] == 1
    s.leader_counts[1] = 3  # next call sees L = 4 -> (4-1)/3 = 1
    assert osub_choose(s, g) == 1
    s.leader_counts[1] = 2  # next call sees L = 3 -> neighbour phase
    assert osub_choose(s, g) in (0, 2)


def test_osub_index_example():
    s = make_state((0.5, 0.9, 0.6), (2, 1000, 8))
    assert osub_index(s, 0, 2.0) == pytest.approx(1.9142135623730951, abs=1e-12)
    assert osub_index(s, 2, 2.0) == pytest.approx(1.3071067811865475, abs=1e-12)
    assert osub_index(make_state((0.5, 0.9), (0, 3)), 0, 2.0) == INF


def test_osub_neighbour_phase_choice():
    g = UnimodalGraph.path(3)
    s = make_state((0.5, 0.9, 0.6), (2, 1000, 8))
    s.leader_counts[1] = 7  # L = 8, f = log 8
    f = osub_level(8)
    assert f == pytest.approx(math.log(8))
    assert osub_choose(s, g) == 0


def test_osub_level_clamp():
    assert osub_level(1, 1.0) == 0.0
    assert osub_level(2, 0.0) == pytest.approx(math.log(2))
    assert osub_level(100, 1.0) == pytest.approx(math.log(100) + math.log(math.log(100)))


def test_imed_choose():
    assert imed_choose(make_state((0.2, 0.8, 0.5), (5, 0, 0))) == 1
    assert imed_choose(make_state((0.5, 0.5, 0.5), (4, 4, 4))) == 0
    assert imed_choose(make_state((0.2, 0.8, 0.5), (5, 5, 5))) == 1


def test_policy_spec():
    with pytest.raises(ValueError):
        PolicySpec("thompson")
    assert PolicySpec("osub", 0.5).label == "osub(c=0.5)"
    assert PolicySpec("osub").label == "osub"


def test_gaussian_argmax_invariant_to_budget_shift():
    rng = np.random.default_rng(0)
    for _ in range(200):
        means = rng.normal(size=4)
        n = int(rng.integers(1, 50))
        budget = math.log(n) + rng.uniform(0, 5)
        shift = rng.uniform(0, 5)
        a = [ucb_solve(G, m, n, budget) for m in means]
        b = [ucb_solve(G, m, n, budget + shift) for m in means]
        assert int(np.argmax(a)) == int(np.argmax(b))


states = st.integers(2, 12).flatmap(lambda n: st.tuples(
    st.lists(st.floats(-1, 2), min_size=n, max_size=n),
    st.lists(st.integers(0, 30), min_size=n, max_size=n),
))


@given(states, st.sampled_from(["imed-ub", "klucb-ub", "dimed-ub", "osub", "imed"]))
def test_choice_is_deterministic(state, name):
    means, pulls = state
    g = UnimodalGraph.path(len(means))
    picks = []
    for _ in range(2):
        s = make_state(means, [max(p, 1) for p in pulls])
        picks.append(make_chooser(name, g)(s))
    assert picks[0] == picks[1]


def _random_state(rng, family):
    n = int(rng.integers(2, 16))
    pulls = rng.integers(0, 40, size=n)
    pulls[rng.integers(n)] = rng.integers(1, 40)
    if family is G:
        means = rng.normal(0.5, 0.5, size=n)
    else:
        means = np.round(rng.random(n) * pulls) / np.maximum(pulls, 1)
    return [float(m) for m in means], [int(p) for p in pulls]


@pytest.mark.parametrize("family", [Family.GAUSSIAN, Family.BERNOULLI])
@pytest.mark.parametrize("policy", ["imed-ub", "klucb-ub", "dimed-ub", "osub", "imed"])
def test_matches_brute_force(policy, family):
    rng = np.random.default_rng(zlib.crc32(f"{policy}/{family.value}".encode()))
    for _ in range(200):
        means, pulls = _random_state(rng, family)
        n = len(means)
        g = UnimodalGraph.path(n)
        s = make_state(means, pulls, family)
        leader_count = int(rng.integers(0, 20))
        s.leader_counts = [leader_count] * n
        s.dichotomy = DichotomyState.initial(n)
        dset = set(s.dichotomy.current_set)
        s.t = 1  # t < 2 leaves the dichotomy untouched
        expected = naive_choose(policy, family.value, s.means, pulls, g.adjacency,
                                leader_count=leader_count, dichotomy_set=dset)
        got = make_chooser(policy, g)(s)
        assert got == expected, (policy, means, pulls)
