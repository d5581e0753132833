"""Monte-Carlo episodes and replicated experiments."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .env import BanditConfig, RegretTrace, cumulative_pseudo_regret, draw_noise, random_unimodal_config
from .kl import Family
from .monitors import MonitorReport, check_empirical_bounds
from .policies import PolicySpec, PolicyState, make_chooser, update
from .streams import stream


@dataclass(frozen=True)
class RandomEnvironment:
    """Draw a fresh random unimodal path configuration for every replicate."""

    n_arms: int
    family: Family = Family.GAUSSIAN


@dataclass
class EpisodeResult:
    trace: RegretTrace
    report: MonitorReport | None = None


def run_episode(config: BanditConfig, policy: PolicySpec | str, horizon: int, seed: int,
                replicate: int = 0, monitors: bool = False, realized: bool = False) -> EpisodeResult:
    """Play ``horizon`` steps of ``policy`` on ``config``.

    Streams for the first arm and for rewards are keyed by ``(seed, replicate)``
    only, so every policy faces the same reward noise for a given replicate.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if isinstance(policy, str):
        policy = PolicySpec(policy)
    n_arms = config.n_arms
    family = config.family
    means = config.means
    graph = config.graph
    choose = make_chooser(policy, graph)
    noise = draw_noise(family, stream(seed, replicate, "rewards"), horizon).tolist()
    arm = int(stream(seed, replicate, "init").integers(n_arms))

    state = PolicyState.fresh(family, n_arms)
    report = MonitorReport() if monitors else None
    arms = [0] * horizon
    rewards = [0.0] * horizon if realized else None
    gaussian = family is Family.GAUSSIAN
    for t in range(horizon):
        if t:
            arm = choose(state)
            if monitors:
                check_empirical_bounds(policy.name, state, arm, graph, report)
        z = noise[t]
        reward = means[arm] + z if gaussian else (1.0 if z < means[arm] else 0.0)
        update(state, arm, reward)
        arms[t] = arm
        if realized:
            rewards[t] = reward

    arms_arr = np.asarray(arms, dtype=np.int64)
    trace = RegretTrace(
        cum_pseudo_regret=cumulative_pseudo_regret(config.gaps, arms_arr),
        pulls=np.asarray(state.pulls, dtype=np.int64),
        arms=arms_arr,
    )
    if realized:
        trace.cum_realized_regret = np.cumsum(config.best_mean - np.asarray(rewards))
    return EpisodeResult(trace, report)


def default_checkpoints(horizon: int, count: int = 100) -> tuple:
    points = np.unique(np.round(np.logspace(0.0, np.log10(horizon), count)).astype(np.int64))
    return tuple(int(p) for p in points)


@dataclass
class ExperimentSpec:
    horizon: int
    replicates: int
    master_seed: int
    policies: tuple
    environment: BanditConfig | RandomEnvironment
    checkpoints: tuple = ()
    monitors: bool = False
    realized: bool = False

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        self.policies = tuple(PolicySpec(p) if isinstance(p, str) else p for p in self.policies)
        if not self.policies:
            raise ValueError("at least one policy is required")
        labels = [p.label for p in self.policies]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate policy in the policy list")
        if not self.checkpoints:
            self.checkpoints = default_checkpoints(self.horizon)
        cps = tuple(sorted(set(int(c) for c in self.checkpoints)))
        if cps[0] < 1 or cps[-1] > self.horizon:
            raise ValueError(f"checkpoints must lie in 1..{self.horizon}")
        self.checkpoints = cps

    def config_for(self, replicate: int) -> BanditConfig:
        env = self.environment
        if isinstance(env, BanditConfig):
            return env
        return random_unimodal_config(env.n_arms, env.family, stream(self.master_seed, replicate, "config"))


@dataclass
class RunResult:
    policies: tuple
    checkpoints: tuple
    replicates: int
    mean_regret: dict
    stderr: dict
    mean_pulls: dict
    mean_pulls_at: dict
    reports: dict = field(default_factory=dict)


def _replicate_task(args):
    spec, policy, replicate = args
    config = spec.config_for(replicate)
    out = run_episode(config, policy, spec.horizon, spec.master_seed, replicate,
                      monitors=spec.monitors, realized=spec.realized)
    idx = np.asarray(spec.checkpoints) - 1
    trace = out.trace
    regret = trace.cum_realized_regret if spec.realized else trace.cum_pseudo_regret
    pulls_at = np.stack([trace.pulls_at(c) for c in spec.checkpoints])
    return regret[idx], trace.pulls, pulls_at, out.report


def thread_count() -> int:
    raw = os.environ.get("BANDIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> RunResult:
    """Run every policy on ``spec.replicates`` replicates and aggregate.

    Results are reduced in replicate order so they do not depend on
    ``workers`` (default: the ``BANDIT_THREADS`` environment variable).
    """
    workers = thread_count() if workers is None else max(1, workers)
    tasks = [(spec, p, r) for p in spec.policies for r in range(spec.replicates)]
    if workers == 1:
        outputs = [_replicate_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_replicate_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))

    R = spec.replicates
    result = RunResult(tuple(p.label for p in spec.policies), spec.checkpoints, R, {}, {}, {}, {})
    for i, policy in enumerate(spec.policies):
        chunk = outputs[i * R:(i + 1) * R]
        regrets = np.stack([c[0] for c in chunk])
        mean = regrets.mean(axis=0)
        err = regrets.std(axis=0, ddof=1) / np.sqrt(R) if R > 1 else np.zeros_like(mean)
        result.mean_regret[policy.label] = mean
        result.stderr[policy.label] = err
        result.mean_pulls[policy.label] = np.stack([c[1] for c in chunk]).mean(axis=0)
        result.mean_pulls_at[policy.label] = np.stack([c[2] for c in chunk]).mean(axis=0)
        if spec.monitors:
            merged = MonitorReport()
            for c in chunk:
                merged.merge(c[3])
            result.reports[policy.label] = merged
    return result
