"""Bandit configurations, reward sampling, regret bookkeeping and the lower bound."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import UnimodalGraph, neighbors, validate_unimodal
from .kl import Family, kl


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BanditConfig:
    family: Family
    means: tuple
    graph: UnimodalGraph

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        object.__setattr__(self, "means", tuple(float(m) for m in self.means))
        if len(self.means) < 2:
            raise ConfigError("at least two arms are required")
        if len(self.means) != self.graph.n_arms:
            raise ConfigError(f"{len(self.means)} means for a graph with {self.graph.n_arms} arms")
        if not all(np.isfinite(self.means)):
            raise ConfigError("means must be finite")
        if self.family is Family.BERNOULLI:
            for i, m in enumerate(self.means):
                if not 0.0 < m < 1.0:
                    raise ConfigError(f"Bernoulli mean of arm {i + 1} is {m}; must lie in (0, 1)")
        problem = validate_unimodal(self.graph, self.means)
        if problem is not None:
            raise ConfigError(problem)

    @property
    def n_arms(self) -> int:
        return len(self.means)

    @property
    def best_mean(self) -> float:
        return max(self.means)

    @property
    def best_arm(self) -> int:
        return self.means.index(self.best_mean)

    @property
    def gaps(self) -> tuple:
        top = self.best_mean
        return tuple(top - m for m in self.means)


@dataclass
class RegretTrace:
    """One episode: cumulative pseudo-regret per step, final pulls and the arm sequence."""

    cum_pseudo_regret: np.ndarray
    pulls: np.ndarray
    arms: np.ndarray
    cum_realized_regret: np.ndarray | None = None

    @property
    def horizon(self) -> int:
        return len(self.cum_pseudo_regret)

    def pulls_at(self, t: int) -> np.ndarray:
        return np.bincount(self.arms[:t], minlength=len(self.pulls))


def sample_reward(config: BanditConfig, arm: int, rng: np.random.Generator) -> float:
    mu = config.means[arm]
    if config.family is Family.GAUSSIAN:
        return mu + rng.standard_normal()
    return 1.0 if rng.random() < mu else 0.0


def draw_noise(family: Family, rng: np.random.Generator, horizon: int) -> np.ndarray:
    """Per-step noise used by episodes: standard normals or uniforms."""
    if family is Family.GAUSSIAN:
        return rng.standard_normal(horizon)
    return rng.random(horizon)


def gap(config: BanditConfig, arm: int) -> float:
    return config.best_mean - config.means[arm]


def chain_rule_regret(gaps: Sequence[float], pulls: Sequence[int]) -> float:
    """``sum_a gap_a * N_a`` accumulated left to right over arms."""
    return sum(g * n for g, n in zip(gaps, pulls))


def cumulative_pseudo_regret(gaps: Sequence[float], arms: np.ndarray) -> np.ndarray:
    """Pseudo-regret after each step, written as ``sum_a gap_a * N_a(t)``.

    Accumulating arm by arm in the same order as :func:`chain_rule_regret`
    makes the last entry equal that sum bit for bit.
    """
    cum = np.zeros(len(arms))
    for a, g in enumerate(gaps):
        counts = np.cumsum(arms == a)
        cum = cum + g * counts
    return cum


def lower_bound_terms(config: BanditConfig) -> dict:
    """Per-neighbour terms ``gap_a / KL(mu_a | mu*)`` of the regret lower bound."""
    top = config.best_arm
    best = config.best_mean
    return {a: gap(config, a) / kl(config.family, config.means[a], best)
            for a in neighbors(config.graph, top)}


def lower_bound_constant(config: BanditConfig) -> float:
    return sum(lower_bound_terms(config).values())


def random_unimodal_config(n_arms: int, family: Family | str, rng: np.random.Generator,
                           max_attempts: int = 100) -> BanditConfig:
    """Uniformly random unimodal mean vector on a path with values in [0, 1].

    The largest draw is the peak; every other value goes left or right of it
    on a fair coin, the left block ascending and the right block descending.
    """
    family = Family.parse(family)
    if n_arms < 2:
        raise ConfigError("random configurations need at least two arms")
    for _ in range(max_attempts):
        values = rng.random(n_arms)
        coins = rng.random(n_arms) < 0.5
        if len(np.unique(values)) != n_arms:
            continue
        if family is Family.BERNOULLI and np.any((values <= 0.0) | (values >= 1.0)):
            continue
        peak = int(np.argmax(values))
        rest = [i for i in range(n_arms) if i != peak]
        left = sorted(values[i] for i in rest if coins[i])
        right = sorted((values[i] for i in rest if not coins[i]), reverse=True)
        means = [*left, values[peak], *right]
        return BanditConfig(family, tuple(float(m) for m in means), UnimodalGraph.path(n_arms))
    raise ConfigError(f"could not draw a valid configuration in {max_attempts} attempts")
