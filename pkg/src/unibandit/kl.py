"""Kullback-Leibler divergences for unit-variance Gaussian and Bernoulli arms."""

from __future__ import annotations

import enum
import math

INF = math.inf

_BISECTION_MAX_ITER = 100


class Family(enum.Enum):
    GAUSSIAN = "gaussian"
    BERNOULLI = "bernoulli"

    @classmethod
    def parse(cls, value: "str | Family") -> "Family":
        if isinstance(value, Family):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown family {value!r}; expected 'gaussian' or 'bernoulli'") from None


def kl_gaussian(mu: float, mu_prime: float) -> float:
    """KL between two unit-variance Gaussians: ``(mu' - mu)^2 / 2``."""
    d = mu_prime - mu
    return 0.5 * d * d


def kl_bernoulli(mu: float, mu_prime: float) -> float:
    """Binary KL ``kl(mu | mu')`` with ``0 log 0 = 0``.

    Returns ``inf`` when ``mu' in {0, 1}`` and ``mu != mu'``.
    """
    if not (0.0 <= mu <= 1.0 and 0.0 <= mu_prime <= 1.0):
        raise ValueError(f"Bernoulli means must lie in [0, 1], got ({mu}, {mu_prime})")
    if mu == mu_prime:
        return 0.0
    if mu_prime == 1.0 or mu_prime == 0.0:
        return INF
    out = 0.0
    if mu > 0.0:
        out += mu * math.log(mu / mu_prime)
    if mu < 1.0:
        out += (1.0 - mu) * math.log((1.0 - mu) / (1.0 - mu_prime))
    # rounding can leave a tiny negative value when mu ~ mu'
    return out if out > 0.0 else 0.0


def kl(family: Family | str, mu: float, mu_prime: float) -> float:
    if family is Family.GAUSSIAN:
        d = mu_prime - mu
        return 0.5 * d * d
    if family is Family.BERNOULLI:
        return kl_bernoulli(mu, mu_prime)
    return kl(Family.parse(family), mu, mu_prime)


def kl_plus(family: Family | str, mu: float, mu_prime: float) -> float:
    """Truncated divergence: ``KL(mu|mu')`` if ``mu < mu'``, else 0."""
    family = Family.parse(family)
    if mu < mu_prime:
        return kl(family, mu, mu_prime)
    if family is Family.BERNOULLI:
        # still validate the domain
        kl_bernoulli(mu, mu_prime)
    return 0.0


def ucb_solve(family: Family | str, mu_hat: float, n: int, budget: float) -> float:
    """Largest ``u >= mu_hat`` with ``n * KL(mu_hat|u) + log(n) <= budget``.

    When the slack ``budget - log(n)`` is negative the convention is to return
    ``mu_hat``. Gaussian arms use the closed form; Bernoulli arms are solved by
    bisection on ``[mu_hat, 1]``.
    """
    if n < 1:
        raise ValueError(f"pull count must be >= 1, got {n}")
    return kl_upper_bound(family, mu_hat, n, budget - math.log(n))


def kl_upper_bound(family: Family | str, mu_hat: float, n: int, slack: float) -> float:
    """Largest ``u >= mu_hat`` with ``n * KL(mu_hat|u) <= slack``."""
    if n < 1:
        raise ValueError(f"pull count must be >= 1, got {n}")
    if not slack > 0.0:
        # covers negative slack, zero slack and nan
        return mu_hat
    family = Family.parse(family)
    if family is Family.GAUSSIAN:
        return mu_hat + math.sqrt(2.0 * slack / n)
    if not 0.0 <= mu_hat <= 1.0:
        raise ValueError(f"Bernoulli mean must lie in [0, 1], got {mu_hat}")
    if mu_hat >= 1.0:
        return 1.0
    lo, hi = mu_hat, 1.0
    # Bisect until the bracket stops shrinking. This is well inside the 1e-9
    # tolerance on u and keeps n * kl(mu_hat|u) within 1e-7 of the slack even
    # when u is close to 1 where kl is steep.
    for _ in range(_BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if n * kl_bernoulli(mu_hat, mid) <= slack:
            lo = mid
        else:
            hi = mid
    return lo
