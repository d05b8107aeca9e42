"""Exact matching counts and the support-lifting probability gamma.

gamma(n, k) is the chance that a uniform perfect matching on {1..2n}
matches a fixed weight-k support internally, i.e. that the support is a
union of edges.  Counts and gamma are exact big-integer / rational
values; floating point appears only in the analytic upper bound and in
Monte-Carlo estimates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .core import BitString


def count_matchings(t: int) -> int:
    """Number of perfect matchings on t points: the double factorial (t-1)!!."""
    if t < 0 or t % 2 != 0:
        raise ValueError(f"perfect matchings need an even number of points, got {t}")
    result = 1
    for odd in range(1, t, 2):
        result *= odd
    return result


def enumerate_matchings(t: int) -> list[tuple[tuple[int, int], ...]]:
    """All perfect matchings on {1..t} in canonical pair order."""
    if t < 0 or t % 2 != 0:
        raise ValueError(f"perfect matchings need an even number of points, got {t}")

    def rec(items: tuple[int, ...]) -> Iterator[tuple[tuple[int, int], ...]]:
        if not items:
            yield ()
            return
        first, rest = items[0], items[1:]
        for i, partner in enumerate(rest):
            for tail in rec(rest[:i] + rest[i + 1 :]):
                yield ((first, partner),) + tail

    return list(rec(tuple(range(1, t + 1))))


def _validate_weight(n: int, k: int) -> None:
    if k % 2 != 0:
        # a lifted character always has even weight, so odd k can never
        # be matched internally
        raise ValueError(f"support weight must be even, got {k}")
    if not 2 <= k <= 2 * n:
        raise ValueError(f"support weight {k} out of range 2..{2 * n}")


def gamma_exact(n: int, k: int) -> Fraction:
    """Exact probability that a weight-k support is a union of matching edges.

    Equals count(k) * count(2n-k) / count(2n) as a reduced rational.
    """
    _validate_weight(n, k)
    return Fraction(
        count_matchings(k) * count_matchings(2 * n - k), count_matchings(2 * n)
    )


def gamma_bound(n: int, k: int) -> float:
    """Analytic upper bound (k/2n)^(k/2); checked against the exact value."""
    _validate_weight(n, k)
    bound = Fraction(k, 2 * n) ** (k // 2)
    assert gamma_exact(n, k) <= bound
    return float(bound)


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Frequency estimate with its standard error."""

    estimate: float
    sigma: float
    trials: int
    successes: int


def gamma_monte_carlo(
    n: int,
    k: int,
    trials: int,
    rng: np.random.Generator,
    z: BitString | None = None,
) -> MonteCarloEstimate:
    """Estimate gamma by sampling uniform matchings.

    A matching matches the support of z internally iff every edge lies
    entirely inside or entirely outside the support.  Defaults to the
    canonical support 1^k 0^(2n-k); pass z to probe a different support
    of the same weight (the estimate depends only on k).
    """
    _validate_weight(n, k)
    if trials < 1:
        raise ValueError("trials must be positive")
    if z is None:
        z = BitString((1,) * k + (0,) * (2 * n - k))
    if z.length != 2 * n or z.hamming_weight() != k:
        raise ValueError(f"z must have length {2 * n} and weight {k}")
    mask = z.to_array().astype(bool)
    hits = 0
    for _ in range(trials):
        perm = rng.permutation(2 * n)
        inside = mask[perm]
        if np.array_equal(inside[0::2], inside[1::2]):
            hits += 1
    p_hat = hits / trials
    sigma = float(np.sqrt(p_hat * (1.0 - p_hat) / trials))
    return MonteCarloEstimate(estimate=p_hat, sigma=sigma, trials=trials, successes=hits)
