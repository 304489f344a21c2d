"""Shannon quantities, in bits, of exact indicator-bit distributions.

Masses stay rational until the log step; zero-mass terms are skipped, which
realizes the 0*log(0) = 0 convention.  Sums use ``math.fsum`` so that long
distributions (up to 2^t terms) do not accumulate rounding drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Real

from .errors import BadSplitError, DomainError
from .patterns import JointBitDistribution


@dataclass(frozen=True)
class EntropySplit:
    """Treat the first ``condition_count`` coordinates as the conditioning set."""

    condition_count: int

    def check(self, arity: int) -> None:
        if not 0 <= self.condition_count < arity:
            raise BadSplitError(
                f"condition count {self.condition_count} invalid for arity {arity}"
            )


def binary_entropy(p: Real) -> float:
    """H2(p) in bits, with H2(0) = H2(1) = 0."""
    if not 0 <= p <= 1:
        raise DomainError(f"probability {p} outside [0, 1]")
    x = float(p)
    if x == 0.0 or x == 1.0:
        return 0.0
    return -(x * math.log2(x) + (1.0 - x) * math.log2(1.0 - x))


def entropy(dist: JointBitDistribution) -> float:
    """Shannon entropy -sum p log2 p over the nonzero masses."""
    return math.fsum(
        -float(p) * math.log2(float(p)) for p in dist.mass.values() if p > 0
    )


def conditional_entropy(dist: JointBitDistribution, split: EntropySplit) -> float:
    """H(target | condition) = H(joint) - H(condition marginal)."""
    split.check(dist.arity)
    t0 = split.condition_count
    if t0 == 0:
        return entropy(dist)
    value = entropy(dist) - entropy(dist.prefix(t0))
    return max(0.0, value)


def mutual_information(dist: JointBitDistribution, split: EntropySplit) -> float:
    """I(target; condition) = H(target marginal) - H(target | condition)."""
    split.check(dist.arity)
    t0 = split.condition_count
    target = entropy(dist.marginal(range(t0, dist.arity)))
    return max(0.0, target - conditional_entropy(dist, split))
