"""Independent brute-force oracles the tests check the library against.

Nothing here imports library internals beyond public types: joint laws come
from enumerating all K record values directly, entropies from the defining
sum, and bound values from explicit closed-form summation.
"""

import math
from collections import Counter
from fractions import Fraction


def h2(p: float) -> float:
    if p <= 0 or p >= 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def enumerate_joint(K, patterns, indices):
    """Joint law of the listed patterns' bits by scanning every record value."""
    sets = [frozenset(p) for p in patterns]
    counts = Counter()
    for value in range(1, K + 1):
        sig = tuple(int(value in sets[i - 1]) for i in indices)
        counts[sig] += 1
    return {sig: Fraction(c, K) for sig, c in counts.items()}


def entropy_of(mass) -> float:
    return math.fsum(-float(p) * math.log2(float(p)) for p in mass.values() if p > 0)


def conditional_entropy_by_enumeration(K, patterns, target, prefix) -> float:
    """H(w_target | w_prefix) from two enumerated joints."""
    joint = enumerate_joint(K, patterns, list(prefix) + [target])
    cond = enumerate_joint(K, patterns, list(prefix))
    return entropy_of(joint) - entropy_of(cond)


def exact_search_bound(K: int, N: int) -> float:
    """Closed-form normalized bound of exact search over sequence 1..K."""
    total = math.fsum(
        ((K - l + 1) / K) * h2(1.0 / (K - l + 1)) / N ** (l - 1)
        for l in range(1, K + 1)
    )
    return total / h2(1.0 / K)
