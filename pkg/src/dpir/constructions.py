"""Builders for the specific pattern families the theory exercises.

Four family kinds, plus closed forms and an exhaustive scanner:

* exact search: one singleton pattern per alphabet value;
* disjoint subfamily: K/M blocks of M consecutive values -- behaves exactly
  like exact search over an alphabet of K/M;
* nested gamma subfamily: the first pattern is a prefix block of M = gamma*K
  values; each later pattern re-takes a gamma fraction of every Venn cell of
  its predecessors, so successive patterns stay maximally "spread";
* circular family: all K contiguous arcs of length K/2 on the alphabet
  circle, with an exhaustive ordered-triple scan showing that no two arcs can
  make both of the first two conditional entropies approach 1 bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DepthTooLargeError,
    DomainError,
    NotDivisibleError,
    OddAlphabetError,
)
from .infotheory import binary_entropy
from .patterns import PatternFamily, atoms, build_family


def exact_search_family(K: int) -> PatternFamily:
    """K singleton patterns; message m indicates records equal to value m."""
    if K < 2:
        raise DomainError(f"exact search needs K >= 2, got {K}")
    return build_family(K, [[k] for k in range(1, K + 1)], label=f"exact-K{K}")


def disjoint_subfamily(K: int, M: int) -> PatternFamily:
    """K/M disjoint blocks of M consecutive values; requires M | K."""
    if M < 1 or K < 1:
        raise DomainError(f"need K >= 1 and M >= 1, got K={K}, M={M}")
    if K % M != 0:
        raise NotDivisibleError(f"M={M} does not divide K={K}")
    if K // M < 1:
        raise DomainError("no patterns would be produced")
    blocks = [list(range(i * M + 1, (i + 1) * M + 1)) for i in range(K // M)]
    return build_family(K, blocks, label=f"disjoint-K{K}-M{M}")


def nested_depth_limit(K: int, M: int) -> int:
    """Largest allowed depth for the nested construction at these sizes.

    ceil(log_{1/gamma} sqrt(K)), floored at 2 so the two-pattern construction
    is always available; beyond this the Venn cells shrink under sqrt(K) and
    the size bounds backing the entropy argument lose their slack.
    """
    gamma = M / K
    raw = math.log(math.sqrt(K)) / math.log(1.0 / gamma)
    return max(2, math.ceil(raw - 1e-9))


def nested_gamma_subfamily(K: int, M: int, depth: int) -> PatternFamily:
    """Chain of ``depth`` patterns of size M where each overlaps every Venn
    cell of its predecessors in proportion gamma = M/K.

    The construction is made canonical: cells are visited in order of their
    smallest element and contribute floor(gamma * cell size) of their
    lowest-indexed elements; any shortfall against the exact total M is then
    filled from the cells with the most remaining capacity (later cells win
    ties), again lowest indices first.
    """
    if K < 2 or M < 1:
        raise DomainError(f"need K >= 2 and M >= 1, got K={K}, M={M}")
    if 2 * M > K:
        raise DomainError(f"need M <= K/2 (gamma <= 1/2), got K={K}, M={M}")
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    limit = nested_depth_limit(K, M)
    if depth > limit:
        raise DepthTooLargeError(
            f"depth {depth} exceeds guard {limit} for K={K}, M={M}"
        )

    sets: list[tuple[int, ...]] = [tuple(range(1, M + 1))]
    for step in range(2, depth + 1):
        partial = build_family(K, sets, label="nested-partial")
        part = atoms(partial, list(range(1, step)))
        takes = [(M * cell.size) // K for cell in part.cells]
        shortfall = M - sum(takes)
        spare = sorted(
            range(len(takes)),
            key=lambda i: (-(part.cells[i].size - takes[i]), -i),
        )
        for i in spare:
            if shortfall == 0:
                break
            extra = min(shortfall, part.cells[i].size - takes[i])
            takes[i] += extra
            shortfall -= extra
        chosen = np.concatenate(
            [part.members[i][: takes[i]] for i in range(len(takes)) if takes[i] > 0]
        )
        sets.append(tuple(sorted(int(v) for v in chosen)))
    return build_family(K, sets, label=f"nested-K{K}-M{M}-d{depth}")


def nested_conditional_lower_bound(K: int, M: int, l: int) -> float:
    """Closed-form floor on the per-symbol entropy of the l-th nested pattern
    given its predecessors.

    Sums, over the 2^(l-1) Venn parts of the first l-1 patterns, the binary
    entropy of the part's worst-case retained fraction weighted by the part's
    idealized probability.  H2 arguments are clamped to [0, 1]; at small K
    the +-(l-1) size slack can push them outside, and clamped terms simply
    contribute zero.
    """
    if K < 2 or M < 1 or 2 * M > K:
        raise DomainError(f"invalid nested sizes K={K}, M={M}")
    if l < 2:
        raise DomainError(f"conditioning depth l must be >= 2, got {l}")
    gamma = M / K
    total = 0.0
    for i in range(1, 2 ** (l - 1) + 1):
        m_i = bin(i - 1).count("1")
        scale = gamma ** (l - m_i) * (1.0 - gamma) ** m_i * K
        num = gamma * scale - l + 1
        den = scale + l - 1
        frac = min(1.0, max(0.0, num / den)) if den > 0 else 0.0
        prob = gamma ** (l - 1 - m_i) * (1.0 - gamma) ** m_i
        total += binary_entropy(frac) * prob
    return total


def circular_family(K: int) -> PatternFamily:
    """All K contiguous arcs of length K/2 on the alphabet circle.

    Arc k covers positions k+1 .. k+K/2 with wrap-around, so for K=4 the
    arcs are {2,3}, {3,4}, {4,1}, {1,2}.
    """
    if K < 4:
        raise DomainError(f"circular family needs K >= 4, got {K}")
    if K % 2 != 0:
        raise OddAlphabetError(f"circular family needs even K, got {K}")
    M = K // 2
    arcs = [
        [((k + j - 1) % K) + 1 for j in range(1, M + 1)]
        for k in range(1, K + 1)
    ]
    return build_family(K, arcs, label=f"circular-K{K}")


def exact_mi_closed_form(K: int, l: int) -> float:
    """Per-symbol I(next message; first l messages) for exact search:
    H2(1/K) - (1 - l/K) * H2(1/(K-l))."""
    if K < 2:
        raise DomainError(f"need K >= 2, got {K}")
    if not 1 <= l < K:
        raise DomainError(f"need 1 <= l < K, got l={l}")
    return binary_entropy(1.0 / K) - (1.0 - l / K) * binary_entropy(1.0 / (K - l))


@dataclass(frozen=True)
class Prop5ScanReport:
    """Result of the exhaustive ordered-triple scan over circular arcs.

    ``max_min`` is the maximum over triples (k1, k2, k3) of
    min(H(w_k2 | w_k1), H(w_k3 | w_k1, w_k2)); if arcs could drive both
    conditional entropies to 1 bit it would approach 1.  ``per_second_index``
    summarizes, for each k2, the first conditional entropy and the best k3.
    """

    K: int
    max_min: float
    best_triple: tuple[int, int, int]
    best_h2_given_first: float
    best_h3_given_pair: float
    triples_scanned: int
    first_index_fixed: bool
    per_second_index: tuple[tuple[int, float, int, float], ...]


def _counts_entropy(counts: np.ndarray, K: int) -> np.ndarray:
    """Entropy in bits along the last axis of an integer count array."""
    p = counts / K
    logp = np.zeros_like(p)
    np.log2(p, out=logp, where=p > 0)
    return -(p * logp).sum(axis=-1)


def prop5_triple_scan(K: int, exploit_symmetry: bool = True) -> Prop5ScanReport:
    """Exhaustively scan ordered arc triples of the circular family.

    By rotational symmetry the first index may be fixed to 1 (pass
    ``exploit_symmetry=False`` to spot-check the reduction); ties resolve to
    the first triple in (k2, k3) scan order.
    """
    if K < 8:
        raise DomainError(f"triple scan needs K >= 8, got {K}")
    family = circular_family(K)  # raises OddAlphabetError for odd K
    masks = np.zeros((K, K), dtype=np.int64)
    for m, s in enumerate(family.sets):
        masks[m, np.asarray(s) - 1] = 1

    best = (-1.0, (0, 0, 0), 0.0, 0.0)
    summary: list[tuple[int, float, int, float]] = []
    triples = 0
    k1_values = [1] if exploit_symmetry else list(range(1, K + 1))
    for k1 in k1_values:
        base1 = masks[k1 - 1]
        for k2 in range(1, K + 1):
            if k2 == k1:
                continue
            base12 = 2 * base1 + masks[k2 - 1]
            h12 = float(_counts_entropy(np.bincount(base12, minlength=4), K))
            cond21 = h12 - 1.0  # each arc alone is a fair bit: H = 1
            sig3 = 2 * base12[None, :] + masks  # (k3, alphabet) in 0..7
            counts = np.stack([(sig3 == s).sum(axis=1) for s in range(8)], axis=1)
            cond32 = _counts_entropy(counts, K) - h12
            cond32[k1 - 1] = -np.inf
            cond32[k2 - 1] = -np.inf
            mins = np.minimum(cond21, cond32)
            k3 = int(np.argmax(mins)) + 1
            triples += K - 2
            if exploit_symmetry:
                summary.append((k2, cond21, k3, float(mins[k3 - 1])))
            if mins[k3 - 1] > best[0]:
                best = (
                    float(mins[k3 - 1]),
                    (k1, k2, k3),
                    cond21,
                    float(cond32[k3 - 1]),
                )

    return Prop5ScanReport(
        K=K,
        max_min=best[0],
        best_triple=best[1],
        best_h2_given_first=best[2],
        best_h3_given_pair=best[3],
        triples_scanned=triples,
        first_index_fixed=exploit_symmetry,
        per_second_index=tuple(summary),
    )
