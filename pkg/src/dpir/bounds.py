"""Download lower bounds over message sequences, and reference rates.

The central object is the converse bound

    D/L >= sum_l  H(w_{s_l} | w_{s_1..s_{l-1}}) / N^(l-1)

evaluated for an ordered sequence s of distinct message indices.  Any
sequence gives a valid bound (terms are nonnegative, so truncation only
weakens it); making the bound strong requires optimizing the sequence, for
which an exact subset-DP ("exhaustive") and a greedy heuristic are provided.

Entropies come from an :class:`EntropyModel`.  The family-backed model keeps
two memo tables -- Venn partitions and joint entropies, both keyed by the
*set* of messages involved, since entropy does not care about order -- so
sequence optimization reuses every conditional entropy it has seen.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Literal, Protocol, Sequence

from .constructions import exact_search_family
from .errors import (
    BadSequenceError,
    DomainError,
    ExhaustiveSizeError,
    NotBalancedError,
    SequenceTooShortError,
    ServerCountError,
)
from .patterns import AtomPartition, PatternFamily, atoms, refine

EXHAUSTIVE_LIMIT = 10
BALANCED_TOLERANCE = 1e-9


class EntropyModel(Protocol):
    """Per-symbol entropies of a message ensemble, in bits."""

    @property
    def message_count(self) -> int: ...

    def per_symbol_entropy(self, index: int) -> float: ...

    def per_symbol_conditional_entropy(
        self, index: int, prefix: Sequence[int]
    ) -> float: ...


class PatternFamilyModel:
    """Entropy model backed by exact Venn-atom refinement of a family.

    Conditional entropies are differences of joint entropies, which are
    memoized per message *set*; partitions are cached too, so extending a
    prefix by one message costs a single O(K) refinement.  Safe for
    concurrent readers: the caches only ever gain identical values.
    """

    def __init__(self, family: PatternFamily):
        self.family = family
        empty = atoms(family, [])
        self._partitions: dict[frozenset[int], AtomPartition] = {frozenset(): empty}
        self._entropies: dict[frozenset[int], float] = {frozenset(): 0.0}
        self._lock = threading.Lock()

    @property
    def message_count(self) -> int:
        return self.family.num_patterns

    def _partition(self, wanted: frozenset[int]) -> AtomPartition:
        missing: list[int] = []
        cur = wanted
        while cur not in self._partitions:
            k = max(cur)
            missing.append(k)
            cur = cur - {k}
        part = self._partitions[cur]
        for k in reversed(missing):
            cur = cur | {k}
            part = refine(part, self.family, k)
            with self._lock:
                self._partitions.setdefault(cur, part)
            part = self._partitions[cur]
        return part

    def _joint_entropy(self, wanted: frozenset[int]) -> float:
        cached = self._entropies.get(wanted)
        if cached is not None:
            return cached
        part = self._partition(wanted)
        K = self.family.K
        value = math.fsum(
            -(c.size / K) * math.log2(c.size / K) for c in part.cells
        )
        with self._lock:
            self._entropies.setdefault(wanted, value)
        return self._entropies[wanted]

    def _check_index(self, index: int) -> int:
        if not 1 <= index <= self.message_count:
            raise BadSequenceError(
                f"message index {index} outside [1, {self.message_count}]"
            )
        return int(index)

    def per_symbol_entropy(self, index: int) -> float:
        return self._joint_entropy(frozenset({self._check_index(index)}))

    def per_symbol_conditional_entropy(
        self, index: int, prefix: Sequence[int]
    ) -> float:
        k = self._check_index(index)
        pset = frozenset(self._check_index(i) for i in prefix)
        if len(pset) != len(tuple(prefix)):
            raise BadSequenceError(f"prefix repeats an index: {tuple(prefix)}")
        if k in pset:
            raise BadSequenceError(f"index {k} already appears in the prefix")
        if not pset:
            return self.per_symbol_entropy(k)
        value = self._joint_entropy(pset | {k}) - self._joint_entropy(pset)
        return max(0.0, value)

    def is_balanced(self, tolerance: float = BALANCED_TOLERANCE) -> bool:
        values = [self.per_symbol_entropy(m) for m in range(1, self.message_count + 1)]
        return max(values) - min(values) <= tolerance


class IndependentUniformModel:
    """mu mutually independent messages, each of h bits per symbol."""

    def __init__(self, message_count: int, per_symbol_entropy_bits: float = 1.0):
        if message_count < 1:
            raise DomainError(f"need at least one message, got {message_count}")
        if per_symbol_entropy_bits < 0:
            raise DomainError("per-symbol entropy cannot be negative")
        self._mu = int(message_count)
        self._h = float(per_symbol_entropy_bits)

    @property
    def message_count(self) -> int:
        return self._mu

    def per_symbol_entropy(self, index: int) -> float:
        if not 1 <= index <= self._mu:
            raise BadSequenceError(f"message index {index} outside [1, {self._mu}]")
        return self._h

    def per_symbol_conditional_entropy(
        self, index: int, prefix: Sequence[int]
    ) -> float:
        self.per_symbol_entropy(index)
        return self._h

    def is_balanced(self, tolerance: float = BALANCED_TOLERANCE) -> bool:
        return True


@dataclass(frozen=True)
class ConverseReport:
    """A message sequence with its per-record download lower bound.

    ``normalized_bound`` divides by the minimum per-symbol entropy over all
    messages (the worst-case rate denominator), making it comparable to the
    asymptote N/(N-1).  ``truncated_at`` records an optimization depth cap.
    """

    sequence: tuple[int, ...]
    per_record_bound: float
    normalized_bound: float
    asymptote: float
    gap: float
    N: int
    truncated_at: int | None = None


def _geometric_weights(N: int, count: int) -> list[float]:
    weights = [1.0]
    for _ in range(count - 1):
        weights.append(weights[-1] / N)
    return weights


def _check_server_count(N: int) -> int:
    if int(N) != N or N < 2:
        raise ServerCountError(f"need at least 2 replicated servers, got {N}")
    return int(N)


def _min_entropy(model: EntropyModel) -> float:
    return min(
        model.per_symbol_entropy(m) for m in range(1, model.message_count + 1)
    )


def converse_bound(
    model: EntropyModel,
    N: int,
    sequence: Sequence[int],
    truncated_at: int | None = None,
) -> ConverseReport:
    """Evaluate the converse bound for one ordered message sequence.

    Partial sequences are allowed; dropping trailing nonnegative terms only
    weakens the bound.
    """
    N = _check_server_count(N)
    seq = tuple(int(i) for i in sequence)
    if not seq:
        raise BadSequenceError("sequence must be nonempty")
    if len(set(seq)) != len(seq):
        raise BadSequenceError(f"sequence repeats an index: {seq}")
    for i in seq:
        if not 1 <= i <= model.message_count:
            raise BadSequenceError(
                f"index {i} outside [1, {model.message_count}]"
            )
    weights = _geometric_weights(N, len(seq))
    per_record = math.fsum(
        model.per_symbol_conditional_entropy(seq[l], seq[:l]) * weights[l]
        for l in range(len(seq))
    )
    h_min = _min_entropy(model)
    if h_min <= 0:
        raise DomainError("cannot normalize: a message has zero entropy")
    asymptote = asymptote_reciprocal(N)
    normalized = per_record / h_min
    return ConverseReport(
        sequence=seq,
        per_record_bound=per_record,
        normalized_bound=normalized,
        asymptote=asymptote,
        gap=asymptote - normalized,
        N=N,
        truncated_at=truncated_at,
    )


def best_sequence(
    model: EntropyModel,
    N: int,
    strategy: Literal["exhaustive", "greedy"] = "exhaustive",
    max_len: int | None = None,
) -> ConverseReport:
    """Optimize the converse bound over message sequences.

    ``exhaustive`` finds a true maximizer by dynamic programming over chosen
    prefix sets (entropy terms depend on the prefix only through its set, so
    permutations collapse to 2^mu states); ties resolve to the
    lexicographically smallest sequence.  ``greedy`` extends the sequence by
    the unused message of largest conditional entropy, lowest index first on
    ties.  ``max_len`` caps the optimization depth; terms beyond depth l are
    already damped by N^(-l).
    """
    N = _check_server_count(N)
    mu = model.message_count
    if max_len is not None and max_len < 1:
        raise DomainError(f"max_len must be >= 1, got {max_len}")
    depth = mu if max_len is None else min(max_len, mu)
    truncated = depth if depth < mu else None

    if strategy == "greedy":
        chosen: list[int] = []
        remaining = set(range(1, mu + 1))
        for _ in range(depth):
            best_k, best_v = None, -1.0
            for k in sorted(remaining):
                v = model.per_symbol_conditional_entropy(k, chosen)
                if v > best_v:
                    best_k, best_v = k, v
            chosen.append(best_k)
            remaining.discard(best_k)
        return converse_bound(model, N, chosen, truncated_at=truncated)

    if strategy != "exhaustive":
        raise DomainError(f"unknown strategy {strategy!r}")
    if mu > EXHAUSTIVE_LIMIT:
        raise ExhaustiveSizeError(
            f"exhaustive search capped at mu <= {EXHAUSTIVE_LIMIT}, got {mu}"
        )

    weights = _geometric_weights(N, depth)
    members = {mask: [i + 1 for i in range(mu) if mask >> i & 1]
               for mask in range(1 << mu)}
    # value[mask] = best sum of the remaining positions given prefix-set mask
    value = [0.0] * (1 << mu)
    masks_by_size: list[list[int]] = [[] for _ in range(mu + 1)]
    for mask in range(1 << mu):
        masks_by_size[bin(mask).count("1")].append(mask)
    for size in range(depth - 1, -1, -1):
        w = weights[size]
        for mask in masks_by_size[size]:
            prefix = members[mask]
            best = -1.0
            for k in range(1, mu + 1):
                if mask >> (k - 1) & 1:
                    continue
                v = (model.per_symbol_conditional_entropy(k, prefix) * w
                     + value[mask | 1 << (k - 1)])
                if v > best:
                    best = v
            value[mask] = best

    chosen = []
    mask = 0
    for size in range(depth):
        w = weights[size]
        prefix = members[mask]
        target = value[mask]
        for k in range(1, mu + 1):
            if mask >> (k - 1) & 1:
                continue
            v = (model.per_symbol_conditional_entropy(k, prefix) * w
                 + value[mask | 1 << (k - 1)])
            if v == target:
                chosen.append(k)
                mask |= 1 << (k - 1)
                break
    return converse_bound(model, N, chosen, truncated_at=truncated)


def pir_capacity(mu: int, N: int) -> float:
    """Capacity of classic PIR with mu independent balanced messages:
    (1 + 1/N + ... + 1/N^(mu-1))^(-1)."""
    if mu < 1:
        raise DomainError(f"need mu >= 1, got {mu}")
    N = _check_server_count(N)
    return 1.0 / math.fsum(_geometric_weights(N, mu))


def achievable_rate(model: EntropyModel, N: int) -> float:
    """General achievable rate (1 - 1/N) * H_min / H_max."""
    N = _check_server_count(N)
    values = [model.per_symbol_entropy(m) for m in range(1, model.message_count + 1)]
    h_max = max(values)
    if h_max <= 0:
        raise DomainError("all messages are deterministic; rate undefined")
    return (1.0 - 1.0 / N) * min(values) / h_max


def asymptote_reciprocal(N: int) -> float:
    """The large-family normalized download limit N/(N-1) = (1 - 1/N)^(-1)."""
    N = _check_server_count(N)
    return N / (N - 1.0)


def sufficient_condition_profile(
    model: EntropyModel,
    sequence: Sequence[int],
    horizon: int,
) -> list[float]:
    """Normalized mutual-information profile rho_l along a message sequence.

    rho_l = I(w_{s_{l+1}}; w_{s_1..s_l}) / H(w) for l = 1..horizon.  If every
    rho_l vanishes as the family grows, the normalized download bound forces
    asymptotic rate 1 - 1/N.  Requires a balanced model; H(w) is taken from
    the target message (all entropies agree within the balance tolerance).
    """
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1, got {horizon}")
    values = [model.per_symbol_entropy(m) for m in range(1, model.message_count + 1)]
    if max(values) - min(values) > BALANCED_TOLERANCE:
        raise NotBalancedError(
            "profile requires equal per-symbol entropies "
            f"(spread {max(values) - min(values):.3g})"
        )
    seq = tuple(int(i) for i in sequence)
    if len(seq) < horizon + 1:
        raise SequenceTooShortError(
            f"need at least horizon+1 = {horizon + 1} indices, got {len(seq)}"
        )
    if len(set(seq)) != len(seq):
        raise BadSequenceError(f"sequence repeats an index: {seq}")
    profile = []
    for l in range(1, horizon + 1):
        target = seq[l]
        h = model.per_symbol_entropy(target)
        if h <= 0:
            raise DomainError("zero-entropy message; profile undefined")
        cond = model.per_symbol_conditional_entropy(target, seq[:l])
        profile.append(max(0.0, (h - cond) / h))
    return profile


def figure1_curve(
    K_max: int, N_list: Sequence[int]
) -> list[tuple[int, int, float]]:
    """Normalized converse of exact search versus alphabet size.

    One row (K, N, normalized_bound) per K in [2, K_max] and N in N_list,
    using the natural sequence 1..K.  Conditional entropies are computed
    once per K and reused across all N.
    """
    if K_max < 2:
        raise DomainError(f"need K_max >= 2, got {K_max}")
    servers = [_check_server_count(n) for n in N_list]
    if not servers:
        raise DomainError("N_list must be nonempty")
    rows: list[tuple[int, int, float]] = []
    for K in range(2, K_max + 1):
        model = PatternFamilyModel(exact_search_family(K))
        terms = [
            model.per_symbol_conditional_entropy(l, range(1, l))
            for l in range(1, K + 1)
        ]
        h = model.per_symbol_entropy(1)
        for N in servers:
            weights = _geometric_weights(N, K)
            bound = math.fsum(t * w for t, w in zip(terms, weights))
            rows.append((K, N, bound / h))
    return rows
