"""Search-pattern families and exact joint laws of their indicator bits.

A family is an alphabet of K equiprobable record values together with mu
subsets of it (the "patterns").  Each pattern induces one indicator bit per
record: 1 iff the record's value lies in the pattern.  Because the record is
uniform on [1, K], the joint law of any tuple of indicator bits is determined
by the sizes of the Venn atoms of the chosen patterns -- the maximal groups
of alphabet values sharing a membership signature.

Atoms are computed by incremental refinement: each additional pattern splits
every existing cell in one pass, so t patterns cost O(K * t) instead of 2^t
enumeration.  Probabilities stay exact rationals with denominator K; floats
only appear downstream when entropies are taken.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BadIndexListError,
    DomainError,
    DuplicateIndexError,
    DuplicatePatternError,
    EmptySetError,
    FamilyParseError,
    IndexOutOfRangeError,
)


@dataclass(frozen=True)
class PatternFamily:
    """Alphabet size K plus an ordered list of search patterns.

    Patterns are stored as strictly increasing tuples of 1-based alphabet
    indices.  Structural invariants are enforced here; duplicate patterns
    are additionally rejected by :func:`build_family` unless allowed.
    """

    K: int
    sets: tuple[tuple[int, ...], ...]
    label: str = ""

    def __post_init__(self) -> None:
        if self.K < 1:
            raise DomainError(f"alphabet size must be >= 1, got {self.K}")
        if len(self.sets) < 1:
            raise EmptySetError("a family needs at least one pattern")
        for m, s in enumerate(self.sets, start=1):
            if len(s) == 0:
                raise EmptySetError(f"pattern {m} is empty")
            if any(i < 1 or i > self.K for i in s):
                raise IndexOutOfRangeError(
                    f"pattern {m} has indices outside [1, {self.K}]: {s}"
                )
            if any(b <= a for a, b in zip(s, s[1:])):
                if len(set(s)) != len(s):
                    raise DuplicateIndexError(f"pattern {m} repeats an index: {s}")
                raise DomainError(f"pattern {m} is not sorted ascending: {s}")

    @property
    def num_patterns(self) -> int:
        return len(self.sets)

    def pattern(self, m: int) -> tuple[int, ...]:
        """The m-th pattern, 1-based."""
        if not 1 <= m <= self.num_patterns:
            raise BadIndexListError(
                f"pattern index {m} outside [1, {self.num_patterns}]"
            )
        return self.sets[m - 1]

    def is_balanced(self) -> bool:
        """True when all patterns have the same size (hence equal entropy)."""
        return len({len(s) for s in self.sets}) == 1


@dataclass(frozen=True)
class AtomCell:
    """One Venn atom: membership signature over the ordered patterns + size."""

    signature: tuple[int, ...]
    size: int


@dataclass(frozen=True)
class AtomPartition:
    """Partition of the alphabet into Venn atoms of an ordered pattern list.

    ``members`` holds, per cell, the sorted alphabet values in that cell; it
    is what makes incremental refinement and canonical element picking
    possible, and is excluded from equality (cell signatures and sizes
    determine it anyway).  Cells are ordered by their smallest element.
    """

    ordered_indices: tuple[int, ...]
    cells: tuple[AtomCell, ...]
    members: tuple[np.ndarray, ...] = field(compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.members) != len(self.cells):
            raise DomainError("cells and members are misaligned")
        sigs = [c.signature for c in self.cells]
        if len(set(sigs)) != len(sigs):
            raise DomainError("atom signatures must be pairwise distinct")

    @property
    def total(self) -> int:
        return sum(c.size for c in self.cells)


def build_family(
    K: int,
    sets: Iterable[Iterable[int]],
    label: str = "",
    allow_duplicate_patterns: bool = False,
) -> PatternFamily:
    """Validate and build a pattern family; each set is stored sorted.

    Raises EmptySetError, IndexOutOfRangeError, DuplicateIndexError, or
    DuplicatePatternError (unless ``allow_duplicate_patterns``).
    """
    normalized: list[tuple[int, ...]] = []
    for m, raw in enumerate(sets, start=1):
        items = [int(i) for i in raw]
        if len(set(items)) != len(items):
            raise DuplicateIndexError(f"pattern {m} repeats an index: {items}")
        normalized.append(tuple(sorted(items)))
    if not allow_duplicate_patterns and len(set(normalized)) != len(normalized):
        raise DuplicatePatternError("family repeats a pattern; pass the flag to allow")
    return PatternFamily(K=int(K), sets=tuple(normalized), label=label)


def _membership_lookup(K: int, pattern: np.ndarray) -> np.ndarray:
    """Transient dense bitmask over [0, K] marking the pattern's values."""
    lookup = np.zeros(K + 1, dtype=bool)
    lookup[pattern] = True
    return lookup


def _check_indices(family: PatternFamily, indices: Sequence[int]) -> tuple[int, ...]:
    out = tuple(int(i) for i in indices)
    if len(set(out)) != len(out):
        raise BadIndexListError(f"pattern indices repeat: {out}")
    for i in out:
        if not 1 <= i <= family.num_patterns:
            raise BadIndexListError(
                f"pattern index {i} outside [1, {family.num_patterns}]"
            )
    return out


def refine(partition: AtomPartition, family: PatternFamily, index: int) -> AtomPartition:
    """Split every cell of ``partition`` by membership in pattern ``index``.

    One pass over cells; each child keeps its parent's signature extended by
    the new membership bit.  Cells come back ordered by smallest element.
    """
    if index in partition.ordered_indices:
        raise BadIndexListError(f"pattern index {index} already refined")
    pattern = np.asarray(family.pattern(index), dtype=np.int64)
    lookup = _membership_lookup(family.K, pattern)
    cells: list[AtomCell] = []
    members: list[np.ndarray] = []
    for cell, elems in zip(partition.cells, partition.members):
        mask = lookup[elems]
        inside = elems[mask]
        outside = elems[~mask]
        if inside.size:
            cells.append(AtomCell(cell.signature + (1,), int(inside.size)))
            members.append(inside)
        if outside.size:
            cells.append(AtomCell(cell.signature + (0,), int(outside.size)))
            members.append(outside)
    order = sorted(range(len(cells)), key=lambda i: int(members[i][0]))
    return AtomPartition(
        ordered_indices=partition.ordered_indices + (index,),
        cells=tuple(cells[i] for i in order),
        members=tuple(members[i] for i in order),
    )


def atoms(family: PatternFamily, indices: Sequence[int] = ()) -> AtomPartition:
    """Venn-atom partition of the alphabet for the given ordered patterns.

    The empty index list yields the single whole-alphabet cell.  The result
    for a prefix is always a coarsening of the result for the extended list.
    """
    idx = _check_indices(family, indices)
    part = AtomPartition(
        ordered_indices=(),
        cells=(AtomCell((), family.K),),
        members=(np.arange(1, family.K + 1, dtype=np.int64),),
    )
    for i in idx:
        part = refine(part, family, i)
    return part


@dataclass(frozen=True)
class JointBitDistribution:
    """Exact joint probability mass of a tuple of indicator bits.

    Masses are rationals with denominator K; zero-mass signatures are
    omitted.  Coordinate order matches the pattern list that produced it.
    """

    arity: int
    mass: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self) -> None:
        total = Fraction(0)
        for sig, p in self.mass.items():
            if len(sig) != self.arity:
                raise DomainError(f"signature {sig} does not match arity {self.arity}")
            if p < 0:
                raise DomainError(f"negative mass at {sig}")
            total += p
        if total != 1:
            raise DomainError(f"masses sum to {total}, expected 1")

    def marginal(self, keep: Sequence[int]) -> "JointBitDistribution":
        """Marginal over the coordinate positions in ``keep`` (0-based)."""
        keep = tuple(keep)
        if any(not 0 <= c < self.arity for c in keep):
            raise DomainError(f"coordinates {keep} outside arity {self.arity}")
        out: dict[tuple[int, ...], Fraction] = {}
        for sig, p in self.mass.items():
            sub = tuple(sig[c] for c in keep)
            out[sub] = out.get(sub, Fraction(0)) + p
        return JointBitDistribution(arity=len(keep), mass=out)

    def prefix(self, t: int) -> "JointBitDistribution":
        """Marginal over the first ``t`` coordinates."""
        return self.marginal(range(t))


def joint_distribution(
    family: PatternFamily, indices: Sequence[int]
) -> JointBitDistribution:
    """Exact joint law of the indicator bits of the listed patterns."""
    part = atoms(family, indices)
    mass = {c.signature: Fraction(c.size, family.K) for c in part.cells}
    return JointBitDistribution(arity=len(part.ordered_indices), mass=mass)


# -- family document format ----------------------------------------------------
#
# UTF-8 JSON: {"K": <int>, "label": <string>, "sets": [[ascending 1-based], ...]}
# Canonical form sorts each set ascending and preserves pattern order.

def save_family(family: PatternFamily) -> str:
    """Serialize a family to its canonical JSON document."""
    doc = {
        "K": family.K,
        "label": family.label,
        "sets": [list(s) for s in family.sets],
    }
    return json.dumps(doc, indent=2) + "\n"


def load_family(text: str, allow_duplicate_patterns: bool = False) -> PatternFamily:
    """Parse a family document; raises FamilyParseError on malformed input."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FamilyParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FamilyParseError("document root must be an object")
    for key in ("K", "sets"):
        if key not in doc:
            raise FamilyParseError(f"missing required key {key!r}")
    if not isinstance(doc["K"], int) or isinstance(doc["K"], bool):
        raise FamilyParseError("K must be an integer")
    label = doc.get("label", "")
    if not isinstance(label, str):
        raise FamilyParseError("label must be a string")
    sets = doc["sets"]
    if not isinstance(sets, list) or not all(isinstance(s, list) for s in sets):
        raise FamilyParseError("sets must be a list of lists")
    for s in sets:
        if not all(isinstance(i, int) and not isinstance(i, bool) for i in s):
            raise FamilyParseError("pattern entries must be integers")
    return build_family(doc["K"], sets, label=label,
                        allow_duplicate_patterns=allow_duplicate_patterns)
