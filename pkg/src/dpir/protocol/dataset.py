"""Dataset generation and message derivation.

Randomness everywhere in the protocol comes from numpy's PCG64 generator;
seeds are plain integers, so any transcript is reproducible from its seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DomainError, IndexOutOfRangeError


@dataclass(frozen=True)
class Dataset:
    """L i.i.d. records, each uniform on [1, K]."""

    K: int
    L: int
    records: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        if self.records.shape != (self.L,):
            raise DomainError("record array does not match L")


@dataclass(frozen=True)
class MessageBits:
    """Indicator bits of one search pattern over a dataset."""

    index: int
    bits: np.ndarray

    @property
    def length(self) -> int:
        return int(self.bits.shape[0])


def generate_dataset(K: int, L: int, seed: int) -> Dataset:
    """Draw L uniform records from [1, K] with a PCG64 stream."""
    if K < 2:
        raise DomainError(f"need K >= 2, got {K}")
    if L < 1:
        raise DomainError(f"need L >= 1, got {L}")
    rng = np.random.Generator(np.random.PCG64(seed))
    records = rng.integers(1, K + 1, size=L, dtype=np.int64)
    return Dataset(K=K, L=L, records=records, seed=int(seed))


def derive_message(dataset: Dataset, pattern: Sequence[int], index: int = 0) -> MessageBits:
    """Per-record indicator of membership in ``pattern`` (1-based values)."""
    values = np.asarray(sorted(int(i) for i in pattern), dtype=np.int64)
    if values.size == 0:
        raise IndexOutOfRangeError("pattern is empty")
    if values[0] < 1 or values[-1] > dataset.K:
        raise IndexOutOfRangeError(
            f"pattern values outside [1, {dataset.K}]: {pattern}"
        )
    bits = np.isin(dataset.records, values).astype(np.uint8)
    return MessageBits(index=index, bits=bits)
