"""Fixed-length typical-set compression of Bernoulli(p) bit messages.

The message is cut into blocks of n bits.  A block whose Hamming weight lies
in a window [w_lo, w_hi] around p*n is replaced by its index in the
lexicographic enumeration of all window sequences (weight-class offset plus
in-class combinadic rank), padded to b = ceil(log2 |window set|) bits.  A
block outside the window is atypical: it encodes as index 0 and the mismatch
surfaces later as a decoding error, which is the vanishing-error budget the
window was sized for.  Every codeword has the same length B = blocks * b, so
the retrieval scheme can lay out chunks without per-message bookkeeping.

p = 1/2 is incompressible and short-circuits to the identity codec (B = L).

Rank arithmetic walks each block once, updating a single running binomial
coefficient per position; with Python integers this is exact at any block
length.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from ..errors import DomainError, InfeasibleBudgetError, LengthMismatchError
from .dataset import MessageBits

DEFAULT_BLOCK_LENGTH = 4096


@dataclass(frozen=True)
class CodecParams:
    """Frozen description of one codec design; see :func:`design_codec`."""

    p: float
    block_length: int
    weight_lo: int
    weight_hi: int
    codeword_bits: int
    blocks_per_message: int
    total_bits: int
    target_failure: float
    predicted_failure: float
    overhead: float
    identity: bool

    @property
    def message_length(self) -> int:
        return self.block_length * self.blocks_per_message


def _window_total(n: int, w_lo: int, w_hi: int) -> int:
    return sum(math.comb(n, w) for w in range(w_lo, w_hi + 1))


def design_codec(
    p: float,
    L: int,
    target_failure: float,
    block_length: int = DEFAULT_BLOCK_LENGTH,
) -> CodecParams:
    """Choose a weight window meeting the per-message failure budget.

    The window grows symmetrically around round(p*n) until the union bound
    (blocks * per-block out-of-window mass) drops below ``target_failure``;
    if that never happens inside [0, n], the budget is infeasible.  When L is
    not a multiple of ``block_length``, the largest divisor of L not
    exceeding it is used instead.
    """
    if not 0.0 < p <= 0.5:
        raise DomainError(f"per-bit probability must be in (0, 1/2], got {p}")
    if L < 1:
        raise DomainError(f"need L >= 1, got {L}")
    if block_length < 1:
        raise DomainError(f"need block_length >= 1, got {block_length}")

    if p == 0.5:
        return CodecParams(
            p=p, block_length=L, weight_lo=0, weight_hi=L,
            codeword_bits=L, blocks_per_message=1, total_bits=L,
            target_failure=target_failure, predicted_failure=0.0,
            overhead=0.0, identity=True,
        )

    n = block_length
    if L % n != 0:
        n = max(d for d in range(1, min(block_length, L) + 1) if L % d == 0)
    if n < 8:
        raise DomainError(
            f"L={L} admits no usable block length <= {block_length}"
        )
    blocks = L // n

    center = int(round(p * n))
    pmf = binom.pmf(np.arange(n + 1), n, p)
    cdf = np.cumsum(pmf)
    max_radius = min(center, n - center)
    chosen = None
    for r in range(max_radius + 1):
        lo, hi = center - r, center + r
        inside = cdf[hi] - (cdf[lo - 1] if lo > 0 else 0.0)
        tail = max(0.0, 1.0 - float(inside))
        if (lo, hi) != (0, n) and tail == 0.0:
            tail = 5e-324  # window misses weights, so the true mass is positive
        failure = blocks * tail
        if failure <= target_failure:
            chosen = (lo, hi, failure)
            break
    if chosen is None:
        raise InfeasibleBudgetError(
            f"no symmetric window inside [0, {n}] meets failure {target_failure}"
        )
    w_lo, w_hi, predicted = chosen
    total = _window_total(n, w_lo, w_hi)
    b = (total - 1).bit_length()  # ceil(log2 total)
    B = blocks * b
    entropy = -(p * math.log2(p) + (1 - p) * math.log2(1 - p))
    return CodecParams(
        p=p, block_length=n, weight_lo=w_lo, weight_hi=w_hi,
        codeword_bits=b, blocks_per_message=blocks, total_bits=B,
        target_failure=target_failure, predicted_failure=predicted,
        overhead=B / (L * entropy) - 1.0, identity=False,
    )


@functools.lru_cache(maxsize=64)
def _class_offsets(n: int, w_lo: int, w_hi: int) -> tuple[int, ...]:
    """offsets[w - w_lo] = number of window sequences of weight < w."""
    offsets = [0]
    for w in range(w_lo, w_hi):
        offsets.append(offsets[-1] + math.comb(n, w))
    return tuple(offsets)


def _rank_in_class(block: list[int], n: int, k: int) -> int:
    """Lexicographic rank of a weight-k block among weight-k blocks.

    Maintains c = C(n-1-j, r) while scanning position j with r ones still
    unplaced; a one at j contributes c (all lex-smaller strings put a zero
    there and r ones behind it).
    """
    rank = 0
    r = k
    m = n - 1
    c = math.comb(m, r) if r <= m else 0
    for j in range(n):
        if block[j]:
            rank += c
            if r == 1:
                break
            c = c * r // m if m else 0
            r -= 1
        else:
            c = c * (m - r) // m if m else 0
        m -= 1
    return rank


def _unrank_in_class(rank: int, n: int, k: int) -> list[int]:
    """Inverse of :func:`_rank_in_class`."""
    bits = [0] * n
    r = k
    m = n - 1
    c = math.comb(m, r) if r <= m else 0
    for j in range(n):
        if r == 0:
            break
        if rank >= c:
            bits[j] = 1
            rank -= c
            if r == 1:
                break  # all ones placed
            c = c * r // m if m else 0
            r -= 1
        else:
            c = c * (m - r) // m if m else 0
        m -= 1
    return bits


def _int_to_bits(value: int, width: int) -> np.ndarray:
    data = value.to_bytes((width + 7) // 8, "little")
    return np.unpackbits(
        np.frombuffer(data, dtype=np.uint8), bitorder="little"
    )[:width]


def _bits_to_int(bits: np.ndarray) -> int:
    packed = np.packbits(bits.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def encode(message: MessageBits, params: CodecParams) -> tuple[np.ndarray, bool]:
    """Compress a message; returns (codeword bits of length B, atypical flag)."""
    if message.length != params.message_length:
        raise LengthMismatchError(
            f"message length {message.length} != codec length {params.message_length}"
        )
    if params.identity:
        return message.bits.copy(), False

    n = params.block_length
    offsets = _class_offsets(n, params.weight_lo, params.weight_hi)
    out = np.zeros(params.total_bits, dtype=np.uint8)
    atypical = False
    b = params.codeword_bits
    for i in range(params.blocks_per_message):
        block = message.bits[i * n:(i + 1) * n]
        k = int(block.sum())
        if params.weight_lo <= k <= params.weight_hi:
            value = offsets[k - params.weight_lo] + _rank_in_class(
                block.tolist(), n, k
            )
        else:
            value = 0
            atypical = True
        out[i * b:(i + 1) * b] = _int_to_bits(value, b)
    return out, atypical


def decode_codeword(
    codeword: np.ndarray, params: CodecParams, index: int = 0
) -> MessageBits:
    """Invert :func:`encode`; total on any input (corrupt values clamp)."""
    if codeword.shape[0] != params.total_bits:
        raise LengthMismatchError(
            f"codeword length {codeword.shape[0]} != B = {params.total_bits}"
        )
    if params.identity:
        return MessageBits(index=index, bits=codeword.astype(np.uint8).copy())

    n = params.block_length
    offsets = _class_offsets(n, params.weight_lo, params.weight_hi)
    total = offsets[-1] + math.comb(n, params.weight_hi)
    b = params.codeword_bits
    bits = np.zeros(params.message_length, dtype=np.uint8)
    for i in range(params.blocks_per_message):
        value = _bits_to_int(codeword[i * b:(i + 1) * b])
        if value >= total:
            value = total - 1
        w = params.weight_hi
        for cls in range(len(offsets) - 1, -1, -1):
            if value >= offsets[cls]:
                w = params.weight_lo + cls
                value -= offsets[cls]
                break
        bits[i * n:(i + 1) * n] = _unrank_in_class(value, n, w)
    return MessageBits(index=index, bits=bits)
