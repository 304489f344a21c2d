"""The one-mask XOR retrieval scheme and its wire records.

Each of the mu compressed messages is split into N-1 chunks of
B' = ceil(B / (N-1)) bits (the last chunk zero-padded).  The client draws a
uniform mask h over all mu*(N-1) chunk coordinates, sends h itself to server
1 and h with the coordinate of the desired message's (n-1)-th chunk flipped
to server n.  Every query is marginally uniform whatever the target, which
is the whole privacy argument; answers are deterministic XORs of the
selected chunks, so XORing server n's answer with server 1's recovers chunk
n-1 of the desired codeword and nothing else.

Queries and answers serialize to length-prefixed byte strings (little-endian
bit packing) so the simulator could sit on a real wire unchanged.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, LayoutMismatchError, LengthMismatchError
from .codec import CodecParams, decode_codeword
from .dataset import MessageBits


@dataclass(frozen=True)
class Query:
    server_id: int
    coefficients: np.ndarray  # uint8 bits, length mu*(N-1)


@dataclass(frozen=True)
class Answer:
    server_id: int
    payload: np.ndarray  # uint8 bits, length B'


def chunk_length(total_bits: int, N: int) -> int:
    """B' = ceil(B / (N-1))."""
    if N < 2:
        raise DomainError(f"need N >= 2, got {N}")
    return -(-total_bits // (N - 1))


def split_chunks(codewords: np.ndarray, N: int) -> np.ndarray:
    """(mu, B) codeword bits -> (mu, N-1, B') chunks, zero-padded."""
    mu, B = codewords.shape
    Bp = chunk_length(B, N)
    padded = np.zeros((mu, (N - 1) * Bp), dtype=np.uint8)
    padded[:, :B] = codewords
    return padded.reshape(mu, N - 1, Bp)


def coordinate(theta: int, chunk: int, N: int) -> int:
    """Flat index of (message theta, chunk j), both 1-based."""
    return (theta - 1) * (N - 1) + (chunk - 1)


def queries_from_mask(h: np.ndarray, theta: int, mu: int, N: int) -> list[Query]:
    """The deterministic mask-to-queries map: server 1 gets h itself, server n
    gets h with the coordinate of (theta, chunk n-1) flipped."""
    if N < 2:
        raise DomainError(f"need N >= 2, got {N}")
    if not 1 <= theta <= mu:
        raise DomainError(f"theta {theta} outside [1, {mu}]")
    if h.shape != (mu * (N - 1),):
        raise LayoutMismatchError(
            f"mask has {h.shape} coefficients, layout needs {mu * (N - 1)}"
        )
    queries = [Query(server_id=1, coefficients=h.copy())]
    for n in range(2, N + 1):
        coeffs = h.copy()
        coeffs[coordinate(theta, n - 1, N)] ^= 1
        queries.append(Query(server_id=n, coefficients=coeffs))
    return queries


def client_queries(
    theta: int, mu: int, N: int, seed: int
) -> tuple[list[Query], np.ndarray]:
    """Draw the session mask h and derive all N queries from it."""
    if N < 2:
        raise DomainError(f"need N >= 2, got {N}")
    rng = np.random.Generator(np.random.PCG64(seed))
    h = rng.integers(0, 2, size=mu * (N - 1), dtype=np.uint8)
    return queries_from_mask(h, theta, mu, N), h


def server_answer(query: Query, chunks: np.ndarray) -> Answer:
    """XOR of the chunks selected by the query's coefficient vector."""
    mu, n_chunks, Bp = chunks.shape
    if query.coefficients.shape != (mu * n_chunks,):
        raise LayoutMismatchError(
            f"query has {query.coefficients.shape[0]} coefficients, "
            f"layout needs {mu * n_chunks}"
        )
    selected = np.flatnonzero(query.coefficients)
    if selected.size == 0:
        return Answer(server_id=query.server_id, payload=np.zeros(Bp, dtype=np.uint8))
    flat = chunks.reshape(mu * n_chunks, Bp)
    payload = np.bitwise_xor.reduce(flat[selected], axis=0)
    return Answer(server_id=query.server_id, payload=payload)


def client_decode(
    answers: list[Answer],
    h: np.ndarray,
    theta: int,
    params: CodecParams,
    N: int,
) -> MessageBits:
    """Cancel the mask and reassemble + decompress the desired codeword."""
    if len(answers) != N:
        raise LengthMismatchError(f"expected {N} answers, got {len(answers)}")
    Bp = answers[0].payload.shape[0]
    if any(a.payload.shape != (Bp,) for a in answers):
        raise LengthMismatchError("answers have unequal lengths")
    chunks = [answers[j].payload ^ answers[0].payload for j in range(1, N)]
    codeword = np.concatenate(chunks)[: params.total_bits]
    return decode_codeword(codeword, params, index=theta)


def verify_query_bijection(mu: int, N: int, theta: int, samples: int, seed: int) -> bool:
    """Check h -> query_n is invertible for each server on sampled masks."""
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(samples):
        h = rng.integers(0, 2, size=mu * (N - 1), dtype=np.uint8)
        for n in range(2, N + 1):
            q = h.copy()
            q[coordinate(theta, n - 1, N)] ^= 1
            back = q.copy()
            back[coordinate(theta, n - 1, N)] ^= 1
            if not np.array_equal(back, h):
                return False
    return True


# -- wire format ----------------------------------------------------------------
#
# record := server_id (u8) | bit_count (u32 LE) | ceil(bit_count/8) bytes,
# bits packed little-endian within each byte.

def _pack_bits(server_id: int, bits: np.ndarray) -> bytes:
    body = np.packbits(bits.astype(np.uint8), bitorder="little").tobytes()
    return struct.pack("<BI", server_id, bits.shape[0]) + body


def _unpack_bits(data: bytes) -> tuple[int, np.ndarray]:
    if len(data) < 5:
        raise LengthMismatchError("record shorter than its header")
    server_id, bit_count = struct.unpack_from("<BI", data)
    body = data[5:]
    if len(body) != (bit_count + 7) // 8:
        raise LengthMismatchError(
            f"payload holds {len(body)} bytes, header promises {bit_count} bits"
        )
    bits = np.unpackbits(
        np.frombuffer(body, dtype=np.uint8), bitorder="little"
    )[:bit_count]
    return server_id, bits


def pack_query(query: Query) -> bytes:
    return _pack_bits(query.server_id, query.coefficients)


def unpack_query(data: bytes) -> Query:
    server_id, bits = _unpack_bits(data)
    return Query(server_id=server_id, coefficients=bits)


def pack_answer(answer: Answer) -> bytes:
    return _pack_bits(answer.server_id, answer.payload)


def unpack_answer(data: bytes) -> Answer:
    server_id, bits = _unpack_bits(data)
    return Answer(server_id=server_id, payload=bits)
