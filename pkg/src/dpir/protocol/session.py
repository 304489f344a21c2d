"""End-to-end protocol sessions, rate experiments, and the privacy audit.

A session: derive the mu indicator messages from a fresh dataset, compress
them with one shared codec, split into chunks, run the one-mask query/answer
exchange against N simulated servers, decode, and account the download.  All
randomness derives from a single seed through ``numpy.random.SeedSequence``,
so every transcript and report is bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2_contingency

from ..bounds import PatternFamilyModel, achievable_rate, best_sequence
from ..errors import DomainError, NotBalancedError
from ..infotheory import binary_entropy
from ..patterns import PatternFamily
from .codec import CodecParams, DEFAULT_BLOCK_LENGTH, design_codec, encode
from .dataset import Dataset, MessageBits, derive_message, generate_dataset
from .scheme import (
    Query,
    client_decode,
    client_queries,
    pack_query,
    server_answer,
    split_chunks,
    verify_query_bijection,
)


@dataclass(frozen=True)
class SessionTranscript:
    """One protocol run: queries, per-server download, decode outcome."""

    theta: int
    queries: tuple[Query, ...]
    answer_bits_per_server: tuple[float, ...]
    download_bits: float
    success: bool
    decoded: MessageBits
    measured_rate: float


@dataclass(frozen=True)
class RateExperimentReport:
    family_label: str
    K: int
    pattern_size: int
    message_count: int
    N: int
    L: int
    trials: int
    seed: int
    error_count: int
    empirical_error_rate: float
    mean_measured_rate: float
    download_bits_per_session: float
    achievable_rate: float
    converse_rate_upper_bound: float
    codec: CodecParams


@dataclass(frozen=True)
class ServerAudit:
    server_id: int
    max_frequency_deviation: float
    frequency_limit: float
    frequencies_ok: bool
    chi2_statistic: float
    chi2_p_value: float
    chi2_ok: bool


@dataclass(frozen=True)
class PrivacyAuditReport:
    message_count: int
    N: int
    thetas: tuple[int, ...]
    trials_per_theta: int
    seed: int
    projection_bits: int
    significance: float
    servers: tuple[ServerAudit, ...]
    bijection_samples: int
    bijection_ok: bool
    passed: bool


def _balanced_pattern_size(family: PatternFamily) -> int:
    sizes = {len(s) for s in family.sets}
    if len(sizes) != 1:
        raise NotBalancedError(
            f"protocol requires equal pattern sizes, got {sorted(sizes)}"
        )
    return sizes.pop()


def _child_seeds(seed: int, count: int) -> list[int]:
    state = np.random.SeedSequence(seed).generate_state(count, np.uint64)
    return [int(s) for s in state]


def _prepared_chunks(
    family: PatternFamily, dataset: Dataset, params: CodecParams, N: int
) -> tuple[np.ndarray, list[MessageBits]]:
    """What every (identical) server holds: all compressed messages, chunked."""
    messages = [
        derive_message(dataset, s, index=m)
        for m, s in enumerate(family.sets, start=1)
    ]
    codewords = np.stack([encode(msg, params)[0] for msg in messages])
    return split_chunks(codewords, N), messages


def _run_one(
    family: PatternFamily,
    N: int,
    theta: int,
    params: CodecParams,
    chunks: np.ndarray,
    messages: list[MessageBits],
    query_seed: int,
) -> SessionTranscript:
    mu = family.num_patterns
    queries, h = client_queries(theta, mu, N, query_seed)
    answers = [server_answer(q, chunks) for q in queries]
    decoded = client_decode(answers, h, theta, params, N)
    true_bits = messages[theta - 1].bits
    success = bool(np.array_equal(decoded.bits, true_bits))
    lengths = tuple(float(a.payload.shape[0]) for a in answers)
    download = float(sum(lengths))
    L = true_bits.shape[0]
    rate = L * binary_entropy(params.p) / download
    return SessionTranscript(
        theta=theta,
        queries=tuple(queries),
        answer_bits_per_server=lengths,
        download_bits=download,
        success=success,
        decoded=decoded,
        measured_rate=rate,
    )


def run_session(
    family: PatternFamily,
    N: int,
    L: int,
    theta: int,
    seed: int,
    target_failure: float = 1e-3,
    block_length: int = DEFAULT_BLOCK_LENGTH,
) -> SessionTranscript:
    """One full seeded session against a fresh dataset."""
    M = _balanced_pattern_size(family)
    if not 1 <= theta <= family.num_patterns:
        raise DomainError(f"theta {theta} outside [1, {family.num_patterns}]")
    dataset_seed, query_seed = _child_seeds(seed, 2)
    dataset = generate_dataset(family.K, L, dataset_seed)
    params = design_codec(M / family.K, L, target_failure, block_length)
    chunks, messages = _prepared_chunks(family, dataset, params, N)
    return _run_one(family, N, theta, params, chunks, messages, query_seed)


def rate_experiment(
    family: PatternFamily,
    N: int,
    L: int,
    trials: int,
    seed: int,
    target_failure: float = 1e-3,
    block_length: int = DEFAULT_BLOCK_LENGTH,
    sessions_per_dataset: int = 128,
) -> RateExperimentReport:
    """Measure empirical error rate and download rate over many sessions.

    Sessions are grouped: each group derives and compresses messages from
    one fresh dataset (compression is the expensive step), then runs
    independent sessions with fresh theta and mask draws.
    """
    if trials < 1:
        raise DomainError(f"need trials >= 1, got {trials}")
    M = _balanced_pattern_size(family)
    mu = family.num_patterns
    params = design_codec(M / family.K, L, target_failure, block_length)
    groups = -(-trials // sessions_per_dataset)
    seeds = _child_seeds(seed, groups + 1)
    theta_rng = np.random.Generator(np.random.PCG64(seeds[0]))

    errors = 0
    rates = []
    download = None
    done = 0
    for g in range(groups):
        group_size = min(sessions_per_dataset, trials - done)
        group_seeds = _child_seeds(seeds[g + 1], group_size + 1)
        dataset = generate_dataset(family.K, L, group_seeds[0])
        chunks, messages = _prepared_chunks(family, dataset, params, N)
        for s in range(group_size):
            theta = int(theta_rng.integers(1, mu + 1))
            t = _run_one(family, N, theta, params, chunks, messages,
                         group_seeds[s + 1])
            errors += 0 if t.success else 1
            rates.append(t.measured_rate)
            download = t.download_bits
        done += group_size

    model = PatternFamilyModel(family)
    converse = best_sequence(model, N, strategy="greedy")
    h_min = min(model.per_symbol_entropy(m) for m in range(1, mu + 1))
    return RateExperimentReport(
        family_label=family.label,
        K=family.K,
        pattern_size=M,
        message_count=mu,
        N=N,
        L=L,
        trials=trials,
        seed=seed,
        error_count=errors,
        empirical_error_rate=errors / trials,
        mean_measured_rate=float(np.mean(rates)),
        download_bits_per_session=download,
        achievable_rate=achievable_rate(model, N),
        converse_rate_upper_bound=h_min / converse.per_record_bound,
        codec=params,
    )


def privacy_audit(
    family: PatternFamily,
    N: int,
    trials: int,
    seed: int,
    thetas: tuple[int, ...] | None = None,
    significance: float = 0.01,
    frequency_sigmas: float = 4.0,
    bijection_samples: int = 1000,
) -> PrivacyAuditReport:
    """Audit that queries leak nothing about theta.

    Per server: (a) every coefficient's empirical frequency of 1 must lie
    within ``frequency_sigmas`` standard errors of 1/2, for every audited
    theta; (b) a chi-square independence test between theta and a fixed
    8-bit linear projection of the query (parities of coordinates grouped
    mod 8) must not reject at ``significance``.  A structural bijection
    check of the mask-to-query map runs alongside.
    """
    if trials < 100:
        raise DomainError(f"audit needs at least 100 trials, got {trials}")
    _balanced_pattern_size(family)
    mu = family.num_patterns
    if N < 2:
        raise DomainError(f"need N >= 2, got {N}")
    if thetas is None:
        thetas = (1, 2, mu) if mu > 2 else tuple(range(1, mu + 1))
    for t in thetas:
        if not 1 <= t <= mu:
            raise DomainError(f"theta {t} outside [1, {mu}]")

    width = mu * (N - 1)
    proj_bits = min(8, width)
    ones = np.zeros((len(thetas), N, width), dtype=np.int64)
    bins = np.zeros((len(thetas), N, 1 << proj_bits), dtype=np.int64)

    seeds = _child_seeds(seed, len(thetas) + 1)
    for ti, theta in enumerate(thetas):
        session_rng = np.random.Generator(np.random.PCG64(seeds[ti]))
        for _ in range(trials):
            qseed = int(session_rng.integers(0, 2**63))
            queries, _ = client_queries(theta, mu, N, qseed)
            for n, q in enumerate(queries):
                ones[ti, n] += q.coefficients
                bins[ti, n, _projection_bucket(q.coefficients, proj_bits)] += 1

    sigma = 0.5 / math.sqrt(trials)
    limit = frequency_sigmas * sigma
    servers = []
    for n in range(N):
        deviation = float(np.abs(ones[:, n, :] / trials - 0.5).max())
        freq_ok = deviation <= limit
        table = bins[:, n, :]
        table = table[:, table.sum(axis=0) > 0]
        chi2, p_value, _, _ = chi2_contingency(table)
        servers.append(ServerAudit(
            server_id=n + 1,
            max_frequency_deviation=deviation,
            frequency_limit=limit,
            frequencies_ok=freq_ok,
            chi2_statistic=float(chi2),
            chi2_p_value=float(p_value),
            chi2_ok=bool(p_value > significance),
        ))

    bij_ok = all(
        verify_query_bijection(mu, N, t, bijection_samples, seeds[-1])
        for t in thetas
    )
    passed = bij_ok and all(s.frequencies_ok and s.chi2_ok for s in servers)
    return PrivacyAuditReport(
        message_count=mu,
        N=N,
        thetas=tuple(thetas),
        trials_per_theta=trials,
        seed=seed,
        projection_bits=proj_bits,
        significance=significance,
        servers=tuple(servers),
        bijection_samples=bijection_samples,
        bijection_ok=bij_ok,
        passed=passed,
    )


def _projection_bucket(coefficients: np.ndarray, proj_bits: int) -> int:
    """Fixed linear projection: bit b = parity of coordinates = b (mod proj_bits)."""
    bucket = 0
    for b in range(proj_bits):
        bucket |= (int(coefficients[b::proj_bits].sum()) & 1) << b
    return bucket


def baseline_download_all(
    family: PatternFamily,
    N: int,
    L: int,
    theta: int = 1,
    seed: int = 0,
) -> SessionTranscript:
    """Trivial private baseline: fetch the raw dataset (L log2 K bits) from
    one server and derive the message locally."""
    M = _balanced_pattern_size(family)
    if N < 2:
        raise DomainError(f"need N >= 2, got {N}")
    dataset = generate_dataset(family.K, L, _child_seeds(seed, 1)[0])
    decoded = derive_message(dataset, family.pattern(theta), index=theta)
    download = L * math.log2(family.K)
    return SessionTranscript(
        theta=theta,
        queries=(),
        answer_bits_per_server=(download,),
        download_bits=download,
        success=True,
        decoded=decoded,
        measured_rate=binary_entropy(M / family.K) / math.log2(family.K),
    )
