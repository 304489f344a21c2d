import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpir.constructions import circular_family, disjoint_subfamily, exact_search_family
from dpir.errors import (
    DomainError,
    IndexOutOfRangeError,
    LayoutMismatchError,
    LengthMismatchError,
    NotBalancedError,
)
from dpir.patterns import build_family
from dpir.protocol import (
    Answer,
    Query,
    baseline_download_all,
    chunk_length,
    client_decode,
    client_queries,
    coordinate,
    derive_message,
    design_codec,
    encode,
    generate_dataset,
    pack_answer,
    pack_query,
    privacy_audit,
    rate_experiment,
    run_session,
    server_answer,
    split_chunks,
    unpack_answer,
    unpack_query,
    verify_query_bijection,
)

from oracles import h2


class TestDataset:
    def test_deterministic(self):
        a = generate_dataset(4, 1000, seed=42)
        b = generate_dataset(4, 1000, seed=42)
        assert np.array_equal(a.records, b.records)

    def test_uniform_frequencies(self):
        ds = generate_dataset(4, 100_000, seed=7)
        sigma = math.sqrt(100_000 * 0.25 * 0.75)
        for value in range(1, 5):
            count = int((ds.records == value).sum())
            assert abs(count - 25_000) <= 4 * sigma

    def test_domain(self):
        with pytest.raises(DomainError):
            generate_dataset(1, 10, seed=0)
        with pytest.raises(DomainError):
            generate_dataset(4, 0, seed=0)


class TestDeriveMessage:
    def test_full_alphabet_all_ones(self):
        ds = generate_dataset(5, 200, seed=1)
        msg = derive_message(ds, [1, 2, 3, 4, 5])
        assert msg.bits.all()

    def test_exact_search_one_hot(self):
        ds = generate_dataset(6, 500, seed=2)
        fam = exact_search_family(6)
        stack = np.stack([derive_message(ds, s, m).bits
                          for m, s in enumerate(fam.sets, 1)])
        assert np.array_equal(stack.sum(axis=0), np.ones(500, dtype=np.uint64))

    def test_disjoint_cover(self):
        ds = generate_dataset(6, 300, seed=3)
        fam = disjoint_subfamily(6, 2)
        stack = np.stack([derive_message(ds, s).bits for s in fam.sets])
        assert np.array_equal(stack.sum(axis=0), np.ones(300, dtype=np.uint64))

    def test_out_of_range(self):
        ds = generate_dataset(3, 10, seed=0)
        with pytest.raises(IndexOutOfRangeError):
            derive_message(ds, [1, 4])


class TestQueries:
    def test_single_chunk_xor_identity(self):
        queries, h = client_queries(theta=1, mu=2, N=2, seed=9)
        diff = queries[1].coefficients ^ queries[0].coefficients
        expected = np.zeros(2, dtype=np.uint8)
        expected[coordinate(1, 1, 2)] = 1
        assert np.array_equal(diff, expected)
        assert np.array_equal(queries[0].coefficients, h)

    def test_xor_offset_every_server(self):
        mu, N, theta = 5, 4, 3
        queries, h = client_queries(theta, mu, N, seed=11)
        for n in range(2, N + 1):
            diff = queries[n - 1].coefficients ^ queries[0].coefficients
            assert int(diff.sum()) == 1
            assert diff[coordinate(theta, n - 1, N)] == 1

    def test_marginal_uniformity(self):
        mu, N = 4, 2
        counts = np.zeros((N, mu * (N - 1)))
        trials = 4000
        rng = np.random.default_rng(17)
        for _ in range(trials):
            queries, _ = client_queries(2, mu, N, int(rng.integers(0, 2**63)))
            for n, q in enumerate(queries):
                counts[n] += q.coefficients
        freq = counts / trials
        assert np.abs(freq - 0.5).max() <= 4 * 0.5 / math.sqrt(trials)

    def test_bijection(self):
        assert verify_query_bijection(mu=4, N=3, theta=2, samples=200, seed=1)

    def test_domain(self):
        with pytest.raises(DomainError):
            client_queries(0, 4, 2, seed=1)
        with pytest.raises(DomainError):
            client_queries(1, 4, 1, seed=1)


class TestServerAnswer:
    def _chunks(self, mu=3, N=3, Bp=32, seed=0):
        rng = np.random.default_rng(seed)
        codewords = rng.integers(0, 2, (mu, Bp * (N - 1)), dtype=np.uint8)
        return split_chunks(codewords, N)

    def test_zero_query_zero_answer(self):
        chunks = self._chunks()
        q = Query(1, np.zeros(6, dtype=np.uint8))
        assert not server_answer(q, chunks).payload.any()

    def test_single_coordinate_returns_chunk(self):
        chunks = self._chunks()
        coeffs = np.zeros(6, dtype=np.uint8)
        coeffs[coordinate(2, 1, 3)] = 1
        answer = server_answer(Query(2, coeffs), chunks)
        assert np.array_equal(answer.payload, chunks[1, 0])

    def test_xor_linearity(self):
        chunks = self._chunks()
        rng = np.random.default_rng(3)
        for _ in range(20):
            q1 = rng.integers(0, 2, 6, dtype=np.uint8)
            q2 = rng.integers(0, 2, 6, dtype=np.uint8)
            a1 = server_answer(Query(1, q1), chunks).payload
            a2 = server_answer(Query(1, q2), chunks).payload
            a12 = server_answer(Query(1, q1 ^ q2), chunks).payload
            assert np.array_equal(a12, a1 ^ a2)

    def test_layout_mismatch(self):
        chunks = self._chunks()
        with pytest.raises(LayoutMismatchError):
            server_answer(Query(1, np.zeros(5, dtype=np.uint8)), chunks)


class TestSessions:
    def test_identity_codec_rate_half(self):
        # mu=4 fair-bit messages, N=2: download 2L, rate exactly 1/2
        fam = circular_family(4)
        t = run_session(fam, N=2, L=4096, theta=2, seed=5)
        assert t.success
        assert t.download_bits == 2 * 4096
        assert t.measured_rate == 0.5
        assert t.answer_bits_per_server == (4096.0, 4096.0)

    def test_reproducible(self):
        fam = circular_family(8)
        a = run_session(fam, 2, 2048, theta=3, seed=77)
        b = run_session(fam, 2, 2048, theta=3, seed=77)
        assert np.array_equal(a.decoded.bits, b.decoded.bits)
        for qa, qb in zip(a.queries, b.queries):
            assert np.array_equal(qa.coefficients, qb.coefficients)

    def test_compressed_round_trip_session(self):
        fam = exact_search_family(8)
        t = run_session(fam, 2, 4096, theta=5, seed=3, block_length=512)
        assert t.decoded.index == 5
        assert t.success

    def test_corrupt_answer_breaks_decode(self):
        fam = circular_family(4)
        L, N = 1024, 2
        params = design_codec(0.5, L, 1e-3)
        ds = generate_dataset(fam.K, L, seed=123)
        messages = [derive_message(ds, s, m) for m, s in enumerate(fam.sets, 1)]
        codewords = np.stack([encode(m, params)[0] for m in messages])
        chunks = split_chunks(codewords, N)
        queries, h = client_queries(2, fam.num_patterns, N, seed=9)
        answers = [server_answer(q, chunks) for q in queries]
        good = client_decode(answers, h, 2, params, N)
        assert np.array_equal(good.bits, messages[1].bits)
        answers[1].payload[0] ^= 1
        bad = client_decode(answers, h, 2, params, N)
        assert not np.array_equal(bad.bits, messages[1].bits)

    def test_chunk_padding_ignored(self):
        # L=101, N=3: B'=51, one pad bit; flipping it cannot hurt decode
        fam = circular_family(4)
        L, N = 101, 3
        params = design_codec(0.5, L, 1e-3)
        ds = generate_dataset(fam.K, L, seed=31)
        messages = [derive_message(ds, s, m) for m, s in enumerate(fam.sets, 1)]
        codewords = np.stack([encode(m, params)[0] for m in messages])
        chunks = split_chunks(codewords, N)
        assert chunk_length(params.total_bits, N) * (N - 1) == params.total_bits + 1
        queries, h = client_queries(1, fam.num_patterns, N, seed=8)
        answers = [server_answer(q, chunks) for q in queries]
        answers[2].payload[-1] ^= 1  # final bit of the last chunk is padding
        decoded = client_decode(answers, h, 1, params, N)
        assert np.array_equal(decoded.bits, messages[0].bits)

    def test_unbalanced_family_rejected(self):
        fam = build_family(6, [[1], [2, 3]])
        with pytest.raises(NotBalancedError):
            run_session(fam, 2, 1024, theta=1, seed=0)

    def test_length_mismatch_in_decode(self):
        params = design_codec(0.5, 64, 1e-3)
        a1 = Answer(1, np.zeros(64, dtype=np.uint8))
        a2 = Answer(2, np.zeros(32, dtype=np.uint8))
        with pytest.raises(LengthMismatchError):
            client_decode([a1, a2], np.zeros(4, dtype=np.uint8), 1, params, 2)


class TestExperiments:
    def test_rate_experiment_identity(self):
        fam = circular_family(8)
        rep = rate_experiment(fam, 2, 4096, trials=12, seed=21)
        assert rep.error_count == 0
        assert rep.mean_measured_rate == 0.5
        assert rep.download_bits_per_session == 2 * 4096
        assert rep.achievable_rate == 0.5
        assert rep.mean_measured_rate <= rep.converse_rate_upper_bound + 1e-12

    def test_rate_experiment_compressed(self):
        fam = exact_search_family(8)
        rep = rate_experiment(fam, 2, 4096, trials=8, seed=22, block_length=512)
        assert rep.empirical_error_rate <= 0.25
        assert rep.codec.total_bits < 4096  # really compressed
        assert rep.mean_measured_rate <= rep.converse_rate_upper_bound + 1e-12

    def test_privacy_audit_passes(self):
        fam = exact_search_family(8)
        rep = privacy_audit(fam, 2, trials=2000, seed=13)
        assert rep.passed
        assert rep.thetas == (1, 2, 8)
        assert all(s.chi2_p_value > 0.01 for s in rep.servers)
        assert rep.bijection_ok

    def test_audit_needs_trials(self):
        with pytest.raises(DomainError):
            privacy_audit(exact_search_family(8), 2, trials=10, seed=1)

    def test_baseline(self):
        fam = circular_family(16)
        t = baseline_download_all(fam, 2, L=1000)
        assert t.success
        assert t.download_bits == pytest.approx(1000 * math.log2(16))
        assert t.measured_rate == pytest.approx(h2(0.5) / math.log2(16))


class TestWire:
    @given(st.integers(0, 255), st.lists(st.integers(0, 1), min_size=0, max_size=300))
    @settings(max_examples=50, deadline=None)
    def test_query_round_trip(self, server_id, bits):
        q = Query(server_id, np.array(bits, dtype=np.uint8))
        back = unpack_query(pack_query(q))
        assert back.server_id == server_id
        assert np.array_equal(back.coefficients, q.coefficients)

    def test_answer_round_trip(self):
        a = Answer(3, np.array([1, 0, 1, 1, 0, 0, 1, 0, 1], dtype=np.uint8))
        back = unpack_answer(pack_answer(a))
        assert back.server_id == 3
        assert np.array_equal(back.payload, a.payload)

    def test_truncated_record_rejected(self):
        a = Answer(3, np.ones(16, dtype=np.uint8))
        data = pack_answer(a)
        with pytest.raises(LengthMismatchError):
            unpack_answer(data[:-1])
