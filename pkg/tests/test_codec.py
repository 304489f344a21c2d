import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpir.errors import DomainError, InfeasibleBudgetError, LengthMismatchError
from dpir.protocol import MessageBits, decode_codeword, design_codec, encode

from oracles import h2


class TestDesignCodec:
    def test_identity_at_half(self):
        params = design_codec(0.5, 4096, 1e-3)
        assert params.identity
        assert params.total_bits == 4096
        assert params.overhead == 0.0

    def test_quarter_rate_window(self):
        params = design_codec(0.25, 2**16, 1e-3)
        ratio = params.total_bits / 2**16
        assert h2(0.25) <= ratio <= 1.08 * h2(0.25)
        assert params.predicted_failure <= 1e-3
        assert params.weight_lo >= 0 and params.weight_hi <= params.block_length

    def test_zero_budget_infeasible(self):
        with pytest.raises(InfeasibleBudgetError):
            design_codec(0.25, 2**16, 0.0)

    def test_bad_p(self):
        with pytest.raises(DomainError):
            design_codec(0.0, 1024, 1e-3)
        with pytest.raises(DomainError):
            design_codec(0.6, 1024, 1e-3)

    def test_block_length_adapts_to_L(self):
        params = design_codec(0.25, 1000, 1e-2, block_length=64)
        assert 1000 % params.block_length == 0
        assert params.block_length <= 64

    def test_codeword_bits_counts_window(self):
        params = design_codec(0.25, 256, 0.9, block_length=16)
        total = sum(
            math.comb(16, w)
            for w in range(params.weight_lo, params.weight_hi + 1)
        )
        assert params.codeword_bits == max(total - 1, 0).bit_length()


class TestRoundTrip:
    def test_exhaustive_small_blocks(self):
        # every weight-in-window block of n=8 must round-trip through a
        # distinct codeword value; out-of-window blocks must flag atypical
        params = design_codec(0.25, 8, 0.9, block_length=8)
        n = params.block_length
        seen = set()
        for bits in itertools.product([0, 1], repeat=n):
            msg = MessageBits(0, np.array(bits, dtype=np.uint8))
            codeword, atypical = encode(msg, params)
            w = sum(bits)
            if params.weight_lo <= w <= params.weight_hi:
                assert not atypical
                back = decode_codeword(codeword, params)
                assert np.array_equal(back.bits, msg.bits)
                seen.add(codeword.tobytes())
            else:
                assert atypical
        in_window = sum(
            math.comb(n, w)
            for w in range(params.weight_lo, params.weight_hi + 1)
        )
        assert len(seen) == in_window

    def test_rank_order_matches_lexicographic_order(self):
        params = design_codec(0.25, 8, 0.9, block_length=8)

        def value_of(bits):
            cw, _ = encode(MessageBits(0, np.array(bits, dtype=np.uint8)), params)
            return sum(int(b) << i for i, b in enumerate(cw))

        w = params.weight_hi
        blocks = [b for b in itertools.product([0, 1], repeat=8) if sum(b) == w]
        values = [value_of(b) for b in sorted(blocks)]
        assert values == sorted(values)
        assert values == list(range(values[0], values[0] + len(values)))

    @given(st.integers(0, 2**32 - 1), st.sampled_from([0.25, 1 / 16]))
    @settings(max_examples=25, deadline=None)
    def test_random_typical_messages(self, seed, p):
        rng = np.random.default_rng(seed)
        L = 1024
        params = design_codec(p, L, 0.05, block_length=256)
        bits = (rng.random(L) < p).astype(np.uint8)
        msg = MessageBits(3, bits)
        codeword, atypical = encode(msg, params)
        assert codeword.shape == (params.total_bits,)
        if not atypical:
            back = decode_codeword(codeword, params, index=3)
            assert np.array_equal(back.bits, bits)

    def test_identity_codeword_equals_message(self):
        params = design_codec(0.5, 512, 1e-3)
        bits = np.random.default_rng(0).integers(0, 2, 512, dtype=np.uint8)
        codeword, atypical = encode(MessageBits(0, bits), params)
        assert not atypical
        assert np.array_equal(codeword, bits)

    def test_all_zero_block_is_atypical(self):
        params = design_codec(0.25, 64, 0.9, block_length=64)
        assert params.weight_lo > 0
        codeword, atypical = encode(MessageBits(0, np.zeros(64, dtype=np.uint8)), params)
        assert atypical
        back = decode_codeword(codeword, params)
        assert int(back.bits.sum()) == params.weight_lo  # deterministic stand-in

    def test_length_mismatch(self):
        params = design_codec(0.25, 512, 0.05, block_length=256)
        with pytest.raises(LengthMismatchError):
            encode(MessageBits(0, np.zeros(100, dtype=np.uint8)), params)
        with pytest.raises(LengthMismatchError):
            decode_codeword(np.zeros(10, dtype=np.uint8), params)

    def test_corrupt_codeword_decodes_to_something(self):
        params = design_codec(0.25, 256, 0.05, block_length=256)
        rng = np.random.default_rng(5)
        bits = (rng.random(256) < 0.25).astype(np.uint8)
        codeword, _ = encode(MessageBits(0, bits), params)
        corrupted = codeword.copy()
        corrupted[0] ^= 1
        back = decode_codeword(corrupted, params)
        assert back.bits.shape == (256,)
        assert not np.array_equal(back.bits, bits)
