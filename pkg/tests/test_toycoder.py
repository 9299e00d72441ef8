import logging

import numpy as np
import pytest

from embsimp.corpus import Sentence
from embsimp.embeddings import DimMismatchError
from embsimp.toycoder import (
    DecodePool,
    DuplicateSentencesError,
    EmptyPoolError,
    EmptyQueryError,
    ToyCoderConfig,
    decode_matrix,
    encode_sentences,
    roundtrip_check,
    toy_decode,
    toy_encode,
)

LANG = "eng_Latn"
CFG = ToyCoderConfig(dim=256, seed=42)


def sentences(n, prefix="sentence"):
    return [Sentence(f"{prefix} number {i} with some text", LANG) for i in range(n)]


class TestConfig:
    def test_defaults(self):
        cfg = ToyCoderConfig()
        assert cfg.dim == 1024 and cfg.ngram_order == 3

    def test_validation(self):
        with pytest.raises(ValueError):
            ToyCoderConfig(dim=4)
        with pytest.raises(ValueError):
            ToyCoderConfig(ngram_order=0)


class TestEncode:
    def test_deterministic(self):
        a = toy_encode("the quick brown fox", CFG)
        b = toy_encode("the quick brown fox", CFG)
        assert np.array_equal(a, b)

    def test_empty_input_is_zero_vector(self):
        e = toy_encode("", CFG)
        assert e.shape == (CFG.dim,)
        assert np.all(e == 0.0)

    def test_unit_norm(self):
        for text in ("a", "ab", "some much longer sentence with words"):
            e = toy_encode(text, CFG)
            assert abs(float(np.linalg.norm(e.astype(np.float64))) - 1.0) < 1e-6

    def test_near_strings_differ(self):
        cfg = ToyCoderConfig(dim=1024, seed=42)
        a = toy_encode("abc", cfg).astype(np.float64)
        b = toy_encode("abd", cfg).astype(np.float64)
        assert float(a @ b) < 1.0 - 1e-6

    def test_seed_changes_encoding(self):
        a = toy_encode("abc", ToyCoderConfig(dim=256, seed=1))
        b = toy_encode("abc", ToyCoderConfig(dim=256, seed=2))
        assert not np.array_equal(a, b)

    def test_batch_order_and_lang(self):
        batch = encode_sentences(sentences(5), CFG)
        assert batch.row_count == 5
        assert batch.lang == LANG
        assert np.array_equal(batch.row(3), toy_encode(sentences(5)[3], CFG))


class TestDecode:
    def test_exact_roundtrip_of_pool_member(self):
        pool = DecodePool.build(sentences(10), CFG)
        target = sentences(10)[4]
        assert toy_decode(toy_encode(target, CFG), pool).text == target.text

    def test_tie_breaks_to_lowest_index(self):
        s = [Sentence("first entry", LANG), Sentence("second entry", LANG)]
        e = toy_encode(s[0], CFG)
        pool = DecodePool(tuple(s), encode_sentences([s[0], s[0]], CFG))
        assert toy_decode(e, pool) is s[0]

    def test_blend_decodes_to_dominant(self):
        pool_sentences = sentences(50)
        pool = DecodePool.build(pool_sentences, CFG)
        e1 = toy_encode(pool_sentences[7], CFG).astype(np.float64)
        e2 = toy_encode(pool_sentences[31], CFG).astype(np.float64)
        blend = 0.9 * e1 + 0.1 * e2
        assert toy_decode(blend, pool).text == pool_sentences[7].text
        # brute-force cosine scan oracle agrees
        sims = [
            float(blend @ pool.embeddings.data[i].astype(np.float64))
            / float(np.linalg.norm(blend))
            for i in range(50)
        ]
        assert int(np.argmax(sims)) == 7

    def test_dim_mismatch(self):
        pool = DecodePool.build(sentences(3), CFG)
        with pytest.raises(DimMismatchError):
            toy_decode(np.zeros(CFG.dim + 1, dtype=np.float32), pool)

    def test_zero_query(self):
        pool = DecodePool.build(sentences(3), CFG)
        with pytest.raises(EmptyQueryError):
            toy_decode(np.zeros(CFG.dim, dtype=np.float32), pool)

    def test_empty_pool(self):
        with pytest.raises(EmptyPoolError):
            DecodePool((), encode_sentences(sentences(1), CFG))

    def test_batch_decode_matches_single(self):
        pool = DecodePool.build(sentences(20), CFG)
        batch = encode_sentences(sentences(20), CFG)
        decoded = decode_matrix(batch, pool)
        for i in (0, 9, 19):
            assert decoded[i].text == toy_decode(batch.row(i), pool).text

    def test_pool_permutation_invariance(self):
        base = sentences(12)
        query = toy_encode(base[5], CFG)
        reversed_pool = DecodePool.build(list(reversed(base)), CFG)
        assert toy_decode(query, reversed_pool).text == base[5].text


class TestRoundtrip:
    def test_singleton(self):
        assert roundtrip_check([Sentence("only one", LANG)], CFG) == 1.0

    def test_distinct_list_is_exact(self):
        assert roundtrip_check(sentences(100), CFG) == 1.0

    def test_duplicates_rejected(self):
        s = Sentence("twice", LANG)
        with pytest.raises(DuplicateSentencesError):
            roundtrip_check([s, Sentence("twice", LANG)], CFG)

    def test_2000_distinct_sentences_collision_audit(self, caplog):
        # WikiAuto-scale sample at the default dim; any miss would be an
        # embedding collision and must surface in the log
        corpus = [
            Sentence(f"wiki sentence {i} talks about topic {i * 7 % 113}", LANG)
            for i in range(2000)
        ]
        with caplog.at_level(logging.WARNING):
            fraction = roundtrip_check(corpus, ToyCoderConfig(dim=1024, seed=42))
        assert fraction == 1.0
        assert not caplog.records
