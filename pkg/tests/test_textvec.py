"""Vocabulary fitting and TF-IDF weighting oracles."""

import numpy as np
import pytest

from contact_complexity import textvec
from contact_complexity.corpus import Transcript, Utterance


def _doc(doc_id, text):
    return Transcript(
        id=doc_id,
        utterances=(Utterance(speaker="agent", text=text),),
        label=0,
        group="background",
    )


class TestTokenize:
    def test_lowercases_and_splits_on_nonalnum(self):
        assert textvec.tokenize("Hello, WORLD!  x2--ok") == ["hello", "world", "x2", "ok"]

    def test_empty_text_has_no_tokens(self):
        assert textvec.tokenize("...!?") == []


class TestFitVocabulary:
    def test_hand_counted_document_frequencies(self):
        vocab = textvec.fit_vocabulary([_doc("1", "a b"), _doc("2", "b c")], min_doc_freq=1)
        assert vocab.index == {"a": 0, "b": 1, "c": 2}
        assert vocab.doc_freq.tolist() == [1, 2, 1]
        assert vocab.n_documents == 2

    def test_min_doc_freq_filters(self):
        vocab = textvec.fit_vocabulary([_doc("1", "a b"), _doc("2", "b c")], min_doc_freq=2)
        assert vocab.index == {"b": 0}

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            textvec.fit_vocabulary([])


class TestVectorize:
    def test_out_of_vocabulary_gives_zero_vector(self):
        vocab = textvec.fit_vocabulary([_doc("1", "a b"), _doc("2", "b c")], min_doc_freq=1)
        vec = textvec.vectorize(vocab, _doc("x", "zzz qqq"))
        assert vec.nnz == 0

    def test_single_known_token_is_unit_one_hot(self):
        vocab = textvec.fit_vocabulary([_doc("1", "a b"), _doc("2", "b c")], min_doc_freq=1)
        vec = textvec.vectorize(vocab, _doc("x", "b"))
        assert vec.indices.tolist() == [1]
        assert vec.values[0] == pytest.approx(1.0)

    def test_idf_formula_direct_evaluation(self):
        # D=2, df=2 -> idf = ln(3/3) + 1 = 1.0
        vocab = textvec.fit_vocabulary([_doc("1", "a b"), _doc("2", "b c")], min_doc_freq=1)
        idf = vocab.idf()
        assert idf[vocab.index["b"]] == pytest.approx(1.0)
        assert idf[vocab.index["a"]] == pytest.approx(np.log(3 / 2) + 1)

    def test_nonzero_vectors_have_unit_norm(self):
        docs = [_doc(str(i), t) for i, t in enumerate(["a a b", "b c c c", "a c", "b b"])]
        vocab = textvec.fit_vocabulary(docs, min_doc_freq=1)
        for d in docs:
            vec = textvec.vectorize(vocab, d)
            assert np.linalg.norm(vec.values) == pytest.approx(1.0, abs=1e-9)
            assert np.all(np.diff(vec.indices) > 0)
            assert np.all(vec.indices < vocab.size)

    def test_vectorize_is_pure(self):
        docs = [_doc("1", "a b"), _doc("2", "b c")]
        vocab = textvec.fit_vocabulary(docs, min_doc_freq=1)
        v1 = textvec.vectorize(vocab, docs[0])
        v2 = textvec.vectorize(vocab, docs[0])
        np.testing.assert_array_equal(v1.indices, v2.indices)
        np.testing.assert_array_equal(v1.values, v2.values)


class TestPersistence:
    def test_vocabulary_round_trip(self, tmp_path):
        docs = [_doc(str(i), t) for i, t in enumerate(["a b c", "b c d", "d e"])]
        vocab = textvec.fit_vocabulary(docs, min_doc_freq=1)
        path = tmp_path / "vocab.txt"
        textvec.save_vocabulary(path, vocab)
        loaded = textvec.load_vocabulary(path)
        assert loaded.index == vocab.index
        assert loaded.n_documents == vocab.n_documents
        np.testing.assert_array_equal(loaded.doc_freq, vocab.doc_freq)

    def test_load_rejects_missing_header(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text("token,index,df\na,0,1\n")
        with pytest.raises(Exception, match="header"):
            textvec.load_vocabulary(path)
