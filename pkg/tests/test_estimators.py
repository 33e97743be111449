"""Scikit-learn estimator contract for the tokenizer wrappers."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from corpusgen import english_like_text
from zipftok.estimators import BpeTokenizer, ZipfVocabSelector, check_documents

DOCS = [
    "the cat sat on the mat",
    "the cat ran to the hat",
    "a bat and a rat sat on a mat",
    "the mat was flat",
]


class TestCheckDocuments:
    def test_single_string_rejected(self):
        with pytest.raises(TypeError):
            check_documents("not a collection")

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            check_documents([])

    def test_non_string_rejected(self):
        with pytest.raises(TypeError):
            check_documents(["ok", 42])

    def test_iterables_materialized(self):
        assert check_documents(iter(["a", "b"])) == ["a", "b"]


class TestBpeTokenizer:
    def test_get_set_params_roundtrip(self):
        est = BpeTokenizer(vocab_size=50, mode="sequence", normalization="nfc")
        params = est.get_params()
        assert params == {"vocab_size": 50, "mode": "sequence", "normalization": "nfc"}
        est.set_params(vocab_size=60)
        assert est.vocab_size == 60

    def test_clone_before_fit(self):
        est = BpeTokenizer(vocab_size=30)
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()

    def test_transform_requires_fit(self):
        with pytest.raises(NotFittedError):
            BpeTokenizer().transform(DOCS)

    def test_fit_transform(self):
        est = BpeTokenizer(vocab_size=25).fit(DOCS)
        encoded = est.transform(DOCS)
        assert len(encoded) == len(DOCS)
        assert all(isinstance(ids, list) and ids for ids in encoded)
        assert est.vocabulary_.size == 25
        assert not est.exhausted_
        base = len(est.vocabulary_.alphabet) + len(est.vocabulary_.reserved)
        assert est.n_merges_ == 25 - base

    def test_inverse_transform_roundtrip(self):
        est = BpeTokenizer(vocab_size=25).fit(DOCS)
        assert est.inverse_transform(est.transform(DOCS)) == DOCS

    def test_exhausted_flag(self):
        with pytest.warns(UserWarning):
            est = BpeTokenizer(vocab_size=10_000).fit(DOCS)
        assert est.exhausted_
        assert est.vocabulary_.size < 10_000

    def test_sequence_mode(self):
        est = BpeTokenizer(vocab_size=8, mode="sequence").fit(["ACGT", "ACGG", "ACTT"])
        ids = est.transform(["ACGT"])[0]
        assert est.vocabulary_.decode(ids) == "ACGT"

    def test_score_is_zipf_alignment(self):
        est = BpeTokenizer(vocab_size=20).fit(DOCS)
        score = est.score(DOCS)
        assert 0.0 <= score <= 1.0

    def test_pipeline_compatible(self):
        pipe = Pipeline([("tok", BpeTokenizer(vocab_size=20))])
        encoded = pipe.fit_transform(DOCS)
        assert len(encoded) == len(DOCS)


@pytest.fixture(scope="module")
def corpus_docs():
    return english_like_text(30_000, seed=12).splitlines()


class TestZipfVocabSelector:
    def test_params_cloneable(self):
        est = ZipfVocabSelector(patience=3, epsilon=1e-3, v_max=500)
        assert clone(est).get_params() == est.get_params()

    def test_fit_selects_and_transforms(self, corpus_docs):
        est = ZipfVocabSelector(checkpoint_interval=25, patience=3, v_max=800)
        est.fit(corpus_docs)
        assert est.selected_size_ == est.vocabulary_.size
        assert est.stop_reason_ in ("stagnation", "max_size", "pairs_exhausted")
        assert est.selection_.trace[-1].vocab_size <= 800
        encoded = est.transform(corpus_docs[:5])
        assert len(encoded) == 5

    def test_invalid_pick_rule_raises_on_fit(self, corpus_docs):
        est = ZipfVocabSelector(pick_rule="bogus")
        with pytest.raises(ValueError):
            est.fit(corpus_docs)

    def test_transform_requires_fit(self):
        with pytest.raises(NotFittedError):
            ZipfVocabSelector().transform(["x"])
