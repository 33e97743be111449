"""Scikit-learn compatible estimator wrappers.

``BpeTokenizer`` trains a fixed-size vocabulary on ``fit`` and turns
documents into token-id sequences on ``transform``; ``ZipfVocabSelector``
does the same but picks its vocabulary size automatically through the
stagnation rule.  Both follow the estimator contract (``get_params`` /
``set_params``, trailing-underscore fitted attributes, ``clone``-safe
constructors) so they drop into pipelines and searches.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .bpe import Vocabulary, train_to_size
from .corpus import counts_from_texts
from .selector import SelectionResult, SelectorConfig, select_vocabulary
from .zipf import zipf_score


def check_documents(X: Iterable[str]) -> list[str]:
    """Validate an iterable of raw strings (documents or records)."""
    if isinstance(X, (str, bytes)):
        raise TypeError("X must be an iterable of strings, not a single string")
    docs = list(X)
    if not docs:
        raise ValueError("X contains no documents")
    for i, doc in enumerate(docs):
        if not isinstance(doc, str):
            raise TypeError(f"document {i} is {type(doc).__name__}, expected str")
    return docs


class _EncoderMixin:
    """Shared transform/inverse_transform over a fitted ``vocabulary_``."""

    vocabulary_: Vocabulary

    def transform(self, X: Iterable[str]) -> list[list[int]]:
        """Encode each document into a token-id sequence."""
        check_is_fitted(self, "vocabulary_")
        return [self.vocabulary_.encode(doc) for doc in check_documents(X)]

    def inverse_transform(self, X: Iterable[Sequence[int]]) -> list[str]:
        """Decode token-id sequences back into strings."""
        check_is_fitted(self, "vocabulary_")
        return [self.vocabulary_.decode(ids) for ids in X]

    def score(self, X: Iterable[str], y: object = None) -> float:
        """Zipf alignment (R^2) of the token distribution of ``X``.

        Unknown-character placeholders are excluded from the histogram.
        """
        check_is_fitted(self, "vocabulary_")
        vocab = self.vocabulary_
        n_reserved = len(vocab.reserved)
        table: dict[str, int] = {}
        for doc in check_documents(X):
            for token_id in vocab.encode(doc):
                if token_id >= n_reserved:
                    token = vocab.token_of(token_id)
                    table[token] = table.get(token, 0) + 1
        return zipf_score(table)


class BpeTokenizer(_EncoderMixin, TransformerMixin, BaseEstimator):
    """Byte-pair-encoding tokenizer with a fixed target vocabulary size.

    Parameters
    ----------
    vocab_size : target vocabulary size (alphabet + reserved + merges).
    mode : ``"text"`` (whitespace words) or ``"sequence"`` (whole lines).
    normalization : ``"none"`` or ``"nfc"`` Unicode normalization.

    Attributes
    ----------
    vocabulary_ : the frozen :class:`~zipftok.bpe.Vocabulary` after ``fit``.
    n_merges_ : number of merge rules actually learned.
    exhausted_ : True when pairs ran out before ``vocab_size`` was reached.
    """

    def __init__(self, vocab_size: int = 1000, mode: str = "text", normalization: str = "none"):
        self.vocab_size = vocab_size
        self.mode = mode
        self.normalization = normalization

    def fit(self, X: Iterable[str], y: object = None) -> "BpeTokenizer":
        docs = check_documents(X)
        counts = counts_from_texts(docs, self.mode, self.normalization)
        self.vocabulary_ = train_to_size(counts, self.vocab_size)
        self.n_merges_ = len(self.vocabulary_.merges)
        self.exhausted_ = self.vocabulary_.size < self.vocab_size
        return self


class ZipfVocabSelector(_EncoderMixin, TransformerMixin, BaseEstimator):
    """Tokenizer whose vocabulary size is chosen by Zipf-alignment stagnation.

    ``fit`` grows the vocabulary checkpoint by checkpoint and stops when
    the alignment score fails to improve on its running maximum by more
    than ``epsilon`` for ``patience`` consecutive checkpoints.

    Attributes
    ----------
    vocabulary_ : the selected :class:`~zipftok.bpe.Vocabulary`.
    selection_ : full :class:`~zipftok.selector.SelectionResult` trace.
    selected_size_ : size of the selected vocabulary.
    stop_reason_ : ``"stagnation"``, ``"max_size"`` or ``"pairs_exhausted"``.
    """

    def __init__(
        self,
        checkpoint_interval: int = 100,
        epsilon: float = 1e-4,
        patience: int = 10,
        v_min: int | None = None,
        v_max: int = 50_000,
        pick_rule: str = "current_at_stop",
        mode: str = "text",
        normalization: str = "none",
    ):
        self.checkpoint_interval = checkpoint_interval
        self.epsilon = epsilon
        self.patience = patience
        self.v_min = v_min
        self.v_max = v_max
        self.pick_rule = pick_rule
        self.mode = mode
        self.normalization = normalization

    def fit(self, X: Iterable[str], y: object = None) -> "ZipfVocabSelector":
        docs = check_documents(X)
        counts = counts_from_texts(docs, self.mode, self.normalization)
        config = SelectorConfig(
            checkpoint_interval=self.checkpoint_interval,
            epsilon=self.epsilon,
            patience=self.patience,
            v_min=self.v_min,
            v_max=self.v_max,
            pick_rule=self.pick_rule,
        )
        result: SelectionResult = select_vocabulary(counts, config)
        self.selection_ = result
        self.vocabulary_ = result.selected_vocab
        self.selected_size_ = result.selected_size
        self.stop_reason_ = result.stop_reason
        return self
