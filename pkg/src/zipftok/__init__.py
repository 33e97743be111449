"""Tokenizer analysis toolkit: incremental BPE training, Zipf-alignment
scoring of token rank-frequency distributions, and automatic
vocabulary-size selection via a stagnation rule."""

from .bpe import (
    BpeTrainer,
    ExhaustedPairsWarning,
    MergeRule,
    Vocabulary,
    train_to_size,
)
from .corpus import (
    END_OF_WORD_MARKER,
    UNK_TOKEN,
    CorpusMode,
    PretokenCounts,
    alphabet_of,
    combine_counts,
    counts_from_texts,
    load_corpus,
)
from .errors import (
    CorpusError,
    DataError,
    EmptyCorpusError,
    EmptyTableError,
    InsufficientPointsError,
    TokenizerError,
    TrainerStateError,
    VocabularyFormatError,
)
from .estimators import BpeTokenizer, ZipfVocabSelector
from .selector import (
    CheckpointRecord,
    SelectionResult,
    SelectorConfig,
    replay_trace,
    select_vocabulary,
)
from .zipf import (
    RankFrequencyCurve,
    ZipfFit,
    compression_ratio,
    fertility,
    fit_power_law,
    rank_frequency,
    token_table_from_encoding,
    zipf_score,
    zipf_score_from_counts,
)

__version__ = "0.1.0"

__all__ = [
    "BpeTokenizer",
    "BpeTrainer",
    "CheckpointRecord",
    "CorpusError",
    "CorpusMode",
    "DataError",
    "EmptyCorpusError",
    "EmptyTableError",
    "END_OF_WORD_MARKER",
    "ExhaustedPairsWarning",
    "InsufficientPointsError",
    "MergeRule",
    "PretokenCounts",
    "RankFrequencyCurve",
    "SelectionResult",
    "SelectorConfig",
    "TokenizerError",
    "TrainerStateError",
    "UNK_TOKEN",
    "Vocabulary",
    "VocabularyFormatError",
    "ZipfFit",
    "ZipfVocabSelector",
    "alphabet_of",
    "combine_counts",
    "compression_ratio",
    "counts_from_texts",
    "fertility",
    "fit_power_law",
    "load_corpus",
    "rank_frequency",
    "replay_trace",
    "select_vocabulary",
    "token_table_from_encoding",
    "train_to_size",
    "zipf_score",
    "zipf_score_from_counts",
    "__version__",
]
