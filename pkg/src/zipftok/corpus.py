"""Corpus ingestion and pre-token counting.

Two ingestion modes cover the supported domains: ``text`` treats maximal
runs of non-whitespace characters as pre-tokens (natural language), while
``sequence`` treats each input line as one indivisible pre-token (DNA
reads, SMILES strings).  Everything downstream trains on the resulting
pre-token count table, never on raw files, so loading order and sharding
cannot influence results.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CorpusError, EmptyCorpusError

# Reserved glyphs.  The end-of-word marker is fused onto the final
# character of every text-mode pre-token; the unknown-token glyph stands
# in for characters outside the trained alphabet.  Neither may occur in
# corpus data, otherwise learned tokens could collide with reserved ones.
END_OF_WORD_MARKER = "▁"  # ▁
UNK_TOKEN = "⁇"  # ⁇

_SENTINEL_CHARS = frozenset((END_OF_WORD_MARKER, UNK_TOKEN))

# Guards the quadratic worst case of applying merges inside one record.
MAX_SEQUENCE_RECORD_CHARS = 1 << 20


class CorpusMode(str, Enum):
    TEXT = "text"
    SEQUENCE = "sequence"


@dataclass(frozen=True)
class PretokenCounts:
    """Multiset of pre-tokens with occurrence counts.

    ``entries`` maps each distinct pre-token to a count >= 1;
    ``total_pretokens`` is the sum of counts and ``total_chars`` the sum
    of ``count * len(pretoken)``.  Instances are treated as immutable
    and are safe to share between threads.
    """

    entries: dict[str, int]
    mode: CorpusMode
    total_pretokens: int
    total_chars: int


def _normalize(text: str, normalization: str) -> str:
    if normalization == "none":
        return text
    if normalization == "nfc":
        return unicodedata.normalize("NFC", text)
    raise ValueError(f"unknown normalization {normalization!r}; use 'none' or 'nfc'")


def _check_sentinels(pretoken: str) -> None:
    for ch in _SENTINEL_CHARS:
        if ch in pretoken:
            raise CorpusError(
                f"corpus contains the reserved character {ch!r} (U+{ord(ch):04X}); "
                "it cannot be tokenized"
            )


def counts_from_texts(
    texts: Iterable[str],
    mode: CorpusMode | str,
    normalization: str = "none",
) -> PretokenCounts:
    """Count pre-tokens over an iterable of raw strings.

    In text mode every string is split on Unicode whitespace; in sequence
    mode every *line* of every string is one pre-token.  Blank records are
    skipped in both modes.
    """
    mode = CorpusMode(mode)
    entries: dict[str, int] = {}
    total = 0
    chars = 0
    for raw in texts:
        text = _normalize(raw, normalization)
        if mode is CorpusMode.TEXT:
            records = text.split()
        else:
            records = [line for line in text.splitlines() if line]
        for pretoken in records:
            if mode is CorpusMode.SEQUENCE and len(pretoken) > MAX_SEQUENCE_RECORD_CHARS:
                raise CorpusError(
                    f"sequence record of {len(pretoken)} characters exceeds the "
                    f"{MAX_SEQUENCE_RECORD_CHARS}-character limit"
                )
            _check_sentinels(pretoken)
            entries[pretoken] = entries.get(pretoken, 0) + 1
            total += 1
            chars += len(pretoken)
    if not entries:
        raise EmptyCorpusError("corpus contains no pre-tokens")
    return PretokenCounts(entries=entries, mode=mode, total_pretokens=total, total_chars=chars)


def load_corpus(
    path: str | Path,
    mode: CorpusMode | str,
    normalization: str = "none",
) -> PretokenCounts:
    """Load a UTF-8 text file into a pre-token count table."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CorpusError(f"cannot read corpus file {path}: {exc}") from exc
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusError(f"corpus file {path} is not valid UTF-8: {exc}") from exc
    return counts_from_texts([text], mode, normalization)


def alphabet_of(counts: PretokenCounts) -> tuple[str, ...]:
    """Distinct characters of the corpus, sorted by code point."""
    chars: set[str] = set()
    for pretoken in counts.entries:
        chars.update(pretoken)
    if not chars:
        raise EmptyCorpusError("corpus contains no characters")
    return tuple(sorted(chars))


def combine_counts(parts: Sequence[PretokenCounts]) -> PretokenCounts:
    """Merge shard-level counts into a single table.

    Summing shard counts is exactly equivalent to loading the
    concatenated input in one pass, which is what makes sharded loading
    safe to run concurrently.
    """
    if not parts:
        raise EmptyCorpusError("no count tables to combine")
    mode = parts[0].mode
    entries: dict[str, int] = {}
    total = 0
    chars = 0
    for part in parts:
        if part.mode is not mode:
            raise ValueError("cannot combine counts with different corpus modes")
        for pretoken, count in part.entries.items():
            entries[pretoken] = entries.get(pretoken, 0) + count
        total += part.total_pretokens
        chars += part.total_chars
    return PretokenCounts(entries=entries, mode=mode, total_pretokens=total, total_chars=chars)
