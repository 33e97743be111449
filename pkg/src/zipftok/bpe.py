"""Incremental byte-pair-encoding trainer and frozen vocabularies.

The trainer keeps three mutually consistent views of the corpus while
merges are applied: per-pre-token symbol sequences, a weighted index of
adjacent symbol pairs, and a token histogram.  Pair selection goes
through a lazily invalidated max-heap and rewrites touch only the
sequences that actually contain the merged pair, so the cost of one
merge is proportional to the text it changes rather than to the corpus.

Symbols are interned to integer ids internally; all public surfaces
(merge rules, token histograms, vocabulary files) speak strings.
"""

from __future__ import annotations

import heapq
import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import END_OF_WORD_MARKER, UNK_TOKEN, CorpusMode, PretokenCounts, alphabet_of
from .errors import TrainerStateError, VocabularyFormatError
from .fileio import atomic_write_text

VOCAB_FORMAT_VERSION = 1


@dataclass(frozen=True, order=True)
class MergeRule:
    """One rewrite ``(left, right) -> left + right`` with its creation rank."""

    left: str
    right: str
    rank: int

    @property
    def merged(self) -> str:
        return self.left + self.right


class ExhaustedPairsWarning(UserWarning):
    """Training ran out of mergeable pairs before reaching the target size."""


def _reserved_for(mode: CorpusMode) -> tuple[str, ...]:
    if mode is CorpusMode.TEXT:
        return (UNK_TOKEN, END_OF_WORD_MARKER)
    return (UNK_TOKEN,)


class BpeTrainer:
    """Single-writer training state over a fixed pre-token count table.

    Mutations (``apply_merge``) must be strictly sequential; reads are
    cheap and the state may be handed between threads as long as only
    one mutates it at a time.
    """

    def __init__(self, counts: PretokenCounts):
        self._mode = counts.mode
        self._alphabet = alphabet_of(counts)
        self._reserved = _reserved_for(counts.mode)
        self._total_chars = counts.total_chars
        self._total_pretokens = counts.total_pretokens

        # Interned symbol table: id -> string and back.
        self._strs: list[str] = []
        self._ids: dict[str, int] = {}
        for ch in self._alphabet:
            self._intern(ch)
        if self._mode is CorpusMode.TEXT:
            for ch in self._alphabet:
                self._intern(ch + END_OF_WORD_MARKER)

        # One symbol sequence per distinct pre-token, weighted by its count.
        # Sorted insertion keeps every downstream structure independent of
        # the dict order the counts arrived in.
        self._pretokens: list[str] = []
        self._seqs: list[list[int]] = []
        self._weights: list[int] = []
        self._token_counts: dict[int, int] = {}
        self._pair_counts: dict[tuple[int, int], int] = {}
        # pair -> ids of sequences that may still contain it (stale entries
        # are dropped the next time the pair is merged).
        self._where: dict[tuple[int, int], set[int]] = {}

        for pretoken, count in sorted(counts.entries.items()):
            seq = self._initial_symbols(pretoken)
            idx = len(self._seqs)
            self._pretokens.append(pretoken)
            self._seqs.append(seq)
            self._weights.append(count)
            tc = self._token_counts
            for sym in seq:
                tc[sym] = tc.get(sym, 0) + count
            pc = self._pair_counts
            for pair in zip(seq, seq[1:]):
                pc[pair] = pc.get(pair, 0) + count
                self._where.setdefault(pair, set()).add(idx)

        self._heap: list[tuple[int, str, str, int, int]] = [
            (-cnt, self._strs[l], self._strs[r], l, r)
            for (l, r), cnt in self._pair_counts.items()
        ]
        heapq.heapify(self._heap)
        self._merges: list[MergeRule] = []

    # ------------------------------------------------------------------
    # construction helpers

    def _intern(self, token: str) -> int:
        tid = self._ids.get(token)
        if tid is None:
            tid = len(self._strs)
            self._ids[token] = tid
            self._strs.append(token)
        return tid

    def _initial_symbols(self, pretoken: str) -> list[int]:
        ids = self._ids
        if self._mode is CorpusMode.TEXT:
            body = [ids[ch] for ch in pretoken[:-1]]
            body.append(ids[pretoken[-1] + END_OF_WORD_MARKER])
            return body
        return [ids[ch] for ch in pretoken]

    # ------------------------------------------------------------------
    # read surface

    @property
    def mode(self) -> CorpusMode:
        return self._mode

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self._alphabet

    @property
    def reserved(self) -> tuple[str, ...]:
        return self._reserved

    @property
    def merges(self) -> tuple[MergeRule, ...]:
        return tuple(self._merges)

    @property
    def vocab_size(self) -> int:
        return len(self._alphabet) + len(self._reserved) + len(self._merges)

    @property
    def min_vocab_size(self) -> int:
        return len(self._alphabet) + len(self._reserved)

    @property
    def token_counts(self) -> dict[str, int]:
        """Histogram of current tokens over the corpus, keyed by string."""
        strs = self._strs
        return {strs[tid]: cnt for tid, cnt in self._token_counts.items()}

    def token_count_values(self):
        """Counts only, for scoring paths that do not need token strings.

        Returns a live view; take a copy before mutating the trainer.
        """
        return self._token_counts.values()

    def pair_counts(self) -> dict[tuple[str, str], int]:
        strs = self._strs
        return {(strs[l], strs[r]): cnt for (l, r), cnt in self._pair_counts.items()}

    def symbol_sequences(self) -> dict[str, tuple[str, ...]]:
        """Current symbol sequence of every distinct pre-token."""
        strs = self._strs
        return {
            pretoken: tuple(strs[tid] for tid in seq)
            for pretoken, seq in zip(self._pretokens, self._seqs)
        }

    # ------------------------------------------------------------------
    # training

    def best_pair(self) -> MergeRule | None:
        """Most frequent adjacent pair, ties broken lexicographically.

        Returns ``None`` once no pair occurs anywhere.  Stale heap
        entries (counts that changed since they were pushed) are
        discarded on the way; the call never changes the logical state.
        """
        heap = self._heap
        pc = self._pair_counts
        while heap:
            neg, left, right, l, r = heap[0]
            current = pc.get((l, r))
            if current is not None and current == -neg:
                return MergeRule(left=left, right=right, rank=len(self._merges))
            heapq.heappop(heap)
        return None

    def apply_merge(self, rule: MergeRule) -> None:
        """Rewrite all non-overlapping occurrences of ``rule`` left to right."""
        l = self._ids.get(rule.left)
        r = self._ids.get(rule.right)
        if l is None or r is None or (l, r) not in self._pair_counts:
            raise TrainerStateError(
                f"pair ({rule.left!r}, {rule.right!r}) is not present in the pair index"
            )
        pair = (l, r)
        m = self._intern(rule.left + rule.right)
        merged_str = self._strs[m]

        pc = self._pair_counts
        tc = self._token_counts
        where = self._where
        seqs = self._seqs
        weights = self._weights
        delta: dict[tuple[int, int], int] = {}
        tdelta = 0  # net change of the merged token's count

        for idx in where.pop(pair, ()):
            seq = seqs[idx]
            w = weights[idx]
            new: list[int] = []
            i = 0
            n = len(seq)
            matched = False
            while i < n:
                if i < n - 1 and seq[i] == l and seq[i + 1] == r:
                    matched = True
                    if new:
                        prev = new[-1]
                        p = (prev, l)
                        delta[p] = delta.get(p, 0) - w
                        q = (prev, m)
                        delta[q] = delta.get(q, 0) + w
                        where.setdefault(q, set()).add(idx)
                    delta[pair] = delta.get(pair, 0) - w
                    if i + 2 < n:
                        nxt = seq[i + 2]
                        p = (r, nxt)
                        delta[p] = delta.get(p, 0) - w
                        q = (m, nxt)
                        delta[q] = delta.get(q, 0) + w
                        where.setdefault(q, set()).add(idx)
                    tc[l] -= w
                    tc[r] -= w
                    tdelta += w
                    new.append(m)
                    i += 2
                else:
                    new.append(seq[i])
                    i += 1
            if matched:
                seqs[idx] = new

        if tdelta:
            tc[m] = tc.get(m, 0) + tdelta
        if tc.get(l) == 0:
            del tc[l]
        if tc.get(r) == 0:
            del tc[r]

        heap = self._heap
        strs = self._strs
        for p, d in delta.items():
            if d == 0:
                continue
            cnt = pc.get(p, 0) + d
            if cnt == 0:
                pc.pop(p, None)
                where.pop(p, None)
            else:
                pc[p] = cnt
                heapq.heappush(heap, (-cnt, strs[p[0]], strs[p[1]], p[0], p[1]))

        if pair in pc:
            raise TrainerStateError(
                f"pair index still holds occurrences of the merged pair for {merged_str!r}"
            )
        self._merges.append(MergeRule(left=rule.left, right=rule.right, rank=len(self._merges)))

    def train_to(self, target_size: int) -> bool:
        """Merge until ``vocab_size`` reaches ``target_size``.

        Returns False when the corpus ran out of mergeable pairs first.
        """
        if target_size < self.min_vocab_size:
            raise ValueError(
                f"target vocabulary size {target_size} is below the minimum "
                f"{self.min_vocab_size} (alphabet + reserved tokens)"
            )
        while self.vocab_size < target_size:
            rule = self.best_pair()
            if rule is None:
                return False
            self.apply_merge(rule)
        return True

    def freeze(self) -> "Vocabulary":
        return Vocabulary(mode=self._mode, alphabet=self._alphabet, merges=self.merges)


def train_to_size(counts: PretokenCounts, target_size: int) -> "Vocabulary":
    """Train a fresh vocabulary of ``target_size`` entries on ``counts``.

    Early pair exhaustion produces a smaller vocabulary plus an
    ``ExhaustedPairsWarning`` rather than an error, so tiny corpora stay
    usable.
    """
    trainer = BpeTrainer(counts)
    reached = trainer.train_to(target_size)
    if not reached:
        warnings.warn(
            f"mergeable pairs exhausted at vocabulary size {trainer.vocab_size} "
            f"(target {target_size})",
            ExhaustedPairsWarning,
            stacklevel=2,
        )
    return trainer.freeze()


class Vocabulary:
    """Frozen tokenizer artifact: alphabet, ranked merges, reserved tokens.

    Token ids are a pure function of (reserved order, alphabet order,
    merge order): reserved tokens first, then alphabet characters, then
    (text mode) the marker-fused variant of each alphabet character,
    then merge results in rank order.  Instances are immutable and
    encode/decode are pure, so a vocabulary can be shared freely.
    """

    def __init__(
        self,
        mode: CorpusMode | str,
        alphabet: Iterable[str],
        merges: Iterable[MergeRule],
        validate: bool = True,
    ):
        self._mode = CorpusMode(mode)
        self._alphabet = tuple(alphabet)
        self._merges = tuple(merges)
        self._reserved = _reserved_for(self._mode)
        self._marker = END_OF_WORD_MARKER if self._mode is CorpusMode.TEXT else ""
        if validate:
            self._validate()

        self._id_to_token: list[str] = []
        self._token_to_id: dict[str, int] = {}
        for token in self._reserved:
            self._add_token(token)
        for ch in self._alphabet:
            self._add_token(ch)
        if self._mode is CorpusMode.TEXT:
            for ch in self._alphabet:
                self._add_token(ch + END_OF_WORD_MARKER)
        for rule in self._merges:
            self._add_token(rule.merged)

        # Rank of the first rule producing each pair; later duplicates are
        # unreachable during encoding because the first one fires.
        self._rank_of_pair: dict[tuple[str, str], int] = {}
        for rule in self._merges:
            self._rank_of_pair.setdefault((rule.left, rule.right), rule.rank)

        self._unk_id = self._token_to_id[UNK_TOKEN]
        self._encode_cache: dict[str, tuple[int, ...]] = {}

    def _add_token(self, token: str) -> None:
        if token not in self._token_to_id:
            self._token_to_id[token] = len(self._id_to_token)
            self._id_to_token.append(token)

    def _validate(self) -> None:
        if list(self._alphabet) != sorted(set(self._alphabet)):
            raise VocabularyFormatError("alphabet must be unique and sorted by code point")
        for ch in self._alphabet:
            if len(ch) != 1:
                raise VocabularyFormatError(f"alphabet entry {ch!r} is not a single character")
        known = set(self._alphabet)
        if self._mode is CorpusMode.TEXT:
            known.update(ch + END_OF_WORD_MARKER for ch in self._alphabet)
        for i, rule in enumerate(self._merges):
            if rule.rank != i:
                raise VocabularyFormatError(
                    f"merge ranks must be consecutive from 0; rule {i} has rank {rule.rank}"
                )
            if rule.left not in known or rule.right not in known:
                raise VocabularyFormatError(
                    f"merge {i} references unknown token "
                    f"({rule.left!r}, {rule.right!r})"
                )
            known.add(rule.merged)

    # ------------------------------------------------------------------

    @property
    def mode(self) -> CorpusMode:
        return self._mode

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self._alphabet

    @property
    def merges(self) -> tuple[MergeRule, ...]:
        return self._merges

    @property
    def reserved(self) -> tuple[str, ...]:
        return self._reserved

    @property
    def marker(self) -> str:
        return self._marker

    @property
    def size(self) -> int:
        """Vocabulary size as counted during training: alphabet + reserved + merges."""
        return len(self._alphabet) + len(self._reserved) + len(self._merges)

    @property
    def unk_id(self) -> int:
        return self._unk_id

    def token_strings(self) -> tuple[str, ...]:
        """All token strings in id order (may exceed ``size`` in text mode
        because each alphabet character also has a marker-fused variant)."""
        return tuple(self._id_to_token)

    def id_of(self, token: str) -> int | None:
        return self._token_to_id.get(token)

    def token_of(self, token_id: int) -> str:
        if not 0 <= token_id < len(self._id_to_token):
            raise ValueError(f"token id {token_id} is not valid for this vocabulary")
        return self._id_to_token[token_id]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (
            self._mode is other._mode
            and self._alphabet == other._alphabet
            and self._merges == other._merges
        )

    def __repr__(self) -> str:
        return (
            f"<Vocabulary mode={self._mode.value} size={self.size} "
            f"merges={len(self._merges)}>"
        )

    # ------------------------------------------------------------------
    # encoding / decoding

    def encode_pretoken(self, pretoken: str) -> tuple[int, ...]:
        """Encode one pre-token by applying merges in ascending rank order."""
        cached = self._encode_cache.get(pretoken)
        if cached is not None:
            return cached

        ids = self._token_to_id
        if self._mode is CorpusMode.TEXT:
            symbols = list(pretoken[:-1]) + [pretoken[-1] + END_OF_WORD_MARKER]
        else:
            symbols = list(pretoken)
        # Characters outside the alphabet degrade to the unknown token,
        # which no merge rule ever touches.
        symbols = [s if s in ids else UNK_TOKEN for s in symbols]

        ranks = self._rank_of_pair
        while len(symbols) >= 2:
            best_rank: int | None = None
            best_pair: tuple[str, str] | None = None
            for i in range(len(symbols) - 1):
                rank = ranks.get((symbols[i], symbols[i + 1]))
                if rank is not None and (best_rank is None or rank < best_rank):
                    best_rank = rank
                    best_pair = (symbols[i], symbols[i + 1])
            if best_pair is None:
                break
            left, right = best_pair
            merged = left + right
            out: list[str] = []
            i = 0
            while i < len(symbols):
                if i < len(symbols) - 1 and symbols[i] == left and symbols[i + 1] == right:
                    out.append(merged)
                    i += 2
                else:
                    out.append(symbols[i])
                    i += 1
            symbols = out

        encoded = tuple(ids[s] for s in symbols)
        self._encode_cache[pretoken] = encoded
        return encoded

    def encode(self, text: str) -> list[int]:
        """Encode raw text: whitespace words in text mode, lines in sequence mode."""
        if self._mode is CorpusMode.TEXT:
            pretokens = text.split()
        else:
            pretokens = [line for line in text.splitlines() if line]
        out: list[int] = []
        for pretoken in pretokens:
            out.extend(self.encode_pretoken(pretoken))
        return out

    def decode(self, token_ids: Iterable[int]) -> str:
        """Concatenate token strings; text mode restores spaces from markers."""
        parts = [self.token_of(i) for i in token_ids]
        text = "".join(parts)
        if self._mode is CorpusMode.TEXT:
            text = text.replace(END_OF_WORD_MARKER, " ")
            if text.endswith(" "):
                text = text[:-1]
        return text

    # ------------------------------------------------------------------
    # serialization

    def to_dict(self) -> dict:
        return {
            "format_version": VOCAB_FORMAT_VERSION,
            "mode": self._mode.value,
            "alphabet": list(self._alphabet),
            "merges": [[rule.left, rule.right] for rule in self._merges],
            "reserved": list(self._reserved),
            "marker": self._marker,
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "Vocabulary":
        try:
            version = payload["format_version"]
            if version != VOCAB_FORMAT_VERSION:
                raise VocabularyFormatError(f"unsupported vocabulary format version {version!r}")
            mode = CorpusMode(payload["mode"])
            alphabet = payload["alphabet"]
            raw_merges = payload["merges"]
            merges = []
            for rank, item in enumerate(raw_merges):
                left, right = item
                if not isinstance(left, str) or not isinstance(right, str):
                    raise VocabularyFormatError(f"merge {rank} is not a pair of strings")
                merges.append(MergeRule(left=left, right=right, rank=rank))
        except VocabularyFormatError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise VocabularyFormatError(f"malformed vocabulary document: {exc}") from exc
        vocab = cls(mode=mode, alphabet=alphabet, merges=merges)
        if list(payload.get("reserved", [])) != list(vocab.reserved):
            raise VocabularyFormatError("reserved token list does not match the corpus mode")
        if payload.get("marker", "") != vocab.marker:
            raise VocabularyFormatError("marker does not match the corpus mode")
        return vocab

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=True, indent=2) + "\n"

    def save(self, path: str | Path) -> None:
        """Write the vocabulary JSON via temp-file-then-rename."""
        atomic_write_text(Path(path), self.dumps())

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise VocabularyFormatError(f"cannot read vocabulary file {path}: {exc}") from exc
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise VocabularyFormatError(f"vocabulary file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(payload)
