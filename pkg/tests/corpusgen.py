"""Deterministic synthetic corpora for tests.

No network access is assumed, so natural-language and genomic test
corpora are generated with realistic statistical structure instead of
being downloaded:

* English-like text: a Zipf head of short function words, content words
  built from stems and suffixes under a two-regime Zipf-Mandelbrot law
  (real word-frequency curves show exactly this dual-regime shape), and
  punctuation/digit marks with log-normally scattered frequencies (the
  ragged character tail every real corpus has).
* DNA-like reads: Zipf-weighted motifs over a skewed {A, C, G, T}
  composition, concatenated into fixed-length reads with occasional
  point mutations.  Once the motif inventory is learned, further merges
  only glue motifs together and the rank-frequency fit stops improving.

Everything is seeded; a given (size, seed) pair always produces the
same corpus.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

FUNCTION_WORDS = (
    "the of and to a in is it you that he was for on are with as his they be "
    "at one have this from or had by word but not what some we can out other "
    "were all there when up use your how said an each she which do their if"
).split()

SUFFIXES = ["s", "ed", "ing", "er", "ly", "est", "tion", "ness", "ment", "ful", "y", "es"]

PUNCTUATION = list(".,;:!?'\"()-0123456789")


def _content_word_types(rng, n_stems, max_types):
    letters = np.array(list("abcdefghijklmnopqrstuvwxyz"))
    stems = set()
    while len(stems) < n_stems:
        stems.add("".join(rng.choice(letters, size=int(rng.integers(2, 10)))))
    types = set(stems)
    for stem in sorted(stems):
        for suffix in rng.choice(SUFFIXES, size=int(rng.integers(1, 4)), replace=False):
            types.add(stem + str(suffix))
            if len(types) >= max_types:
                break
        if len(types) >= max_types:
            break
    return sorted(types - set(FUNCTION_WORDS))


@lru_cache(maxsize=8)
def english_like_text(n_chars: int, seed: int = 0) -> str:
    """English-like running text of roughly ``n_chars`` characters."""
    rng = np.random.default_rng(seed)
    n_stems = min(22_000, max(1_500, n_chars // 25))
    max_types = min(70_000, n_stems * 3)
    types = _content_word_types(rng, n_stems, max_types)

    n = len(types)
    order = rng.permutation(n)
    ranks = np.arange(1, n + 1, dtype=np.float64)
    # Two-regime Zipf-Mandelbrot: shallower head, steeper tail.
    head_s, tail_s, break_rank, shift = 0.95, 1.4, min(2000, n // 4), 2.7
    scale = (break_rank + shift) ** -head_s / (break_rank + shift) ** -tail_s
    probs = np.where(
        ranks <= break_rank,
        (ranks + shift) ** -head_s,
        scale * (ranks + shift) ** -tail_s,
    )
    probs /= probs.sum()

    f_ranks = np.arange(1, len(FUNCTION_WORDS) + 1, dtype=np.float64)
    f_probs = (f_ranks + 1.5) ** -1.05
    f_probs /= f_probs.sum()
    p_weights = np.exp(rng.normal(0.0, 2.3, size=len(PUNCTUATION)))
    p_probs = p_weights / p_weights.sum()

    func_share, punct_share = 0.40, 0.12
    n_words = int(n_chars / 5.5 * 1.1) + 100
    kind = rng.random(n_words)
    content_idx = rng.choice(n, size=n_words, p=probs)
    func_idx = rng.choice(len(FUNCTION_WORDS), size=n_words, p=f_probs)
    punct_idx = rng.choice(len(PUNCTUATION), size=n_words, p=p_probs)
    words = []
    for k, c, f, p in zip(kind, content_idx, func_idx, punct_idx):
        if k < func_share:
            words.append(FUNCTION_WORDS[f])
        elif k < func_share + punct_share:
            words.append(PUNCTUATION[p])
        else:
            words.append(types[order[c]])
    lines = [" ".join(words[s : s + 13]) for s in range(0, len(words), 13)]
    return "\n".join(lines)[:n_chars]


@lru_cache(maxsize=8)
def dna_like_text(n_chars: int, seed: int = 0, n_motifs: int = 500, read_len: int = 80) -> str:
    """DNA-like reads built from Zipf-weighted motifs over {A, C, G, T}."""
    rng = np.random.default_rng(seed)
    bases = np.array(list("ACGT"))
    base_p = np.array([0.40, 0.38, 0.12, 0.10])
    motifs: list[str] = []
    seen: set[str] = set()
    while len(motifs) < n_motifs:
        length = int(rng.integers(3, 11))
        motif = "".join(rng.choice(bases, size=length, p=base_p))
        if motif not in seen:
            seen.add(motif)
            motifs.append(motif)
    ranks = np.arange(1, n_motifs + 1, dtype=np.float64)
    probs = ranks**-1.6
    probs /= probs.sum()

    est_motifs = int(n_chars / 6.0) + 100
    choices = rng.choice(n_motifs, size=est_motifs, p=probs)
    mutate = rng.random(est_motifs) < 0.02

    lines: list[str] = []
    line: list[str] = []
    line_len = 0
    total = 0
    for pick, mut in zip(choices, mutate):
        piece = motifs[pick] if not mut else str(rng.choice(bases, p=base_p))
        line.append(piece)
        line_len += len(piece)
        if line_len >= read_len:
            text = "".join(line)
            lines.append(text)
            total += len(text) + 1
            line = []
            line_len = 0
            if total >= n_chars:
                break
    if line:
        lines.append("".join(line))
    return "\n".join(lines)


def random_toy_counts(rng: np.random.Generator, max_pretokens: int = 50, max_alphabet: int = 8):
    """Small random corpora for oracle-equivalence testing."""
    from zipftok.corpus import CorpusMode, counts_from_texts

    alphabet = list("abcdefgh")[: int(rng.integers(2, max_alphabet + 1))]
    n_pretokens = int(rng.integers(1, max_pretokens + 1))
    mode = CorpusMode.TEXT if rng.random() < 0.5 else CorpusMode.SEQUENCE
    words = []
    for _ in range(n_pretokens):
        length = int(rng.integers(1, 11))
        words.append("".join(rng.choice(alphabet, size=length)))
    if mode is CorpusMode.TEXT:
        return counts_from_texts([" ".join(words)], mode)
    return counts_from_texts(["\n".join(words)], mode)
