"""Rank-frequency curves, power-law fitting, and tokenizer metrics.

A token histogram is turned into a rank-frequency curve (frequency
descending, ties ordered by token string), and the curve is fit with an
ordinary least-squares line through (ln rank, ln frequency).  The
coefficient of determination of that line is the Zipf alignment score:
1.0 means the distribution is an exact power law, 0 means no linear
structure at all.

R^2 is invariant under the log base and under positive rescaling of
frequencies, so natural logs are fixed by convention; only the reported
intercept depends on that choice.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Iterable, Mapping

import numpy as np

from .corpus import CorpusMode, PretokenCounts
from .errors import EmptyTableError, InsufficientPointsError

#: Token histogram: token string -> occurrence count (>= 1, no reserved tokens).
TokenFrequencyTable = Mapping[str, int]


@dataclass(frozen=True)
class RankFrequencyCurve:
    """Ordered (rank, token, frequency) points, frequency non-increasing."""

    points: tuple[tuple[int, str, int], ...]

    def __post_init__(self) -> None:
        last_rank = 0
        last_freq = None
        for rank, _token, freq in self.points:
            if rank <= last_rank:
                raise ValueError("ranks must be strictly increasing and >= 1")
            if freq <= 0:
                raise ValueError("frequencies must be positive")
            if last_freq is not None and freq > last_freq:
                raise ValueError("frequencies must be non-increasing in rank")
            last_rank = rank
            last_freq = freq

    def __len__(self) -> int:
        return len(self.points)

    def ranks(self) -> np.ndarray:
        return np.array([p[0] for p in self.points], dtype=np.float64)

    def frequencies(self) -> np.ndarray:
        return np.array([p[2] for p in self.points], dtype=np.float64)


@dataclass(frozen=True)
class ZipfFit:
    """Least-squares line through (ln rank, ln frequency).

    ``slope`` is the fitted negative power-law exponent and ``intercept``
    the fitted log of the leading constant.  ``degenerate`` marks the
    all-frequencies-equal case where R^2 is undefined and reported as 0.
    """

    slope: float
    intercept: float
    r_squared: float
    n_points: int
    degenerate: bool


def rank_frequency(table: TokenFrequencyTable) -> RankFrequencyCurve:
    """Sort a token histogram into a 1-based rank-frequency curve.

    Ordering is (frequency descending, token ascending), so the curve is
    independent of the insertion order of the table.
    """
    if not table:
        raise EmptyTableError("token frequency table is empty")
    items = sorted(table.items(), key=lambda kv: (-kv[1], kv[0]))
    points = []
    for rank, (token, freq) in enumerate(items, start=1):
        if freq <= 0:
            raise ValueError(f"token {token!r} has non-positive count {freq}")
        points.append((rank, token, freq))
    return RankFrequencyCurve(points=tuple(points))


def _fit_loglog(log_ranks: np.ndarray, freqs: np.ndarray) -> ZipfFit:
    n = freqs.size
    if n < 3:
        raise InsufficientPointsError(
            f"need at least 3 rank-frequency points to fit a line, got {n}"
        )
    y = np.log(freqs)
    y_mean = y.mean()
    ss_tot = float(((y - y_mean) ** 2).sum())
    if ss_tot == 0.0:
        return ZipfFit(
            slope=0.0, intercept=float(y_mean), r_squared=0.0, n_points=n, degenerate=True
        )
    x = log_ranks
    x_mean = x.mean()
    dx = x - x_mean
    slope = float((dx * (y - y_mean)).sum() / (dx * dx).sum())
    intercept = float(y_mean - slope * x_mean)
    residuals = y - (intercept + slope * x)
    r_squared = 1.0 - float((residuals * residuals).sum()) / ss_tot
    r_squared = min(max(r_squared, 0.0), 1.0)
    return ZipfFit(
        slope=slope, intercept=intercept, r_squared=r_squared, n_points=n, degenerate=False
    )


def fit_power_law(curve: RankFrequencyCurve) -> ZipfFit:
    """Ordinary least squares of ln(frequency) on ln(rank)."""
    return _fit_loglog(np.log(curve.ranks()), curve.frequencies())


# Shared, monotonically growing ln(rank) table; selector checkpoints hit
# this every few merges, so the rank logs are computed once, not per call.
_LOG_RANKS = np.log(np.arange(1, 1025, dtype=np.float64))


def _log_ranks(n: int) -> np.ndarray:
    global _LOG_RANKS
    if _LOG_RANKS.size < n:
        _LOG_RANKS = np.log(np.arange(1, max(n, 2 * _LOG_RANKS.size) + 1, dtype=np.float64))
    return _LOG_RANKS[:n]


def zipf_score_from_counts(counts: Iterable[int]) -> float:
    """Alignment score from counts alone.

    Token strings only affect the ordering among equal frequencies, which
    leaves the fitted line unchanged, so sorting the counts is equivalent
    to building the full curve.
    """
    try:
        n = len(counts)  # type: ignore[arg-type]
    except TypeError:
        freqs = np.fromiter(counts, dtype=np.float64)
    else:
        freqs = np.fromiter(counts, dtype=np.float64, count=n)
    freqs[::-1].sort()
    n = freqs.size
    if n < 3:
        raise InsufficientPointsError(
            f"need at least 3 rank-frequency points to fit a line, got {n}"
        )
    if freqs[-1] <= 0:
        raise ValueError("token counts must be positive")
    return _fit_loglog(_log_ranks(n), freqs).r_squared


def zipf_score(table: TokenFrequencyTable) -> float:
    """R^2 of the rank-frequency curve of ``table``."""
    if not table:
        raise EmptyTableError("token frequency table is empty")
    return zipf_score_from_counts(table.values())


def token_table_from_encoding(vocab, counts: PretokenCounts) -> dict[str, int]:
    """Token histogram obtained by re-encoding a corpus with a vocabulary.

    Reserved tokens (unknown-character placeholders) are excluded; the
    result covers observed tokens only, so never-used vocabulary entries
    do not appear.
    """
    if vocab.mode is not counts.mode:
        raise ValueError(
            f"vocabulary mode {vocab.mode.value!r} does not match corpus mode "
            f"{counts.mode.value!r}"
        )
    n_reserved = len(vocab.reserved)
    table: dict[int, int] = {}
    for pretoken, count in counts.entries.items():
        for token_id in vocab.encode_pretoken(pretoken):
            if token_id >= n_reserved:
                table[token_id] = table.get(token_id, 0) + count
    return {vocab.token_of(tid): cnt for tid, cnt in table.items()}


def compression_ratio(vocab, counts: PretokenCounts) -> float:
    """Corpus characters divided by emitted tokens; higher is more compact."""
    if vocab.mode is not counts.mode:
        raise ValueError(
            f"vocabulary mode {vocab.mode.value!r} does not match corpus mode "
            f"{counts.mode.value!r}"
        )
    if counts.total_chars == 0:
        raise EmptyTableError("corpus has no characters")
    total_tokens = 0
    for pretoken, count in counts.entries.items():
        total_tokens += len(vocab.encode_pretoken(pretoken)) * count
    return counts.total_chars / total_tokens


def fertility(vocab, counts: PretokenCounts) -> float:
    """Average tokens emitted per word; defined for text-mode corpora only."""
    if counts.mode is not CorpusMode.TEXT or vocab.mode is not CorpusMode.TEXT:
        raise ValueError("fertility requires word boundaries and is text-mode only")
    total_tokens = 0
    for pretoken, count in counts.entries.items():
        total_tokens += len(vocab.encode_pretoken(pretoken)) * count
    return total_tokens / counts.total_pretokens


# ----------------------------------------------------------------------
# emission

def write_rank_frequency_csv(curve: RankFrequencyCurve, handle: IO[str]) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["rank", "token", "frequency"])
    for rank, token, freq in curve.points:
        writer.writerow([rank, token, freq])


def format_fit_report(fit: ZipfFit, extra: Mapping[str, object] | None = None) -> str:
    lines = [
        f"slope={fit.slope!r}",
        f"intercept={fit.intercept!r}",
        f"r_squared={fit.r_squared!r}",
        f"n_points={fit.n_points}",
        f"degenerate={'true' if fit.degenerate else 'false'}",
    ]
    for key, value in (extra or {}).items():
        lines.append(f"{key}={value!r}" if isinstance(value, float) else f"{key}={value}")
    return "\n".join(lines) + "\n"


_SVG_WIDTH = 640
_SVG_HEIGHT = 480
_SVG_MARGIN = 56
_SVG_MAX_POINTS = 1500


def _display_subset(n: int) -> list[int]:
    # Log-spaced subsample keeps head and tail visible without emitting
    # one circle per token for very large curves.
    if n <= _SVG_MAX_POINTS:
        return list(range(n))
    picked = sorted({
        int(round(math.exp(math.log(n) * i / (_SVG_MAX_POINTS - 1)))) - 1
        for i in range(_SVG_MAX_POINTS)
    })
    return [i for i in picked if 0 <= i < n]


def write_rank_frequency_svg(
    curve: RankFrequencyCurve, fit: ZipfFit, handle: IO[str]
) -> None:
    """Log-log scatter of the curve plus the fitted line (presentation only)."""
    ranks = curve.ranks()
    freqs = curve.frequencies()
    lx = np.log10(ranks)
    ly = np.log10(freqs)
    x_lo, x_hi = 0.0, float(max(lx.max(), 1e-9))
    y_lo, y_hi = float(min(ly.min(), 0.0)), float(max(ly.max(), 1e-9))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    plot_w = _SVG_WIDTH - 2 * _SVG_MARGIN
    plot_h = _SVG_HEIGHT - 2 * _SVG_MARGIN

    def px(v: float) -> float:
        return _SVG_MARGIN + (v - x_lo) / (x_hi - x_lo) * plot_w

    def py(v: float) -> float:
        return _SVG_HEIGHT - _SVG_MARGIN - (v - y_lo) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_WIDTH}" '
        f'height="{_SVG_HEIGHT}" viewBox="0 0 {_SVG_WIDTH} {_SVG_HEIGHT}">',
        f'<rect width="{_SVG_WIDTH}" height="{_SVG_HEIGHT}" fill="white"/>',
        f'<line x1="{_SVG_MARGIN}" y1="{_SVG_HEIGHT - _SVG_MARGIN}" '
        f'x2="{_SVG_WIDTH - _SVG_MARGIN}" y2="{_SVG_HEIGHT - _SVG_MARGIN}" stroke="black"/>',
        f'<line x1="{_SVG_MARGIN}" y1="{_SVG_MARGIN}" x2="{_SVG_MARGIN}" '
        f'y2="{_SVG_HEIGHT - _SVG_MARGIN}" stroke="black"/>',
    ]
    for tick in range(math.floor(x_lo), math.floor(x_hi) + 1):
        x = px(tick)
        y0 = _SVG_HEIGHT - _SVG_MARGIN
        out.append(f'<line x1="{x:.2f}" y1="{y0}" x2="{x:.2f}" y2="{y0 + 5}" stroke="black"/>')
        out.append(
            f'<text x="{x:.2f}" y="{y0 + 20}" font-size="12" text-anchor="middle">'
            f"1e{tick}</text>"
        )
    for tick in range(math.floor(y_lo), math.floor(y_hi) + 1):
        y = py(tick)
        out.append(
            f'<line x1="{_SVG_MARGIN - 5}" y1="{y:.2f}" x2="{_SVG_MARGIN}" y2="{y:.2f}" '
            f'stroke="black"/>'
        )
        out.append(
            f'<text x="{_SVG_MARGIN - 8}" y="{y + 4:.2f}" font-size="12" '
            f'text-anchor="end">1e{tick}</text>'
        )
    out.append(
        f'<text x="{_SVG_WIDTH / 2:.0f}" y="{_SVG_HEIGHT - 12}" font-size="13" '
        'text-anchor="middle">rank (log10)</text>'
    )
    out.append(
        f'<text x="16" y="{_SVG_HEIGHT / 2:.0f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {_SVG_HEIGHT / 2:.0f})">frequency (log10)</text>'
    )

    for i in _display_subset(len(curve)):
        out.append(
            f'<circle cx="{px(lx[i]):.2f}" cy="{py(ly[i]):.2f}" r="2" '
            'fill="steelblue" fill-opacity="0.7"/>'
        )

    if not fit.degenerate:
        # Fitted line in natural-log space mapped onto the log10 axes.
        ln10 = math.log(10.0)
        y_at = lambda lr: (fit.intercept + fit.slope * lr * ln10) / ln10
        out.append(
            f'<line x1="{px(x_lo):.2f}" y1="{py(y_at(x_lo)):.2f}" '
            f'x2="{px(x_hi):.2f}" y2="{py(y_at(x_hi)):.2f}" '
            'stroke="crimson" stroke-width="1.5"/>'
        )
    out.append(
        f'<text x="{_SVG_WIDTH - _SVG_MARGIN}" y="{_SVG_MARGIN - 10}" font-size="12" '
        f'text-anchor="end">slope={fit.slope:.4f}  R&#178;={fit.r_squared:.4f}</text>'
    )
    out.append("</svg>")
    handle.write("\n".join(out) + "\n")
