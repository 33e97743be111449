"""Automatic vocabulary-size selection through Zipf-alignment stagnation.

The vocabulary grows in fixed merge batches.  After each batch the token
histogram is scored against a power law; a stagnation counter tracks how
many consecutive checkpoints failed to beat the best score seen so far
by more than ``epsilon``.  Once the counter reaches ``patience`` the
distribution has stabilized and growth stops.  The pure decision rule
lives in :func:`replay_trace` so it can be tested without training.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import IO, Callable, Literal, Sequence

from .bpe import BpeTrainer, Vocabulary
from .corpus import PretokenCounts
from .zipf import zipf_score_from_counts

StopReason = Literal["stagnation", "max_size", "pairs_exhausted"]

PICK_CURRENT = "current_at_stop"
PICK_BEST = "best_checkpoint"


@dataclass(frozen=True)
class SelectorConfig:
    """Knobs of the selection loop.

    ``v_min`` defaults to the smallest valid vocabulary (alphabet plus
    reserved tokens) when left as None.  ``pick_rule`` chooses between
    freezing the vocabulary exactly where growth stopped and re-training
    to the size of the best-scoring checkpoint.
    """

    checkpoint_interval: int = 100
    epsilon: float = 1e-4
    patience: int = 10
    v_min: int | None = None
    v_max: int = 50_000
    pick_rule: str = PICK_CURRENT

    def __post_init__(self) -> None:
        if self.checkpoint_interval < 1:
            raise ValueError("checkpoint_interval must be >= 1")
        if not math.isfinite(self.epsilon) or self.epsilon < 0:
            raise ValueError("epsilon must be finite and >= 0")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.v_max < 1:
            raise ValueError("v_max must be >= 1")
        if self.v_min is not None and self.v_min > self.v_max:
            raise ValueError(f"v_min ({self.v_min}) must be <= v_max ({self.v_max})")
        if self.pick_rule not in (PICK_CURRENT, PICK_BEST):
            raise ValueError(
                f"pick_rule must be {PICK_CURRENT!r} or {PICK_BEST!r}, got {self.pick_rule!r}"
            )


@dataclass(frozen=True)
class CheckpointRecord:
    index: int
    vocab_size: int
    zipf_t: float
    zipf_max: float
    stagnation: int


@dataclass(frozen=True)
class SelectionResult:
    trace: tuple[CheckpointRecord, ...]
    stop_reason: StopReason
    selected_size: int
    selected_vocab: Vocabulary
    best_checkpoint: int
    config: SelectorConfig = field(repr=False)


def replay_trace(
    scores: Sequence[float], epsilon: float, patience: int
) -> tuple[int, int]:
    """Run the stopping rule over a score sequence.

    Returns ``(stop_index, best_index)``: the first index at which the
    stagnation counter reaches ``patience`` (the last index when it never
    does), and the earliest index achieving the maximum score up to and
    including the stop.
    """
    if not scores:
        raise ValueError("score trace is empty")
    zipf_max = -math.inf
    stagnation = 0
    stop = len(scores) - 1
    for index, score in enumerate(scores):
        if score > zipf_max + epsilon:
            stagnation = 0
        else:
            stagnation += 1
        if score > zipf_max:
            zipf_max = score
        if stagnation >= patience:
            stop = index
            break
    best = 0
    best_score = scores[0]
    for index in range(1, stop + 1):
        if scores[index] > best_score:
            best = index
            best_score = scores[index]
    return stop, best


def select_vocabulary(
    counts: PretokenCounts,
    config: SelectorConfig | None = None,
    progress: Callable[[CheckpointRecord], None] | None = None,
) -> SelectionResult:
    """Grow a vocabulary until its Zipf alignment stagnates.

    The score at each checkpoint is read from the live trainer histogram,
    which is identical to re-encoding the corpus with the frozen
    vocabulary of that size (the trainer and the encoder segment training
    pre-tokens the same way).
    """
    config = config or SelectorConfig()
    trainer = BpeTrainer(counts)
    v_min = config.v_min if config.v_min is not None else trainer.min_vocab_size
    if v_min < trainer.min_vocab_size:
        raise ValueError(
            f"v_min ({v_min}) is below the minimum vocabulary size "
            f"({trainer.min_vocab_size})"
        )
    if v_min > config.v_max:
        raise ValueError(f"v_min ({v_min}) must be <= v_max ({config.v_max})")

    exhausted = not trainer.train_to(v_min)
    trace: list[CheckpointRecord] = []
    zipf_max = -math.inf
    stagnation = 0
    stop_reason: StopReason

    while True:
        score = zipf_score_from_counts(trainer.token_count_values())
        if score > zipf_max + config.epsilon:
            stagnation = 0
        else:
            stagnation += 1
        if score > zipf_max:
            zipf_max = score
        record = CheckpointRecord(
            index=len(trace),
            vocab_size=trainer.vocab_size,
            zipf_t=score,
            zipf_max=zipf_max,
            stagnation=stagnation,
        )
        trace.append(record)
        if progress is not None:
            progress(record)

        if stagnation >= config.patience:
            stop_reason = "stagnation"
            break
        if exhausted:
            stop_reason = "pairs_exhausted"
            break
        if trainer.vocab_size >= config.v_max:
            stop_reason = "max_size"
            break
        target = min(trainer.vocab_size + config.checkpoint_interval, config.v_max)
        exhausted = not trainer.train_to(target)

    best = 0
    for record in trace:
        if record.zipf_t > trace[best].zipf_t:
            best = record.index

    if config.pick_rule == PICK_BEST and trace[best].vocab_size != trainer.vocab_size:
        retrained = BpeTrainer(counts)
        retrained.train_to(trace[best].vocab_size)
        vocab = retrained.freeze()
    else:
        vocab = trainer.freeze()

    return SelectionResult(
        trace=tuple(trace),
        stop_reason=stop_reason,
        selected_size=vocab.size,
        selected_vocab=vocab,
        best_checkpoint=best,
        config=config,
    )


# ----------------------------------------------------------------------
# trace emission

TRACE_HEADER = "checkpoint,vocab_size,zipf_t,zipf_max,stagnation"


def format_trace_row(record: CheckpointRecord) -> str:
    return (
        f"{record.index},{record.vocab_size},{record.zipf_t!r},"
        f"{record.zipf_max!r},{record.stagnation}"
    )


def write_trace_csv(result: SelectionResult, handle: IO[str]) -> None:
    handle.write(TRACE_HEADER + "\n")
    for record in result.trace:
        handle.write(format_trace_row(record) + "\n")
    handle.write(
        f"# stop_reason={result.stop_reason} selected_size={result.selected_size} "
        f"best_checkpoint={result.best_checkpoint}\n"
    )
