"""Command-line front end.

Commands: ``train``, ``score``, ``select``, ``rankfreq``, ``encode``.
Every file-producing command also writes a run manifest (resolved
configuration, corpus digest, tool version, output list) so a run can be
reproduced and verified byte for byte.  Exit codes: 0 success, 2 usage
or configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys
from pathlib import Path

from . import __version__
from .bpe import Vocabulary, train_to_size
from .corpus import load_corpus
from .errors import DataError, VocabularyFormatError
from .fileio import atomic_write_text
from .selector import (
    TRACE_HEADER,
    SelectorConfig,
    format_trace_row,
    select_vocabulary,
    write_trace_csv,
)
from .zipf import (
    compression_ratio,
    fertility,
    fit_power_law,
    format_fit_report,
    rank_frequency,
    token_table_from_encoding,
    write_rank_frequency_csv,
    write_rank_frequency_svg,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3


def _sha256_of(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_manifest(
    path: Path, command: str, config: dict, corpus_path: str, outputs: list[str]
) -> None:
    manifest = {
        "command": command,
        "config": config,
        "corpus_sha256": _sha256_of(corpus_path),
        "tool_version": __version__,
        "outputs": sorted(outputs),
    }
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _add_corpus_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=["text", "sequence"], default="text")
    parser.add_argument("--normalize", choices=["none", "nfc"], default="none")


def _load_vocab(path: str) -> Vocabulary:
    return Vocabulary.load(path)


# ----------------------------------------------------------------------
# commands

def _cmd_train(args: argparse.Namespace) -> int:
    counts = load_corpus(args.corpus, args.mode, args.normalize)
    vocab = train_to_size(counts, args.vocab_size)
    if vocab.size < args.vocab_size:
        print(
            f"warning: pairs exhausted at size {vocab.size} (target {args.vocab_size})",
            file=sys.stderr,
        )
    out = Path(args.out)
    vocab.save(out)
    _write_manifest(
        out.with_name(out.name + ".manifest.json"),
        "train",
        {
            "corpus": str(args.corpus),
            "mode": args.mode,
            "normalize": args.normalize,
            "vocab_size": args.vocab_size,
        },
        args.corpus,
        [str(out)],
    )
    return EXIT_OK


def _check_mode(args: argparse.Namespace, vocab: Vocabulary) -> None:
    if args.mode is not None and args.mode != vocab.mode.value:
        raise ValueError(
            f"--mode {args.mode} does not match the vocabulary mode {vocab.mode.value}"
        )


def _cmd_score(args: argparse.Namespace) -> int:
    vocab = _load_vocab(args.vocab)
    _check_mode(args, vocab)
    counts = load_corpus(args.corpus, vocab.mode, args.normalize)
    table = token_table_from_encoding(vocab, counts)
    fit = fit_power_law(rank_frequency(table))
    extra: dict[str, object] = {"compression_ratio": compression_ratio(vocab, counts)}
    if vocab.mode.value == "text":
        extra["fertility"] = fertility(vocab, counts)
    sys.stdout.write(format_fit_report(fit, extra))
    return EXIT_OK


def _cmd_select(args: argparse.Namespace) -> int:
    counts = load_corpus(args.corpus, args.mode, args.normalize)
    config = SelectorConfig(
        checkpoint_interval=args.interval,
        epsilon=args.epsilon,
        patience=args.patience,
        v_min=args.v_min,
        v_max=args.v_max,
        pick_rule=args.pick_rule.replace("-", "_"),
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    print(TRACE_HEADER)

    def stream(record) -> None:
        print(format_trace_row(record), flush=True)

    result = select_vocabulary(counts, config, progress=stream)
    print(f"# stop_reason={result.stop_reason} selected_size={result.selected_size}")

    vocab_path = out_dir / "vocabulary.json"
    trace_path = out_dir / "trace.csv"
    result.selected_vocab.save(vocab_path)
    trace_buf = io.StringIO()
    write_trace_csv(result, trace_buf)
    atomic_write_text(trace_path, trace_buf.getvalue())
    _write_manifest(
        out_dir / "manifest.json",
        "select",
        {
            "corpus": str(args.corpus),
            "mode": args.mode,
            "normalize": args.normalize,
            "interval": args.interval,
            "epsilon": args.epsilon,
            "patience": args.patience,
            "v_min": args.v_min,
            "v_max": args.v_max,
            "pick_rule": config.pick_rule,
        },
        args.corpus,
        [str(vocab_path), str(trace_path)],
    )
    return EXIT_OK


def _cmd_rankfreq(args: argparse.Namespace) -> int:
    vocab = _load_vocab(args.vocab)
    _check_mode(args, vocab)
    counts = load_corpus(args.corpus, vocab.mode, args.normalize)
    table = token_table_from_encoding(vocab, counts)
    curve = rank_frequency(table)

    csv_buf = io.StringIO()
    write_rank_frequency_csv(curve, csv_buf)
    atomic_write_text(Path(args.csv), csv_buf.getvalue())
    outputs = [args.csv]
    if args.svg:
        fit = fit_power_law(curve)
        svg_buf = io.StringIO()
        write_rank_frequency_svg(curve, fit, svg_buf)
        atomic_write_text(Path(args.svg), svg_buf.getvalue())
        outputs.append(args.svg)
    _write_manifest(
        Path(args.csv + ".manifest.json"),
        "rankfreq",
        {
            "corpus": str(args.corpus),
            "vocab": str(args.vocab),
            "normalize": args.normalize,
        },
        args.corpus,
        outputs,
    )
    return EXIT_OK


def _cmd_encode(args: argparse.Namespace) -> int:
    vocab = _load_vocab(args.vocab)
    if args.input == "-":
        lines = sys.stdin.read().splitlines()
    else:
        try:
            lines = Path(args.input).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise DataError(f"cannot read input {args.input}: {exc}") from exc
    for line in lines:
        ids = vocab.encode(line)
        if args.show_tokens:
            print(" ".join(vocab.token_of(i) for i in ids))
        else:
            print(" ".join(str(i) for i in ids))
    return EXIT_OK


# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zipftok",
        description="Train BPE vocabularies, score their Zipf alignment, "
        "and select vocabulary sizes automatically.",
    )
    parser.add_argument("--version", action="version", version=f"zipftok {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a vocabulary of a fixed size")
    p_train.add_argument("corpus", help="UTF-8 corpus file")
    _add_corpus_flags(p_train)
    p_train.add_argument("--vocab-size", type=int, required=True)
    p_train.add_argument("--out", required=True, help="output vocabulary JSON path")
    p_train.set_defaults(func=_cmd_train)

    p_score = sub.add_parser("score", help="fit report for a corpus under a vocabulary")
    p_score.add_argument("corpus")
    p_score.add_argument("--vocab", required=True)
    p_score.add_argument("--mode", choices=["text", "sequence"], default=None,
                         help="must match the vocabulary mode when given")
    p_score.add_argument("--normalize", choices=["none", "nfc"], default="none")
    p_score.set_defaults(func=_cmd_score)

    p_select = sub.add_parser("select", help="grow a vocabulary until its Zipf fit stagnates")
    p_select.add_argument("corpus")
    _add_corpus_flags(p_select)
    p_select.add_argument("--interval", type=int, default=100, help="merges per checkpoint")
    p_select.add_argument("--epsilon", type=float, default=1e-4)
    p_select.add_argument("--patience", type=int, default=10)
    p_select.add_argument("--v-min", type=int, default=None)
    p_select.add_argument("--v-max", type=int, default=50_000)
    p_select.add_argument(
        "--pick-rule",
        choices=["current-at-stop", "best-checkpoint"],
        default="current-at-stop",
    )
    p_select.add_argument("--out-dir", required=True)
    p_select.set_defaults(func=_cmd_select)

    p_rank = sub.add_parser("rankfreq", help="emit the rank-frequency curve as CSV/SVG")
    p_rank.add_argument("corpus")
    p_rank.add_argument("--vocab", required=True)
    p_rank.add_argument("--mode", choices=["text", "sequence"], default=None,
                        help="must match the vocabulary mode when given")
    p_rank.add_argument("--normalize", choices=["none", "nfc"], default="none")
    p_rank.add_argument("--csv", required=True)
    p_rank.add_argument("--svg", default=None)
    p_rank.set_defaults(func=_cmd_rankfreq)

    p_enc = sub.add_parser("encode", help="encode lines from a file or stdin")
    p_enc.add_argument("input", nargs="?", default="-", help="input file, or - for stdin")
    p_enc.add_argument("--vocab", required=True)
    p_enc.add_argument("--show-tokens", action="store_true", help="print token strings, not ids")
    p_enc.set_defaults(func=_cmd_encode)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, VocabularyFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
