"""Command-line pipeline: ingest -> stats/split -> build -> confuse -> score -> report.

Every output is written atomically (temp file + rename). All randomness
flows from explicit --seed flags, and per-article work is ordered by
article id regardless of --threads, so a pipeline run is byte-reproducible.

Exit codes: 0 success, 1 data error (one machine-parsable reason line on
stderr), 2 usage error. An optional JSON config file supplies flag
defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

from . import __version__, corpus, keyterms, promptgen, report, rouge, textproc
from ._jsonio import atomic_write_bytes, atomic_write_text, dumps, read_jsonl, write_jsonl
from .errors import KeysumError, MalformedRecord, MissingReference


def _fail(message: str) -> int:
    print(message, file=sys.stderr)
    return 1


def _load_articles(path: str, headings: str | None) -> list[corpus.Article]:
    table = corpus.load_heading_table(headings) if headings else None
    with open(path, "rb") as fh:
        return corpus.parse_articles(fh, table)


def _parse_id_text_file(path: str) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    for lineno, rec in read_jsonl(path):
        if not isinstance(rec.get("id"), str) or not isinstance(rec.get("text"), str):
            raise MalformedRecord(lineno, "expected {id, text}")
        pairs.append((rec["id"], rec["text"]))
    return pairs


def _map_ordered(fn: Callable, items: list, threads: int) -> list:
    """Apply fn to items preserving order; thread count never changes output."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_ingest(args: argparse.Namespace) -> int:
    articles = _load_articles(args.input, args.headings)
    kept, rejected = corpus.filter_corpus(articles, args.sd_multiplier)
    write_jsonl(args.output, (corpus.article_to_record(a) for a in kept))
    write_jsonl(args.rejects, ({"id": i, "reason": r} for i, r in rejected))
    print(f"kept {len(kept)} of {len(articles)} articles ({len(rejected)} rejected)")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    articles = _load_articles(args.input, args.headings)
    limits = [int(x) for x in args.limits.split(",")] if args.limits else []
    stats = corpus.corpus_stats(articles, limits)
    payload = dumps(
        {
            "n_articles": stats.n_articles,
            "mean_length": stats.mean_length,
            "sd_length": stats.sd_length,
            "truncation_coverage": {
                str(k): v for k, v in sorted(stats.truncation_coverage.items())
            },
        }
    )
    if args.output:
        atomic_write_text(args.output, payload + "\n")
    else:
        print(payload)
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    articles = _load_articles(args.input, args.headings)
    parts = tuple(float(x) for x in args.ratios.split(","))
    if len(parts) != 3:
        raise KeysumError(f"expected three ratios, got {args.ratios!r}")
    split = corpus.split_corpus(articles, (parts[0], parts[1], parts[2]), args.seed)
    atomic_write_text(
        args.output,
        dumps(
            {
                "seed": split.seed,
                "train": split.train,
                "validation": split.validation,
                "test": split.test,
            }
        )
        + "\n",
    )
    return 0


def _subset_ids(split_path: str, subset: str) -> set[str]:
    with open(split_path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if subset not in ("train", "validation", "test"):
        raise KeysumError(f"unknown subset {subset!r}")
    return set(data[subset])


def cmd_build(args: argparse.Namespace) -> int:
    articles = _load_articles(args.input, args.headings)
    if args.split:
        wanted = _subset_ids(args.split, args.subset)
        articles = [a for a in articles if a.id in wanted]
    articles.sort(key=lambda a: a.id)

    mode = promptgen.Mode(args.mode)
    technique = keyterms.Technique(args.technique)
    if args.embedder == "hash":
        embedder: keyterms.EmbeddingProvider = keyterms.HashEmbedder()
    elif args.embedder.startswith("file:"):
        embedder = keyterms.FileEmbedder.from_path(args.embedder[len("file:") :])
    else:
        raise KeysumError(
            f"--embedder must be 'hash' or 'file:<path>', got {args.embedder!r}"
        )
    lo, hi = (int(x) for x in args.ngram_range.split(","))
    settings = promptgen.ExtractorSettings(
        n_terms=args.terms,
        stopwords=textproc.load_stopwords(args.stopwords) if args.stopwords else None,
        embedder=embedder,
        ngram_range=(lo, hi),
    )

    def _one(article: corpus.Article) -> list[promptgen.PromptedExample]:
        return promptgen.build_examples(
            article,
            mode,
            technique,
            input_limit=args.input_limit,
            target_limit=args.target_limit,
            settings=settings,
        )

    batches = _map_ordered(_one, articles, args.threads)
    examples = [ex for batch in batches for ex in batch]
    promptgen.write_dataset(args.output, examples)
    print(f"wrote {len(examples)} examples from {len(articles)} articles")
    return 0


def cmd_confuse(args: argparse.Namespace) -> int:
    examples = promptgen.read_dataset(args.input)
    confused = promptgen.confuse(examples, args.seed)
    promptgen.write_dataset(args.output, confused)
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    predictions = _parse_id_text_file(args.predictions)
    try:
        references = _parse_id_text_file(args.references)
    except FileNotFoundError as exc:
        raise MissingReference(f"references file {exc.filename}") from exc
    metrics = [m for m in args.metrics.split(",") if m]
    results = rouge.score_corpus(predictions, references, metrics, threads=args.threads)
    write_jsonl(
        args.output,
        (
            {
                "metric": cs.metric,
                "mean_f": cs.mean_f,
                "per_example": [
                    {"id": ident, "precision": s.precision, "recall": s.recall, "f": s.f}
                    for ident, s in cs.per_example
                ],
            }
            for cs in results
        ),
    )
    if args.table_out:
        if not (args.model_tag and args.table_mode and args.table_technique):
            raise KeysumError(
                "--table-out needs --model-tag, --table-mode, and --table-technique"
            )
        table = report.ResultsTable()
        for cs in results:
            key = report.CellKey(
                model_tag=args.model_tag,
                mode=promptgen.Mode(args.table_mode),
                technique=args.table_technique,
                metric=cs.metric,
            )
            table.set(key, cs.mean_f)
        report.write_table(args.table_out, table)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    if args.kind == "improvements":
        main_table = report.read_table(args.main)
        result = report.improvement_table(main_table, args.baseline)
    else:
        confused = report.read_table(args.confused)
        main_table = report.read_table(args.main)
        result = report.confusion_comparison(confused, main_table)
    payload = report.emit(result, args.format)
    if args.output:
        atomic_write_bytes(args.output, payload)
    else:
        sys.stdout.write(payload.decode("utf-8"))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_SUBPARSERS: dict[str, argparse.ArgumentParser] = {}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="keysum",
        description="Key-term prompted summarization datasets and evaluation.",
    )
    parser.add_argument("--version", action="version", version=f"keysum {__version__}")
    parser.add_argument("--config", default=None, help="JSON file of flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)
    _SUBPARSERS.clear()

    def _new(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _SUBPARSERS[name] = p
        return p

    p = _new("ingest", "parse, validate, and filter a raw corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--rejects", required=True)
    p.add_argument("--sd-multiplier", type=float, default=2.0)
    p.add_argument("--headings", default=None, help="heading synonym table (TSV)")
    p.set_defaults(func=cmd_ingest)

    p = _new("stats", "corpus length statistics and truncation coverage")
    p.add_argument("--input", required=True)
    p.add_argument("--limits", default="", help="comma-separated token limits")
    p.add_argument("--output", default=None)
    p.add_argument("--headings", default=None)
    p.set_defaults(func=cmd_stats)

    p = _new("split", "deterministic train/validation/test partition")
    p.add_argument("--input", required=True)
    p.add_argument("--ratios", default="0.7,0.15,0.15")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--headings", default=None)
    p.set_defaults(func=cmd_split)

    p = _new("build", "construct a prompted dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--mode", required=True, choices=[m.value for m in promptgen.Mode])
    p.add_argument(
        "--technique", required=True, choices=[t.value for t in keyterms.Technique]
    )
    p.add_argument("--terms", type=int, default=keyterms.DEFAULT_N_TERMS)
    p.add_argument("--input-limit", type=int, default=None)
    p.add_argument("--target-limit", type=int, default=promptgen.TARGET_TOKEN_LIMIT)
    p.add_argument("--embedder", default="hash", help="hash | file:<path>")
    p.add_argument("--ngram-range", default="1,1")
    p.add_argument("--stopwords", default=None)
    p.add_argument("--split", default=None, help="split file from the split command")
    p.add_argument("--subset", default="train")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--headings", default=None)
    p.set_defaults(func=cmd_build)

    p = _new("confuse", "derange prompts across articles")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_confuse)

    p = _new("score", "ROUGE-score predictions against references")
    p.add_argument("--predictions", required=True)
    p.add_argument("--references", required=True)
    p.add_argument("--metrics", default="rouge1,rouge2,rougeLsum")
    p.add_argument("--output", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--table-out", default=None, help="also write table rows here")
    p.add_argument("--model-tag", default=None)
    p.add_argument("--table-mode", default=None, choices=[m.value for m in promptgen.Mode])
    p.add_argument("--table-technique", default=None)
    p.set_defaults(func=cmd_score)

    p = _new("report", "derived result tables")
    p.add_argument("kind", choices=["improvements", "confusion"])
    p.add_argument("--main", required=True, help="table of raw scores")
    p.add_argument("--confused", default=None, help="confusion-run table")
    p.add_argument("--baseline", default="Fine-Tuning")
    p.add_argument("--format", default="csv", choices=["csv", "json", "markdown"])
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_report)

    return parser


def _apply_config(argv: list[str]) -> list[str]:
    """Use a JSON config file as subcommand flag defaults."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise KeysumError("--config requires a path argument")
    path = argv[idx + 1]
    with open(path, "r", encoding="utf-8") as fh:
        defaults = json.load(fh)
    if not isinstance(defaults, dict):
        raise KeysumError("config file must contain a JSON object")
    for sub in _SUBPARSERS.values():
        known = {action.dest for action in sub._actions}
        sub.set_defaults(**{k: v for k, v in defaults.items() if k in known})
    return argv[:idx] + argv[idx + 2 :]


def run_command(argv: list[str] | None = None) -> int:
    """Parse argv and execute one subcommand; returns the exit status."""
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
        args = parser.parse_args(argv)
        if args.command == "report" and args.kind == "confusion" and not args.confused:
            parser.error("report confusion requires --confused")
        return args.func(args)
    except KeysumError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")
    except FileNotFoundError as exc:
        return _fail(f"MissingFile: {exc.filename}")
    except (ValueError, KeyError) as exc:
        return _fail(f"{type(exc).__name__}: {exc}")


def main() -> None:
    sys.exit(run_command())
