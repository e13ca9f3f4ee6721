"""summrunner CLI: train / predict on toolkit dataset files."""

from __future__ import annotations

import argparse
import sys

from .errors import RunnerError
from .runner import RunManifest, predict, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="summrunner",
        description="Toy seq2seq fine-tuning and inference for prompted datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fine-tune per a run manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--output-dir", required=True)

    p = sub.add_parser("predict", help="generate predictions from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--output", required=True)

    return parser


def run_command(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            out = train(RunManifest.from_path(args.manifest), args.output_dir)
            print(f"checkpoint written to {out}")
        else:
            n = predict(args.checkpoint, args.dataset, args.output)
            print(f"wrote {n} predictions to {args.output}")
        return 0
    except RunnerError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"MissingFile: {exc.filename}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command())
