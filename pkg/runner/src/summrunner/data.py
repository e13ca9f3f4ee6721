"""Dataset and prediction file handling.

The runner consumes the toolkit's documented dataset schema
(one JSON object per line: article_id, mode, section?, technique, prompt,
input_text, target, confused_from?) and emits the predictions schema
({id, text} lines). It deliberately re-implements the readers instead of
importing the toolkit: files are the contract.

Tokenization is whitespace splitting, which keeps the prompt delimiters
([CONTENT], [SUMMARY], section tokens) intact as single vocabulary items.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicatePredictionId, SchemaError

BOS = "<bos>"
EOS = "<eos>"
UNK = "<unk>"
SPECIALS = (BOS, EOS, UNK)


@dataclass(frozen=True)
class DatasetExample:
    example_id: str
    prompt: str
    input_text: str
    target: str


def tokenize(text: str) -> list[str]:
    return text.split()


def read_dataset(path: str | Path) -> list[DatasetExample]:
    """Parse a dataset file, deriving stable per-example ids.

    The id is the article id, suffixed with ':<section>' for section-mode
    examples so one article's rows stay distinguishable.
    """
    required = ("article_id", "mode", "technique", "prompt", "input_text", "target")
    examples: list[DatasetExample] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(rec, dict):
                raise SchemaError(f"{path}:{lineno}: record is not an object")
            for key in required:
                if not isinstance(rec.get(key), str):
                    raise SchemaError(f"{path}:{lineno}: missing field {key!r}")
            ident = rec["article_id"]
            if "section" in rec:
                ident = f"{ident}:{rec['section']}"
            examples.append(
                DatasetExample(
                    example_id=ident,
                    prompt=rec["prompt"],
                    input_text=rec["input_text"],
                    target=rec["target"],
                )
            )
    if not examples:
        raise SchemaError(f"{path}: dataset contains no examples")
    seen: set[str] = set()
    for ex in examples:
        if ex.example_id in seen:
            raise DuplicatePredictionId(
                f"{path}: example id {ex.example_id!r} occurs more than once"
            )
        seen.add(ex.example_id)
    return examples


def write_predictions(path: str | Path, rows: list[tuple[str, str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ident, text in rows:
            fh.write(json.dumps({"id": ident, "text": text}, ensure_ascii=False) + "\n")


def write_references(path: str | Path, examples: list[DatasetExample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(
                json.dumps({"id": ex.example_id, "text": ex.target}, ensure_ascii=False)
                + "\n"
            )


def build_vocabulary(examples: list[DatasetExample]) -> list[str]:
    """Specials first, then every token of the training data, first-seen order."""
    vocab = list(SPECIALS)
    seen = set(vocab)
    for ex in examples:
        for text in (ex.prompt, ex.input_text, ex.target):
            for token in tokenize(text):
                if token not in seen:
                    seen.add(token)
                    vocab.append(token)
    return vocab
