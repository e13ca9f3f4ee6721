"""Training and inference against toolkit dataset files.

Prompt placement is a manifest option:

- ``decoder-prefix``: the decoder is teacher-forced on the prompt
  concatenated with the target summary; the encoder sees the input text.
  At inference the generated text is cut after the first [SUMMARY] token
  so only the summary part is emitted.
- ``encoder-prefix``: the prompt is prepended to the encoder input and the
  decoder is trained on the summary alone.

Validation ROUGE-1 (mean F) is monitored after every epoch by calling the
toolkit's own ``score`` command on a temporary predictions file; training
stops once the score has failed to improve for ``patience`` consecutive
evaluations. The runner talks to the toolkit exclusively through files and
its CLI.
"""

from __future__ import annotations

import json
import subprocess
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .data import (
    DatasetExample,
    build_vocabulary,
    read_dataset,
    write_predictions,
    write_references,
)
from .errors import ModelLoadError, SchemaError
from .model import MODELS, ModelConfig, TinySeq2Seq

PLACEMENTS = ("decoder-prefix", "encoder-prefix")
SUMMARY_TOKEN = "[SUMMARY]"


@dataclass
class RunManifest:
    model: str
    train_dataset: str
    validation_dataset: str
    prompt_placement: str = "decoder-prefix"
    max_epochs: int = 1
    patience: int = 1
    seed: int = 0
    dim: int = 32
    learning_rate: float = 0.05
    max_new_tokens: int = 48

    @classmethod
    def from_path(cls, path: str | Path) -> "RunManifest":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SchemaError(f"cannot read manifest {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise SchemaError("manifest must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise SchemaError(f"unknown manifest fields: {sorted(unknown)}")
        for field in ("model", "train_dataset", "validation_dataset"):
            if not isinstance(raw.get(field), str):
                raise SchemaError(f"manifest needs string field {field!r}")
        manifest = cls(**raw)
        if manifest.prompt_placement not in PLACEMENTS:
            raise SchemaError(
                f"prompt_placement must be one of {PLACEMENTS}, "
                f"got {manifest.prompt_placement!r}"
            )
        if manifest.max_epochs < 0 or manifest.patience < 0:
            raise SchemaError("max_epochs and patience must be non-negative")
        return manifest


def _pair(example: DatasetExample, placement: str) -> tuple[str, str]:
    """(encoder source, decoder target) under the chosen placement."""
    if placement == "decoder-prefix":
        return example.input_text, f"{example.prompt} {example.target}"
    return f"{example.prompt} {example.input_text}", example.target


def _emitted_text(generated: str, placement: str) -> str:
    """Strip the generated prompt echo for decoder-prefix runs."""
    if placement == "decoder-prefix":
        tokens = generated.split()
        if SUMMARY_TOKEN in tokens:
            tokens = tokens[tokens.index(SUMMARY_TOKEN) + 1 :]
        return " ".join(tokens)
    return generated


def _predict_rows(model: TinySeq2Seq, examples: list[DatasetExample], placement: str):
    rows = []
    for ex in examples:
        source, _ = _pair(ex, placement)
        rows.append((ex.example_id, _emitted_text(model.generate(source), placement)))
    return rows


def _validation_rouge1(
    model: TinySeq2Seq, examples: list[DatasetExample], placement: str, workdir: Path
) -> float:
    """Mean ROUGE-1 F via the toolkit's score command (files + CLI only)."""
    predictions = workdir / "val_predictions.jsonl"
    references = workdir / "val_references.jsonl"
    scores = workdir / "val_scores.jsonl"
    write_predictions(predictions, _predict_rows(model, examples, placement))
    write_references(references, examples)
    proc = subprocess.run(
        [
            sys.executable, "-m", "keysum", "score",
            "--predictions", str(predictions),
            "--references", str(references),
            "--metrics", "rouge1",
            "--output", str(scores),
        ],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(f"validation scoring failed: {proc.stderr.strip()}")
    record = json.loads(scores.read_text().splitlines()[0])
    return float(record["mean_f"])


def train(manifest: RunManifest, output_dir: str | Path) -> Path:
    """Fine-tune per the manifest; writes checkpoint + log.jsonl.

    Returns the checkpoint directory. With max_epochs=0 the seed-initialized
    weights are saved untouched, which is the untrained-baseline run.
    """
    if manifest.model not in MODELS:
        raise ModelLoadError(
            f"unknown model {manifest.model!r}; available: {sorted(MODELS)}"
        )
    train_examples = read_dataset(manifest.train_dataset)
    val_examples = read_dataset(manifest.validation_dataset)

    config = ModelConfig(
        dim=manifest.dim,
        learning_rate=manifest.learning_rate,
        max_new_tokens=manifest.max_new_tokens,
    )
    model_cls = MODELS[manifest.model]
    model = model_cls(build_vocabulary(train_examples), config, manifest.seed)

    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    log_path = output_dir / "log.jsonl"
    best_score: float | None = None
    bad_evaluations = 0
    log_lines: list[str] = []

    with tempfile.TemporaryDirectory(prefix="summrunner-val-") as tmp:
        for epoch in range(1, manifest.max_epochs + 1):
            losses = [
                model.train_example(*_pair(ex, manifest.prompt_placement))
                for ex in train_examples
            ]
            val_score = _validation_rouge1(
                model, val_examples, manifest.prompt_placement, Path(tmp)
            )
            improved = best_score is None or val_score > best_score
            if improved:
                best_score = val_score
                bad_evaluations = 0
            else:
                bad_evaluations += 1
            stop = bad_evaluations >= manifest.patience
            log_lines.append(
                json.dumps(
                    {
                        "epoch": epoch,
                        "train_loss": sum(losses) / len(losses),
                        "val_rouge1": val_score,
                        "improved": improved,
                        "stopped_early": stop and epoch < manifest.max_epochs,
                    }
                )
            )
            if stop:
                break

    model.save(output_dir)
    (output_dir / "run.json").write_text(
        json.dumps(
            {
                "model": manifest.model,
                "prompt_placement": manifest.prompt_placement,
                "seed": manifest.seed,
                "epochs_run": len(log_lines),
            }
        )
    )
    log_path.write_text("".join(line + "\n" for line in log_lines))
    return output_dir


def predict(checkpoint_dir: str | Path, dataset_path: str | Path, output_path: str | Path) -> int:
    """Generate predictions for a dataset; returns the number of rows."""
    checkpoint_dir = Path(checkpoint_dir)
    try:
        run_info = json.loads((checkpoint_dir / "run.json").read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelLoadError(f"cannot read run metadata in {checkpoint_dir}: {exc}") from exc
    model = TinySeq2Seq.load(checkpoint_dir)
    examples = read_dataset(dataset_path)
    rows = _predict_rows(model, examples, run_info["prompt_placement"])
    write_predictions(output_path, rows)
    return len(rows)
