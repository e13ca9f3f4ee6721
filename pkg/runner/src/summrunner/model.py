"""A deliberately small numpy sequence-to-sequence model.

The encoder is the mean of the input token embeddings; the decoder is a
one-layer recurrent-free language model: given the previous token and the
encoder context, h = tanh(E[prev] + W ctx) and logits = h E^T + b (tied
embeddings). Trained per example with plain SGD under teacher forcing.

That is nowhere near a research summarizer and is not meant to be: the
runner's contract is the training/inference protocol and the file formats,
exercised at toy scale with bit-level determinism (seeded init, fixed
iteration order, greedy decoding).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import BOS, EOS, SPECIALS, UNK, tokenize
from .errors import ModelLoadError


@dataclass
class ModelConfig:
    dim: int = 32
    learning_rate: float = 0.05
    max_new_tokens: int = 48


class TinySeq2Seq:
    name = "tiny-seq2seq"

    def __init__(self, vocab: list[str], config: ModelConfig, seed: int):
        for special in SPECIALS:
            if special not in vocab:
                raise ValueError(f"vocabulary lacks the {special} token")
        self.vocab = list(vocab)
        self.index = {tok: i for i, tok in enumerate(self.vocab)}
        self.config = config
        rng = np.random.default_rng(seed)
        v, d = len(self.vocab), config.dim
        self.emb = rng.normal(0.0, 0.1, size=(v, d))
        self.mix = rng.normal(0.0, 0.1, size=(d, d))
        self.bias = np.zeros(v)

    # -- plumbing ----------------------------------------------------------

    def _ids(self, text: str) -> list[int]:
        unk = self.index[UNK]
        return [self.index.get(tok, unk) for tok in tokenize(text)]

    def _context(self, source: str) -> np.ndarray:
        ids = self._ids(source)
        if not ids:
            return np.zeros(self.config.dim)
        return self.emb[ids].mean(axis=0)

    def _step_logits(self, prev_id: int, ctx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        hidden = np.tanh(self.emb[prev_id] + self.mix @ ctx)
        return hidden, hidden @ self.emb.T + self.bias

    # -- training ----------------------------------------------------------

    def train_example(self, source: str, target: str) -> float:
        """One SGD step of teacher-forced cross-entropy; returns mean loss."""
        ctx_ids = self._ids(source)
        ctx = self.emb[ctx_ids].mean(axis=0) if ctx_ids else np.zeros(self.config.dim)
        sequence = [self.index[BOS]] + self._ids(target) + [self.index[EOS]]
        lr = self.config.learning_rate

        d_emb = np.zeros_like(self.emb)
        d_mix = np.zeros_like(self.mix)
        d_bias = np.zeros_like(self.bias)
        d_ctx = np.zeros(self.config.dim)
        total = 0.0
        steps = len(sequence) - 1
        for t in range(steps):
            prev_id, gold = sequence[t], sequence[t + 1]
            hidden, logits = self._step_logits(prev_id, ctx)
            logits = logits - logits.max()
            probs = np.exp(logits)
            probs /= probs.sum()
            total += -float(np.log(probs[gold] + 1e-12))

            d_logits = probs.copy()
            d_logits[gold] -= 1.0
            d_logits /= steps
            d_bias += d_logits
            d_emb += np.outer(d_logits, hidden)
            d_hidden = d_logits @ self.emb
            d_pre = d_hidden * (1.0 - hidden * hidden)
            d_emb[prev_id] += d_pre
            d_mix += np.outer(d_pre, ctx)
            d_ctx += self.mix.T @ d_pre

        if ctx_ids:
            share = d_ctx / len(ctx_ids)
            for i in ctx_ids:
                d_emb[i] += share
        self.emb -= lr * d_emb
        self.mix -= lr * d_mix
        self.bias -= lr * d_bias
        return total / steps

    # -- inference ---------------------------------------------------------

    def generate(self, source: str) -> str:
        """Greedy decode; deterministic (argmax breaks ties on lowest id)."""
        ctx = self._context(source)
        prev = self.index[BOS]
        eos = self.index[EOS]
        out: list[str] = []
        for _ in range(self.config.max_new_tokens):
            _, logits = self._step_logits(prev, ctx)
            prev = int(np.argmax(logits))
            if prev == eos:
                break
            token = self.vocab[prev]
            if token not in SPECIALS:
                out.append(token)
        return " ".join(out)

    # -- persistence -------------------------------------------------------

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        np.savez(directory / "weights.npz", emb=self.emb, mix=self.mix, bias=self.bias)
        meta = {
            "model": self.name,
            "vocab": self.vocab,
            "dim": self.config.dim,
            "learning_rate": self.config.learning_rate,
            "max_new_tokens": self.config.max_new_tokens,
        }
        (directory / "meta.json").write_text(json.dumps(meta))

    @classmethod
    def load(cls, directory: str | Path) -> "TinySeq2Seq":
        directory = Path(directory)
        try:
            meta = json.loads((directory / "meta.json").read_text())
            weights = np.load(directory / "weights.npz")
        except (OSError, json.JSONDecodeError) as exc:
            raise ModelLoadError(f"cannot read checkpoint at {directory}: {exc}") from exc
        if meta.get("model") != cls.name:
            raise ModelLoadError(f"checkpoint is for model {meta.get('model')!r}")
        config = ModelConfig(
            dim=meta["dim"],
            learning_rate=meta["learning_rate"],
            max_new_tokens=meta["max_new_tokens"],
        )
        model = cls(meta["vocab"], config, seed=0)
        model.emb = weights["emb"]
        model.mix = weights["mix"]
        model.bias = weights["bias"]
        return model


#: Model registry; manifest "model" values must appear here.
MODELS = {TinySeq2Seq.name: TinySeq2Seq}
