from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from keysum import cli
from keysum._jsonio import read_jsonl

DATA = Path(__file__).parent / "data"
CORPUS = DATA / "synthetic_corpus.jsonl"


def run_cli(*argv: str):
    return subprocess.run(
        [sys.executable, "-m", "keysum", *argv], capture_output=True, text=True
    )


def jsonl(path: Path) -> list[dict]:
    return [rec for _, rec in read_jsonl(path)]


class TestProcessLevel:
    def test_version(self):
        proc = run_cli("--version")
        assert proc.returncode == 0
        assert proc.stdout.strip().startswith("keysum ")

    def test_unknown_subcommand_is_usage_error(self):
        proc = run_cli("frobnicate")
        assert proc.returncode == 2
        assert "usage" in proc.stderr.lower()

    def test_score_missing_reference_file(self, tmp_path):
        predictions = tmp_path / "pred.jsonl"
        predictions.write_text('{"id": "x", "text": "a b"}\n')
        proc = run_cli(
            "score",
            "--predictions", str(predictions),
            "--references", str(tmp_path / "nope.jsonl"),
            "--output", str(tmp_path / "scores.jsonl"),
        )
        assert proc.returncode == 1
        assert proc.stderr.startswith("MissingReference")

    def test_malformed_input_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("{not json\n")
        proc = run_cli(
            "ingest",
            "--input", str(bad),
            "--output", str(tmp_path / "out.jsonl"),
            "--rejects", str(tmp_path / "rej.jsonl"),
        )
        assert proc.returncode == 1
        assert proc.stderr.startswith("MalformedRecord")


class TestIngest:
    def test_happy_path(self, tmp_path):
        out = tmp_path / "corpus.jsonl"
        rejects = tmp_path / "rejects.jsonl"
        rc = cli.run_command(
            ["ingest", "--input", str(CORPUS), "--output", str(out),
             "--rejects", str(rejects)]
        )
        assert rc == 0
        kept = jsonl(out)
        assert len(kept) == 17
        assert all("section_kinds" in rec for rec in kept)
        reasons = {rec["id"]: rec["reason"] for rec in jsonl(rejects)}
        assert reasons == {
            "art017": "MissingKeywords",
            "art018": "IncompleteAbstract",
            "art019": "LengthOutlier",
        }
        assert not list(tmp_path.glob("*.tmp"))

    def test_reingest_own_output(self, tmp_path):
        out = tmp_path / "corpus.jsonl"
        cli.run_command(
            ["ingest", "--input", str(CORPUS), "--output", str(out),
             "--rejects", str(tmp_path / "r.jsonl")]
        )
        rc = cli.run_command(
            ["stats", "--input", str(out), "--limits", "512",
             "--output", str(tmp_path / "stats.json")]
        )
        assert rc == 0
        stats = json.loads((tmp_path / "stats.json").read_text())
        assert stats["n_articles"] == 17
        assert stats["truncation_coverage"]["512"] == 1.0


class TestSplitAndBuild:
    @pytest.fixture()
    def ingested(self, tmp_path) -> Path:
        out = tmp_path / "corpus.jsonl"
        cli.run_command(
            ["ingest", "--input", str(CORPUS), "--output", str(out),
             "--rejects", str(tmp_path / "r.jsonl")]
        )
        return out

    def test_split_sizes_and_partition(self, tmp_path, ingested):
        split_path = tmp_path / "split.json"
        rc = cli.run_command(
            ["split", "--input", str(ingested), "--seed", "7",
             "--output", str(split_path)]
        )
        assert rc == 0
        split = json.loads(split_path.read_text())
        assert len(split["train"]) == 11  # floor(17*0.7)
        assert len(split["validation"]) == 2  # floor(17*0.15)
        assert len(split["test"]) == 4
        everything = split["train"] + split["validation"] + split["test"]
        assert len(set(everything)) == 17

    @pytest.mark.parametrize("technique", ["keywords", "mesh", "tf", "tfidf", "keybert"])
    def test_build_each_technique(self, tmp_path, ingested, technique):
        out = tmp_path / f"{technique}.jsonl"
        rc = cli.run_command(
            ["build", "--input", str(ingested), "--output", str(out),
             "--mode", "s-wa", "--technique", technique, "--terms", "6"]
        )
        assert rc == 0
        records = jsonl(out)
        assert len(records) == 17 * 4
        assert all(rec["mode"] == "s-wa" for rec in records)
        assert all(rec["prompt"].startswith("[") for rec in records)

    def test_build_intro_discussion_mode(self, tmp_path, ingested):
        out = tmp_path / "id.jsonl"
        rc = cli.run_command(
            ["build", "--input", str(ingested), "--output", str(out),
             "--mode", "id", "--technique", "tf"]
        )
        assert rc == 0
        records = jsonl(out)
        assert len(records) == 17
        assert all("section" not in rec for rec in records)

    def test_build_respects_split_subset(self, tmp_path, ingested):
        split_path = tmp_path / "split.json"
        cli.run_command(
            ["split", "--input", str(ingested), "--seed", "7",
             "--output", str(split_path)]
        )
        out = tmp_path / "train.jsonl"
        cli.run_command(
            ["build", "--input", str(ingested), "--output", str(out),
             "--mode", "s-na", "--technique", "keywords",
             "--split", str(split_path), "--subset", "train"]
        )
        split = json.loads(split_path.read_text())
        ids = {rec["article_id"] for rec in jsonl(out)}
        assert ids == set(split["train"])

    def test_confuse_and_score_round_trip(self, tmp_path, ingested):
        dataset = tmp_path / "dataset.jsonl"
        cli.run_command(
            ["build", "--input", str(ingested), "--output", str(dataset),
             "--mode", "s-wa", "--technique", "tfidf"]
        )
        confused = tmp_path / "confused.jsonl"
        rc = cli.run_command(
            ["confuse", "--input", str(dataset), "--output", str(confused),
             "--seed", "13"]
        )
        assert rc == 0
        originals = {(r["article_id"], r["section"]): r["prompt"] for r in jsonl(dataset)}
        for rec in jsonl(confused):
            assert rec["confused_from"] != rec["article_id"]
            assert rec["prompt"] == originals[(rec["confused_from"], rec["section"])]

        predictions = tmp_path / "pred.jsonl"
        references = tmp_path / "refs.jsonl"
        with open(predictions, "w") as p, open(references, "w") as r:
            for rec in jsonl(dataset):
                ident = f"{rec['article_id']}:{rec['section']}"
                p.write(json.dumps({"id": ident, "text": rec["prompt"]}) + "\n")
                r.write(json.dumps({"id": ident, "text": rec["target"]}) + "\n")
        scores_path = tmp_path / "scores.jsonl"
        rc = cli.run_command(
            ["score", "--predictions", str(predictions), "--references",
             str(references), "--output", str(scores_path),
             "--table-out", str(tmp_path / "table.jsonl"),
             "--model-tag", "toy", "--table-mode", "s-wa",
             "--table-technique", "TF-IDF"]
        )
        assert rc == 0
        scores = jsonl(scores_path)
        assert [s["metric"] for s in scores] == ["rouge1", "rouge2", "rougeLsum"]
        assert len(scores[0]["per_example"]) == 17 * 4
        table = jsonl(tmp_path / "table.jsonl")
        assert {row["metric"] for row in table} == {"rouge1", "rouge2", "rougeLsum"}
        assert all(row["model_tag"] == "toy" for row in table)


class TestReportCommand:
    def test_improvements_from_published_fixture(self, tmp_path):
        out = tmp_path / "improvements.csv"
        rc = cli.run_command(
            ["report", "improvements", "--main",
             str(DATA / "published_scores_main.jsonl"), "--output", str(out)]
        )
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "model_tag,mode,technique,metric,value"
        assert len(lines) == 1 + 225
        assert "LT5-Base-ETC,s-wa,KeyBERT,rouge1,0.241" in lines

    def test_confusion_requires_confused_table(self):
        with pytest.raises(SystemExit) as err:
            cli.run_command(
                ["report", "confusion", "--main",
                 str(DATA / "published_scores_main.jsonl")]
            )
        assert err.value.code == 2

    def test_missing_baseline_is_data_error(self, tmp_path, capsys):
        table = tmp_path / "t.jsonl"
        table.write_text(
            '{"model_tag": "M", "mode": "id", "technique": "TF", "metric": "rouge1", "value": 0.1}\n'
        )
        rc = cli.run_command(["report", "improvements", "--main", str(table)])
        assert rc == 1
        assert capsys.readouterr().err.startswith("MissingBaseline")


class TestConfigFile:
    def test_config_supplies_defaults_flags_override(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"seed": 99, "ratios": "0.5,0.25,0.25"}))
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        corpus_path = tmp_path / "corpus.jsonl"
        cli.run_command(
            ["ingest", "--input", str(CORPUS), "--output", str(corpus_path),
             "--rejects", str(tmp_path / "r.jsonl")]
        )
        cli.run_command(
            ["--config", str(config), "split", "--input", str(corpus_path),
             "--output", str(out_a)]
        )
        split_a = json.loads(out_a.read_text())
        assert split_a["seed"] == 99
        assert len(split_a["train"]) == 8  # floor(17*0.5)
        cli.run_command(
            ["--config", str(config), "split", "--input", str(corpus_path),
             "--seed", "1", "--output", str(out_b)]
        )
        assert json.loads(out_b.read_text())["seed"] == 1
