"""Result tables: relative improvements, confusion deltas, rendering.

A table maps (model_tag, mode, technique, metric) cells to values. The
technique axis is free text so baseline rows can live alongside extraction
techniques; the labels "Fine-Tuning" (trained, unprompted) and "Original"
(untrained) are reserved for baselines and never treated as techniques.

Improvement is the relative gain over the baseline value:
(v_technique - v_baseline) / v_baseline. Confusion deltas use the same
ratio with the uncorrupted run as the baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable, Iterator

from ._jsonio import dumps, read_jsonl, write_jsonl
from .errors import (
    BadFormat,
    MalformedRecord,
    MissingBaseline,
    MissingCell,
    ZeroBaseline,
)
from .promptgen import Mode

#: Baseline row labels (not techniques; excluded from ratio numerators).
RESERVED_BASELINES = ("Fine-Tuning", "Original")

#: Metric column labels accepted in table files.
METRIC_NAMES = ("rouge1", "rouge2", "rougeLsum")


@dataclass(frozen=True)
class CellKey:
    model_tag: str
    mode: Mode
    technique: str
    metric: str

    @property
    def sort_key(self) -> tuple[str, str, str, str]:
        return (self.model_tag, self.mode.value, self.technique, self.metric)


@dataclass
class ResultsTable:
    cells: dict[CellKey, float] = field(default_factory=dict)

    def set(self, key: CellKey, value: float) -> None:
        if not math.isfinite(value):
            raise ValueError(f"cell {key} value must be finite, got {value!r}")
        self.cells[key] = value

    def technique_cells(self) -> Iterator[tuple[CellKey, float]]:
        """Cells whose technique label is not a reserved baseline."""
        for key, value in self.cells.items():
            if key.technique not in RESERVED_BASELINES:
                yield key, value

    def sorted_items(self) -> list[tuple[CellKey, float]]:
        return sorted(self.cells.items(), key=lambda kv: kv[0].sort_key)


def improvement(v_technique: float, v_baseline: float) -> float:
    """Relative gain of a technique value over a baseline value."""
    if v_baseline == 0:
        raise ZeroBaseline("improvement is undefined for a zero baseline")
    return (v_technique - v_baseline) / v_baseline


def improvement_table(main: ResultsTable, baseline_label: str = "Fine-Tuning") -> ResultsTable:
    """One ratio cell per technique cell, against the named baseline row."""
    out = ResultsTable()
    for key, value in main.technique_cells():
        baseline_key = replace(key, technique=baseline_label)
        if baseline_key not in main.cells:
            raise MissingBaseline(baseline_key)
        out.set(key, improvement(value, main.cells[baseline_key]))
    return out


def confusion_comparison(confused: ResultsTable, main: ResultsTable) -> ResultsTable:
    """Relative change of each confused technique cell against the main run.

    The technique cells of both tables must cover the same keys.
    """
    confused_keys = {key for key, _ in confused.technique_cells()}
    main_keys = {key for key, _ in main.technique_cells()}
    for key in sorted(confused_keys ^ main_keys, key=lambda k: k.sort_key):
        raise MissingCell(key)
    out = ResultsTable()
    for key in confused_keys:
        base = main.cells[key]
        if base == 0:
            raise ZeroBaseline(f"main value for {key} is zero")
        out.set(key, (confused.cells[key] - base) / base)
    return out


# ---------------------------------------------------------------------------
# Rendering and interchange
# ---------------------------------------------------------------------------


def round3(value: float) -> float:
    """Round to three decimals, ties away from zero (table precision)."""
    return float(Decimal(repr(value)).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


def _rendered_rows(table: ResultsTable) -> list[tuple[str, str, str, str, float]]:
    return [
        (key.model_tag, key.mode.value, key.technique, key.metric, round3(value))
        for key, value in table.sorted_items()
    ]


def emit(table: ResultsTable, fmt: str = "csv") -> bytes:
    """Render a table deterministically; values shown at 3 decimals.

    Formats: csv (fixed column order), json (line-delimited records),
    markdown (aligned pipe table). Cell ordering is lexicographic by
    (model_tag, mode, technique, metric) in every format.
    """
    rows = _rendered_rows(table)
    if fmt == "csv":
        import csv
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["model_tag", "mode", "technique", "metric", "value"])
        for m, mo, t, me, v in rows:
            writer.writerow([m, mo, t, me, f"{v:.3f}"])
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        lines = [
            dumps({"model_tag": m, "mode": mo, "technique": t, "metric": me, "value": v})
            for m, mo, t, me, v in rows
        ]
        return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""
    if fmt == "markdown":
        lines = [
            "| model_tag | mode | technique | metric | value |",
            "| --- | --- | --- | --- | --- |",
        ]
        lines += [f"| {m} | {mo} | {t} | {me} | {v:.3f} |" for m, mo, t, me, v in rows]
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise BadFormat(f"unknown format {fmt!r}; choose csv, json, or markdown")


def table_from_records(records: Iterable[tuple[int, dict]]) -> ResultsTable:
    table = ResultsTable()
    for lineno, rec in records:
        try:
            key = CellKey(
                model_tag=rec["model_tag"],
                mode=Mode(rec["mode"]),
                technique=rec["technique"],
                metric=rec["metric"],
            )
            value = float(rec["value"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedRecord(lineno, f"bad table record: {exc}") from exc
        if key.metric not in METRIC_NAMES:
            raise MalformedRecord(lineno, f"unknown metric {key.metric!r}")
        if key in table.cells:
            raise MalformedRecord(lineno, f"duplicate cell {key}")
        table.set(key, value)
    return table


def read_table(path: str | Path) -> ResultsTable:
    return table_from_records(read_jsonl(path))


def write_table(path: str | Path, table: ResultsTable) -> None:
    """Interchange output: full-precision values, deterministic order."""
    write_jsonl(
        path,
        (
            {
                "model_tag": key.model_tag,
                "mode": key.mode.value,
                "technique": key.technique,
                "metric": key.metric,
                "value": value,
            }
            for key, value in table.sorted_items()
        ),
    )
