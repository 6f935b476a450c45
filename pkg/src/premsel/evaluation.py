"""Ranking quality measures and the evaluation harness.

For a theorem whose proof used the premise set P (n = |P|) and a predicted
ranking R, ``cover`` is the fraction of P found in the first n ranked
premises and ``cover_plus`` widens the window to n + 10, reflecting that a
user will happily scan a handful of extra suggestions.  Both are in
[0, 1] and cover <= cover_plus always.

Evaluation walks a test corpus, timing only the production of each ranking.
It runs examples sequentially (the recorded parallelism degree is 1); the
model is treated as read-only.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from statistics import mean

from .dataset import Corpus
from .features import FeatureConfig
from .knn import Ranking

COVER_PLUS_SLACK = 10


class EvalError(ValueError):
    pass


def cover(premises, ranking: Ranking) -> float:
    """|P ∩ R[:n]| / n with n = |P|."""
    n = len(premises)
    if n == 0:
        raise EvalError("cover is undefined for an empty premise set")
    top = {name for name, _ in ranking[:n]}
    return len(set(premises) & top) / n


def cover_plus(premises, ranking: Ranking) -> float:
    """|P ∩ R[:n+10]| / n with n = |P|."""
    n = len(premises)
    if n == 0:
        raise EvalError("cover_plus is undefined for an empty premise set")
    top = {name for name, _ in ranking[: n + COVER_PLUS_SLACK]}
    return len(set(premises) & top) / n


@dataclass(frozen=True)
class ExampleResult:
    id: str
    n: int
    cover: float
    cover_plus: float
    prediction_seconds: float


@dataclass(frozen=True)
class EvalResult:
    per_example: tuple[ExampleResult, ...]
    mean_cover: float
    mean_cover_plus: float
    mean_prediction_seconds: float
    example_count: int
    parallelism: int = 1


def evaluate(model, test: Corpus, cfg: FeatureConfig) -> EvalResult:
    """Score ``model`` on every test example.

    ``model`` must expose ``predict(features) -> Ranking`` and a
    ``feature_config``; a configuration mismatch is an error rather than a
    silently wrong number.
    """
    if not test.examples:
        raise EvalError("empty test corpus")
    model_cfg = getattr(model, "feature_config", None)
    if model_cfg is not None and model_cfg != cfg:
        raise EvalError(
            f"model was trained with features {model_cfg.spec()!r} "
            f"but the evaluation requested {cfg.spec()!r}"
        )
    rows = []
    for ex in test.examples:
        start = time.perf_counter()
        ranking = model.predict(ex.features)
        elapsed = time.perf_counter() - start
        rows.append(
            ExampleResult(
                id=ex.id,
                n=len(ex.premises),
                cover=cover(ex.premises, ranking),
                cover_plus=cover_plus(ex.premises, ranking),
                prediction_seconds=elapsed,
            )
        )
    return EvalResult(
        per_example=tuple(rows),
        mean_cover=mean(r.cover for r in rows),
        mean_cover_plus=mean(r.cover_plus for r in rows),
        mean_prediction_seconds=mean(r.prediction_seconds for r in rows),
        example_count=len(rows),
    )


def eval_records(result: EvalResult) -> list[dict]:
    """One record per example plus a closing aggregate record."""
    records: list[dict] = [
        {
            "id": r.id,
            "n": r.n,
            "cover": r.cover,
            "cover_plus": r.cover_plus,
            "prediction_seconds": r.prediction_seconds,
        }
        for r in result.per_example
    ]
    records.append(
        {
            "aggregate": True,
            "mean_cover": result.mean_cover,
            "mean_cover_plus": result.mean_cover_plus,
            "mean_prediction_seconds": result.mean_prediction_seconds,
            "example_count": result.example_count,
            "parallelism": result.parallelism,
        }
    )
    return records


@dataclass(frozen=True)
class Report:
    text: str
    records: list[dict]


def report(results: list[EvalResult], labels: list[tuple[str, str]]) -> Report:
    """Lay out results as a grid: rows in first-seen order, columns sorted.

    Each cell shows ``cover (cover_plus)``; the best cover in a row (ties
    to the lexicographically first column) is marked with ``*``.
    """
    if not results:
        raise EvalError("nothing to report")
    if len(results) != len(labels):
        raise EvalError("results and labels must be parallel")

    rows: list[str] = []
    for row, _ in labels:
        if row not in rows:
            rows.append(row)
    cols = sorted({col for _, col in labels})
    cells: dict[tuple[str, str], EvalResult] = {}
    for (row, col), res in zip(labels, results):
        if (row, col) in cells:
            raise EvalError(f"duplicate cell ({row!r}, {col!r})")
        cells[(row, col)] = res

    best: dict[str, str] = {}
    for row in rows:
        present = [c for c in cols if (row, c) in cells]
        if present:
            # Highest cover wins; ties go to the lexicographically first column.
            best[row] = min(present, key=lambda c: (-cells[(row, c)].mean_cover, c))

    records = []
    table: list[list[str]] = [[""] + cols]
    for row in rows:
        line = [row]
        for col in cols:
            res = cells.get((row, col))
            if res is None:
                line.append("-")
                continue
            mark = "*" if best.get(row) == col else ""
            line.append(f"{mark}{res.mean_cover:.2f} ({res.mean_cover_plus:.2f})")
            records.append(
                {
                    "row": row,
                    "column": col,
                    "cover": res.mean_cover,
                    "cover_plus": res.mean_cover_plus,
                    "mean_prediction_seconds": res.mean_prediction_seconds,
                    "example_count": res.example_count,
                    "best_in_row": best.get(row) == col,
                }
            )
        table.append(line)

    widths = [max(len(r[i]) for r in table) for i in range(len(table[0]))]
    text = "\n".join(
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(line)).rstrip()
        for line in table
    )
    return Report(text=text, records=records)
