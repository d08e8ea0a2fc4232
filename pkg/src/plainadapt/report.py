"""Metric sweep over run artifacts and table/figure-shaped outputs.

evaluate_run computes every metric per adaptation (failures are recorded per
metric, never per record); summarize folds records into a per-approach
mean/SD table with extra Abstract and GroundTruth comparator rows;
fk_distribution emits plot-ready histogram data with a grade-8 marker.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .corpus import Corpus
from .errors import PlainAdaptError, ValidationError
from .geval import GevalResult
from .pipelines import ApproachRun
from .readability import fk_grade, smog_index, tokenize_words
from .sari import SariScore, sari
from .semsim import EmbeddingProvider, SemSimScore, semsim
from .stats import mean, sample_sd

# Table column order mirrors the quantitative table layout.
METRIC_COLUMNS = ("fk_grade", "smog", "semsim_f1", "sari", "geval")
METRIC_LABELS = {
    "fk_grade": "FK grade level",
    "smog": "SMOG Index",
    "semsim_f1": "BERTScore",
    "sari": "SARI",
    "geval": "G-Eval",
}
# SARI is computed on [0,1] but conventionally printed on 0-100.
METRIC_SCALE = {"sari": 100.0}

GRADE_TARGET = 8.0


@dataclass
class MetricRecord:
    pmid: str
    approach: str
    model_id: str
    fk_grade: float | None = None
    smog: float | None = None
    smog_valid: bool | None = None
    sari: SariScore | None = None
    semsim: SemSimScore | None = None
    geval: GevalResult | None = None
    errors: dict[str, str] = field(default_factory=dict)

    def metric_value(self, metric: str) -> float | None:
        if metric == "sari":
            return self.sari.overall if self.sari else None
        if metric == "semsim_f1":
            return self.semsim.f1 if self.semsim else None
        if metric == "geval":
            return self.geval.normalized if self.geval else None
        return getattr(self, metric)

    def to_json(self) -> dict:
        return {
            "pmid": self.pmid,
            "approach": self.approach,
            "model_id": self.model_id,
            "fk_grade": self.fk_grade,
            "smog": self.smog,
            "smog_valid": self.smog_valid,
            "sari": (
                {"overall": self.sari.overall,
                 "per_n": {str(n): list(t) for n, t in self.sari.per_n.items()}}
                if self.sari else None
            ),
            "semsim": (
                {"precision": self.semsim.precision, "recall": self.semsim.recall,
                 "f1": self.semsim.f1}
                if self.semsim else None
            ),
            "geval": (
                {"per_criterion": self.geval.per_criterion,
                 "normalized": self.geval.normalized,
                 "degraded": self.geval.degraded,
                 "mode": self.geval.mode}
                if self.geval else None
            ),
            "errors": self.errors,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MetricRecord":
        sari_score = None
        if obj.get("sari"):
            sari_score = SariScore(
                overall=obj["sari"]["overall"],
                per_n={int(n): tuple(t) for n, t in obj["sari"]["per_n"].items()},
            )
        semsim_score = None
        if obj.get("semsim"):
            semsim_score = SemSimScore(**obj["semsim"])
        geval_result = None
        if obj.get("geval"):
            geval_result = GevalResult(
                per_criterion=obj["geval"]["per_criterion"],
                normalized=obj["geval"]["normalized"],
                degraded=obj["geval"].get("degraded", False),
                mode=obj["geval"].get("mode", "parsed"),
            )
        return cls(
            pmid=obj["pmid"],
            approach=obj["approach"],
            model_id=obj["model_id"],
            fk_grade=obj.get("fk_grade"),
            smog=obj.get("smog"),
            smog_valid=obj.get("smog_valid"),
            sari=sari_score,
            semsim=semsim_score,
            geval=geval_result,
            errors=dict(obj.get("errors", {})),
        )


def _tokens(text: str) -> list[str]:
    return [w.lower() for w in tokenize_words(text)]


def evaluate_run(
    run: ApproachRun,
    corpus: Corpus,
    embedder: EmbeddingProvider,
    judge: Callable[[str, str], GevalResult] | None = None,
) -> list[MetricRecord]:
    """One MetricRecord per adaptation; SARI/semsim score against every
    reference adaptation of the pmid."""
    references: dict[str, list[str]] = {}
    sources: dict[str, str] = {}
    for sample in corpus:
        references.setdefault(sample.pmid, []).append(sample.reference_text())
        sources.setdefault(sample.pmid, sample.source.text())
    records = []
    for adaptation in run.adaptations:
        record = MetricRecord(
            pmid=adaptation.pmid, approach=run.approach, model_id=run.model_id
        )
        if adaptation.pmid not in sources:
            record.errors["corpus"] = f"pmid {adaptation.pmid} not in corpus"
            records.append(record)
            continue
        source = sources[adaptation.pmid]
        refs = references[adaptation.pmid]
        try:
            record.fk_grade = fk_grade(adaptation.text)
        except PlainAdaptError as exc:
            record.errors["fk_grade"] = str(exc)
        try:
            record.smog, record.smog_valid = smog_index(adaptation.text)
        except PlainAdaptError as exc:
            record.errors["smog"] = str(exc)
        try:
            record.sari = sari(
                _tokens(source), _tokens(adaptation.text), [_tokens(r) for r in refs]
            )
        except PlainAdaptError as exc:
            record.errors["sari"] = str(exc)
        try:
            record.semsim = semsim(adaptation.text, refs, embedder)
        except PlainAdaptError as exc:
            record.errors["semsim"] = str(exc)
        if judge is not None:
            try:
                record.geval = judge(source, adaptation.text)
            except PlainAdaptError as exc:
                record.errors["geval"] = str(exc)
        records.append(record)
    return records


@dataclass
class ReportTable:
    # row label -> metric -> (mean, sd, n); rows keep insertion order
    rows: dict[str, dict[str, tuple[float, float, int]]]


def summarize(records: Sequence[MetricRecord], corpus: Corpus | None = None) -> ReportTable:
    """Per-approach mean/sample-SD table; with a corpus, adds Abstract and
    GroundTruth FK/SMOG comparator rows."""
    if not records and corpus is None:
        raise ValidationError("nothing to summarize")
    rows: dict[str, dict[str, tuple[float, float, int]]] = {}
    by_approach: dict[str, list[MetricRecord]] = {}
    for r in records:
        by_approach.setdefault(f"{r.model_id}_{r.approach}", []).append(r)
    for label, group in by_approach.items():
        cells = {}
        for metric in METRIC_COLUMNS:
            values = [v for r in group if (v := r.metric_value(metric)) is not None]
            if values:
                cells[metric] = (mean(values), sample_sd(values), len(values))
        rows[label] = cells
    if corpus is not None:
        sources: dict[str, str] = {}
        for sample in corpus:
            sources.setdefault(sample.pmid, sample.source.text())
        rows["Abstract"] = _readability_cells(list(sources.values()))
        rows["GroundTruth"] = _readability_cells([s.reference_text() for s in corpus])
    return ReportTable(rows=rows)


def _readability_cells(texts: list[str]) -> dict[str, tuple[float, float, int]]:
    fks, smogs = [], []
    for text in texts:
        try:
            fks.append(fk_grade(text))
            smogs.append(smog_index(text)[0])
        except PlainAdaptError:
            continue
    cells = {}
    if fks:
        cells["fk_grade"] = (mean(fks), sample_sd(fks), len(fks))
        cells["smog"] = (mean(smogs), sample_sd(smogs), len(smogs))
    return cells


def fk_distribution(records: Sequence[MetricRecord], bins: int = 10) -> dict:
    """Per-approach FK histogram over shared edges covering [min, max],
    plus per-approach means and the grade-8 reference marker."""
    if bins < 1:
        raise ValidationError("bins must be >= 1")
    by_approach: dict[str, list[float]] = {}
    for r in records:
        if r.fk_grade is not None:
            by_approach.setdefault(f"{r.model_id}_{r.approach}", []).append(r.fk_grade)
    all_values = [v for vs in by_approach.values() for v in vs]
    if not all_values:
        return {"bin_edges": [], "approaches": {}, "grade_target": GRADE_TARGET}
    lo, hi = min(all_values), max(all_values)
    if lo == hi:
        hi = lo + 1e-9
    edges = np.linspace(lo, hi, bins + 1)
    approaches = {}
    for label, values in by_approach.items():
        counts, _ = np.histogram(values, bins=edges)
        approaches[label] = {"counts": counts.tolist(), "mean": mean(values)}
    return {
        "bin_edges": edges.tolist(),
        "approaches": approaches,
        "grade_target": GRADE_TARGET,
    }


def format_cell(m: float, sd: float) -> str:
    return f"{m:.2f} (SD={sd:.2f})"


def render(table: ReportTable, format: str = "markdown") -> str:
    """Table text in the quantitative-table layout; cells are "mean (SD=sd)"."""
    if not table.rows:
        raise ValidationError("empty table")
    header = ["Model"] + [METRIC_LABELS[m] for m in METRIC_COLUMNS]
    body = []
    for label, cells in table.rows.items():
        row = [label]
        for metric in METRIC_COLUMNS:
            if metric in cells:
                m, sd, _ = cells[metric]
                scale = METRIC_SCALE.get(metric, 1.0)
                row.append(format_cell(m * scale, sd * scale))
            else:
                row.append("-")
        body.append(row)
    if format == "markdown":
        lines = [
            "| " + " | ".join(header) + " |",
            "| " + " | ".join("---" for _ in header) + " |",
        ]
        lines += ["| " + " | ".join(row) + " |" for row in body]
        return "\n".join(lines) + "\n"
    if format == "csv":
        import csv
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(body)
        return buf.getvalue()
    raise ValidationError(f"unknown format {format!r}")


def load_metric_records(path: str | Path) -> list[MetricRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(MetricRecord.from_json(json.loads(line)))
    return records
