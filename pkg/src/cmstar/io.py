"""Reading datasets and prediction files, writing evaluation reports.

File formats (comma separated, optional double-quote quoting):

dataset
    Feature columns followed by the class label column. The first row is a
    header if any of its feature cells is not a number.
truth
    Either a dataset file (labels taken from the last column) or a
    single-column file whose first row is a header.
predictions
    Header row of class labels, then one probability row per instance,
    row-aligned with the truth file. Column order is free.
report
    JSON ``{"schema_version": 1, "reports": [...]}`` with sorted keys, or a
    markdown table.

Row numbers in error messages are line numbers in the file (1-based,
header included).
"""
from __future__ import annotations

import csv
import json
import math
import statistics
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .classifiers.base import Dataset
from .errors import EncodingError, ReportSchemaError, ValidationError
from .matrices import (
    ROW_SUM_TOLERANCE,
    GroundTruthMatrix,
    LabelEncoding,
    ProbabilityMatrix,
)
from .measures import Evaluation, Measure, builtin_measures

SCHEMA_VERSION = 1


def _read_rows(path):
    """Non-blank CSV rows of ``path`` as ``(line_number, cells)``."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [(reader.line_num, [c.strip() for c in row]) for row in reader if any(c.strip() for c in row)]
    if not rows:
        raise ValidationError("file is empty", path=path)
    return rows


def _parse_float(cell):
    value = float(cell)
    if not math.isfinite(value):
        raise ValueError(cell)
    return value


def _is_number(cell) -> bool:
    try:
        _parse_float(cell)
    except ValueError:
        return False
    return True


def load_dataset(path, name: str | None = None) -> Dataset:
    """Parse a dataset file: real-valued features, class label last."""
    path = Path(path)
    rows = _read_rows(path)
    first = rows[0][1]
    if len(first) < 2:
        raise ValidationError("need at least one feature column and a label column", row=rows[0][0], path=path)
    ncols = len(first)
    header = None
    if not all(_is_number(c) for c in first[:-1]):
        header = first
        rows = rows[1:]
        if not rows:
            raise ValidationError("file has a header but no data rows", path=path)
    features, labels = [], []
    for line, cells in rows:
        if len(cells) != ncols:
            raise ValidationError(f"expected {ncols} columns, found {len(cells)}", row=line, path=path)
        values = []
        for j, cell in enumerate(cells[:-1]):
            try:
                values.append(_parse_float(cell))
            except ValueError:
                column = header[j] if header else j + 1
                raise ValidationError(f"feature value {cell!r} is not a finite number", row=line, column=column, path=path) from None
        if not cells[-1]:
            raise ValidationError("missing class label", row=line, column=header[-1] if header else ncols, path=path)
        features.append(values)
        labels.append(cells[-1])
    return Dataset(
        features=np.array(features, dtype=np.float64),
        labels=tuple(labels),
        feature_names=tuple(header[:-1]) if header else None,
        name=name if name is not None else path.stem,
    )


def load_labels(path) -> list[str]:
    """Ground-truth labels from a dataset file or a single-column label file."""
    path = Path(path)
    rows = _read_rows(path)
    if len(rows[0][1]) > 1:
        return list(load_dataset(path).labels)
    labels = []
    for line, cells in rows[1:]:
        if len(cells) != 1 or not cells[0]:
            raise ValidationError("expected exactly one non-empty label", row=line, path=path)
        labels.append(cells[0])
    if not labels:
        raise ValidationError("label file has a header but no labels", path=path)
    return labels


def read_prediction_header(path) -> list[str]:
    return _read_rows(path)[0][1]


def load_predictions(path, enc: LabelEncoding) -> ProbabilityMatrix:
    """Parse a prediction file into a probability matrix in ``enc`` column order.

    Raises
    ------
    EncodingError
        Header classes differ from ``enc`` as a set, or repeat.
    ValidationError
        Ragged row, unparseable or negative cell, or row sum outside
        ``1 +/- ROW_SUM_TOLERANCE``.
    """
    path = Path(path)
    rows = _read_rows(path)
    header = rows[0][1]
    if len(set(header)) != len(header):
        raise EncodingError(f"{path}: duplicate class labels in header {header}")
    missing = sorted(set(enc.classes) - set(header))
    extra = sorted(set(header) - set(enc.classes))
    if missing or extra:
        raise EncodingError(
            f"{path}: header classes do not match the ground truth classes"
            f" (missing: {missing}, unexpected: {extra})"
        )
    order = [header.index(c) for c in enc.classes]
    values = np.empty((len(rows) - 1, len(header)))
    for i, (line, cells) in enumerate(rows[1:]):
        if len(cells) != len(header):
            raise ValidationError(f"expected {len(header)} columns, found {len(cells)}", row=line, path=path)
        for j, cell in enumerate(cells):
            try:
                value = _parse_float(cell)
            except ValueError:
                raise ValidationError(f"probability {cell!r} is not a finite number", row=line, column=header[j], path=path) from None
            if value < 0:
                raise ValidationError(f"negative probability {cell}", row=line, column=header[j], path=path)
            values[i, j] = value
        total = float(values[i].sum())
        if abs(total - 1.0) > ROW_SUM_TOLERANCE:
            raise ValidationError(
                f"probabilities sum to {total!r}, expected 1 +/- {ROW_SUM_TOLERANCE}", row=line, path=path
            )
    if values.shape[0] == 0:
        raise ValidationError("prediction file has a header but no rows", path=path)
    return ProbabilityMatrix(values[:, order])


@dataclass
class EvaluationReport:
    """One table row: accuracy family, divergence and certainty ratio.

    ``divergence`` and ``certainty_ratio`` are fractions; the ``*_pct``
    properties give the percentages shown in tables. ``certainty_ratio`` is
    ``None`` when undefined. ``measures`` maps an extra measure name to its
    values on ``cm``, ``cm_star``, ``v``, ``u`` and its ``certainty_ratio``.
    """

    dataset: str
    classifier: str
    n_instances: int
    n_classes: int
    acc: float
    acc_star: float
    acc_v_star: float
    acc_u_star: float
    divergence: float
    certainty_ratio: float | None
    lambda_v: float
    lambda_u: float
    measures: dict = field(default_factory=dict)
    seed: int | None = None
    folds: int | None = None
    timestamp: str | None = None

    @property
    def divergence_pct(self) -> float:
        return 100.0 * self.divergence

    @property
    def certainty_ratio_pct(self) -> float | None:
        return None if self.certainty_ratio is None else 100.0 * self.certainty_ratio

    @property
    def key(self):
        return (self.dataset, self.classifier)

    def to_dict(self, include_timestamp: bool = True) -> dict:
        d = asdict(self)
        if not include_timestamp:
            d["timestamp"] = None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationReport":
        names = {f.name for f in fields(cls)}
        required = names - {"measures", "seed", "folds", "timestamp"}
        missing = sorted(required - set(d))
        if missing:
            raise ReportSchemaError(f"report entry is missing fields {missing}")
        return cls(**{k: v for k, v in d.items() if k in names})


def make_report(
    t: GroundTruthMatrix,
    q: ProbabilityMatrix,
    dataset: str = "",
    classifier: str = "",
    measures: Iterable[Measure | str] = (),
    seed: int | None = None,
    folds: int | None = None,
    timestamp: str | None = None,
) -> EvaluationReport:
    """Evaluate one (T, Q) pair into a report row."""
    evaluation = Evaluation.from_predictions(t, q)
    acc = evaluation.report()
    dec = acc.decomposition
    catalog = builtin_measures()
    extra = {}
    for measure in measures:
        if isinstance(measure, str):
            measure = catalog[measure]
        if measure.name == "accuracy":
            continue
        r = evaluation.report(measure)
        extra[measure.name] = {
            "cm": r.measure_on_cm,
            "cm_star": r.measure_on_cm_star,
            "v": r.measure_on_v,
            "u": r.measure_on_u,
            "certainty_ratio": r.certainty_ratio,
        }
    return EvaluationReport(
        dataset=dataset,
        classifier=classifier,
        n_instances=t.n,
        n_classes=t.k,
        acc=acc.measure_on_cm,
        acc_star=dec.acc_star,
        acc_v_star=dec.acc_v,
        acc_u_star=dec.acc_u,
        divergence=acc.divergence,
        certainty_ratio=acc.certainty_ratio,
        lambda_v=dec.lambda_v,
        lambda_u=dec.lambda_u,
        measures=extra,
        seed=seed,
        folds=folds,
        timestamp=timestamp,
    )


def now_timestamp() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def reports_to_json(reports: Sequence[EvaluationReport], include_timestamp: bool = True) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "reports": [r.to_dict(include_timestamp) for r in reports],
    }
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def reports_from_json(text: str, source="<string>") -> list[EvaluationReport]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportSchemaError(f"{source}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        found = doc.get("schema_version") if isinstance(doc, dict) else None
        raise ReportSchemaError(f"{source}: schema_version {found!r}, expected {SCHEMA_VERSION}")
    entries = doc.get("reports")
    if not isinstance(entries, list):
        raise ReportSchemaError(f"{source}: 'reports' must be a list")
    return [EvaluationReport.from_dict(e) for e in entries]


def read_reports(path) -> list[EvaluationReport]:
    path = Path(path)
    return reports_from_json(path.read_text(encoding="utf-8"), source=path)


COLUMNS = ("Dataset", "Classifier", "Acc", "Acc*", "Acc*_v", "Acc*_u", "div", "C_rho")


def _fmt(value, pct=False):
    if value is None:
        return "n/a"
    return f"{100.0 * value:.1f}" if pct else f"{value:.3f}"


def _row(dataset, classifier, acc, acc_star, acc_v, acc_u, div, c_rho):
    cells = [
        dataset,
        classifier,
        _fmt(acc),
        _fmt(acc_star),
        _fmt(acc_v),
        _fmt(acc_u),
        _fmt(div, pct=True),
        _fmt(c_rho, pct=True),
    ]
    return "| " + " | ".join(cells) + " |"


def mean_row(reports: Sequence[EvaluationReport]) -> dict:
    """Column-wise arithmetic mean; an undefined C_rho is left out of its mean."""
    ratios = [r.certainty_ratio for r in reports if r.certainty_ratio is not None]
    return {
        "acc": statistics.fmean(r.acc for r in reports),
        "acc_star": statistics.fmean(r.acc_star for r in reports),
        "acc_v_star": statistics.fmean(r.acc_v_star for r in reports),
        "acc_u_star": statistics.fmean(r.acc_u_star for r in reports),
        "divergence": statistics.fmean(r.divergence for r in reports),
        "certainty_ratio": statistics.fmean(ratios) if ratios else None,
    }


def render_markdown(reports: Sequence[EvaluationReport], means: bool = False) -> str:
    """Markdown table sorted by (dataset, classifier).

    With ``means``, a "Mean" row per classifier follows the body. Accuracies
    have 3 decimals; div and C_rho are percentages with 1 decimal.
    """
    reports = sorted(reports, key=lambda r: r.key)
    lines = [
        "| " + " | ".join(COLUMNS) + " |",
        "|" + "|".join(["---"] * 2 + ["---:"] * (len(COLUMNS) - 2)) + "|",
    ]
    for r in reports:
        lines.append(
            _row(r.dataset, r.classifier, r.acc, r.acc_star, r.acc_v_star, r.acc_u_star, r.divergence, r.certainty_ratio)
        )
    if means:
        for clf in sorted({r.classifier for r in reports}):
            m = mean_row([r for r in reports if r.classifier == clf])
            lines.append(
                _row("**Mean**", clf, m["acc"], m["acc_star"], m["acc_v_star"], m["acc_u_star"], m["divergence"], m["certainty_ratio"])
            )
    extra = [(r, name, vals) for r in reports for name, vals in sorted(r.measures.items())]
    if extra:
        lines += [
            "",
            "| Dataset | Classifier | Measure | on CM | on CM* | on V | on U | C_rho |",
            "|---|---|---|---:|---:|---:|---:|---:|",
        ]
        for r, name, vals in extra:
            cells = [r.dataset, r.classifier, name] + [_fmt(vals[c]) for c in ("cm", "cm_star", "v", "u")]
            cells.append(_fmt(vals["certainty_ratio"], pct=True))
            lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def write_report(
    report: EvaluationReport | Sequence[EvaluationReport],
    format: str,
    path,
    include_timestamp: bool = True,
    means: bool = False,
) -> None:
    """Write one report or a list of reports as ``json`` or ``md``."""
    reports = [report] if isinstance(report, EvaluationReport) else list(report)
    if format == "json":
        text = reports_to_json(reports, include_timestamp)
    elif format in ("md", "markdown", "markdown-table"):
        text = render_markdown(reports, means=means)
    else:
        raise ValueError(f"unknown report format {format!r}")
    Path(path).write_text(text, encoding="utf-8")
