"""Command line front end.

    cmstar evaluate --truth TRUTH --pred PRED [--measures f1,mcc] [--out PATH] [--format json|md] [--verbose]
    cmstar run --data A.csv [B.csv ...] [--clf knn3,nb,dt,rf] [--folds 10] [--seed 42] [--out PATH]
    cmstar report A.json [B.json ...] [--out PATH]

Exit status: 0 success, 1 internal fault, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .classifiers import CLASSIFIER_KINDS, DEFAULT_SEED, CrossValidationPlan, cross_validate
from .errors import CmstarError, DimensionError
from .io import (
    load_dataset,
    load_labels,
    load_predictions,
    make_report,
    now_timestamp,
    read_prediction_header,
    read_reports,
    render_markdown,
    write_report,
)
from .matrices import build_ground_truth, encode_labels
from .measures import Evaluation, builtin_measures

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2


class UsageError(CmstarError):
    pass


def _split_list(value: str | None) -> list[str]:
    if not value:
        return []
    return [v.strip() for v in value.split(",") if v.strip()]


def _measures(value):
    names = _split_list(value)
    catalog = builtin_measures()
    unknown = [n for n in names if n not in catalog]
    if unknown:
        raise UsageError(f"unknown measure(s) {unknown}; choose from {sorted(catalog)}")
    return [catalog[n] for n in names]


def _classifiers(value):
    names = _split_list(value)
    if not names:
        raise UsageError("no classifier selected")
    unknown = [n for n in names if n not in CLASSIFIER_KINDS]
    if unknown:
        raise UsageError(f"unknown classifier(s) {unknown}; choose from {sorted(CLASSIFIER_KINDS)}")
    return list(dict.fromkeys(names))


def _existing(paths):
    for p in paths:
        if not Path(p).is_file():
            raise UsageError(f"no such file: {p}")
    return [Path(p) for p in paths]


def _format_for(args):
    if args.format:
        return args.format
    if args.out and Path(args.out).suffix.lower() in (".md", ".markdown"):
        return "md"
    return "json"


def format_matrix(title, m, classes, integer=False) -> str:
    cells = [[str(int(v)) if integer else f"{v:.4f}" for v in row] for row in np.asarray(m)]
    width = max(len(s) for s in list(classes) + [c for row in cells for c in row])
    label_w = max(len(c) for c in classes)
    lines = [title, " " * (label_w + 2) + " ".join(c.rjust(width) for c in classes)]
    for cls, row in zip(classes, cells):
        lines.append(cls.rjust(label_w) + "  " + " ".join(c.rjust(width) for c in row))
    return "\n".join(lines)


def _emit(reports, args, means=False):
    print(render_markdown(reports, means=means), end="")
    if args.out:
        write_report(
            reports,
            _format_for(args),
            args.out,
            include_timestamp=not args.no_timestamp,
            means=means,
        )


def cmd_evaluate(args) -> int:
    truth_path, pred_path = _existing([args.truth, args.pred])
    measures = _measures(args.measures)
    labels = load_labels(truth_path)
    header = read_prediction_header(pred_path)
    missing = sorted(set(labels) - set(header))
    if missing:
        raise UsageError(f"{truth_path}: labels {missing} are not columns of {pred_path}")
    enc = encode_labels(list(labels) + list(header))
    q = load_predictions(pred_path, enc)
    if q.n != len(labels):
        raise DimensionError(
            f"row count mismatch: {truth_path} has {len(labels)} labels, {pred_path} has {q.n} prediction rows"
        )
    t = build_ground_truth(labels, enc)
    if args.verbose:
        ev = Evaluation.from_predictions(t, q)
        v, u = ev.decomposition.v, ev.decomposition.u
        classes = list(enc.classes)
        for block in (
            format_matrix("CM (rows: true, columns: predicted)", ev.cm.values, classes, integer=True),
            format_matrix("CM* = V + U", ev.decomposition.total, classes),
            format_matrix("V (certainty)", v, classes),
            format_matrix("U (uncertainty)", u, classes),
        ):
            print(block + "\n")
    report = make_report(
        t,
        q,
        dataset=args.dataset_name or truth_path.stem,
        classifier=args.classifier_name or pred_path.stem,
        measures=measures,
        timestamp=now_timestamp(),
    )
    _emit([report], args)
    return EXIT_OK


def cmd_run(args) -> int:
    paths = _existing(args.data)
    classifiers = _classifiers(args.clf)
    measures = _measures(args.measures)
    plan = CrossValidationPlan(folds=args.folds, seed=args.seed)
    datasets = [load_dataset(p) for p in paths]
    stamp = now_timestamp()
    reports = []
    for data in datasets:
        for clf in classifiers:
            options = {"n_trees": args.n_trees} if clf == "rf" else {}
            q, t = cross_validate(data, clf, plan, **options)
            reports.append(
                make_report(
                    t, q, dataset=data.name, classifier=clf, measures=measures,
                    seed=plan.seed, folds=plan.folds, timestamp=stamp,
                )
            )
    reports.sort(key=lambda r: r.key)
    _emit(reports, args, means=len(datasets) > 1)
    return EXIT_OK


def cmd_report(args) -> int:
    if not args.reports:
        raise UsageError("no report files given")
    paths = _existing(args.reports)
    merged, seen = [], {}
    for path in paths:
        for r in read_reports(path):
            if r.key in seen:
                raise UsageError(
                    f"duplicate (dataset, classifier) pair {r.key} in {seen[r.key]} and {path}"
                )
            seen[r.key] = path
            merged.append(r)
    if not merged:
        raise UsageError("the report files contain no reports")
    merged.sort(key=lambda r: r.key)
    if not args.format:
        args.format = "json" if args.out and Path(args.out).suffix.lower() == ".json" else "md"
    _emit(merged, args, means=True)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmstar",
        description="Probabilistic confusion matrix, divergence and certainty ratio.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def output_options(p):
        p.add_argument("--out", help="write the report to this path")
        p.add_argument("--format", choices=["json", "md"],
                       help="report format (default: from --out suffix, else json)")
        p.add_argument("--no-timestamp", action="store_true",
                       help="store a null timestamp so repeated runs are byte-identical")

    ev = sub.add_parser("evaluate", help="evaluate an external prediction file")
    ev.add_argument("--truth", required=True, help="dataset file or single-column label file")
    ev.add_argument("--pred", required=True, help="probability file with a class-label header")
    ev.add_argument("--measures", help="extra measures, comma separated: " + ",".join(builtin_measures()))
    ev.add_argument("--verbose", "-v", action="store_true", help="print CM, CM*, V and U")
    ev.add_argument("--dataset-name")
    ev.add_argument("--classifier-name")
    output_options(ev)
    ev.set_defaults(func=cmd_evaluate)

    run = sub.add_parser("run", help="cross-validate the built-in classifiers")
    run.add_argument("--data", nargs="+", required=True, help="dataset file(s)")
    run.add_argument("--clf", default="knn3,nb,dt,rf", help="comma separated subset of knn3,nb,dt,rf")
    run.add_argument("--folds", type=int, default=10)
    run.add_argument("--seed", type=int, default=DEFAULT_SEED)
    run.add_argument("--n-trees", type=int, default=100, help="random forest size")
    run.add_argument("--measures", help="extra measures, comma separated")
    output_options(run)
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="merge JSON reports into one table")
    rep.add_argument("reports", nargs="*", help="report JSON files")
    output_options(rep)
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CmstarError, OSError, UnicodeDecodeError, csv.Error) as exc:
        print(f"cmstar {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"cmstar {args.command}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
