"""joinguard command line.

Subcommands: uniqueness, assess, generate, train, predict, evaluate.
JSON goes to stdout (or ``--out``); ``--format csv`` gives a flat one-row
projection.  Exit codes: 0 ok, 1 pipeline error, 2 usage error,
3 accuracy gate failed.  Errors are one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Sequence

from .assess import BASELINE_MODES, DEFAULT_EPSILON, assess_pair, direction
from .errors import JoinGuardError
from .evaluation import evaluate
from .join import JOIN_KINDS, JoinSpec, default_max_rows, parse_keys
from .metrics import uniqueness_report
from .predictor import Hyperparams, load_model, save_model, train
from .synth import GeneratorParams, dump_corpus, generate_corpus, load_corpus
from .tabular import IngestOptions, load_table

EXIT_OK, EXIT_PIPELINE, EXIT_USAGE, EXIT_GATE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _csv_list(text):
    return [p.strip() for p in text.split(",") if p.strip()]


def _int_list(text):
    try:
        return [int(p) for p in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _int_range(text):
    parts = text.split(":")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LOW:HIGH integers, got {text!r}") from None
    if len(values) == 1:
        values *= 2
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected LOW:HIGH, got {text!r}")
    return tuple(values)


def _float_range(text):
    parts = text.split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LOW:HIGH numbers, got {text!r}") from None
    if len(values) == 1:
        values *= 2
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected LOW:HIGH, got {text!r}")
    return tuple(values)


def _flatten(data, prefix=""):
    flat = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        elif isinstance(value, list):
            flat[name] = json.dumps(value, separators=(",", ":"))
        else:
            flat[name] = "" if value is None else value
    return flat


def render(data: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(data, sort_keys=True, indent=2) + "\n"
    flat = _flatten(data)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = sorted(flat)
    writer.writerow(names)
    writer.writerow([repr(flat[n]) if isinstance(flat[n], float) else flat[n] for n in names])
    return buf.getvalue()


def _emit(text: str, out: str | None, stdout):
    if out and out != "-":
        Path(out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _ingest(path, args, drop=()):
    options = IngestOptions(
        delimiter=args.delimiter,
        has_header=not args.no_header,
        case_fold=args.case_fold,
        drop_columns=tuple(drop),
    )
    return load_table(_read_bytes(path), options, Path(path).stem)


def _corpus(path):
    return load_corpus(_read_bytes(path).decode("utf-8"))


def _model(path):
    return load_model(_read_bytes(path))


# -- subcommands ------------------------------------------------------------


def cmd_uniqueness(args, stdout):
    table = _ingest(args.input, args, args.drop or ())
    report = uniqueness_report(table, args.attrs, args.k)
    _emit(render(report.to_dict(), args.format), args.out, stdout)
    return EXIT_OK


def cmd_assess(args, stdout):
    a = _ingest(args.left, args, args.drop_left or ())
    b = _ingest(args.right, args, args.drop_right or ())
    max_rows = default_max_rows() if args.max_rows is None else args.max_rows
    spec = JoinSpec(parse_keys(args.keys), args.kind, max_rows)
    result = assess_pair(
        a, b, spec, args.attrs_left, args.attrs_right,
        baseline=args.baseline, epsilon=args.epsilon, small_group_ks=args.k,
    )
    _emit(render(result.to_dict(), args.format), args.out, stdout)
    if args.figure:
        from .figures import plot_assessment

        plot_assessment(result, args.figure)
    return EXIT_OK


def cmd_generate(args, stdout):
    overrides = {
        name: getattr(args, name)
        for name in (
            "rows_a", "rows_b", "age_range", "extra_cols_a", "extra_cols_b",
            "cardinality", "duplicate_rate", "id_column_prob", "cohort_density",
            "cohort_separation", "max_retries", "gender_values",
        )
        if getattr(args, name) is not None
    }
    params = GeneratorParams(**overrides)
    corpus = generate_corpus(params, args.pairs, args.seed, workers=args.workers)
    _emit(dump_corpus(corpus), args.out, stdout)
    if args.figure:
        from .figures import plot_corpus

        plot_corpus(corpus, args.figure)
    return EXIT_OK


def cmd_train(args, stdout):
    corpus = _corpus(args.corpus)
    hp = Hyperparams(args.trees, args.depth, args.lr, args.min_leaf, args.seed)
    model = train(corpus, hp)
    payload = save_model(model)
    if args.out and args.out != "-":
        Path(args.out).write_bytes(payload)
    else:
        stdout.write(payload.decode("utf-8"))
    return EXIT_OK


def cmd_predict(args, stdout):
    model = _model(args.model)
    for name, value in (("--ua", args.ua), ("--ub", args.ub)):
        if not (0.0 < value <= 1.0):
            raise UsageError(f"{name} must lie in (0, 1], got {value}")
    signal = model.predict_one([args.ua, args.ub])
    data = {
        "u_a": args.ua,
        "u_b": args.ub,
        "signal": signal,
        "direction": direction(signal, args.epsilon).value,
        "epsilon": args.epsilon,
    }
    _emit(render(data, args.format), args.out, stdout)
    return EXIT_OK


def cmd_evaluate(args, stdout):
    model = _model(args.model)
    corpus = _corpus(args.corpus)
    report = evaluate(model, corpus, epsilon=args.epsilon)
    _emit(render(report.to_dict(), args.format), args.out, stdout)
    if args.figure:
        from .figures import plot_evaluation

        pred = model.predict([ex.features for ex in corpus.examples])
        plot_evaluation(pred, [ex.target for ex in corpus.examples], args.figure, args.epsilon)
    if args.min_accuracy is not None and report.direction_accuracy < args.min_accuracy:
        print(
            json.dumps({"error": "gate", "message": f"direction accuracy {report.direction_accuracy:.4f} below {args.min_accuracy}"}),
            file=sys.stderr,
        )
        return EXIT_GATE
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="joinguard", description="Re-identification risk before and after quasi-identifier joins.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, figure=False):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="write output here instead of stdout")
        if figure:
            p.add_argument("--figure", help="also render a figure (.png, .svg or .pdf)")

    def ingest(p):
        p.add_argument("--delimiter", default=",")
        p.add_argument("--no-header", action="store_true", help="first line is data; columns become c0, c1, ...")
        p.add_argument("--case-fold", action="store_true", help="compare values case-insensitively")
        p.add_argument("--k", type=_int_list, default=[2, 5], help="small-group thresholds, e.g. 2,5")

    p = sub.add_parser("uniqueness", help="uniqueness report for one table")
    p.add_argument("--input", required=True)
    p.add_argument("--attrs", type=_csv_list, help="columns to measure (default: all)")
    p.add_argument("--drop", type=_csv_list, help="columns to remove on load, e.g. a row id")
    ingest(p)
    common(p)
    p.set_defaults(func=cmd_uniqueness)

    p = sub.add_parser("assess", help="identifiability before and after a join")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--keys", required=True, help="left=right column pairs, e.g. age=age,gender=sex")
    p.add_argument("--kind", choices=JOIN_KINDS, default="inner")
    p.add_argument("--max-rows", type=int, help="join output cap (default: $JOINGUARD_MAX_ROWS or 10000000)")
    p.add_argument("--baseline", choices=BASELINE_MODES, default="max")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--attrs-left", type=_csv_list)
    p.add_argument("--attrs-right", type=_csv_list)
    p.add_argument("--drop-left", type=_csv_list)
    p.add_argument("--drop-right", type=_csv_list)
    ingest(p)
    common(p, figure=True)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("generate", help="write a labeled corpus of synthetic pairs (JSON lines)")
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--rows-a", type=_int_range)
    p.add_argument("--rows-b", type=_int_range)
    p.add_argument("--age-range", type=_int_range)
    p.add_argument("--gender-values", type=int)
    p.add_argument("--extra-cols-a", type=_int_range)
    p.add_argument("--extra-cols-b", type=_int_range)
    p.add_argument("--cardinality", type=_int_range)
    p.add_argument("--duplicate-rate", type=_float_range)
    p.add_argument("--id-column-prob", type=float)
    p.add_argument("--cohort-density", type=_float_range)
    p.add_argument("--cohort-separation", type=_float_range)
    p.add_argument("--max-retries", type=int)
    p.add_argument("--out", help="corpus path (default: stdout)")
    p.add_argument("--figure", help="also render the corpus map")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="fit the boosted predictor on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", help="model path (default: stdout)")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--min-leaf", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict the signal from two uniqueness ratios")
    p.add_argument("--model", required=True)
    p.add_argument("--ua", type=float, required=True)
    p.add_argument("--ub", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a model on a corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--min-accuracy", type=float, help="exit 3 if direction accuracy falls below this")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    common(p, figure=True)
    p.set_defaults(func=cmd_evaluate)
    return parser


def _fail(kind, message, code):
    print(json.dumps({"error": kind, "message": str(message)}), file=sys.stderr)
    return code


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, stdout)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except JoinGuardError as exc:
        return _fail(type(exc).__name__, exc, EXIT_PIPELINE)
    except ValueError as exc:
        return _fail("usage", exc, EXIT_USAGE)


def main() -> None:
    raise SystemExit(run())
