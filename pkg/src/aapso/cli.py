"""Command line interface: ``aapso run | summarize | stat-test``."""
import argparse
import json
import sys
from pathlib import Path

from .bench.config import FORMATS, PROTOCOLS, config_from_dict, load_config
from .bench.experiment import load_records, run_experiment
from .bench.report import summarize
from .errors import AapsoError, ConfigError
from .optimizer import FITNESS_PROTOCOLS, SCHEDULES, VARIANTS
from .stats import ALTERNATIVES, mann_whitney_u

# (argparse dest, config section, key)
_OVERRIDES = [
    ("dataset", "dataset", "path"),
    ("label_column", "dataset", "label_column"),
    ("folds", "protocol", "folds"),
    ("holdout_fraction", "protocol", "test_fraction"),
    ("population", "swarm", "population"),
    ("iterations", "swarm", "iterations"),
    ("alpha", "swarm", "alpha"),
    ("fitness_protocol", "swarm", "fitness_protocol"),
    ("fitness_folds", "swarm", "fitness_folds"),
    ("validation_fraction", "swarm", "validation_fraction"),
    ("k_frac", "altruism", "k_frac"),
    ("knn_k", "knn", "k"),
    ("c", "adaptive", "c"),
    ("schedule", "adaptive", "schedule"),
    ("out", "output", "dir"),
    ("format", "output", "format"),
]


def build_parser():
    parser = argparse.ArgumentParser(prog="aapso", description="Binary PSO wrapper feature selection")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and report it")
    run.add_argument("--config", help="JSON config file; flags below override it")
    run.add_argument("--dataset", help="comma separated data file")
    run.add_argument("--label-column", help="label column name or 0-based index (default: last)")
    run.add_argument("--no-header", action="store_true", help="data file has no header row")
    run.add_argument("--protocol", choices=PROTOCOLS)
    run.add_argument("--folds", type=int)
    run.add_argument("--holdout-fraction", type=float)
    run.add_argument("--variant", action="append", choices=VARIANTS, help="repeatable")
    run.add_argument("--seed", action="append", type=int, help="repeatable")
    run.add_argument("--population", type=int)
    run.add_argument("--iterations", type=int)
    run.add_argument("--alpha", type=float, help="accuracy weight in the fitness")
    run.add_argument("--fitness-protocol", choices=FITNESS_PROTOCOLS,
                     help="how fitness accuracy is estimated inside the training rows")
    run.add_argument("--fitness-folds", type=int)
    run.add_argument("--validation-fraction", type=float, help="for --fitness-protocol holdout")
    run.add_argument("--k-frac", type=float, help="elite fraction spared from altruism")
    run.add_argument("--knn-k", type=int)
    run.add_argument("--c", type=float, help="adaptive weight constant")
    run.add_argument("--schedule", choices=SCHEDULES)
    run.add_argument("--positive-class")
    run.add_argument("--out", help="output directory")
    run.add_argument("--format", choices=FORMATS)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--quiet", action="store_true")

    summ = sub.add_parser("summarize", help="summarize a records file")
    summ.add_argument("--records", required=True, help="records.jsonl or its directory")
    summ.add_argument("--format", choices=FORMATS, default="table")
    summ.add_argument("--out", help="also write report files to this directory")

    st = sub.add_parser("stat-test", help="Mann-Whitney U test of two samples")
    st.add_argument("--a", required=True, help="comma separated values, or a file of values")
    st.add_argument("--b", required=True, help="comma separated values, or a file of values")
    st.add_argument("--alternative", choices=ALTERNATIVES, default="greater")
    st.add_argument("--format", choices=("table", "json"), default="table")
    return parser


def config_from_args(args):
    raw = load_config(args.config).as_dict() if args.config else {}
    for dest, section, key in _OVERRIDES:
        value = getattr(args, dest)
        if value is None:
            continue
        if dest == "label_column":
            value = int(value) if value.lstrip("-").isdigit() else value
        raw.setdefault(section, {})[key] = value
    if args.no_header:
        raw.setdefault("dataset", {})["has_header"] = False
    if args.protocol:
        protocol = raw.setdefault("protocol", {})
        if protocol.get("kind") != args.protocol:
            protocol.pop("folds" if args.protocol == "holdout" else "test_fraction", None)
        protocol["kind"] = args.protocol
    if args.variant:
        raw["variants"] = args.variant
    if args.seed:
        raw["seeds"] = args.seed
    if args.positive_class is not None:
        raw["positive_class"] = args.positive_class
    if "dataset" not in raw:
        raise ConfigError("required (use --dataset or --config)", "dataset.path")
    return config_from_dict(raw)


def parse_values(text):
    path = Path(text)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    try:
        return [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"not a list of numbers: {text!r}") from None


def _cmd_run(args):
    config = config_from_args(args)
    progress = None
    if not args.quiet:
        def progress(rec):
            acc = rec.result.test_metrics.accuracy
            print(f"  {rec.variant} seed={rec.seed} fold={rec.fold} acc={acc:.4f} "
                  f"features={rec.result.selected_count} ({rec.duration_s:.1f}s)", file=sys.stderr)
    records = run_experiment(config, workers=args.workers, progress=progress)
    report = summarize(records)
    report.write(config.output.dir)
    sys.stdout.write(report.render(config.output.format))


def _cmd_summarize(args):
    report = summarize(load_records(args.records))
    if args.out:
        report.write(args.out)
    sys.stdout.write(report.render(args.format))


def _cmd_stat_test(args):
    try:
        rep = mann_whitney_u(parse_values(args.a), parse_values(args.b), args.alternative)
    except ValueError as exc:
        if isinstance(exc, AapsoError):
            raise
        raise ConfigError(str(exc)) from None
    if args.format == "json":
        sys.stdout.write(json.dumps(rep.as_dict(), sort_keys=True) + "\n")
    else:
        print(f"U={rep.u_statistic:g} p={rep.p_value:.5f} method={rep.method} alternative={rep.alternative}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "summarize": _cmd_summarize, "stat-test": _cmd_stat_test}[args.command]
    try:
        handler(args)
    except AapsoError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
