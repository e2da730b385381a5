"""Command-line front end: ``fit``, ``generate``, ``evaluate``, ``smote`` and ``demo``."""

import argparse
import logging
import sys

from . import __version__
from .csvio import CsvSchemaHints, ingest_csv, write_csv
from .demo import run_demo
from .numerics import RandomSource
from .pipeline import FitConfig, fit, generate, load_model, save_model
from .quality import build_quality_report
from .smote import SmoteConfig, smote_table

log = logging.getLogger("copula_synth")

FAMILIES = {"gaussian": "gaussian", "t": "t"}


def _add_schema_args(p):
    p.add_argument("--exclude", action="append", default=[], metavar="COL",
                   help="drop a column before fitting (repeatable)")
    p.add_argument("--numeric", action="append", default=[], metavar="COL",
                   help="force a column numeric (repeatable)")
    p.add_argument("--categorical", action="append", default=[], metavar="COL",
                   help="force a column categorical (repeatable)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", action="store_true")


def _hints(args):
    return CsvSchemaHints(numeric=args.numeric, categorical=args.categorical, exclude=args.exclude,
                          delimiter=args.delimiter, header=not args.no_header)


def build_parser():
    parser = argparse.ArgumentParser(prog="copula-synth",
                                     description="Copula-based synthetic tabular data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a copula model to a CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--family", choices=sorted(FAMILIES), default="gaussian")
    p.add_argument("--nu", type=float, default=None, help="t copula d.o.f. (default 4)")
    p.add_argument("--method", choices=["kendall", "spearman", "pearson"], default="kendall")
    p.add_argument("--z", type=float, default=1.96)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--align-original", action=argparse.BooleanOptionalAction, default=True,
                   help="break decoding ties with the training label when row counts match")
    _add_schema_args(p)

    p = sub.add_parser("generate", help="sample a synthetic CSV from a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--align-original", action=argparse.BooleanOptionalAction, default=None)

    p = sub.add_parser("evaluate", help="score a synthetic CSV against the real one")
    p.add_argument("--real", required=True)
    p.add_argument("--synthetic", required=True)
    p.add_argument("--out", required=True)
    _add_schema_args(p)

    p = sub.add_parser("smote", help="SMOTE baseline generator")
    p.add_argument("--input", required=True)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--z", type=float, default=1.96)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_schema_args(p)

    p = sub.add_parser("demo", help="run the vehicle/colour worked example")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_fit(args):
    table = ingest_csv(args.input, _hints(args))
    config = FitConfig(family=FAMILIES[args.family], nu=args.nu, correlation_method=args.method,
                       z=args.z, seed=args.seed, align_original=args.align_original)
    model = fit(table, config)
    save_model(model, args.out)
    log.info("fitted %d columns on %d rows -> %s", model.dim, model.training_n, args.out)


def _cmd_generate(args):
    model = load_model(args.model)
    syn = generate(model, args.rows, RandomSource(args.seed), align_original=args.align_original)
    write_csv(syn, args.out)


def _cmd_evaluate(args):
    real = ingest_csv(args.real, _hints(args))
    forced = CsvSchemaHints(
        numeric=real.numeric_columns, categorical=real.categorical_columns, exclude=args.exclude,
        delimiter=args.delimiter, header=not args.no_header)
    syn = ingest_csv(args.synthetic, forced)
    report = build_quality_report(real, syn)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    for method, v in report.mu_diff.items():
        print(f"mu_diff[{method}] = {v:.6f}")


def _cmd_smote(args):
    table = ingest_csv(args.input, _hints(args))
    syn = smote_table(table, SmoteConfig(k=args.k, n_new=args.rows, seed=args.seed),
                      RandomSource(args.seed), z=args.z)
    write_csv(syn, args.out)


def _cmd_demo(args):
    run_demo(seed=args.seed)


COMMANDS = {
    "fit": _cmd_fit,
    "generate": _cmd_generate,
    "evaluate": _cmd_evaluate,
    "smote": _cmd_smote,
    "demo": _cmd_demo,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (OSError, ValueError) as exc:
        print(f"copula-synth {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
