"""Command-line interface.

Subcommands: ``fit`` a dataset, ``bench`` a JSON experiment spec,
``table1`` / ``table2`` for the built-in benchmark grids, ``signals`` to
dump a test curve, ``rank`` for data-driven dimension selection.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 numerical
failure (empty screen, rank deficiency, degenerate gap, failed
experiment), 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bench
from .errors import (
    DegenerateGapError,
    EmptySelectionError,
    ExperimentFailedError,
    InvalidInputError,
    RankDeficientError,
)
from .iterate import FitConfig, Stopping, itspca
from .model import estimate_noise_var, read_binary, read_csv, sample_cov
from .rank import DEFAULT_KAPPA_BAR, estimate_rank
from .screening import dtspca
from .thresholding import ThresholdKind
from .wavelet import WaveletSpec, default_levels, dwt, test_signal

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _load_dataset(path: str):
    if path.endswith(".bin"):
        return read_binary(path)
    return read_csv(path)


def _resolve_sigma2(text: str, data) -> float:
    if text == "estimate":
        return estimate_noise_var(data)
    try:
        value = float(text)
    except ValueError as exc:
        raise InvalidInputError(f"--sigma2 must be a number or 'estimate', got {text!r}") from exc
    if not value > 0:
        raise InvalidInputError("--sigma2 must be positive")
    return value


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_fit(args) -> int:
    data = _load_dataset(args.input)
    cov = sample_cov(data)
    sigma2 = _resolve_sigma2(args.sigma2, data)
    init = dtspca(cov, data.p, args.alpha, sigma2)
    if args.m == "auto":
        est = estimate_rank(init, data.n, data.p, args.kappa_bar)
        m = est.m_selected
        if m == 0:
            payload = {
                "fit": None,
                "reason": "no signal selected (m = 0)",
                "nspike_hat": est.nspike_hat,
                "m_selected": 0,
            }
            _emit(json.dumps(payload, indent=2) + "\n", args.out)
            return EXIT_OK
    else:
        try:
            m = int(args.m)
        except ValueError as exc:
            raise InvalidInputError(f"--m must be an integer or 'auto', got {args.m!r}") from exc
    stopping = Stopping.theoretical() if args.stop == "theoretical" else Stopping.empirical()
    cfg = FitConfig(
        m=m,
        kind=ThresholdKind.parse(args.threshold),
        gamma=args.gamma,
        stopping=stopping,
    )
    fit = itspca(cov, init, cfg)
    _emit(json.dumps(fit.to_json_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_rank(args) -> int:
    data = _load_dataset(args.input)
    cov = sample_cov(data)
    sigma2 = _resolve_sigma2(args.sigma2, data)
    init = dtspca(cov, data.p, args.alpha, sigma2)
    est = estimate_rank(init, data.n, data.p, args.kappa_bar)
    payload = {
        "nspike_hat": est.nspike_hat,
        "m": est.m_selected,
        "gap_ratios": est.gap_ratios,
        "delta": est.delta,
        "card_b": init.card,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_bench(args) -> int:
    try:
        with open(args.spec, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"bad JSON in {args.spec}: {exc}") from exc
    spec = bench.ExperimentSpec.from_json_dict(raw)
    report = bench.run_experiment(spec, threads=args.threads)
    bench.write_suite([report], args.out_dir)
    return EXIT_OK


def _cmd_table(specs_fn, default_dir):
    def run(args) -> int:
        specs = specs_fn(replicates=args.replicates, base_seed=args.base_seed)
        reports = bench.run_suite(specs, threads=args.threads)
        bench.write_suite(reports, args.out_dir or default_dir)
        return EXIT_OK

    return run


def _cmd_signals(args) -> int:
    sig = test_signal(args.name, args.p)
    lines = []
    if args.wavelet:
        coeffs = dwt(sig.values, WaveletSpec(default_levels(args.p)))
        lines.append("index,coefficient")
        lines.extend(f"{i},{c:.17g}" for i, c in enumerate(coeffs))
    else:
        lines.append("t,value")
        lines.extend(
            f"{(i + 1) / args.p:.17g},{v:.17g}" for i, v in enumerate(sig.values)
        )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="itspca",
        description="Sparse principal subspace estimation by iterative thresholding.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit a sparse principal subspace to a dataset")
    fit.add_argument("--input", required=True, help="data file (.csv or .bin), rows = observations")
    fit.add_argument("--m", required=True, help="target dimension, or 'auto'")
    fit.add_argument("--alpha", type=float, default=3.0)
    fit.add_argument("--gamma", type=float, default=1.5)
    fit.add_argument("--threshold", default="soft", help="hard | soft | scad:<a>")
    fit.add_argument("--stop", choices=("empirical", "theoretical"), default="empirical")
    fit.add_argument("--sigma2", default="estimate", help="noise variance, or 'estimate'")
    fit.add_argument("--kappa-bar", type=float, default=DEFAULT_KAPPA_BAR)
    fit.add_argument("--out", default=None, help="write JSON here instead of stdout")
    fit.set_defaults(func=_cmd_fit)

    rank = sub.add_parser("rank", help="estimate the spike count and target dimension")
    rank.add_argument("--input", required=True)
    rank.add_argument("--alpha", type=float, default=3.0)
    rank.add_argument("--kappa-bar", type=float, default=DEFAULT_KAPPA_BAR)
    rank.add_argument("--sigma2", default="estimate")
    rank.add_argument("--out", default=None)
    rank.set_defaults(func=_cmd_rank)

    bench_p = sub.add_parser("bench", help="run a Monte Carlo experiment from a JSON spec")
    bench_p.add_argument("--spec", required=True, help="JSON experiment spec")
    bench_p.add_argument("--out-dir", required=True)
    bench_p.add_argument("--threads", type=int, default=1)
    bench_p.set_defaults(func=_cmd_bench)

    for name, fn, default_dir in (
        ("table1", bench.table1_specs, "table1_report"),
        ("table2", bench.table2_specs, "table2_report"),
    ):
        tp = sub.add_parser(name, help=f"run the built-in {name} benchmark grid")
        tp.add_argument("--out-dir", default=None)
        tp.add_argument("--threads", type=int, default=1)
        tp.add_argument("--replicates", type=int, default=100)
        tp.add_argument("--base-seed", type=int, default=bench.DEFAULT_BASE_SEED)
        tp.set_defaults(func=_cmd_table(fn, default_dir))

    signals = sub.add_parser("signals", help="emit a test curve (or its coefficients) as CSV")
    signals.add_argument("--name", required=True)
    signals.add_argument("--p", type=int, required=True)
    signals.add_argument("--wavelet", action="store_true")
    signals.add_argument("--out", default=None)
    signals.set_defaults(func=_cmd_signals)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RankDeficientError, DegenerateGapError, EmptySelectionError, ExperimentFailedError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
