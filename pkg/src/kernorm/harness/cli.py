"""Command-line entry point ``kernorm``.

Subcommands: ``test`` (one dataset, one method), ``experiment`` (preset or
config file), ``oracle`` (brute-force validation suites), ``bound`` (Type-II
bound calculator), ``presets`` and ``version``.

Exit codes: 0 success, 1 other failure, 2 configuration error,
3 ingestion error, 4 numeric error.
"""

import argparse
import logging
import sys

from .. import __version__
from ..baselines import energy_test, hz_test, lmmda_test
from ..errors import ConfigurationError, KernormError
from ..linalg import KernelSpec
from ..lmmd import Type2BoundInputs, run_test, type2_bound
from ..synthetic import GaussianSpec, sample
from .config import METHODS, DataSource, ExperimentConfig, ExperimentKind, _grid, _split, load_config, preset_names
from .experiment import _rp, run_experiment
from .io import load_csv
from .report import FORMATS, emit_report

log = logging.getLogger("kernorm")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _add_common(p):
    p.add_argument("--seed", type=int, default=None, help="root seed")
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="parallel workers (default: $KERNORM_WORKERS or CPU count)")
    p.add_argument("--alpha", type=float, default=None, help="test level")
    p.add_argument("--B", dest="B", default=None, help="Monte-Carlo replicates (experiment: a grid is allowed)")


def build_parser():
    parser = argparse.ArgumentParser(prog="kernorm", description="Kernel normality tests in an RKHS.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test one dataset for Gaussianity")
    _add_common(t)
    src = t.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="CSV file of observations (rows)")
    src.add_argument("--synthetic", action="store_true", help="draw a Gaussian sample instead")
    t.add_argument("--label-column")
    t.add_argument("--keep-labels", help="comma-separated labels to keep")
    t.add_argument("--scale", type=float)
    t.add_argument("--d", type=_positive_int, default=5)
    t.add_argument("--n", type=_positive_int, default=200)
    t.add_argument("--delta", type=float, default=0.0, help="mean shift of the synthetic sample")
    t.add_argument("--lam", type=float, default=0.5, help="covariance scale of the synthetic sample")
    t.add_argument("--method", choices=METHODS, default="lmmd")
    t.add_argument("--kernel", choices=("linear", "gaussian"), default="linear")
    t.add_argument("--sigma-sq", type=float, default=1.0)
    t.add_argument("--null", choices=("empirical", "known"), default="empirical",
                   help="known: N(0, diag(null_lam / r^2)); empirical: fitted to the data")
    t.add_argument("--null-lam", type=float, default=0.5)

    e = sub.add_parser("experiment", help="run a preset or config file")
    e.add_argument("config", help="preset name or path to an .ini file")
    _add_common(e)
    e.add_argument("--replicates", type=_positive_int)
    e.add_argument("--n-grid", help="e.g. 100,200,300 or 100:500:100")
    e.add_argument("--d-grid")
    e.add_argument("--methods", help="comma-separated subset of " + ",".join(METHODS))
    e.add_argument("--data", help="CSV file for real-data experiments")
    e.add_argument("--paper-scale", action="store_true", help="use the full-size replicate counts")
    e.add_argument("--timing", action="store_true", help="record mean elapsed time per trial")
    e.add_argument("--out", default="results", help="output directory")
    e.add_argument("--format", default="csv,svg", help="comma-separated subset of " + ",".join(FORMATS))
    e.add_argument("--quiet", action="store_true")

    o = sub.add_parser("oracle", help="run the brute-force validation suites")
    o.add_argument("suites", nargs="*")

    b = sub.add_parser("bound", help="evaluate the Type-II error bound over a grid of n")
    b.add_argument("--L", type=float, required=True)
    b.add_argument("--M", type=float, required=True)
    b.add_argument("--m2", type=float, required=True)
    b.add_argument("--q", type=float, required=True)
    b.add_argument("--alpha", type=float, default=0.05)
    b.add_argument("--B", type=_positive_int, default=250)
    b.add_argument("--n-grid", default="100:1000:100")
    b.add_argument("--c-p0", type=float, default=1.0)

    sub.add_parser("presets", help="list shipped presets")
    sub.add_parser("version", help="print the version")
    return parser


def _cmd_test(args):
    alpha = 0.05 if args.alpha is None else args.alpha
    B = 250 if args.B is None else int(args.B)
    seed = 0 if args.seed is None else args.seed
    if args.data:
        keep = tuple(_split(args.keep_labels)) if args.keep_labels else None
        X = load_csv(args.data, args.label_column, keep, args.scale)
    else:
        X = sample(GaussianSpec(args.delta, args.lam, args.d), args.n, seed)
    kernel = KernelSpec(args.kernel, args.sigma_sq)
    d = X.shape[1]
    cov = GaussianSpec(0.0, args.null_lam, d).covariance_spec() if args.null == "known" else None
    if cov is not None and kernel.kind.value != "linear":
        raise ConfigurationError("a known null is only available with the linear kernel")
    if args.method == "lmmd":
        res = run_test(X, kernel, cov, alpha, B, seed, workers=args.workers)
    elif args.method == "lmmda":
        res = lmmda_test(X, kernel, cov, alpha, n_draws=B, seed=seed)
    elif args.method == "hz":
        res = hz_test(X, alpha, B, seed)
    elif args.method == "ed":
        res = energy_test(X, alpha, B, seed=seed)
    else:
        config = ExperimentConfig(name="test", experiment=ExperimentKind.DIM_STUDY, alpha=alpha,
                                  B_grid=(B,), baseline_B=B, kernel=kernel, null_mode=args.null,
                                  null_lam=args.null_lam, methods=("rp",), workers=1)
        res = _rp(X, config, d, B, seed)
        print(f"method=rp n={len(X)} d={d} reject={bool(res)}")
        return 0
    print(f"method={args.method} n={len(X)} d={d} statistic={res.statistic:.6g} "
          f"threshold={res.threshold:.6g} reject={res.reject} seed={seed}")
    return 0


def _experiment_config(args):
    config = load_config(args.config, paper_scale=args.paper_scale)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.alpha is not None:
        changes["alpha"] = args.alpha
    if args.B is not None:
        changes["B_grid"] = _grid(args.B)
    if args.replicates is not None:
        changes["replicates"] = args.replicates
    if args.n_grid:
        changes["n_grid"] = _grid(args.n_grid)
    if args.d_grid:
        changes["d_grid"] = _grid(args.d_grid)
    if args.methods:
        changes["methods"] = tuple(m.lower() for m in _split(args.methods))
    if args.timing:
        changes["timing"] = True
    if args.data:
        src = config.data
        changes["data"] = DataSource(args.data, src.label_column, src.keep_labels, src.scale)
    return config.replace(**changes)


def _cmd_experiment(args):
    config = _experiment_config(args)
    formats = tuple(_split(args.format))
    if not formats or set(formats) - set(FORMATS):
        raise ConfigurationError(f"--format must be a subset of {FORMATS}, got {args.format!r}")

    def progress(done, total):
        if not args.quiet and (done == total or done % max(1, total // 20) == 0):
            print(f"\r{config.name}: {done}/{total} trials", end="\n" if done == total else "",
                  file=sys.stderr, flush=True)

    rows = run_experiment(config, progress=progress)
    for path in emit_report(rows, args.out, formats):
        print(path)
    return 0


def _cmd_oracle(args):
    from ..oracle import SUITES, run_oracles

    unknown = set(args.suites) - set(SUITES)
    if unknown:
        raise ConfigurationError(f"unknown oracle suites {sorted(unknown)}; choose from {sorted(SUITES)}")
    failed = 0
    for res in run_oracles(args.suites):
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}")
        failed += not res.passed
    return 4 if failed else 0


def _cmd_bound(args):
    print("n,bound")
    for n in _grid(args.n_grid):
        inputs = Type2BoundInputs(args.L, args.M, args.m2, args.q, args.alpha, args.B, n, args.c_p0)
        value = type2_bound(inputs) if inputs.applicable else float("nan")
        print(f"{n},{value:.6g}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "version":
            print(f"kernorm {__version__}")
            return 0
        if args.command == "presets":
            for name in preset_names():
                print(name)
            return 0
        handler = {"test": _cmd_test, "experiment": _cmd_experiment,
                   "oracle": _cmd_oracle, "bound": _cmd_bound}[args.command]
        return handler(args)
    except KernormError as exc:
        print(f"kernorm: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"kernorm: error: {exc}", file=sys.stderr)
        return ConfigurationError.exit_code
    except OSError as exc:
        print(f"kernorm: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
