"""Command-line front end.

Exit codes: 0 on success, 1 on configuration or input errors, 2 when a
verification-style command (verify, stability) finds a failing check.
"""

import argparse
import sys

from .errors import FusionSDError, Infeasible, BadData, BadParameter
from .experiments import (ExperimentConfig, fit_slope, read_result_csv,
                          run_experiment, stability_trials)
from .verify import verify_suite


def _cmd_experiment(args):
    cfg = ExperimentConfig.from_json(args.config)

    def progress(row):
        print(f"N={row.n:5d}  canonical={row.err_canonical:.6e}  "
              f"sobolev={row.err_sobolev:.6e}  memoryless={row.err_memoryless:.6e}  "
              f"state={row.max_state_norm:.4f}  bound={row.apriori_bound:.6e}")

    rows = run_experiment(cfg, csv_path=args.out, progress=progress)
    out = args.out or cfg.out_csv
    if out:
        print(f"wrote {len(rows)} rows to {out}")
    return 0


def _cmd_stability(args):
    cfg = ExperimentConfig.from_json(args.config)
    report = stability_trials(args.trials, cfg, n_blocks=args.n)
    print(f"trials={report['trials']}  N={report['n_blocks']}  order={report['order']}  "
          f"sigma={report['sigma']}  delta={report['delta']}")
    print(f"max state norm {report['max_state_norm']:.10f}  "
          f"certified bound {report['c_bound']:.10f}  violations {report['violations']}")
    print(f"verdict {report['verdict']}")
    return 0 if report["verdict"] == "PASS" else 2


def _cmd_verify(args):
    report = verify_suite()
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status}  {check['name']}: residual {check['residual']:.3e} "
              f"(threshold {check['threshold']:.1e})")
    print("verification " + ("PASSED" if report["passed"] else "FAILED"))
    return 0 if report["passed"] else 2


def _cmd_fit(args):
    rows = read_result_csv(args.csv)
    slope = fit_slope(rows, args.column, min_n=args.min_n)
    print(f"{args.column}: log-log slope {slope:.6f} over {len(rows)} rows")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fusionsd",
        description="Low-bit feedback quantization of fusion-frame measurements")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("experiment", help="run an error-decay sweep from a JSON config")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--out", default=None, help="CSV output path (overrides the config)")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("stability", help="empirical state-norm bound check")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--n", type=int, default=None,
                   help="number of subspaces (default: largest grid entry)")
    p.set_defaults(func=_cmd_stability)

    p = sub.add_parser("verify", help="run the built-in verification suite")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("fit", help="fit a log-log decay slope from a results CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--column", required=True)
    p.add_argument("--min-n", type=int, default=None, dest="min_n")
    p.set_defaults(func=_cmd_fit)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BadParameter, BadData, Infeasible) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FusionSDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
