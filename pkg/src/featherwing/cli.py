"""Command line interface.

Subcommands: coeffs, eigen, flutter-speed, simulate, compare.  Exit codes:
0 success, 2 config error, 3 numeric/divergence error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import load_config
from .errors import ConfigError, NumericError
from .experiment import (closed_loop_at, coefficients_table, compare_laws,
                         eigen_rows, model_at_speed, run_experiment,
                         write_eigen_csv)
from .stability import find_flutter_speed

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="featherwing",
        description="Reduced-order flutter model of a feathered wing with "
                    "speed-gradient feather control.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_law=False):
        p.add_argument("--config", required=True,
                       help="config file path or the preset name 'paper-sec6'")
        if with_law:
            p.add_argument("--law", choices=("sg", "nonma", "ma", "none"),
                           default=None,
                           help="override the configured control law "
                                "('none' = open loop)")
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (default: [output] dir)")
        p.add_argument("--override", action="append", default=[],
                       metavar="SECTION.KEY=VALUE",
                       help="override a config value (repeatable)")

    common(sub.add_parser("coeffs", help="print the modal coefficient table"))

    p_eigen = sub.add_parser("eigen",
                             help="spectral abscissa over an airspeed grid")
    common(p_eigen, with_law=True)
    p_eigen.add_argument("--v-min", type=float, default=0.0)
    p_eigen.add_argument("--v-max", type=float, default=None,
                         help="default: 2x the configured airspeed")
    p_eigen.add_argument("--points", type=int, default=41)

    p_fl = sub.add_parser("flutter-speed",
                          help="bisect the abscissa sign change over airspeed")
    common(p_fl, with_law=True)
    p_fl.add_argument("--v-lo", type=float, required=True)
    p_fl.add_argument("--v-hi", type=float, required=True)
    p_fl.add_argument("--tol", type=float, default=1e-4)

    common(sub.add_parser("simulate", help="run one law and write artifacts"),
           with_law=True)
    common(sub.add_parser("compare", help="run all three laws and rank them"))
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config, overrides=args.override)
        law = getattr(args, "law", None) or cfg.control_law

        if args.command == "coeffs":
            model = model_at_speed(cfg, cfg.wing.airspeed)
            sys.stdout.write(coefficients_table(model))
        elif args.command == "eigen":
            v_hi = args.v_max if args.v_max is not None else (
                2.0 * cfg.wing.airspeed if cfg.wing.airspeed > 0 else 1.0)
            grid = np.linspace(args.v_min, v_hi, args.points)
            rows = eigen_rows(cfg, grid, law)
            header = ["V", "re_max"] + [
                f"freq_{i + 1}" for i in range(len(rows[0]) - 2)]
            sys.stdout.write(",".join(header) + "\n")
            for row in rows:
                sys.stdout.write(",".join("%.17g" % v for v in row) + "\n")
            if args.out is not None:
                args.out.mkdir(parents=True, exist_ok=True)
                write_eigen_csv(args.out / "eigen.csv", rows)
        elif args.command == "flutter-speed":
            result = find_flutter_speed(
                lambda v: closed_loop_at(cfg, v, law),
                args.v_lo, args.v_hi, args.tol)
            for lo, hi, a_mid in result.history:
                sys.stdout.write(f"bracket [{lo:.10g}, {hi:.10g}] "
                                 f"abscissa(mid)={a_mid:.10g}\n")
            sys.stdout.write(f"V_flat = {result.v_flat:.10g}\n")
        elif args.command == "simulate":
            paths = run_experiment(cfg, out_dir=args.out, law=law)
            for name, path in paths.items():
                sys.stdout.write(f"{name}: {path}\n")
        elif args.command == "compare":
            report = compare_laws(cfg, out_dir=args.out)
            for law_name, metrics in report.items():
                sys.stdout.write(
                    f"{law_name}: |beta(T)|={metrics['beta_final']:.6g} "
                    f"t_half={metrics['time_to_half_beta']:.6g} "
                    f"E(T)={metrics['energy_final']:.6g}\n")
        return 0
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except NumericError as exc:
        sys.stderr.write(f"numeric error: {exc}\n")
        return EXIT_NUMERIC
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
