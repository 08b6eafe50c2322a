"""Command-line interface.

    higgscs figure fig3 --out fig3.csv
    higgscs stats --flavor sphere --n-max 10 --lambda 0.1 --mu 0.5
    higgscs sweep --n-max 10,20 --lambda 0,0.1 --mu 0.5,1 --out sweep.csv
    higgscs verify --n-max-max 20

Exit status: 0 success, 1 invariant breach (verify), 2 configuration error.
Settings come from flags, then ``--config FILE`` (JSON), then built-in defaults.
"""
from __future__ import annotations

import argparse
import json
import sys

from .reports import (
    FAULTS,
    FIGURES,
    ConfigError,
    RunConfig,
    run_figure,
    run_stats,
    run_sweep,
    run_verify,
)

CONFIG_KEYS = {"n_list", "lam_list", "mu_list", "phi_points", "flavor", "out", "n_max_max", "tolerances", "figure_id"}


def _list(conv):
    def parse(text):
        try:
            return tuple(conv(item) for item in text.split(",") if item.strip())
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc

    return parse


def _mu(text):
    z = complex(text.strip().replace(" ", ""))
    return z.real if z.imag == 0 else z


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="higgscs", description="Nonlinear coherent states on flat space and on a sphere.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with default settings")
        p.add_argument("--out", help="output CSV path ('-' for stdout)")
        p.add_argument("--phi-points", type=int, dest="phi_points")

    fig = sub.add_parser("figure", help="write the data behind one figure as CSV")
    fig.add_argument("figure_id", choices=FIGURES)
    common(fig)
    fig.add_argument("--n-max", type=_list(int), dest="n_list", help="comma-separated levels N")
    fig.add_argument("--lambda", type=_list(float), dest="lam_list", help="comma-separated curvatures")
    fig.add_argument("--mu", type=_list(_mu), dest="mu_list", help="comma-separated mu values")

    stats = sub.add_parser("stats", help="statistics of a single coherent state")
    common(stats)
    stats.add_argument("--flavor", choices=("flat", "sphere"))
    stats.add_argument("--n-max", type=_list(int), dest="n_list")
    stats.add_argument("--lambda", type=_list(float), dest="lam_list")
    stats.add_argument("--mu", type=_list(_mu), dest="mu_list")
    stats.add_argument("--pn-out", help="also write the photon-number table here")

    sweep = sub.add_parser("sweep", help="Cartesian sweep over N x lambda x mu")
    common(sweep)
    sweep.add_argument("--n-max", type=_list(int), dest="n_list")
    sweep.add_argument("--lambda", type=_list(float), dest="lam_list")
    sweep.add_argument("--mu", type=_list(_mu), dest="mu_list")

    verify = sub.add_parser("verify", help="run the invariant checks")
    verify.add_argument("--config", help="JSON file with default settings")
    verify.add_argument("--tol", type=float, help="override every check tolerance")
    verify.add_argument("--n-max-max", type=int, dest="n_max_max", help="check levels N = 0..this")
    verify.add_argument("--lambda", type=_list(float), dest="lam_list")
    verify.add_argument("--inject-fault", choices=FAULTS, help="corrupt an ingredient to exercise the checker")
    return parser


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("n_list", "lam_list", "mu_list"):
        if key in data:
            data[key] = tuple(_mu(str(v)) if key == "mu_list" else v for v in data[key])
    return data


def make_config(args) -> RunConfig:
    settings = _load_config(getattr(args, "config", None))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if getattr(args, "tol", None) is not None:
        from .reports import DEFAULT_TOLERANCES

        settings["tolerances"] = {name: args.tol for name in DEFAULT_TOLERANCES}
    return RunConfig(command=args.command, **settings).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = make_config(args)
        if args.command == "figure":
            path = run_figure(config)
            if path is not None:
                print(f"wrote {path}", file=sys.stderr)
        elif args.command == "stats":
            run_stats(config, pn_out=args.pn_out)
        elif args.command == "sweep":
            run_sweep(config)
        else:
            report = run_verify(config, fault=args.inject_fault)
            sys.stdout.write(report.text())
            return report.exit_code
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
