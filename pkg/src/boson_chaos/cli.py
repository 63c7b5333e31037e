"""Command-line front end.

Subcommands map one-to-one onto the experiment runners:

    boson-chaos ratio-sweep   --n 7 --l 7 --w 0.2,0.6,1.0,2.0,4.0 --out runs/sweep
    boson-chaos ratio-energy  --n 7 --l 7 --w 0.6 --out runs/resolved
    boson-chaos classify      --n 7 --l 7 --w 0.6 --out runs/profiles
    boson-chaos survival      --n 7 --l 7 --w 0.6 --state 1,1,1,1,1,1,1 --out runs/mott
    boson-chaos survival      --n 7 --l 7 --w 0.6 --c-range 2,3 --k 1 --out runs/extremes
    boson-chaos pr-sweep      --n 8 --l 8 --w 0.6 --c 2.25 --k 6 --out runs/prsweep
    boson-chaos eta-scan      --n 8 --l 8 --w 0.6 --state 1,1,1,1,1,1,1,1 --out runs/eta
    boson-chaos eta-pr        --n 8 --l 8 --w 0.6 --out runs/etapr

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

import argparse
import logging
import sys

import numpy as np

from .ensemble import (
    DEFAULT_REALIZATIONS,
    DEFAULT_SEED,
    RunConfig,
    eta_scan_values,
    run_classify,
    run_eta_scan,
    run_eta_vs_pr,
    run_pr_sweep,
    run_ratio_energy,
    run_ratio_sweep,
    run_survival,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _parse_floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from err


def _parse_state(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"not comma-separated occupations: {text!r}") from err


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--quiet", action="store_true", help="suppress progress logging")
    p.add_argument("--n", type=int, required=True, help="particle count")
    p.add_argument("--l", type=int, required=True, help="site count")
    p.add_argument("--w", type=_parse_floats, required=True,
                   help="disorder amplitude(s), comma separated for sweeps")
    p.add_argument("--realizations", type=int, default=DEFAULT_REALIZATIONS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed")
    p.add_argument("--j", type=float, default=None, help="hopping override")
    p.add_argument("--u", type=float, default=None, help="interaction override")
    p.add_argument("--beta", type=float, default=None, help="incommensuration override")
    p.add_argument("--delta-e", type=float, default=0.74, help="energy bin width")
    p.add_argument("--trim", type=float, default=0.10, help="spectral edge trim fraction")
    p.add_argument("--window", type=int, default=25, help="rolling-average grid points")
    p.add_argument("--tmin", type=float, default=0.1)
    p.add_argument("--tmax", type=float, default=1e6)
    p.add_argument("--ppd", type=int, default=100, help="time-grid points per decade")
    p.add_argument("--bins", type=int, default=50, help="DOS histogram bins")
    p.add_argument("--ratio-window", type=int, default=None,
                   help="levels per energy window (default dim/12)")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel realizations (default: auto)")
    p.add_argument("--max-dim", type=int, default=100_000)
    p.add_argument("--out", required=True, help="output directory")


def _config_from(args) -> RunConfig:
    return RunConfig(
        n_particles=args.n, n_sites=args.l, w_values=args.w,
        realizations=args.realizations, master_seed=args.seed,
        j=args.j, u=args.u, beta=args.beta, delta_e=args.delta_e,
        t_min=args.tmin, t_max=args.tmax, points_per_decade=args.ppd,
        rolling_window=args.window, trim=args.trim, dos_bins=args.bins,
        ratio_window=args.ratio_window, workers=args.workers,
        max_dim=args.max_dim,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boson-chaos",
        description="Spectral chaos diagnostics and survival-probability "
                    "dynamics for interacting bosons on a quasiperiodic chain",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ratio-sweep", help="mean spacing ratio vs disorder")
    _common_flags(p)

    p = sub.add_parser("ratio-energy", help="energy-resolved ratio + DOS")
    _common_flags(p)

    p = sub.add_parser("classify", help="crowding/energy/PR profile of every state")
    _common_flags(p)

    p = sub.add_parser("survival", help="survival-probability pipeline")
    _common_flags(p)
    p.add_argument("--state", type=_parse_state, action="append", default=None,
                   help="initial state as comma occupations; repeatable")
    p.add_argument("--c-range", type=_parse_floats, default=None,
                   help="crowding window lo,hi for extreme-PR selection")
    p.add_argument("--k", type=int, default=1, help="states per PR extreme")

    p = sub.add_parser("pr-sweep", help="survival across PR quantiles at fixed crowding")
    _common_flags(p)
    p.add_argument("--c", type=float, required=True, help="crowding cluster value")
    p.add_argument("--k", type=int, default=6, help="number of PR quantile states")

    p = sub.add_parser("eta-scan", help="effective dimension vs bin width")
    _common_flags(p)
    p.add_argument("--state", type=_parse_state, required=True)
    p.add_argument("--delta-e-min", type=float, default=0.2)
    p.add_argument("--delta-e-max", type=float, default=1.8)
    p.add_argument("--delta-e-step", type=float, default=0.05)

    p = sub.add_parser("eta-pr", help="eta vs PR for every basis state")
    _common_flags(p)

    return parser


def run(args) -> int:
    config = _config_from(args)
    if args.command == "ratio-sweep":
        run_ratio_sweep(config, args.out)
    elif args.command == "ratio-energy":
        run_ratio_energy(config, args.out)
    elif args.command == "classify":
        run_classify(config, args.out)
    elif args.command == "survival":
        c_range = None
        if args.c_range is not None:
            if len(args.c_range) != 2:
                raise ValueError("--c-range needs exactly two values: lo,hi")
            c_range = (args.c_range[0], args.c_range[1])
        run_survival(config, args.out, states=args.state, c_range=c_range, k=args.k)
    elif args.command == "pr-sweep":
        run_pr_sweep(config, args.out, c_value=args.c, k=args.k)
    elif args.command == "eta-scan":
        run_eta_scan(config, args.out, args.state,
                     eta_scan_values(args.delta_e_min, args.delta_e_max,
                                     args.delta_e_step))
    elif args.command == "eta-pr":
        run_eta_vs_pr(config, args.out)
    else:  # pragma: no cover - argparse enforces the choices
        raise ValueError(f"unknown command {args.command!r}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s", stream=sys.stderr,
    )
    try:
        return run(args)
    except ValueError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (RuntimeError, FloatingPointError, np.linalg.LinAlgError) as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
