"""Command-line benchmark front end.

Subcommands
-----------
simulate-plant
    Simulate a benchmark plant open-loop and write its trace CSV.
identify
    Run the online identification experiment and write trace.csv,
    epochs.csv and summary.csv (byte-reproducible for a given config).
compare
    Run both learners on identical seeds and write a side-by-side
    compare.csv with timing.

Exit codes: 0 success, 1 internal error, 2 configuration/usage/IO error,
3 plant divergence (the expected outcome for inputs outside the bounded
range). The default output directory is ``T2FNN_OUT_DIR`` or
``./t2fnn-out``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import ParseError, ValidationError, apply_overrides, parse_config
from .errors import DivergedError, NonFiniteUpdateError
from .experiment import compare_learners, run_experiment, simulate_plant

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="t2fnn",
        description="Interval type-2 fuzzy network identification benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="manifest file (flat key=value)")
        p.add_argument("--seed", type=int, help="base seed (run i uses seed+i)")
        p.add_argument("--out-dir", type=Path,
                       default=Path(os.environ.get("T2FNN_OUT_DIR", "t2fnn-out")))
        p.add_argument("--learner", choices=("smc", "gd"))
        p.add_argument("--epochs", type=int)
        p.add_argument("--runs", type=int)
        p.add_argument("--plant", choices=("ex1", "ex2"))

    for name, help_text in (
            ("simulate-plant", "simulate a plant open-loop and dump its trace"),
            ("identify", "run the identification experiment"),
            ("compare", "run both learners on identical seeds")):
        p = sub.add_parser(name, help=help_text)
        common(p)
        if name == "simulate-plant":
            p.add_argument("--samples", type=int, help="steps per epoch override")
    return parser


def _load_config(args):
    if args.config is not None:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as err:
            raise ParseError(f"cannot read config: {err}") from err
        config = parse_config(text)
    else:
        config = parse_config("")
    overrides = dict(seed=args.seed, learner=args.learner, epochs=args.epochs,
                     runs=args.runs, plant=args.plant)
    if getattr(args, "samples", None) is not None:
        overrides["samples_per_epoch"] = args.samples
    return apply_overrides(config, **overrides)


def _cmd_simulate_plant(args):
    from . import traceio

    config = _load_config(args)
    n_total = config.horizon() * config.epochs
    u, y = simulate_plant(apply_overrides(config, samples_per_epoch=n_total))
    path = traceio.write_plant_trace(u, y, config.smc.dt,
                                     Path(args.out_dir) / "plant.csv")
    print(f"wrote {path} ({len(u)} samples, plant={config.plant})")
    return EXIT_OK


def _cmd_identify(args):
    config = _load_config(args)
    report = run_experiment(config, out_dir=args.out_dir)
    print(f"plant={config.plant} learner={config.learner} "
          f"runs={len(report.train_rmse)} epochs={config.epochs}")
    print(f"train RMSE {report.train_rmse_mean:.6g} ± {report.train_rmse_std:.3g}")
    print(f"test  RMSE {report.test_rmse_mean:.6g} ± {report.test_rmse_std:.3g}")
    print(f"wall clock {report.wall_clock_seconds:.2f} s")
    for path in report.trace_paths:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_compare(args):
    from . import traceio

    config = _load_config(args)
    reports = compare_learners(config)
    path = traceio.write_comparison(reports, args.out_dir)
    for name in sorted(reports):
        rp = reports[name]
        print(f"{name}: train {rp.train_rmse_mean:.6g} ± {rp.train_rmse_std:.3g}, "
              f"test {rp.test_rmse_mean:.6g} ± {rp.test_rmse_std:.3g}, "
              f"{rp.wall_clock_seconds:.2f} s")
    print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "simulate-plant": _cmd_simulate_plant,
    "identify": _cmd_identify,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DivergedError as err:
        run = getattr(err, "run_index", None)
        where = f" (run {run})" if run is not None else ""
        print(f"plant diverged{where}: {err}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ParseError, ValidationError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteUpdateError as err:
        run = getattr(err, "run_index", None)
        where = f" (run {run})" if run is not None else ""
        print(f"unstable update{where}: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as err:  # pragma: no cover - defensive
        print(f"internal error: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
