"""Command-line front end.

    semcom run      --config cfg.toml [--seed N] [--out report.json]
    semcom sweep    --config cfg.toml [--seed N] [--out sweep.csv]
    semcom baseline --config cfg.toml [--out baseline.csv]
    semcom lib validate path/to/library.json

Exit codes: 0 success, 1 configuration problem, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import experiment
from .errors import (
    ConfigError,
    CycleDetected,
    DanglingChild,
    DuplicateId,
    LibraryIOError,
    SchemaError,
    SemcomError,
)
from .library import from_file
from .protocol import run_session

_CONFIG_FAILURES = (ConfigError, SchemaError, DuplicateId, DanglingChild,
                    CycleDetected, LibraryIOError)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semcom",
                                     description="Symbol-level semantic communication simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="TOML or JSON experiment file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output path")

    add_common(sub.add_parser("run", help="run one session and print its report as JSON"))
    add_common(sub.add_parser("sweep", help="run the full bandwidth-accuracy sweep to CSV"))
    add_common(sub.add_parser("baseline", help="write only the baseline curve to CSV"))

    lib = sub.add_parser("lib", help="library file utilities")
    lib_sub = lib.add_subparsers(dest="lib_command", required=True)
    validate = lib_sub.add_parser("validate", help="check a library file against all invariants")
    validate.add_argument("path")
    return parser


def cli_main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except _CONFIG_FAILURES as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SemcomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not raises
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "lib":
        lib = from_file(args.path)
        print(f"{args.path}: ok ({len(lib)} nodes, max level {lib.max_level()}, "
              f"{'ambiguous' if lib.ambiguous else 'unambiguous'})")
        return 0

    cfg = experiment.load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)

    if args.command == "run":
        truth = experiment.generate_message(cfg)
        report = run_session(truth, cfg.session_config(seed=cfg.seed))
        text = report.to_json()
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return 0

    if args.command == "sweep":
        points = experiment.run_experiment(cfg, out_path=args.out)
        out = args.out if args.out is not None else cfg.out_path
        saving = experiment.bandwidth_saving(points)
        print(f"wrote {len(points)} rows to {out}")
        if saving is not None:
            print(f"bandwidth saving at matched accuracy: {saving:.4%}")
        return 0

    # baseline
    points = experiment.baseline_curve(cfg)
    out = args.out if args.out is not None else cfg.out_path
    experiment.write_csv(points, out)
    print(f"wrote {len(points)} baseline rows to {out}")
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
