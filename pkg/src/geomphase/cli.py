"""Command-line experiment runner.

    geomphase run <config.json> [--out PATH] [--no-timestamp]
    geomphase validate <config.json>
    geomphase list-kinds
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import config as cfg, runner
from .errors import ConfigError, GeomPhaseError


def _load(path: str) -> cfg.ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc}"]) from exc
    return cfg.parse_config(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="geomphase", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config and emit CSV")
    p_run.add_argument("config")
    p_run.add_argument("--out", help="output CSV path (overrides the config's 'output')")
    p_run.add_argument(
        "--no-timestamp",
        action="store_true",
        help="omit the created-at metadata line for byte-stable output",
    )

    p_val = sub.add_parser("validate", help="validate a config, listing every problem")
    p_val.add_argument("config")

    sub.add_parser("list-kinds", help="list the available experiment kinds")

    args = parser.parse_args(argv)

    if args.command == "list-kinds":
        for kind in cfg.KINDS:
            print(kind)
        return 0

    try:
        conf = _load(args.config)
    except ConfigError as exc:
        for msg in exc.errors:
            print(f"error: {msg}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(f"ok: {conf.kind} (config {conf.digest})")
        return 0

    out = args.out or conf.output or (Path(args.config).stem + ".csv")
    try:
        table = runner.run(conf)
        runner.emit(table, out, timestamp=not args.no_timestamp)
    except GeomPhaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
