"""Command line interface.

Subcommands:

* ``run --config FILE [--out DIR]``: execute the configured history and
  write ``history.jsonl`` and ``metrics.json`` into the output directory.
* ``validate --config FILE``: dry-check a config (society axioms, roster,
  initial state, strategy) without running any steps.
* ``audit --log FILE``: replay a full-snapshot log against every
  invariant and print the report as JSON.
* ``stats --log FILE [--format json|csv]``: emit the per-step metrics.
  CSV columns, in order: ``t, total_power, gini, owned_0..owned_{n-1}``.

Exit codes: 0 success, 1 violations found, 2 usage or IO errors.  Set
``EVERWILL_LOG_LEVEL`` to tune diagnostic verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .config import load_config
from .errors import AuditInputError, ConfigError, EverwillError
from .harness import build_initial_state, build_roster, resolve_society, run_history, write_run_outputs
from .invariants import check_invariants
from .logio import read_log
from .rng import derive_stream
from .strategies import make_strategy

log = logging.getLogger("everwill")


def _configure_logging() -> None:
    level = os.environ.get("EVERWILL_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _load(path: str):
    try:
        return load_config(path)
    except ConfigError:
        raise
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config {path}: {exc}", file=sys.stderr)
        raise SystemExit(2) from exc


def cmd_run(args) -> int:
    try:
        config = _load(args.config)
    except ConfigError as exc:
        for error in exc.errors:
            print(f"config error: {error}", file=sys.stderr)
        return 2
    try:
        history, metrics = run_history(config)
    except EverwillError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    out_dir = args.out or config.log.get("dir") or "runs"
    log_path, metrics_path = write_run_outputs(history, metrics, out_dir)
    print(f"history: {log_path}")
    print(f"metrics: {metrics_path}")
    if config.audit:
        report = check_invariants(history)
        print(json.dumps(report.to_dict(), indent=2))
        if not report.ok:
            return 1
    return 0


def cmd_validate(args) -> int:
    try:
        config = _load(args.config)
    except ConfigError as exc:
        for error in exc.errors:
            print(f"config error: {error}", file=sys.stderr)
        return 1
    try:
        society = resolve_society(config)
        roster = build_roster(config) if config.model == "golden" else None
        name = config.strategy["name"]
        strategy = make_strategy(
            config.model,
            name,
            config.strategy.get("params", {}),
            rng=derive_stream(config.seed, f"strategy:{name}"),
        )
        build_initial_state(config, society, roster, strategy)
    except (EverwillError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    print(f"ok: {config.model} run, {config.steps} steps, seed {config.seed}")
    return 0


def cmd_audit(args) -> int:
    try:
        history = read_log(args.log)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read log {args.log}: {exc}", file=sys.stderr)
        return 2
    try:
        report = check_invariants(history)
    except AuditInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(report.to_dict(), indent=2))
    return 0 if report.ok else 1


def cmd_stats(args) -> int:
    try:
        history = read_log(args.log)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read log {args.log}: {exc}", file=sys.stderr)
        return 2
    if history.footer is None or "metrics" not in history.footer:
        print("error: log has no metrics footer", file=sys.stderr)
        return 2
    metrics = history.footer["metrics"]
    if args.format == "json":
        print(json.dumps(metrics, indent=2))
        return 0
    persons = len(metrics["ownership"][0]) if metrics["ownership"] else 0
    header = ["t", "total_power", "gini"] + [f"owned_{p}" for p in range(persons)]
    print(",".join(header))
    for t, counts in enumerate(metrics["ownership"]):
        row = [str(t), repr(metrics["total_power"][t]), repr(metrics["gini"][t])]
        row += [str(c) for c in counts]
        print(",".join(row))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="everwill", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured history")
    p_run.add_argument("--config", required=True, help="path to a JSON run config")
    p_run.add_argument("--out", help="output directory (default: config log.dir or ./runs)")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="dry-check a config without running")
    p_val.add_argument("--config", required=True, help="path to a JSON run config")
    p_val.set_defaults(func=cmd_validate)

    p_audit = sub.add_parser("audit", help="check every invariant over a finished log")
    p_audit.add_argument("--log", required=True, help="path to a history.jsonl")
    p_audit.set_defaults(func=cmd_audit)

    p_stats = sub.add_parser("stats", help="emit per-step metrics from a log")
    p_stats.add_argument("--log", required=True, help="path to a history.jsonl")
    p_stats.add_argument("--format", choices=("json", "csv"), default="json")
    p_stats.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
