"""Command line entry point: ``run``, ``replay`` and ``summarize``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .harness import ConfigError, load_config, replay, run_experiment, summarize, validate_config


def _cmd_run(args) -> int:
    config = load_config(args.config) if args.config else validate_config({})
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.algo is not None:
        overrides["algorithms"] = ["sdql", "activation", "sleep"] if args.algo == "all" else [args.algo]
    if args.traces:
        overrides["save_traces"] = True
    if overrides:
        config = validate_config({**config.model_dump(mode="json"), **overrides})
    result = run_experiment(config, workers=args.workers)
    print(f"wrote {result.output_dir} ({len(result.cells)} cells, {result.failed} failed trials)")
    return result.exit_status


def _cmd_replay(args) -> int:
    config = load_config(args.config) if args.config else None
    out = replay(args.scenario, args.trace, args.episode, config)
    report = out.pop("report")
    print(json.dumps(out, indent=1))
    if args.verbose:
        print(json.dumps({k: v for k, v in report.items() if k != "samples"}, indent=1))
    return 0 if out["matches"] else 1


def _cmd_summarize(args) -> int:
    out_csv = Path(args.out) if args.out else Path(args.run_dirs[0]) / "summary.csv"
    text = summarize(args.run_dirs, out_csv)
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cransim", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a configured sweep")
    run.add_argument("config", nargs="?", help="TOML experiment config (defaults if omitted)")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int, help="base seed; trial i uses seed + i")
    run.add_argument("--out", help="output directory")
    run.add_argument("--algo", choices=["sdql", "activation", "sleep", "all"])
    run.add_argument("--workers", type=int, help="worker processes (else $CRANSIM_WORKERS)")
    run.add_argument("--traces", action="store_true", help="save per-trial SDQL traces")
    run.set_defaults(func=_cmd_run)

    rep = sub.add_parser("replay", help="re-run a saved SDQL trial and compare its trace")
    rep.add_argument("scenario")
    rep.add_argument("trace")
    rep.add_argument("--episode", help="episode JSON with radio/hyperparameters and seed")
    rep.add_argument("--config", help="TOML config used when no episode JSON is given")
    rep.set_defaults(func=_cmd_replay)

    summ = sub.add_parser("summarize", help="aggregate existing run directories")
    summ.add_argument("run_dirs", nargs="+")
    summ.add_argument("--out", help="summary CSV path (default: first run dir)")
    summ.set_defaults(func=_cmd_summarize)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid config:\n{exc}", file=sys.stderr)
        return 2
