"""Command-line entry point: ``hpai <command> ...``."""
from __future__ import annotations

import argparse
import csv
import glob
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ConfigError, IngestionError
from .game import Roster, default_roster
from .harness import bootstrap_a2c, load_config, load_resources, run_experiment, bal_table
from .motion import build_motion_db, load_samples_dir, save_motion_db
from .opponent import PAIRING_MODES, BattleLog, build_a2c, extract_counteraction_pairs
from .recordings import write_samples

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    out = Path(args.out or cfg.out)
    if args.bootstrap_only:
        tables = bootstrap_a2c(cfg, out)
        print(f"wrote {len(tables)} A2C table(s) to {out}")
        return EXIT_OK
    report = run_experiment(cfg, out=out)
    print(bal_table(report))
    print(f"outputs in {out}")
    return EXIT_OK


def cmd_build_a2c(args) -> int:
    paths = sorted(glob.glob(args.logs))
    if not paths:
        raise FileNotFoundError(f"no battle logs match {args.logs!r}")
    roster = Roster.load(args.roster) if args.roster else default_roster()
    pairs = []
    for p in paths:
        pairs += extract_counteraction_pairs(BattleLog.load(p), args.pairing)
    table = build_a2c(pairs, roster.ids, roster.ids)
    table.save(args.out)
    print(f"{len(pairs)} counteraction pairs from {len(paths)} log(s) -> {args.out}")
    return EXIT_OK


def cmd_build_motiondb(args) -> int:
    samples = load_samples_dir(args.samples)
    if not samples:
        raise FileNotFoundError(f"no .skel.csv recordings in {args.samples}")
    db = build_motion_db(samples)
    save_motion_db(args.out, db)
    for m in sorted(db):
        print(m, *(f"{v:.2f}" for v in db[m].as_tuple()))
    return EXIT_OK


def cmd_analyze(args) -> int:
    with open(args.series, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise IngestionError(f"{args.series}: no data rows")
    last = rows[-1]
    print(f"final Bal {100 * float(last['bal']):.2f}% (frame {last['frame']}, "
          f"sum AM {float(last['am_sum']):.2f}, sum EM {float(last['em_sum']):.2f})")
    return EXIT_OK


def cmd_gen_recordings(args) -> int:
    paths = write_samples(args.out, args.motions or None)
    print(f"wrote {len(paths)} recordings to {args.out}")
    return EXIT_OK


def cmd_check_config(args) -> int:
    cfg = load_config(args.config)
    load_resources(cfg)
    print(f"ok: {len(cfg.profiles)} profile(s)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hpai", description="Health-promotion fighting-game AI simulator")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="bootstrap A2C tables and run baseline vs HP-AI")
    p.add_argument("--config", help="TOML config (default: bundled experiment)")
    p.add_argument("--bootstrap-only", action="store_true")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("build-a2c", help="build an A2C table from JSONL battle logs")
    p.add_argument("--logs", required=True, help="glob of battle log files")
    p.add_argument("--out", required=True)
    p.add_argument("--roster")
    p.add_argument("--pairing", choices=PAIRING_MODES, default="most_recent")
    p.set_defaults(func=cmd_build_a2c)

    p = sub.add_parser("build-motiondb", help="average skeleton recordings into a motion db")
    p.add_argument("--samples", required=True, help="directory of <motion>__<k>.skel.csv files")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_motiondb)

    p = sub.add_parser("analyze", help="print the final balancedness of a series file")
    p.add_argument("--series", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("gen-recordings", help="write the synthetic reference recordings")
    p.add_argument("--out", required=True)
    p.add_argument("motions", nargs="*")
    p.set_defaults(func=cmd_gen_recordings)

    p = sub.add_parser("check-config", help="validate a config file without running")
    p.add_argument("--config")
    p.set_defaults(func=cmd_check_config)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, IngestionError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
