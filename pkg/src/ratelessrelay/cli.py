"""Command-line runner for relay Monte-Carlo experiments.

Example::

    ratelessrelay --strategy pdf --eps-sr 0.4 --eps-rd 0.4 --trials 1000 \\
        --out-csv pdf_04_04.csv --out-json pdf_04_04.json --workers 8

``--config FILE`` reads flat ``key = value`` lines whose keys are the long
flag names (``eps-sr = 0.4``); flags given on the command line win.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from ratelessrelay.degree import InvalidDistributionParameters
from ratelessrelay.experiment import (
    ExperimentConfig,
    ExperimentIOError,
    default_workers,
    emit_csv,
    emit_json_summary,
    monte_carlo,
    t_at_fraction,
)
from ratelessrelay.sim import SimConfig

log = logging.getLogger("ratelessrelay")


class ConfigError(ValueError):
    pass


def read_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ratelessrelay",
        allow_abbrev=False,
        description="Monte-Carlo simulation of DF/PDF two-hop relaying with LT-family rateless codes.",
    )
    p.add_argument("--config", help="flat key = value file mirroring these flags")
    p.add_argument("--k", type=int, default=256, help="input symbols per block")
    p.add_argument("--c", type=float, default=0.03, help="robust soliton c")
    p.add_argument("--delta", type=float, default=0.5, help="robust soliton delta")
    p.add_argument("--eps-sr", type=float, default=0.0, help="source-relay erasure probability")
    p.add_argument("--eps-rd", type=float, default=0.0, help="relay-destination erasure probability")
    p.add_argument("--strategy", choices=("single", "df", "pdf"), default="pdf")
    p.add_argument("--source-encoder", choices=("plain", "mblte", "amicable"), default="amicable")
    p.add_argument(
        "--relay-encoder",
        choices=("mblte", "plain", "amicable"),
        default="mblte",
        help="relay selection rules; pdf always encodes dynamically over the recovered set",
    )
    p.add_argument(
        "--second-pick",
        choices=("separate", "s1"),
        default="separate",
        help="where the degree-2 second pick is remembered",
    )
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0, help="master seed (64-bit)")
    p.add_argument("--max-slots", type=int, default=None, help="slot cap per run (default 50*k)")
    p.add_argument("--symbol-size", type=int, default=1, help="payload bytes per symbol")
    p.add_argument("--out-csv", help="per-slot aggregate CSV")
    p.add_argument("--out-json", help="JSON summary")
    p.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker processes (default: $RATELESSRELAY_WORKERS or 1)",
    )
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    early = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    early.add_argument("--config")
    pre, _ = early.parse_known_args(argv)
    if pre.config:
        try:
            file_values = read_config_file(pre.config)
        except ConfigError as exc:
            parser.error(str(exc))
        known = {a.dest: a for a in parser._actions}
        defaults = {}
        for key, raw in file_values.items():
            action = known.get(key)
            if action is None or key in ("config", "help"):
                parser.error(f"unknown key {key!r} in config file {pre.config}")
            if action.choices is not None and raw not in action.choices:
                parser.error(f"config {key}: {raw!r} not one of {sorted(action.choices)}")
            if action.nargs == 0:
                defaults[key] = raw.lower() in ("1", "true", "yes", "on")
                continue
            try:
                defaults[key] = action.type(raw) if action.type else raw
            except ValueError:
                parser.error(f"config {key}: cannot parse {raw!r}")
        parser.set_defaults(**defaults)
    return parser.parse_args(argv)


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    sim = SimConfig(
        k=args.k,
        symbol_size=args.symbol_size,
        c=args.c,
        delta=args.delta,
        eps_sr=args.eps_sr,
        eps_rd=args.eps_rd,
        source_encoder=args.source_encoder,
        relay_encoder=args.relay_encoder,
        strategy=args.strategy,
        max_slots=args.max_slots,
        second_pick=args.second_pick,
    )
    return ExperimentConfig(
        sim=sim,
        trials=args.trials,
        master_seed=args.seed,
        workers=args.workers if args.workers is not None else default_workers(),
        out_csv=args.out_csv,
        out_json=args.out_json,
    )


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(args)
    except (ValueError, InvalidDistributionParameters) as exc:
        print(f"ratelessrelay: invalid configuration: {exc}", file=sys.stderr)
        return 2

    for path in (cfg.out_csv, cfg.out_json):
        parent = os.path.dirname(os.path.abspath(path)) if path else None
        if parent and not os.path.isdir(parent):
            print(f"ratelessrelay: output directory {parent} does not exist (for {path})", file=sys.stderr)
            return 1

    log.info("running %d trials of %s", cfg.trials, cfg.sim)
    agg = monte_carlo(cfg)
    try:
        if cfg.out_csv:
            emit_csv(agg, cfg.out_csv)
        if cfg.out_json:
            emit_json_summary(agg, cfg.out_json, cfg)
    except ExperimentIOError as exc:
        print(f"ratelessrelay: {exc}", file=sys.stderr)
        return 1

    t50 = t_at_fraction(agg, "dest", 0.5)
    print(
        f"strategy={cfg.sim.strategy} eps_sr={cfg.sim.eps_sr} eps_rd={cfg.sim.eps_rd} "
        f"trials={agg.trials} t@50%(dest)={t50 if t50 is not None else 'not reached'} "
        f"incomplete={agg.incomplete}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
