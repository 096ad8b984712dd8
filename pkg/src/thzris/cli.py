"""Batch CLI: run one configured sweep and write a result CSV.

Exit code 0 on success.  On failure, a single machine-readable JSON line
is printed to stderr and the exit code is nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .config import ScenarioConfig, SweepSpec, default_scenario, load_config
from .sweep import run_sweep, write_csv

TRACE_HEADER = "sweep_var,value,zeta,direct,trial,iteration,gamma,t_star,delta\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thzris",
        description="Monte-Carlo throughput sweeps for an RIS-assisted THz link "
                    "under the two molecular re-radiation models",
    )
    parser.add_argument("--config", type=Path, default=None,
                        help="TOML scenario config; defaults to the built-in scenario")
    parser.add_argument("--sweep", required=True,
                        help="name of the [sweep.<name>] table to run "
                             "(built-ins: ris_elements, rx_antennas, ris_position_x, frequency)")
    parser.add_argument("--trials", type=int, default=None,
                        help="Monte-Carlo trials per sweep cell (overrides config)")
    parser.add_argument("--seed", type=int, default=None,
                        help="base random seed (overrides [optimizer].rng_seed)")
    parser.add_argument("--zeta", choices=["0", "1", "both"], default=None,
                        help="restrict the re-radiation model (overrides config)")
    parser.add_argument("--direct-link", choices=["on", "off", "both"], default=None,
                        help="restrict the direct-link availability (overrides config)")
    parser.add_argument("--mode", choices=["optimized", "random", "both"], default=None,
                        help="restrict the RIS configuration mode (overrides config)")
    parser.add_argument("--output", type=Path, default=None,
                        help="result CSV path (default: stdout)")
    parser.add_argument("--absorption-table", type=Path, default=None,
                        help="absorption coefficient CSV (overrides config)")
    parser.add_argument("--trace", action="store_true",
                        help="emit per-iteration optimizer rows as CSV on stderr")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes for trials (default 1)")
    return parser


def _restrict(spec: SweepSpec, args: argparse.Namespace) -> SweepSpec:
    updates = {}
    if args.trials is not None:
        updates["trials"] = args.trials
    if args.zeta is not None and args.zeta != "both":
        updates["zeta_values"] = (int(args.zeta),)
    if args.direct_link is not None and args.direct_link != "both":
        updates["direct_link"] = (args.direct_link == "on",)
    if args.mode is not None and args.mode != "both":
        updates["modes"] = (args.mode,)
    return dataclasses.replace(spec, **updates) if updates else spec


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config else default_scenario()
        if args.sweep not in config.sweeps:
            raise KeyError(
                f"sweep {args.sweep!r} not defined; available: {sorted(config.sweeps)}"
            )
        spec = _restrict(config.sweeps[args.sweep], args)
        if args.absorption_table is not None:
            config = dataclasses.replace(config, absorption_table=str(args.absorption_table))
            raw = dict(config.raw)
            raw["system"] = dict(raw["system"], absorption_table=str(args.absorption_table))
            config = dataclasses.replace(config, raw=raw)
        seed = args.seed if args.seed is not None else config.optimizer.rng_seed

        trace_stream = None
        if args.trace:
            trace_stream = sys.stderr
            trace_stream.write(TRACE_HEADER)
        rows = run_sweep(spec, config, seed, jobs=max(1, args.jobs),
                         trace_stream=trace_stream)

        if args.output is None:
            write_csv(rows, sys.stdout)
        else:
            args.output.parent.mkdir(parents=True, exist_ok=True)
            with open(args.output, "w", newline="") as fh:
                write_csv(rows, fh)
        return 0
    except Exception as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
