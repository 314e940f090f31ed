"""Command-line front end.

Subcommands: dispersion, transport, storage, reduce-check (run one
experiment into --out) and preset (list or print the named preset
configs).  Exit codes: 0 success, 2 config error, 3 numerical failure;
errors print one machine-parseable line on stderr.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, configio, protocols
from .configio import ConfigError
from .dynamics import GainRunawayError
from .heatmap import render_heatmap

_SUBCOMMAND_EXPERIMENTS = {
    "dispersion": ("dispersion_scan",),
    "transport": ("transport_single_site", "transport_gaussian"),
    "storage": ("storage",),
    "reduce-check": ("reduction_check",),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nhlattice",
        description="Simulate 1D lattices with phase-modulated complex hopping rates.",
    )
    parser.add_argument("--version", action="version", version=f"nhlattice {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="config document to run")
        p.add_argument("--preset", metavar="NAME", help="named preset to run")
        p.add_argument("--out", metavar="DIR", required=True, help="output directory")
        p.add_argument("--dt", type=float, default=None, help="override integration step")
        p.add_argument("--t-final", type=float, default=None, help="override final time")
        p.add_argument("--format", choices=("csv", "csv+svg"), default="csv",
                       help="artifact set to emit (default: csv)")
        return p

    add_run_command("dispersion", "closed-form dispersion scan over phi and q")
    add_run_command("transport", "single-site or Gaussian transport run")
    add_run_command("storage", "capture/release run in the switchable structure")
    add_run_command("reduce-check", "full sawtooth vs effective chain comparison")

    p = sub.add_parser("preset", help="list presets or print one as a config document")
    p.add_argument("name", nargs="?", help="preset name (omit to list all)")
    p.add_argument("--out", metavar="DIR", help="write <name>.cfg here instead of stdout")
    return parser


def _load_config(args) -> protocols.ExperimentConfig:
    if (args.config is None) == (args.preset is None):
        raise ConfigError("give exactly one of --config or --preset")
    if args.preset is not None:
        config = protocols.preset_config(args.preset)
    else:
        config = configio.read_config(args.config)
    allowed = _SUBCOMMAND_EXPERIMENTS[args.command]
    if config.experiment not in allowed:
        raise ConfigError(
            f"experiment: {config.experiment!r} cannot run under '{args.command}' "
            f"(expected one of: {', '.join(allowed)})"
        )
    timing = config.timing
    if args.dt is not None:
        timing = replace(timing, dt=args.dt)
    if args.t_final is not None:
        timing = replace(timing, t_final=args.t_final)
    if timing is not config.timing:
        config = replace(config, timing=timing)
    return config


def _write_artifacts(result, out_dir: Path, fmt: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    configio.write_text_atomic(out_dir / "manifest.cfg", result.manifest)
    configio.write_metrics(result.metrics, out_dir / "metrics.txt")
    if result.table is not None:
        configio.write_table_csv(result.table, out_dir / "scan.csv")
    if result.trajectory is not None:
        configio.write_trajectory_csv(result.trajectory, out_dir / "trajectory.csv")
        if fmt == "csv+svg":
            title = result.config.preset or result.config.experiment
            svg = render_heatmap(result.trajectory, title=title)
            configio.write_text_atomic(out_dir / "heatmap.svg", svg)


def _run(args) -> int:
    config = _load_config(args)
    result = protocols.run_experiment(config)
    _write_artifacts(result, Path(args.out), args.format)
    print(f"wrote {args.out} ({result.metrics['experiment']}, "
          f"preset={result.metrics['preset']})")
    return 0


def _preset_command(args) -> int:
    if args.name is None:
        for name in protocols.PRESETS:
            cfg = protocols.PRESETS[name]
            print(f"{name}\t{cfg.experiment}")
        return 0
    config = protocols.resolve_config(protocols.preset_config(args.name))
    text = configio.render_config(config)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        configio.write_text_atomic(out / f"{args.name}.cfg", text)
        print(f"wrote {out / (args.name + '.cfg')}")
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "preset":
            return _preset_command(args)
        return _run(args)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except GainRunawayError as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
