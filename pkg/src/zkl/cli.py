"""``zkl <subcommand> [flags] [--config PATH]``.

Exit status: 0 when every check passes, 1 when an assumption or acceptance
check fails, 2 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import AssumptionError, BlowUpError, DivergenceError
from .harness import EXPERIMENTS, ExperimentConfig, run
from .storage import ConfigError, jsonable, parse_flat

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2

# flag name -> (dotted config key, help)
_COMMON = {
    "eps": ("params.eps", "small parameter"),
    "theta_e": ("params.theta_e", "electron temperature ratio"),
    "alpha": ("params.alpha", "ion sound parameter"),
    "eps_list": ("sweep.eps_list", "comma-separated eps values for sweeps"),
    "grid": ("grid.points", "grid points per axis"),
    "dim": ("grid.dim", "grid dimension (1 or 3)"),
    "out": ("output.dir", "output directory"),
    "seed": ("seed", "seed for randomized samples"),
}

_SPECIFIC = {
    "spectrum": {"r_max": "largest |xi|", "samples": "number of radii", "direction": "xi direction, e.g. 1,0.3,0.5"},
    "resonances": {"r_max": "search range for roots"},
    "transparency": {"n_radii": "radii per eps", "bound_c": "fail when the fitted C exceeds this",
                     "direction": "xi direction"},
    "zakharov": {"dt": "time step", "T": "final time", "datum": "modulated | plane | zero",
                 "record_every": "steps between series rows"},
    "wkb-residual": {"dt": "Zakharov time step", "snapshot_time": "time of the Zakharov snapshot",
                     "datum": "built-in envelope", "s": "Sobolev index of the residual norm"},
    "converge": {"T": "final time", "order": "WKB order of the comparison profile", "s": "Sobolev index",
                 "dt_divisor": "Euler-Maxwell dt = eps^2 / this", "zakharov_dt": "reference time step",
                 "datum": "built-in envelope", "threshold": "minimal fitted order"},
    "pdo-bench": {"s": "Sobolev index", "profile": "critical | oscillatory"},
    "verify": {"mode": "quick | full"},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zkl", description="Euler-Maxwell / Zakharov limit experiments.")
    parser.add_argument("--version", action="version", version=f"zkl {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=Path, help="flat key = value config file")
        p.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
        for flag, (_, text) in _COMMON.items():
            p.add_argument("--" + flag.replace("_", "-"), dest=flag, help=text)
        for flag, text in _SPECIFIC[name].items():
            p.add_argument("--" + flag.replace("_", "-"), dest="run_" + flag, help=text)
        if name == "verify":
            p.add_argument("mode_pos", nargs="?", choices=("quick", "full"), help="audit scale")
    return parser


def resolve_config(args) -> ExperimentConfig:
    """Config file first, then defaults for missing keys, then explicit flags."""
    raw = {}
    if args.config is not None:
        try:
            raw = parse_flat(args.config.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    raw.setdefault("experiment", (args.experiment, None))
    raw.setdefault("output.dir", (f"zkl-out/{args.experiment}", None))
    for flag, (key, _) in _COMMON.items():
        val = getattr(args, flag, None)
        if val is not None:
            raw[key] = (val, None)
    for flag in _SPECIFIC[args.experiment]:
        val = getattr(args, "run_" + flag, None)
        if val is not None:
            raw["run." + flag] = (val, None)
    if getattr(args, "mode_pos", None):
        raw["run.mode"] = (args.mode_pos, None)
    cfg = ExperimentConfig.from_entries(raw)
    if cfg.experiment != args.experiment:
        raise ConfigError(f"config is for {cfg.experiment!r} but the subcommand is {args.experiment!r}",
                          raw["experiment"][1], "experiment")
    return cfg


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:1] == ["run"]:
        argv = argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = resolve_config(args)
        if args.print_config:
            sys.stdout.write(cfg.to_text())
            return EXIT_OK
        bundle = run(cfg)
    except ConfigError as exc:
        print(f"zkl: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssumptionError as exc:
        print(f"zkl: check failed: {exc}", file=sys.stderr)
        print(f"zkl: witness: {jsonable(exc.witness)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (BlowUpError, DivergenceError) as exc:
        print(f"zkl: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except ValueError as exc:
        print(f"zkl: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    summary = {k: v for k, v in bundle.summary.items() if k != "seconds"}
    print(json.dumps(jsonable({"experiment": cfg.experiment, "output": cfg.output_dir, "ok": bundle.ok,
                      "summary": summary, "failures": bundle.failures}), sort_keys=True))
    if not bundle.ok:
        for f in bundle.failures:
            print(f"zkl: FAIL {f.get('assumption')}: {f.get('check')} (witness: {jsonable(f.get('witness'))})", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
