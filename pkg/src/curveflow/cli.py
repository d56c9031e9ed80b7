"""Command line entry point.

    curveflow run CONFIG [--key value ...]
    curveflow evolve|steady|analyze|render [--config CONFIG] [--key value ...]

Every config key is also a flag (``--t_end`` or ``--t-end``); flags override
the file and ``CURVEFLOW_OUT`` overrides the file's ``out_dir``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import KEYS, MODES, load_config, resolve
from .errors import ConfigError
from .runner import EXIT_ERROR, run

log = logging.getLogger("curveflow")


def _add_key_flags(parser: argparse.ArgumentParser, skip=()):
    for key in KEYS:
        if key in skip:
            continue
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        parser.add_argument(*flags, dest=key, metavar="VALUE", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curveflow",
        description="Bi-harmonic flow of convex planar curves with forcing.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log resolved config and progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the mode named in a config file")
    p_run.add_argument("config", type=Path)
    _add_key_flags(p_run)

    for mode in MODES:
        p = sub.add_parser(mode, help=f"{mode} (flags mirror config keys)")
        p.add_argument("--config", type=Path, default=None)
        _add_key_flags(p, skip=("mode",))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = {k: getattr(args, k, None) for k in KEYS}
    try:
        if args.command == "run":
            cfg = load_config(args.config, overrides)
        else:
            overrides["mode"] = args.command
            if args.config is not None:
                cfg = load_config(args.config, overrides)
            else:
                cfg = resolve({}, overrides)
    except ConfigError as exc:
        print(f"curveflow: configuration error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    log.info("resolved configuration:\n%s", cfg.echo())
    outcome = run(cfg)
    stream = sys.stdout if outcome.exit_code == 0 else sys.stderr
    print(f"curveflow {cfg.mode}: {outcome.message} -> {cfg.out_dir}", file=stream)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
