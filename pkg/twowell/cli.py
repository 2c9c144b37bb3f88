"""Main CLI entry point for twowell."""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional

from .config import FORMATS, PRESETS, load_config, preset_document, resolve, validate
from .errors import ConfigError, InsufficientCutoffError, InvalidArgumentError, NumericError, TwoWellError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twowell",
        description="twowell - entanglement signatures of a two-well BEC",
    )
    parser.add_argument("--debug", action="store_true", help="Verbose logging")
    parser.add_argument("--log-file", type=str, help="Append log records to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run the scenario described by a JSON config")
    run.add_argument("config", type=str)
    run.add_argument("--format", choices=FORMATS, help="Override output.format")
    run.add_argument("--out", type=str, help="Override output.path")
    run.add_argument("--threads", type=int, default=1, help="Worker threads (0 = one per CPU)")

    check = sub.add_parser("validate", help="Check a config without running it")
    check.add_argument("config", type=str)

    pre = sub.add_parser("preset", help="Print or write a reference configuration")
    pre.add_argument("name", choices=sorted(PRESETS))
    pre.add_argument("--out", type=str, help="Write the config here instead of stdout")
    return parser


def _setup_logging(debug: bool, log_file: Optional[str]) -> None:
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        handlers=handlers,
        force=True,
    )


def _print_diagnostics(diagnostics: list) -> None:
    for diagnostic in diagnostics:
        print(f"error: {diagnostic}", file=sys.stderr)


def _threads(requested: int) -> int:
    if requested < 0:
        raise InvalidArgumentError("--threads must be >= 0")
    return requested or os.cpu_count() or 1


def _cmd_run(args: argparse.Namespace) -> int:
    from .runner import run

    try:
        raw, text = load_config(args.config)
        config = resolve(raw, text)
        run(config, fmt=args.format, threads=_threads(args.threads), output=args.out)
    except ConfigError as e:
        _print_diagnostics(e.diagnostics)
        return EXIT_CONFIG
    except InvalidArgumentError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, InsufficientCutoffError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except TwoWellError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        raw, text = load_config(args.config)
    except ConfigError as e:
        _print_diagnostics(e.diagnostics)
        return EXIT_CONFIG
    diagnostics = validate(raw, text)
    if diagnostics:
        _print_diagnostics(diagnostics)
        return EXIT_CONFIG
    print(f"{args.config}: ok ({raw['scenario']})")
    return EXIT_OK


def _cmd_preset(args: argparse.Namespace) -> int:
    text = json.dumps(preset_document(args.name), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"Wrote preset {args.name} to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    args = _build_parser().parse_args(argv)
    _setup_logging(args.debug, args.log_file)
    commands = {"run": _cmd_run, "validate": _cmd_validate, "preset": _cmd_preset}
    return commands[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
