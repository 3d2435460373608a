"""Command line for rendering figures from CSV artifacts.

A figure is described by flags, by an INI file with a [figure] section,
or both; flags win key by key.  Exit code 0 on success and 2 for any
configuration problem (unknown kind, missing file, missing columns, empty
input); a failing invocation never leaves a partial image behind.
"""

from __future__ import annotations

import argparse
import configparser
import sys

from .figspec import KINDS, FigureSpec
from .figures import render

EXIT_OK = 0
EXIT_CONFIG = 2

_SPEC_KEYS = ("kind", "inputs", "out", "title", "dpi", "logx", "logy")


class ConfigError(ValueError):
    """A figure request that cannot be acted on."""


def _parse_bool(text: str, key: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key} must be a boolean, got {text!r}")


def _load_spec_file(path) -> dict[str, str]:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read spec file {path}")
    if "figure" not in parser:
        raise ConfigError(f"spec file {path} has no [figure] section")
    section = dict(parser["figure"])
    for key in section:
        if key not in _SPEC_KEYS:
            raise ConfigError(f"spec file key {key!r} is not valid")
    return section


def _build_spec(args: argparse.Namespace) -> FigureSpec:
    settings: dict[str, str] = {}
    if args.spec:
        settings.update(_load_spec_file(args.spec))
    if args.kind is not None:
        settings["kind"] = args.kind
    if args.input:
        settings["inputs"] = ",".join(args.input)
    if args.out is not None:
        settings["out"] = args.out
    if args.title is not None:
        settings["title"] = args.title
    if args.dpi is not None:
        settings["dpi"] = str(args.dpi)
    if args.logx is not None:
        settings["logx"] = args.logx
    if args.logy is not None:
        settings["logy"] = args.logy

    for key in ("kind", "inputs", "out"):
        if not settings.get(key):
            raise ConfigError(f"{key} is required (flag or spec file)")
    inputs = tuple(
        piece.strip() for piece in settings["inputs"].split(",") if piece.strip()
    )
    try:
        dpi = int(settings.get("dpi", "150"))
    except ValueError as exc:
        raise ConfigError(f"dpi must be an integer, got {settings['dpi']!r}") from exc
    logx = _parse_bool(settings["logx"], "logx") if "logx" in settings else None
    logy = _parse_bool(settings["logy"], "logy") if "logy" in settings else None
    try:
        return FigureSpec(
            inputs=inputs,
            kind=settings["kind"],
            out=settings["out"],
            title=settings.get("title", ""),
            dpi=dpi,
            logx=logx,
            logy=logy,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emhd25-plots",
        description="Render a figure from simulator CSV artifacts.",
    )
    parser.add_argument("--spec", help="INI file with a [figure] section")
    parser.add_argument("--kind", choices=KINDS)
    parser.add_argument(
        "--input",
        action="append",
        help="input CSV path (repeat for a second input)",
    )
    parser.add_argument("--out", help="output image path (.png or .svg)")
    parser.add_argument("--title")
    parser.add_argument("--dpi", type=int)
    parser.add_argument("--logx", choices=("true", "false"))
    parser.add_argument("--logy", choices=("true", "false"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _build_spec(args)
        result = render(spec)
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(result.path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
