"""
Main Entry Point - soa3 command-line tool

Parses arguments, loads configuration, configures logging and dispatches to
the command handlers. Exit codes: 0 success, 1 failed check, 2 usage or
parameter error.
"""

import argparse
import sys
from typing import List, Optional

from loguru import logger

from src.cli.commands import dispatch
from src.core.config import LoggingConfig, SoaConfig, config, use_config
from src.core.errors import ArrayParseError, ConstructionError


def configure_logging() -> None:
    """
    Configure Loguru logging from ``config.logging``.

    Logs go to stderr; a rotating file sink is added when a log directory is
    configured.
    """
    logger.remove()

    logger.add(
        sys.stderr,
        format=config.logging.format,
        level=config.logging.level,
        colorize=True,
    )

    if config.logging.dir is not None:
        logger.add(
            config.logging.dir / "soa3_{time:YYYY-MM-DD}.log",
            format=config.logging.format,
            level=config.logging.level,
            rotation=config.logging.rotation,
            retention=config.logging.retention,
            compression="zip",
            enqueue=True,
        )

    logger.debug(f"Logging configured: level={config.logging.level}, dir={config.logging.dir}")


def _add_file(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", help="array file, or '-' for standard input")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for every command."""
    parser = argparse.ArgumentParser(
        prog="soa3",
        description="Construct and verify strong orthogonal arrays of strength three",
    )
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--log-level", help="override the configured log level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-oa", help="check the OA property")
    _add_file(p)
    p.add_argument("--strength", "-t", type=int, required=True)

    p = sub.add_parser("verify-soa", help="check the SOA property")
    _add_file(p)
    p.add_argument("--base", "-s", type=int, required=True)
    p.add_argument("--strength", "-t", type=int, required=True)

    p = sub.add_parser("verify-goa", help="check a strength-three GOA (columns a1 b1 c1 a2 ...)")
    _add_file(p)
    p.add_argument("--base", "-s", type=int, required=True)

    p = sub.add_parser("convert", help="map between SOAs and GOAs")
    p.add_argument("direction", choices=["soa-to-goa", "goa-to-soa"])
    _add_file(p)
    p.add_argument("--base", "-s", type=int, required=True)

    p = sub.add_parser("extract-oa", help="collapse an SOA to its underlying OA")
    _add_file(p)
    p.add_argument("--base", "-s", type=int, required=True)

    p = sub.add_parser("branch", help="print the children of one column")
    _add_file(p)
    p.add_argument("--column", "-j", type=int, required=True)
    p.add_argument("--strength", "-t", type=int, required=True)

    p = sub.add_parser("embed", help="find the least extension column")
    _add_file(p)
    p.add_argument("--strength", "-t", type=int, required=True)

    p = sub.add_parser("semi-embed", help="decide semi-embeddability")
    _add_file(p)
    p.add_argument("--strength", "-t", type=int, required=True)

    p = sub.add_parser("max-extend", help="append extension columns while they exist")
    _add_file(p)
    p.add_argument("--strength", "-t", type=int, required=True)
    p.add_argument("--limit", type=int, required=True, help="maximum column count")

    p = sub.add_parser("build-soa", help="build an SOA(n, m, s^3, 3) from an OA")
    p.add_argument("source", choices=["from-embeddable", "from-semi"])
    _add_file(p)
    p.add_argument("--base", "-s", type=int, required=True)

    p = sub.add_parser("construct", help="finite-field constructions")
    kinds = p.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("bush")
    k.add_argument("--s", type=int, required=True)
    k.add_argument("--extended", action="store_true")
    k = kinds.add_parser("rao-hamming")
    k.add_argument("--s", type=int, required=True)
    k.add_argument("--k", type=int, required=True)
    k = kinds.add_parser("ovoid")
    k.add_argument("--s", type=int, required=True)
    k = kinds.add_parser("full-factorial")
    k.add_argument("--s", type=int, required=True)
    k.add_argument("--k", type=int, required=True)
    k = kinds.add_parser("juxtapose")
    k.add_argument("files", nargs=2)

    p = sub.add_parser("net-check", help="check the digit expansion as a (w, k, m)-net")
    _add_file(p)
    p.add_argument("--base", "-s", type=int, required=True)
    p.add_argument("-w", type=int, required=True)
    p.add_argument("-k", type=int, required=True)

    p = sub.add_parser("lhd", help="expand into a Latin hypercube")
    _add_file(p)
    p.add_argument("--seed", type=int, required=True)

    p = sub.add_parser("fixtures", help="built-in reference arrays")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")

    p = sub.add_parser("profile", help="coincidence profile and identity check")
    _add_file(p)
    p.add_argument("--row", "-r", type=int, default=0)
    p.add_argument("--strength", "-t", type=int, required=True)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command.

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(argv)

    try:
        if args.config:
            use_config(SoaConfig.load_from_yaml(args.config))
        if args.log_level:
            config.logging = LoggingConfig(
                **{**config.logging.model_dump(), "level": args.log_level}
            )
    except (FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    configure_logging()

    try:
        return dispatch(args)
    except (ArrayParseError, ValueError) as e:
        logger.debug(f"{args.command} rejected its input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ConstructionError as e:
        logger.warning(f"{args.command} could not complete: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main_entry() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
