"""
tmoebius command line

Usage: tmoebius <command> [options]

Every command prints JSON by default; --format csv|table switches to a
tabular rendering. Invalid requests exit with status 1 and a message on
stderr, failed verification suites with status 2.
"""
import argparse
import logging
import sys
from typing import List, NoReturn, Optional

from config import LOG_LEVEL, get_config
from commands import get_registered_commands
from commands.common import add_common_arguments
from commands.output import render
from tmoebius import __version__
from tmoebius.errors import InvalidRequestError, TMoebiusError

logger = logging.getLogger("tmoebius")


class RequestParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors surface as InvalidRequestError"""

    def error(self, message: str) -> NoReturn:
        raise InvalidRequestError(message)


def build_parser() -> RequestParser:
    parser = RequestParser(prog="tmoebius", description="Floor-diagram engine for tropical Möbius strips")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=RequestParser)
    for name, command in sorted(get_registered_commands().items()):
        sub = subparsers.add_parser(name, help=command["description"], description=command["description"])
        add_common_arguments(sub)
        if command["configure"]:
            command["configure"](sub)
        sub.set_defaults(handler=command["function"])
    return parser


def _configure_logging() -> None:
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    _configure_logging()
    logger.debug(f"Configuration: {get_config()}")
    try:
        args = build_parser().parse_args(argv)
        result = args.handler(args)
    except (TMoebiusError, ValueError) as e:
        logger.debug("Request failed", exc_info=True)
        print(f"tmoebius: error: {e}", file=sys.stderr)
        return 1

    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            render(result, args.format, handle)
        logger.info(f"Wrote {args.command} output to {args.out}")
    else:
        render(result, args.format, sys.stdout)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
