"""Punto de entrada de la CLI `parrom`."""

from __future__ import annotations

import argparse
import logging
import sys

from parrom.cli import evaluate, generate, reduce
from parrom.core.config import settings
from parrom.core.errors import ParromError
from parrom.core.logging import configure_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=settings.app_name, description="Reducción H2⊗L2 de sistemas paramétricos")
    parser.add_argument("--log-level", default=None, help="Sobrescribe PARROM_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)
    generate.register(subparsers)
    reduce.register(subparsers)
    evaluate.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except ParromError as exc:
        if exc.exit_code == 4:
            logger.exception("Fallo numérico en %s", args.command)
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
