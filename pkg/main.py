import argparse
import logging
import os
import sys

from commands import covers, describe, pou, sample, verify
from utils.config import apply_overrides, load_config
from utils.errors import SmaleLabError

COMMANDS = (describe, covers, pou, sample, verify)

logger = logging.getLogger("smalelab")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smalelab",
        description="Numerical laboratory for Smale spaces: covers, samples and isometry suites",
    )
    parser.add_argument("--config", required=True, help="Path to a JSON run configuration")
    parser.add_argument("--seed", type=int, default=None, help="Override the config seed")
    parser.add_argument("--out-dir", default=None, help="Directory for CSV/JSON artifacts")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads for norm and rank computations")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Only warnings and errors")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def configure_logging(args) -> None:
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    else:
        level = getattr(logging, os.environ.get("SMALELAB_LOG_LEVEL", "INFO").upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args)
    try:
        config = load_config(args.config)
        config = apply_overrides(config, seed=args.seed, out_dir=args.out_dir, threads=args.threads)
        return args.handler(args, config)
    except SmaleLabError as e:
        sys.stderr.write(f"smalelab: {e}\n")
        logger.debug("exit %d", e.exit_code, exc_info=True)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
