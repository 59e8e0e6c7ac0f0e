import logging

from commands import output_dir
from services.builder import build_lab
from services.sampling import sample_violations
from utils.config import RunConfig
from utils.constants import EXIT_ASSERTION_FAILED, EXIT_OK
from utils.output import write_json

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("sample", help="Build the aperiodic sample and write it as JSON")
    parser.add_argument("--max-level", type=int, default=None, help="Deepest level (default: caps.max_level)")
    parser.add_argument(
        "--mode",
        choices=("levels", "window"),
        default=None,
        help="All cells up to the level, or only cells touched by the basis window (torus default)",
    )
    parser.set_defaults(handler=run)


def run(args, config: RunConfig) -> int:
    lab = build_lab(config)
    max_level = args.max_level if args.max_level is not None else config.caps.max_level
    mode = args.mode or ("window" if lab.kind == "torus" else "levels")
    builder = lab.new_sampler()
    if mode == "window":
        sample = builder.fill_touching(lab.window.points, max_level)
    else:
        sample = builder.fill_levels(max_level)
    problems = sample_violations(lab.covers, sample, config.caps.orbit_horizon)
    for message in problems:
        logger.error("sample check: %s", message)
    write_json(output_dir(config) / "sample.json", {
        "max_level": max_level,
        "mode": mode,
        "cells": sample.as_dict(),
        "violations": problems,
    })
    return EXIT_OK if not problems else EXIT_ASSERTION_FAILED
