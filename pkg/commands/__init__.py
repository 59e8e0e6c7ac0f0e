"""CLI subcommands; each module exposes register(subparsers) and run(args, config)."""
from pathlib import Path

from utils.config import RunConfig, get_output_root


def output_dir(config: RunConfig) -> Path:
    path = Path(config.out_dir) if config.out_dir else get_output_root()
    path.mkdir(parents=True, exist_ok=True)
    return path
