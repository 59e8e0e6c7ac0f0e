import sys

from commands import output_dir
from services.builder import build_source
from utils.config import RunConfig
from utils.constants import EXIT_OK
from utils.output import dumps_json, write_json


def register(subparsers) -> None:
    parser = subparsers.add_parser("describe", help="Model constants: lambda, eps_X, eps'_X, entropy")
    parser.set_defaults(handler=run)


def _orbit(values) -> list[str]:
    if hasattr(values, "points"):
        return [str(p) for p in values.points()]
    return [str(p) for p in values]


def run(args, config: RunConfig) -> int:
    source = build_source(config)
    payload = {
        **source.model.describe(),
        "P": _orbit(source.P),
        "Q": _orbit(source.Q),
    }
    write_json(output_dir(config) / "describe.json", payload)
    sys.stdout.write(dumps_json(payload))
    return EXIT_OK
