from commands import output_dir
from commands.verify import write_record
from services.builder import build_lab
from services.verify import suite_covers
from utils.config import RunConfig
from utils.constants import EXIT_ASSERTION_FAILED, EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser("covers", help="Statistics of the enlarged covers R_n for n <= depth")
    parser.add_argument("--depth", type=int, default=4, help="Deepest cover level")
    parser.set_defaults(handler=run)


def run(args, config: RunConfig) -> int:
    lab = build_lab(config)
    params = config.suite("covers").model_copy(update={"n_min": 1, "n_max": args.depth})
    record = suite_covers(lab, params)
    write_record(output_dir(config), record)
    return EXIT_OK if record.passed else EXIT_ASSERTION_FAILED
