from commands import output_dir
from commands.verify import write_record
from services.builder import build_lab
from services.partition import PartitionOfUnity
from services.verify import suite_partition
from utils.config import RunConfig
from utils.constants import EXIT_ASSERTION_FAILED, EXIT_OK
from utils.output import write_csv

POU_COLUMNS = ("point", "rect", "h", "F", "f")


def register(subparsers) -> None:
    parser = subparsers.add_parser("pou", help="Evaluate the partition of unity at one level")
    parser.add_argument("--level", type=int, default=2, help="Cover level n")
    parser.set_defaults(handler=run)


def run(args, config: RunConfig) -> int:
    lab = build_lab(config)
    pou = PartitionOfUnity(lab.covers, args.level)
    rows = []
    for index, x in enumerate(lab.source.random_points(config.samples, config.seed)):
        for rect, weight in sorted(pou.weights(x).items()):
            rows.append({
                "point": index,
                "rect": rect.label(),
                "h": pou.h(x, rect),
                "F": weight,
                "f": weight ** 0.5,
            })
    out = output_dir(config)
    write_csv(out / f"pou_level{args.level}.csv", POU_COLUMNS, rows)
    params = config.suite("partition").model_copy(update={"n_min": args.level, "n_max": args.level})
    record = suite_partition(lab, params)
    write_record(out, record)
    return EXIT_OK if record.passed else EXIT_ASSERTION_FAILED
