import logging
import sys
from pathlib import Path

from commands import output_dir
from database.database import archive_records, config_hash, get_session
from database.models import RunRecord
from services.builder import build_lab
from services.verify import PROFILE_COLUMNS, ROW_COLUMNS, VerificationRecord, run_suite
from utils.config import RunConfig
from utils.constants import EXIT_ASSERTION_FAILED, EXIT_OK, SUITE_NAMES, is_known_suite, suite_key
from utils.errors import ConfigError
from utils.output import dumps_json, write_csv, write_json

logger = logging.getLogger(__name__)


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="Run verification suites and write CSV/JSON records")
    parser.add_argument("suites", nargs="*", help=f"Suites to run (default: configured, else all of {', '.join(SUITE_NAMES)})")
    parser.add_argument("--nmin", type=int, default=None, help="Smallest n")
    parser.add_argument("--nmax", type=int, default=None, help="Largest n")
    parser.add_argument("--j", type=_int_list, default=None, help="Comma-separated j values, e.g. 1,2")
    parser.add_argument("--window", type=int, default=None, help="Limit the section domain to this many basis points")
    parser.add_argument("--archive", action="store_true", help="Also store the records in the results database")
    parser.set_defaults(handler=run)


def write_record(out: Path, record: VerificationRecord) -> None:
    write_csv(out / f"{record.suite}.csv", ROW_COLUMNS, record.rows)
    if record.profiles:
        write_csv(out / f"{record.suite}_profiles.csv", PROFILE_COLUMNS, record.profiles)
    write_json(out / f"{record.suite}.json", record.summary())


def selected_suites(args, config: RunConfig) -> list[str]:
    names = [suite_key(name) for name in args.suites] or list(config.suites) or list(SUITE_NAMES)
    unknown = [name for name in names if not is_known_suite(name)]
    if unknown:
        raise ConfigError(f"unknown suites {unknown}; expected a subset of {list(SUITE_NAMES)}")
    return names


def run(args, config: RunConfig) -> int:
    names = selected_suites(args, config)
    overrides = {
        key: value
        for key, value in (("n_min", args.nmin), ("n_max", args.nmax), ("j", args.j), ("window", args.window))
        if value is not None
    }
    lab = build_lab(config)
    out = output_dir(config)
    records = []
    for name in names:
        params = config.suite(name).model_copy(update=overrides)
        record = run_suite(lab, name, params)
        write_record(out, record)
        records.append(record)
    summary = {record.suite: record.summary() for record in records}
    write_json(out / "summary.json", summary)
    sys.stdout.write(dumps_json({name: s["passed"] for name, s in summary.items()}))
    code = EXIT_OK if all(record.passed for record in records) else EXIT_ASSERTION_FAILED
    if args.archive:
        _archive(config, records, code)
    return code


def _archive(config: RunConfig, records, code: int) -> None:
    session = get_session()
    try:
        run = RunRecord(
            subcommand="verify",
            config_hash=config_hash(config.model_dump()),
            seed=config.seed,
            exit_code=code,
        )
        archive_records(session, run, records)
        logger.info("archived run %d with %d records", run.id, len(records))
    finally:
        session.close()
