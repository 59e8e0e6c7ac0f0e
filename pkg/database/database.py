import hashlib
import json
from functools import lru_cache

from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from .models import Base, RecordRow, RunRecord
from utils.config import get_database_url


@lru_cache(maxsize=None)
def get_engine(url: str):
    connect_args = {"check_same_thread": False} if url.startswith("sqlite") else {}
    engine = create_engine(url, connect_args=connect_args)
    Base.metadata.create_all(bind=engine)
    return engine


def get_session(url: str = None):
    engine = get_engine(url or get_database_url())
    SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)
    return SessionLocal()


def config_hash(payload: dict) -> str:
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _number(value):
    try:
        return None if value is None else float(value)
    except (TypeError, ValueError):
        return None


def archive_records(session, run: RunRecord, records) -> RunRecord:
    """Persist a run and the rows of its verification records."""
    run.summary = {record.suite: record.summary() for record in records}
    for record in records:
        for row in record.rows:
            n = row.get("n")
            run.rows.append(RecordRow(
                suite=record.suite,
                quantity=str(row["quantity"]),
                parameters=record.params,
                n=n if isinstance(n, int) else None,
                param=None if row.get("param") is None else str(row["param"]),
                measured=_number(row.get("measured")),
                closed_form=_number(row.get("closed_form")),
                residual=_number(row.get("residual")),
                window_exact=bool(row.get("window_exact", True)),
                passed=bool(row.get("passed", True)),
            ))
    session.add(run)
    try:
        session.commit()
    except Exception:
        session.rollback()
        raise
    session.refresh(run)
    return run
