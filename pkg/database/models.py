from sqlalchemy import Column, Integer, String, Float, Boolean, ForeignKey, Text, DateTime, JSON
from sqlalchemy.ext.declarative import declarative_base
from sqlalchemy.orm import relationship
from datetime import datetime

Base = declarative_base()


class RunRecord(Base):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, index=True)
    subcommand = Column(String, nullable=False)
    config_hash = Column(String, index=True, nullable=False)  # sha256 of the effective config JSON
    seed = Column(Integer, default=0)
    exit_code = Column(Integer, default=0)
    summary = Column(JSON, default=dict)  # One entry per suite record
    created_at = Column(DateTime, default=datetime.utcnow)

    rows = relationship("RecordRow", back_populates="run", cascade="all, delete-orphan")


class RecordRow(Base):
    __tablename__ = "record_rows"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(Integer, ForeignKey("runs.id"), nullable=False)
    suite = Column(String, index=True, nullable=False)
    quantity = Column(String, nullable=False)
    parameters = Column(JSON, default=dict)
    n = Column(Integer)
    param = Column(Text)
    measured = Column(Float)
    closed_form = Column(Float)
    residual = Column(Float)
    window_exact = Column(Boolean, default=True)
    passed = Column(Boolean, default=True)

    run = relationship("RunRecord", back_populates="rows")
