# Models/run_record.py
from sqlalchemy import Column, String, Text, DateTime, Integer
from datetime import datetime
from .base import Base


class RunRecord(Base):
    __tablename__ = 'run_records'

    # Primary identifiers
    id = Column(String, primary_key=True, index=True)
    kind = Column(String, nullable=False, index=True)

    # Dataset the run used (sha256 of the file, empty for generate)
    dataset_digest = Column(String, nullable=True, index=True)
    exit_code = Column(Integer, default=0)

    # Report serialized as JSON
    payload = Column(Text, nullable=False)

    # Timestamps
    created_at = Column(DateTime, default=datetime.utcnow)

    def __repr__(self):
        return f"<RunRecord {self.kind} ({self.id[:8]})>"
