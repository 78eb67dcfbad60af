# Services/run_log.py
import json
import logging
import uuid
from datetime import datetime
from typing import Callable, List, Optional

from pydantic import BaseModel
from sqlalchemy import exc
from sqlalchemy.orm import Session

from Models import RunRecord
from settings import get_settings

logger = logging.getLogger(__name__)

SessionFactory = Callable[[], Session]


def _default_factory() -> SessionFactory:
    # Importeras först här så att databasen bara skapas när loggning är på
    from database import SessionLocal, init_db
    init_db()
    return SessionLocal


def record_run(
    kind: str,
    digest: str,
    report: BaseModel,
    exit_code: int = 0,
    session_factory: Optional[SessionFactory] = None,
) -> Optional[RunRecord]:
    """Store a command report; a failing run log never fails the command."""
    if session_factory is None:
        if not get_settings().record_runs:
            return None
        session_factory = _default_factory()

    db = session_factory()
    try:
        record = RunRecord(
            id=str(uuid.uuid4()),
            kind=kind,
            dataset_digest=digest,
            exit_code=exit_code,
            payload=report.json(),
            created_at=datetime.utcnow(),
        )
        db.add(record)
        db.commit()
        db.refresh(record)
        logger.debug(f"Recorded {kind} run {record.id}")
        return record
    except exc.SQLAlchemyError as e:
        db.rollback()
        logger.warning(f"Could not record {kind} run: {e}")
        return None
    finally:
        db.close()


def recent_runs(kind: Optional[str] = None, limit: int = 10, session_factory: Optional[SessionFactory] = None) -> List[RunRecord]:
    db = (session_factory or _default_factory())()
    try:
        query = db.query(RunRecord)
        if kind:
            query = query.filter(RunRecord.kind == kind)
        return query.order_by(RunRecord.created_at.desc()).limit(limit).all()
    finally:
        db.close()


def run_payload(record: RunRecord) -> dict:
    try:
        return json.loads(record.payload)
    except (json.JSONDecodeError, TypeError):
        return {}
