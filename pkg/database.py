# database.py
import logging

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import sessionmaker

from paths import DATA_DIR
from settings import get_settings

logger = logging.getLogger(__name__)

# Säkerställ att Data-katalogen finns
DATA_DIR.mkdir(exist_ok=True)


def make_engine(database_url: str) -> Engine:
    connect_args = {"check_same_thread": False} if database_url.startswith("sqlite") else {}
    return create_engine(database_url, connect_args=connect_args)


database_url = get_settings().database_url
logger.debug(f"Run log database URL: {database_url}")

engine = make_engine(database_url)

SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


def init_db(bind: Engine | None = None):
    from Models import Base
    Base.metadata.create_all(bind=bind or engine)
    logger.debug(f"Run log initialized at: {database_url}")
