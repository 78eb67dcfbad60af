# settings.py
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, conint, validator

from paths import default_database_url

# Ladda miljövariabler från .env
load_dotenv()


class Settings(BaseModel):
    """
    Runtime configuration read from the environment (or a .env file).

    Attributes:
        database_url: SQLAlchemy URL of the run log
        record_runs: Store preprocess/verify/bench reports in the run log
        threads: Default worker count for preprocessing
        log_level: Root logging level name
    """
    database_url: str = default_database_url()
    record_runs: bool = True
    threads: conint(ge=1) = 1
    log_level: str = 'INFO'

    @validator('log_level')
    def known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in {'DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'}:
            raise ValueError(f"unknown log level: {value}")
        return value


def _flag(value: str) -> bool:
    return value.strip().lower() in {'1', 'true', 'yes', 'on'}


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings(
        database_url=os.getenv('DATABASE_URL', default_database_url()),
        record_runs=_flag(os.getenv('RECORD_RUNS', 'true')),
        threads=int(os.getenv('ROUTER_THREADS', '1')),
        log_level=os.getenv('LOG_LEVEL', 'INFO'),
    )
