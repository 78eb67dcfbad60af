# Models/__init__.py
from .base import Base
from .run_record import RunRecord

# Run log tables, created by database.init_db
__all__ = [
    'Base',
    'RunRecord'
]
