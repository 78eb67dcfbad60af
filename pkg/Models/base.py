# Models/base.py
from sqlalchemy import MetaData
from sqlalchemy.orm import declarative_base

# Endast körloggens tabeller; nätverksdata ligger i datasetfilerna
Base = declarative_base(metadata=MetaData(naming_convention={"ix": "ix_%(table_name)s_%(column_0_name)s"}))
