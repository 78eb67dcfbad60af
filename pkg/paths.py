# paths.py

from pathlib import Path

# Rotkatalogen för projektet (denna fil ligger i rotkatalogen)
ROOT = Path(__file__).parent

# Körlogg och genererade dataset
DATA_DIR = ROOT / "Data"


def data_file(filename: str) -> Path:
    return DATA_DIR / filename


def default_dataset_path() -> Path:
    """Dataset file used when --out / --data are omitted."""
    return data_file("network.tbt")


def default_database_url() -> str:
    return f"sqlite:///{data_file('runs.db')}"
