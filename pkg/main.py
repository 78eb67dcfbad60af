# main.py
import logging
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from settings import get_settings

# Load environment variables
load_dotenv()


def main(argv: Optional[Sequence[str]] = None) -> int:
    # Configure logging
    logging.basicConfig(
        level=get_settings().log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    from Services.commands import dispatch
    return dispatch(argv)


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
