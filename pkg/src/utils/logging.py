"""Structured logging setup."""

import logging
import sys

JSON_FORMAT = '{"severity": "%(levelname)s", "logger": "%(name)s", "message": "%(message)s", "timestamp": "%(asctime)s"}'  # noqa: E501
PLAIN_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(level: str | int = "INFO", *, json: bool = True) -> None:
    """Configure the root logger once per process.

    Worker processes spawned by the sweep call this again with the parent's level.
    """
    logging.basicConfig(
        level=level,
        format=JSON_FORMAT if json else PLAIN_FORMAT,
        stream=sys.stderr,
        force=True,
    )
    # torch is chatty at DEBUG
    logging.getLogger("torch").setLevel(logging.WARNING)
