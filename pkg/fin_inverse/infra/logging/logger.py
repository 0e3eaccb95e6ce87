from __future__ import annotations
import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path

from rich.logging import RichHandler

from ..settings.config import CONFIG

_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def get_logger(name: str = "fin_inverse") -> logging.Logger:
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger
    logger.setLevel(logging.INFO)
    # Child loggers hand records to the root "fin_inverse" logger.
    if name != "fin_inverse" and name.startswith("fin_inverse."):
        get_logger("fin_inverse")
        return logger
    try:
        CONFIG.log_dir.mkdir(parents=True, exist_ok=True)
        handler = RotatingFileHandler(
            CONFIG.log_dir / "app.log", maxBytes=2 * 1024 * 1024, backupCount=3
        )
        handler.setFormatter(logging.Formatter(_FORMAT))
        logger.addHandler(handler)
    except OSError:
        pass
    stream = RichHandler(show_path=False, rich_tracebacks=False)
    stream.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    logger.addHandler(stream)
    logger.propagate = False
    return logger


def attach_run_log(path: Path) -> logging.Handler:
    """Mirror everything under "fin_inverse" into a per-run log file."""
    handler = logging.FileHandler(path, encoding="utf-8")
    handler.setFormatter(logging.Formatter(_FORMAT))
    get_logger("fin_inverse").addHandler(handler)
    return handler


def detach_run_log(handler: logging.Handler) -> None:
    get_logger("fin_inverse").removeHandler(handler)
    handler.close()
