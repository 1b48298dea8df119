"""
Environment-driven settings
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from dotenv import load_dotenv

from .error_handler import ParameterError

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass(frozen=True)
class Settings:
    """Runtime settings read from SMMD_* environment variables"""

    cache_dir: Path
    log_level: str = "WARNING"
    threads: Optional[int] = None


def load_settings() -> Settings:
    """Build settings from SMMD_* environment variables"""
    cache_dir = os.environ.get("SMMD_CACHE_DIR") or str(Path.home() / ".cache" / "smmd")
    log_level = os.environ.get("SMMD_LOG_LEVEL", "WARNING").upper()

    threads_raw = os.environ.get("SMMD_THREADS")
    threads = None
    if threads_raw:
        try:
            threads = int(threads_raw)
        except ValueError:
            raise ParameterError(f"SMMD_THREADS must be an integer, got {threads_raw!r}")
        if threads < 1:
            raise ParameterError(f"SMMD_THREADS must be positive, got {threads}")

    return Settings(cache_dir=Path(cache_dir).expanduser(), log_level=log_level, threads=threads)


def configure_logging(level: Optional[str] = None) -> None:
    """Send log records to stderr; stdout carries results only"""
    level = (level or load_settings().log_level).upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format=LOG_FORMAT)


def load_env(root: Union[str, Path]) -> bool:
    """Load root/.env if present; variables already set take precedence"""
    env_path = Path(root) / ".env"
    if not env_path.is_file():
        return False
    return load_dotenv(env_path, override=False)
