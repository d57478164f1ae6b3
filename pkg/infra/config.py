"""
Runtime configuration. Values come from explicit arguments first, then the
environment (optionally populated from a .env file by python-dotenv), then defaults.
"""
import logging
import os
from dataclasses import dataclass, field
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger("config")

DEFAULT_EXHAUSTIVE_LIMIT = 14
DEFAULT_MAX_DEPTH = 256
DEFAULT_MAX_CELLS = 200_000
DEFAULT_MCNC_DIR = os.path.join("tests", "fixtures", "mcnc")

_loaded = False


def load_environment(path: Optional[str] = None) -> None:
    """Load a .env file once per process; later calls are no-ops."""
    global _loaded
    if _loaded:
        return
    found = load_dotenv(dotenv_path=path, override=False)
    logger.debug("dotenv loaded=%s path=%s", found, path)
    _loaded = True


def env_int(name: str, default: int, minimum: int = 1) -> int:
    raw = os.environ.get(name, "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("ignoring non-integer %s=%r", name, raw)
        return default
    return max(minimum, value)


def thread_count() -> int:
    """Parallelism for suite runs, capped by POLYSYNTH_THREADS."""
    return env_int("POLYSYNTH_THREADS", os.cpu_count() or 1)


def log_level(default: str = "WARNING") -> str:
    return os.environ.get("POLYSYNTH_LOG_LEVEL", default).upper()


def exhaustive_limit() -> int:
    return env_int("POLYSYNTH_EXHAUSTIVE_LIMIT", DEFAULT_EXHAUSTIVE_LIMIT, minimum=0)


def mcnc_dir() -> str:
    """Where the MCNC benchmark PLAs are looked up; they are not shipped with the code."""
    return os.environ.get("POLYSYNTH_MCNC_DIR", DEFAULT_MCNC_DIR)


def record_db() -> Optional[str]:
    return os.environ.get("POLYSYNTH_RECORD_DB") or None


@dataclass(frozen=True)
class SynthLimits:
    max_depth: int = DEFAULT_MAX_DEPTH
    max_cells: int = DEFAULT_MAX_CELLS

    def __post_init__(self):
        if self.max_depth <= 0 or self.max_cells <= 0:
            raise ValueError("resource caps must be positive")

    @classmethod
    def from_env(cls) -> "SynthLimits":
        return cls(
            max_depth=env_int("POLYSYNTH_MAX_DEPTH", DEFAULT_MAX_DEPTH),
            max_cells=env_int("POLYSYNTH_MAX_CELLS", DEFAULT_MAX_CELLS),
        )


@dataclass(frozen=True)
class SynthOptions:
    """Knobs shared by both synthesis methods.

    g2_distinct forces the mode-2 gate of a polymorphic split to differ from the
    mode-1 gate. check_locality re-verifies every rule application of the
    mode-variable elimination on its local inputs.
    """
    g2_distinct: bool = False
    check_locality: bool = True
    limits: SynthLimits = field(default_factory=SynthLimits)
