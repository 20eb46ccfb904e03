from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace
from typing import Any, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

STATE_CAP_ENV_VAR = "CGFA_STATE_CAP"
ENUM_CAP_ENV_VAR = "CGFA_ENUM_CAP"
EPSILON_ENV_VAR = "CGFA_EPSILON"
MAX_ITERS_ENV_VAR = "CGFA_MAX_ITERS"
WIDENING_ENV_VAR = "CGFA_WIDENING"
WORKERS_ENV_VAR = "CGFA_WORKERS"

_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}


def get_env(key: str, default: Optional[str] = None, *, required: bool = False) -> Optional[str]:
    """
    Fetch an environment variable with optional default and required enforcement.
    """
    value = os.environ.get(key, default)
    if required and value is None:
        logger.error("Required environment variable missing: %s", key)
        raise RuntimeError(f"Missing required environment variable: {key}")
    logger.debug("Loaded env %s=%s", key, value)
    return value


def _env_int(key: str, default: int) -> int:
    raw = get_env(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"Environment variable {key} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"Environment variable {key} must be positive, got {value}")
    return value


def _env_float(key: str, default: float) -> float:
    raw = get_env(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError as exc:
        raise ValueError(f"Environment variable {key} must be a number, got {raw!r}") from exc
    if not value > 0:
        raise ValueError(f"Environment variable {key} must be positive, got {value}")
    return value


def _env_bool(key: str, default: bool) -> bool:
    raw = get_env(key)
    if raw is None or raw.strip() == "":
        return default
    word = raw.strip().lower()
    if word in _TRUE_WORDS:
        return True
    if word in _FALSE_WORDS:
        return False
    raise ValueError(f"Environment variable {key} must be a boolean, got {raw!r}")


@dataclass(frozen=True)
class AnalysisConfig:
    """
    Knobs shared by the concrete and abstract pipelines.
    """

    state_cap: int = 100_000
    enum_cap: int = 4096
    epsilon: float = 1e-9
    max_iters: int = 1_000_000
    widening: bool = True
    workers: int = 1

    @classmethod
    def from_env(cls, dotenv_path: Optional[str] = None) -> "AnalysisConfig":
        env_file = dotenv_path or ".env"
        loaded = load_dotenv(env_file, override=False)
        logger.debug("load_dotenv path=%s loaded=%s", env_file, loaded)
        defaults = cls()
        return cls(
            state_cap=_env_int(STATE_CAP_ENV_VAR, defaults.state_cap),
            enum_cap=_env_int(ENUM_CAP_ENV_VAR, defaults.enum_cap),
            epsilon=_env_float(EPSILON_ENV_VAR, defaults.epsilon),
            max_iters=_env_int(MAX_ITERS_ENV_VAR, defaults.max_iters),
            widening=_env_bool(WIDENING_ENV_VAR, defaults.widening),
            workers=_env_int(WORKERS_ENV_VAR, defaults.workers),
        )

    def with_overrides(self, **overrides: Any) -> "AnalysisConfig":
        """
        Return a copy with every non-None override applied (CLI flags win over the environment).
        """
        changes = {key: value for key, value in overrides.items() if value is not None}
        unknown = set(changes) - set(self.as_dict())
        if unknown:
            raise ValueError(f"Unknown configuration keys: {sorted(unknown)}")
        return replace(self, **changes)

    def as_dict(self) -> dict[str, Any]:
        return {
            "state_cap": self.state_cap,
            "enum_cap": self.enum_cap,
            "epsilon": self.epsilon,
            "max_iters": self.max_iters,
            "widening": self.widening,
            "workers": self.workers,
        }


def main() -> None:
    """
    Smoke test: print the configuration resolved from the environment.
    """

    logging.basicConfig(level=logging.INFO)
    try:
        config = AnalysisConfig.from_env()
        logger.info("Resolved analysis config: %s", config.as_dict())
    except Exception:
        logger.exception("Config smoke test failed; check the CGFA_* variables")
        raise


if __name__ == "__main__":
    main()
