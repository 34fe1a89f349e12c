#!/usr/bin/env python3

import os
import logging
from dataclasses import dataclass, replace
from typing import Optional

from dotenv import load_dotenv

from errors import ValidationError
from exactalg import is_prime
from poset import DEFAULT_MAX_GAMMA

ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_REPORT_DB = os.path.join(ROOT_DIR, "database", "reports.db")

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Config:
    prime: int = 5
    max_gamma: int = DEFAULT_MAX_GAMMA
    seed: int = 0
    report_db: str = DEFAULT_REPORT_DB
    log_level: str = "INFO"

    def override(self, prime=None, max_gamma=None, seed=None) -> "Config":
        """Return a copy with the given command-line values taking precedence"""
        changes = {}
        if prime is not None:
            changes["prime"] = _check_prime(prime, "--prime")
        if max_gamma is not None:
            changes["max_gamma"] = _check_positive(max_gamma, "--max-gamma")
        if seed is not None:
            changes["seed"] = int(seed)
        return replace(self, **changes) if changes else self


def _check_prime(value, name) -> int:
    try:
        p = int(value)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{name} must be an integer, got {value!r}", section="config") from e
    if not is_prime(p):
        raise ValidationError(f"{name} must be prime, got {p}", section="config")
    return p


def _check_positive(value, name) -> int:
    try:
        n = int(value)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{name} must be an integer, got {value!r}", section="config") from e
    if n < 2:
        raise ValidationError(f"{name} must be at least 2, got {n}", section="config")
    return n


def load_config(env_file: Optional[str] = None) -> Config:
    """
    Read configuration from the environment after loading a .env file
    :param env_file: explicit .env path; defaults to the repository root .env when present
    :return: Config
    """
    if env_file is not None:
        if not os.path.exists(env_file):
            raise ValidationError(f"Environment file not found: {env_file}", section="config")
        load_dotenv(env_file, override=True)
    else:
        default = os.path.join(ROOT_DIR, ".env")
        if os.path.exists(default):
            load_dotenv(default)

    try:
        seed = int(os.getenv("SEED", "0"))
    except ValueError as e:
        raise ValidationError(f"SEED must be an integer, got {os.getenv('SEED')!r}",
                              section="config") from e
    config = Config(
        prime=_check_prime(os.getenv("PRIME", "5"), "PRIME"),
        max_gamma=_check_positive(os.getenv("MAX_GAMMA", str(DEFAULT_MAX_GAMMA)), "MAX_GAMMA"),
        seed=seed,
        report_db=os.getenv("REPORT_DB") or DEFAULT_REPORT_DB,
        log_level=os.getenv("LOG_LEVEL", "INFO").upper(),
    )
    logger.debug("Loaded configuration: %s", config)
    return config
