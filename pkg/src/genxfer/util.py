"""Shared plumbing: logging, seed derivation, parameter hashing."""

from __future__ import annotations

import hashlib
import logging
import os

import numpy as np

_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def get_logger(name: str) -> logging.Logger:
    """Logger honoring the GENXFER_LOG env var (error|warn|info|debug)."""
    logger = logging.getLogger(name)
    level = os.environ.get("GENXFER_LOG", "warn").lower()
    logger.setLevel(_LEVELS.get(level, logging.WARNING))
    if not logging.getLogger("genxfer").handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("[%(levelname)s] %(name)s: %(message)s"))
        logging.getLogger("genxfer").addHandler(handler)
    return logger


# Stable stream codes so rng derivation never depends on string hashing.
_STREAMS = {
    "data_source": 1,
    "data_target": 2,
    "data_eval": 3,
    "init": 4,
    "train": 5,
    "sample": 6,
    "decoder": 7,
    "prior": 8,
    "embed": 9,
}


def derive_rng(*keys: int | str) -> np.random.Generator:
    """Deterministic generator from a tuple of ints and named stream tags."""
    entropy = [_STREAMS[k] if isinstance(k, str) else int(k) & 0xFFFFFFFF for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def params_hash(params: list[np.ndarray]) -> str:
    """SHA-256 over the exact bytes of a parameter list (order-sensitive)."""
    digest = hashlib.sha256()
    for p in params:
        digest.update(np.ascontiguousarray(p, dtype=np.float64).tobytes())
    return digest.hexdigest()


class ConfigError(ValueError):
    """Invalid configuration: bad dimensions, tags, or incompatible options."""


class TrainingDiverged(RuntimeError):
    """A loss or gradient became non-finite during optimization."""


class CheckpointError(RuntimeError):
    """Checkpoint file is malformed or has the wrong magic/version."""


class InconsistentMapError(ValueError):
    """A supplied (T, T inverse) pair failed the round-trip consistency check."""
