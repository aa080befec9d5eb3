"""Sample containers and headered-CSV IO for observation files."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .util import ConfigError


@dataclass
class SampleSet:
    """n x d matrix of observations, optionally paired with conditioning columns.

    `x` holds the observed variables; `cond` holds conditioning or latent
    columns (z for conditional tasks, u for unconditional ones).
    """

    x: np.ndarray
    cond: np.ndarray | None = None

    def __post_init__(self):
        self.x = np.atleast_2d(np.asarray(self.x, dtype=np.float64))
        if self.cond is not None:
            self.cond = np.atleast_2d(np.asarray(self.cond, dtype=np.float64))
            if self.cond.shape[0] != self.x.shape[0]:
                raise ConfigError(
                    f"cond rows ({self.cond.shape[0]}) != x rows ({self.x.shape[0]})"
                )

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    @property
    def cond_dim(self) -> int:
        return 0 if self.cond is None else self.cond.shape[1]

    @staticmethod
    def empty(dim: int, cond_dim: int = 0) -> "SampleSet":
        cond = np.empty((0, cond_dim)) if cond_dim else None
        return SampleSet(np.empty((0, dim)), cond)


def save_samples(samples: SampleSet, path: str | Path) -> None:
    """Write a headered CSV, one row per observation (x0..xK, cond0..condM)."""
    path = Path(path)
    header = [f"x{j}" for j in range(samples.dim)]
    if samples.cond is not None:
        header += [f"cond{j}" for j in range(samples.cond_dim)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(samples.n):
            row = [repr(v) for v in samples.x[i]]
            if samples.cond is not None:
                row += [repr(v) for v in samples.cond[i]]
            writer.writerow(row)


def load_samples(path: str | Path) -> SampleSet:
    """Read a headered sample CSV written by :func:`save_samples`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        x_cols = [i for i, name in enumerate(header) if name.startswith("x")]
        c_cols = [i for i, name in enumerate(header) if name.startswith("cond")]
        if not x_cols:
            raise ConfigError(f"{path}: no x columns in header {header}")
        rows = list(reader)
    x = np.array([[float(r[i]) for i in x_cols] for r in rows], dtype=np.float64)
    x = x.reshape(len(rows), len(x_cols))
    cond = None
    if c_cols:
        cond = np.array([[float(r[i]) for i in c_cols] for r in rows], dtype=np.float64)
        cond = cond.reshape(len(rows), len(c_cols))
    return SampleSet(x, cond)
