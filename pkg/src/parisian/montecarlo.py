"""Monte Carlo estimates of finite-time Parisian survival.

Claims are drawn by inverse CDF from a counter-based SplitMix64 stream: the
uniform for path ``i`` at step ``n`` depends only on ``(seed, i, n)``, so
estimates are bit-identical across runs, thread counts and the jit/numpy
backends.

A path survives to ``t`` when no run of ``R_n <= 0`` has lasted more than
``zeta`` steps during ``n = 1..t-1``; ``P(tau >= t)`` only looks at those steps.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .dist import RiskModel
from .errors import DomainError

__all__ = ["McConfig", "McEstimate", "mc_parisian_survival", "mc_schedule", "schedule_csv", "TABLE1_SCHEDULE"]

TABLE1_SCHEDULE = tuple(100 * 2**k for k in range(11))  # 100 .. 102400


@dataclass(frozen=True)
class McConfig:
    """One simulation run.

    Attributes:
        model: risk model (claim law, ``u``, ``zeta``).
        horizon: ``t`` in ``P_u(tau >= t)``.
        paths: number of simulated trajectories.
        seed: 64-bit seed; stream keys are derived from it by SplitMix64.
    """

    model: RiskModel
    horizon: int
    paths: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if int(self.paths) != self.paths or self.paths < 1:
            raise DomainError(f"paths must be a positive integer, got {self.paths!r}")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise DomainError(f"horizon must be a positive integer, got {self.horizon!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")


@dataclass(frozen=True)
class McEstimate:
    """Survival estimate with its binomial standard error."""

    p_hat: float
    stderr: float
    paths: int
    elapsed: float
    survivors: int = 0

    def covers(self, exact: float, z: float = 1.96) -> bool:
        return abs(self.p_hat - exact) <= z * self.stderr


def _cdf(model: RiskModel) -> np.ndarray:
    w = model.claims.float_weights()
    return np.cumsum(w)


def mc_parisian_survival(cfg: McConfig) -> McEstimate:
    """Estimate ``P_u(tau >= t)`` from ``cfg.paths`` simulated trajectories."""
    start = time.perf_counter()
    m = cfg.model
    steps = cfg.horizon - 1
    key = _kernels.mix64(int(cfg.seed))
    alive = _kernels.mc_count(_cdf(m), int(m.u), int(m.zeta), steps, int(cfg.paths), key)
    p = alive / cfg.paths
    se = math.sqrt(p * (1 - p) / cfg.paths)
    return McEstimate(p, se, int(cfg.paths), time.perf_counter() - start, int(alive))


def mc_schedule(model: RiskModel, t: int, schedule: Sequence[int] = TABLE1_SCHEDULE, seed: int = 0,
                exact: float | None = None) -> list[dict]:
    """One estimate per path count, each with ``abs_diff`` against ``exact`` when given.

    The same seed is used for every count, so smaller runs are prefixes of larger ones.
    """
    if not len(schedule):
        raise DomainError("schedule must be non-empty")
    rows = []
    for paths in schedule:
        est = mc_parisian_survival(McConfig(model, t, int(paths), seed))
        rows.append({
            "description": f"MC {int(paths)}",
            "probability": est.p_hat,
            "stderr": est.stderr,
            "time_sec": est.elapsed,
            "abs_diff": abs(est.p_hat - exact) if exact is not None else math.nan,
            "estimate": est,
        })
    return rows


def schedule_csv(rows: list[dict], exact: float | None = None, exact_time: float | None = None,
                 timing: bool = True) -> str:
    """Table-1-shaped CSV: ``description,probability,time_sec,abs_diff``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["description", "probability", "time_sec", "abs_diff"])
    if exact is not None:
        w.writerow(["exact", repr(float(exact)), _time(exact_time, timing), ""])
    for r in rows:
        w.writerow([r["description"], repr(float(r["probability"])), _time(r["time_sec"], timing),
                    "" if math.isnan(r["abs_diff"]) else repr(float(r["abs_diff"]))])
    return buf.getvalue()


def _time(value, timing: bool) -> str:
    if not timing or value is None:
        return ""
    return f"{value:.4f}"
