"""Run records and small runtime helpers shared by all algorithm drivers.

A RunRecord is the complete, JSON-serializable account of one algorithm
run: per-round metric rows, final iterates, parameter snapshot and status.
Wall time is recorded for reporting but never enters any assertion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DivergenceError, ValidationError


@dataclass
class Row:
    round: int
    cum_rounds: int
    cum_samples: int
    gap: Optional[float]
    consensus: float
    dual_residual: Optional[float]
    wall_ms: float
    span_residual: Optional[float] = None
    extra: Optional[dict] = None

    def to_dict(self):
        return {
            "round": self.round,
            "cum_rounds": self.cum_rounds,
            "cum_samples": self.cum_samples,
            "gap": self.gap,
            "consensus": self.consensus,
            "dual_residual": self.dual_residual,
            "wall_ms": self.wall_ms,
            "span_residual": self.span_residual,
            "extra": self.extra,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class RunRecord:
    algorithm: str
    master_seed: int
    params: dict
    meta: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    finals: dict = field(default_factory=dict)
    status: str = "ok"
    error: Optional[str] = None
    trace: Optional[list] = None

    def series(self, name):
        """Column `name` across rows as a float array; None becomes nan."""
        vals = [getattr(r, name) for r in self.rows]
        return np.array([np.nan if v is None else v for v in vals], dtype=float)

    def validate(self):
        cums = [r.cum_rounds for r in self.rows]
        if any(b <= a for a, b in zip(cums, cums[1:])):
            raise ValidationError("cumulative round counts must be strictly increasing")
        return True

    def to_dict(self):
        return {
            "algorithm": self.algorithm,
            "master_seed": self.master_seed,
            "params": self.params,
            "meta": self.meta,
            "rows": [r.to_dict() for r in self.rows],
            "finals": self.finals,
            "status": self.status,
            "error": self.error,
            "trace": self.trace,
        }

    @classmethod
    def from_dict(cls, d):
        rec = cls(
            algorithm=d["algorithm"],
            master_seed=d["master_seed"],
            params=d["params"],
            meta=d.get("meta", {}),
            rows=[Row.from_dict(r) for r in d["rows"]],
            finals=d.get("finals", {}),
            status=d.get("status", "ok"),
            error=d.get("error"),
            trace=d.get("trace"),
        )
        return rec


def params_snapshot(obj) -> dict:
    """Dataclass params -> plain JSON-safe dict (callables by name, arrays as lists)."""
    out = {}
    for k, v in vars(obj).items():
        if callable(v):
            out[k] = getattr(v, "__name__", "callable")
        elif isinstance(v, np.ndarray):
            out[k] = v.tolist()
        elif isinstance(v, (np.floating, np.integer)):
            out[k] = v.item()
        else:
            out[k] = v
    return out


def sgd_schedule(ell: float, nu: float, stochastic: bool):
    """Per-round inner stepsize schedule tau(k), k restarting at 0 each round.

    Deterministic gradients use the constant step 1/ell. With noise the
    step decays as min(1/ell, 2/(nu (k + k0))) with k0 = 2 ell / nu so the
    first steps match the deterministic regime; nu == 0 falls back to the
    constant schedule.
    """
    if ell <= 0:
        raise ValidationError("smoothness constant must be positive")
    flat = 1.0 / ell
    if not stochastic or nu <= 0:
        return lambda k: flat
    k0 = 2.0 * ell / nu

    def tau(k):
        return min(flat, 2.0 / (nu * (k + k0)))

    return tau


class DivergenceGuard:
    """Raises once iterates go nonfinite or blow past 1e6 x initial scale."""

    def __init__(self, initial_norm: float):
        self.limit = 1e6 * max(1.0, float(initial_norm))

    def check(self, X, round_index, stepsize=None):
        norm = float(np.linalg.norm(X))
        if not np.isfinite(norm) or norm > self.limit:
            raise DivergenceError(
                "iterate norm %.3g exceeded guard %.3g at round %d" % (norm, self.limit, round_index),
                round_index=round_index,
                stepsize=stepsize,
            )
