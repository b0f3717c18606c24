"""Decentralized dual ascent with local updates: Acc-GA-MSGD and LED.

Both methods run K local stochastic gradient steps per round against a
fixed dual offset, mix once through the gossip matrix, and take a dual
step sized tau2 on the substituted multipliers zeta = U lam:

    x_m        <- K steps on (1/M) F_m(x) + <zeta~_m, x>
    zeta^{t+1}  = zeta~^t + tau2 (I - W) X^{t,K}
    zeta~^{t+1} = zeta^{t+1} + beta (zeta^{t+1} - zeta^t)

LED is the beta = 0 special case with the larger default tau2 = mu/(2M);
the accelerated variant uses tau2 = mu/(4M) and the momentum

    beta = (2 sqrt(2L) - sqrt((1-sigma2) mu)) / (2 sqrt(2L) + sqrt((1-sigma2) mu)).

The square root U is never materialized at runtime; every dual quantity
lives in zeta space, whose rows stay mean-zero (the span invariant).
One round costs exactly one gossip exchange and K samples per client.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .analysis import primal_argmin_given_dual, span_residual
from .central import _resolve_x0
from .errors import ValidationError
from .problems import ProblemSpec, client_grads, evaluate_global, reference_solution
from .records import DivergenceGuard, Row, RunRecord, params_snapshot, sgd_schedule
from .rng import client_stream
from .topology import Topology


@dataclass
class AccParams:
    T: int
    K: int = 1
    tau1: Optional[Callable[[int], float]] = None  # inner steps
    tau2: Optional[float] = None                   # dual stepsize
    beta: Optional[float] = None                   # dual momentum
    inner: str = "sgd"                             # "sgd" | "exact"
    x0: Optional[np.ndarray] = None
    trace: bool = False


@dataclass
class DecenState:
    X: np.ndarray
    zeta: np.ndarray
    zeta_prev: np.ndarray
    zeta_tilde: np.ndarray
    t: int
    samples: int


def accelerated_beta(mu: float, L: float, sigma2: float) -> float:
    a = 2.0 * np.sqrt(2.0 * L)
    b = np.sqrt((1.0 - sigma2) * mu)
    return (a - b) / (a + b)


def default_inner_schedule(p: ProblemSpec):
    return sgd_schedule(p.L / p.M, p.mu / p.M, p.sigma > 0)


class DualAscentEngine:
    """Shared stepper for Acc-GA-MSGD, LED and the centralized variant.

    `mixer` maps the primal stack X to its mixed image (W X, or the exact
    row mean for the centralized special case) and is charged as one
    communication round per call.
    """

    def __init__(self, p: ProblemSpec, params: AccParams, master_seed: int,
                 mixer, sigma2: float, accelerated: bool):
        if params.inner not in ("sgd", "exact"):
            raise ValidationError("inner mode must be 'sgd' or 'exact'")
        if params.inner == "exact" and (not p.is_quadratic() or p.sigma > 0):
            raise ValidationError("exact inner solves need a noiseless quadratic problem")
        self.p = p
        self.params = params
        self.accelerated = accelerated
        self.mixer = mixer
        self.streams = [client_stream(master_seed, m) for m in range(p.M)]
        self.X = _resolve_x0(p, params.x0)
        self.zeta = np.zeros((p.M, p.n))
        self.zeta_prev = np.zeros((p.M, p.n))
        self.zeta_tilde = np.zeros((p.M, p.n))
        self.tau1 = params.tau1 or default_inner_schedule(p)
        if params.tau2 is not None:
            self.tau2 = params.tau2
        elif p.mu > 0:
            self.tau2 = p.mu / ((4.0 if accelerated else 2.0) * p.M)
        else:
            raise ValidationError("tau2 has no default when mu == 0; pass it explicitly")
        if not accelerated:
            self.beta = 0.0
        elif params.beta is not None:
            self.beta = params.beta
        else:
            if p.mu <= 0:
                raise ValidationError("beta has no default when mu == 0; pass it explicitly")
            self.beta = accelerated_beta(p.mu, p.L, sigma2)
        self.guard = DivergenceGuard(np.linalg.norm(self.X))
        self.t = 0
        self.samples = 0
        self._last_mix = self.mixer(self.X)  # for round-0 metrics; not charged

    def step_round(self):
        p, M = self.p, self.p.M
        zt = self.zeta_tilde if self.accelerated else self.zeta
        if self.params.inner == "exact":
            self.X = primal_argmin_given_dual(p, zt, "decentralized")
        else:
            for k in range(self.params.K):
                G = client_grads(p, self.X, self.streams)
                self.X -= self.tau1(k) * (G / M + zt)
            self.samples += self.params.K
        mixed = self.mixer(self.X)
        zeta_new = zt + self.tau2 * (self.X - mixed)
        if self.accelerated:
            self.zeta_tilde = zeta_new + self.beta * (zeta_new - self.zeta)
        else:
            self.zeta_tilde = zeta_new
        self.zeta_prev = self.zeta
        self.zeta = zeta_new
        self._last_mix = mixed
        self.t += 1
        self.guard.check(self.X, self.t, stepsize=float(self.tau1(0)))

    def x_bar(self):
        return self.X.mean(axis=0)

    def state(self) -> DecenState:
        return DecenState(self.X.copy(), self.zeta.copy(), self.zeta_prev.copy(),
                          self.zeta_tilde.copy(), self.t, self.samples)

    def metrics(self):
        xb = self.x_bar()
        consensus = float(np.mean(np.sum((self.X - xb) ** 2, axis=1)))
        dual_res = float(np.linalg.norm(self.X - self._last_mix))
        span = max(span_residual(self.zeta), span_residual(self.zeta_tilde))
        return xb, consensus, dual_res, span


def _run(engine: DualAscentEngine, name: str, meta: dict, master_seed: int) -> RunRecord:
    p, params = engine.p, engine.params
    ref = reference_solution(p)
    rec = RunRecord(algorithm=name, master_seed=master_seed,
                    params=params_snapshot(params), meta=meta)
    if params.trace:
        rec.trace = []

    def log(round_index, wall_ms):
        xb, consensus, dual_res, span = engine.metrics()
        gap = evaluate_global(p, xb)[0] - ref.f_star
        rec.rows.append(Row(round=round_index, cum_rounds=engine.t,
                            cum_samples=engine.samples, gap=float(gap),
                            consensus=consensus, dual_residual=dual_res,
                            wall_ms=wall_ms, span_residual=span))
        if rec.trace is not None:
            rec.trace.append({"X": engine.X.tolist(), "zeta": engine.zeta.tolist(),
                              "zeta_tilde": engine.zeta_tilde.tolist()})

    log(0, 0.0)
    for t in range(1, params.T + 1):
        t0 = time.perf_counter()
        engine.step_round()
        log(t, (time.perf_counter() - t0) * 1e3)
    rec.finals = {"X": engine.X.tolist(), "zeta": engine.zeta.tolist(),
                  "zeta_prev": engine.zeta_prev.tolist(),
                  "zeta_tilde": engine.zeta_tilde.tolist()}
    rec.validate()
    return rec


def _problem_meta(p, extra=None):
    meta = {"family": p.family, "M": p.M, "n": p.n, "mu": p.mu, "L": p.L,
            "sigma": p.sigma, "problem_seed": p.seed}
    if extra:
        meta.update(extra)
    return meta


def run_acc_ga_msgd(p: ProblemSpec, t: Topology, params: AccParams,
                    master_seed: int) -> RunRecord:
    """Accelerated decentralized dual ascent over the topology t."""
    if t.M != p.M:
        raise ValidationError("topology size does not match problem")
    eng = DualAscentEngine(p, params, master_seed,
                           mixer=lambda X: t.W @ X, sigma2=t.sigma2, accelerated=True)
    meta = _problem_meta(p, {"topology": t.kind, "sigma2": t.sigma2})
    return _run(eng, "acc_ga_msgd", meta, master_seed)


def run_led(p: ProblemSpec, t: Topology, params: AccParams, master_seed: int) -> RunRecord:
    """LED: the unaccelerated special case (beta = 0, tau2 default mu/(2M))."""
    if t.M != p.M:
        raise ValidationError("topology size does not match problem")
    if params.beta not in (None, 0, 0.0):
        raise ValidationError("LED has no momentum; leave beta unset")
    eng = DualAscentEngine(p, params, master_seed,
                           mixer=lambda X: t.W @ X, sigma2=t.sigma2, accelerated=False)
    meta = _problem_meta(p, {"topology": t.kind, "sigma2": t.sigma2})
    return _run(eng, "led", meta, master_seed)


def run_centralized_acc(p: ProblemSpec, params: AccParams, master_seed: int) -> RunRecord:
    """Accelerated variant on the exact-averaging (complete) communicator.

    Mixing is the explicit row mean, never a matrix product, so this is
    also the reference implementation for the W = (1/M) 11' special case.
    """
    eng = DualAscentEngine(
        p, params, master_seed,
        mixer=lambda X: np.tile(X.mean(axis=0), (p.M, 1)),
        sigma2=0.0, accelerated=True,
    )
    meta = _problem_meta(p, {"topology": "exact_mean", "sigma2": 0.0})
    return _run(eng, "acc_central", meta, master_seed)
