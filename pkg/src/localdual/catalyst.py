"""Catalyst outer acceleration around any of the inner solvers.

Each outer iteration regularizes the objective around an extrapolated
center y^s, solves

    F^s(x) = F(x) + L ||x - y^s||^2

inexactly to a certified gap eps_s, then extrapolates. The proximal weight
doubles the smoothness seen by the inner solver to 3L while making the
subproblem (2L + curvature_lb)-strongly convex, which is what lets the
inner dual-ascent methods run on nonconvex bases.

Modes:
    sc        q = mu/(mu + 2L), geometric eps schedule, momentum from the
              alpha recursion started at alpha_0 = sqrt(q)
    convex    q = 0, polynomial eps schedule (exponent 4 + gamma)
    nonconvex q = 0, flat eps schedule, no momentum (beta_s = 0)

Stopping is certified, never assumed: quadratic subproblems report their
true gap via a direct solve of the averaged subproblem; other families use
the strong-convexity surrogate ||grad F^s(x)||^2 / (2 mu_s). With noisy
inner gradients the certificate applies to the realized iterate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .central import GaMsgdEngine, GaMsgdParams
from .decentral import AccParams, DualAscentEngine
from .errors import BudgetExceededError, ValidationError
from .problems import (ProblemSpec, QuadraticClient, evaluate_global,
                       reference_solution)
from .records import Row, RunRecord, params_snapshot
from .rng import derived_seed
from .topology import Topology

_MODES = ("sc", "convex", "nonconvex")


# ---------------------------------------------------------------------------
# schedules


def momentum_schedule(mode: str, q: float, S: int):
    """(alphas, betas) for S outer steps; alphas has length S + 1.

    alpha_s is the positive root of
        a^2 + (alpha_{s-1}^2 - q) a - alpha_{s-1}^2 = 0
    and beta_s = alpha_{s-1}(1 - alpha_{s-1}) / (alpha_{s-1}^2 + alpha_s).
    At the strongly convex fixed point alpha = sqrt(q) this gives
    beta = (1 - sqrt(q)) / (1 + sqrt(q)). Nonconvex mode keeps beta_s = 0.
    """
    if mode not in _MODES:
        raise ValidationError("unknown catalyst mode %r" % (mode,))
    alpha = np.sqrt(q) if mode == "sc" else 1.0
    alphas = [alpha]
    betas = []
    for _ in range(S):
        c1 = alpha * alpha - q
        alpha_new = 0.5 * (-c1 + np.sqrt(c1 * c1 + 4.0 * alpha * alpha))
        beta = 0.0 if mode == "nonconvex" else alpha * (1.0 - alpha) / (alpha * alpha + alpha_new)
        alphas.append(alpha_new)
        betas.append(beta)
        alpha = alpha_new
    return np.array(alphas), np.array(betas)


def alpha_recursion_residual(alpha_prev: float, alpha: float, q: float) -> float:
    return abs(alpha * alpha + (alpha_prev * alpha_prev - q) * alpha - alpha_prev * alpha_prev)


def epsilon_schedule(mode: str, s: int, delta0: float, q: float = 0.0,
                     S: Optional[int] = None, gamma: float = 1.0) -> float:
    """Target inner gap at outer step s (1-based)."""
    if mode == "sc":
        return 2.0 / 9.0 * (1.0 - 0.9 * np.sqrt(q)) ** s * delta0
    if mode == "convex":
        if gamma <= 0:
            raise ValidationError("convex mode needs gamma > 0")
        return 2.0 * delta0 / (9.0 * (s + 1) ** (4.0 + gamma))
    if mode == "nonconvex":
        if not S:
            raise ValidationError("nonconvex schedule needs the horizon S")
        return delta0 / S
    raise ValidationError("unknown catalyst mode %r" % (mode,))


# ---------------------------------------------------------------------------
# subproblems


class _ProxClient:
    """Client objective plus weight * ||x - center||^2."""

    kind = "prox"

    def __init__(self, base, center, weight):
        self.base = base
        self.center = np.asarray(center, dtype=float)
        self.weight = float(weight)

    @property
    def dim(self):
        return self.base.dim

    def value_grad(self, x):
        v, g = self.base.value_grad(x)
        d = x - self.center
        return v + self.weight * float(d @ d), g + 2.0 * self.weight * d

    def smoothness_bound(self):
        return self.base.smoothness_bound() + 2.0 * self.weight


@dataclass(frozen=True)
class SubproblemSpec:
    """A proximal-regularized copy of a base problem.

    problem is a full ProblemSpec whose certified constants are
    L + 2w smooth and (curvature_lb + 2w) strongly convex.
    """

    base: ProblemSpec
    centers: np.ndarray
    reg_weight: float
    problem: ProblemSpec


def make_subproblem(p: ProblemSpec, centers, reg_weight: Optional[float] = None) -> SubproblemSpec:
    """F^s_m(x) = F_m(x) + w ||x - y_m||^2 with per-client centers (M, n).

    Default weight w = L. Quadratic clients stay quadratic:
    (A_m, b_m) -> (A_m + 2w I, b_m + 2w y_m).
    """
    w = float(p.L if reg_weight is None else reg_weight)
    centers = np.asarray(centers, dtype=float)
    if centers.shape != (p.M, p.n):
        raise ValidationError("centers must have shape (M, n)")
    mu_sub = p.curvature_lb + 2.0 * w
    if mu_sub <= 0:
        raise ValidationError("proximal weight too small to convexify this instance")
    clients = []
    for m, c in enumerate(p.clients):
        if isinstance(c, QuadraticClient):
            clients.append(QuadraticClient(c.A + 2.0 * w * np.eye(p.n),
                                           c.b + 2.0 * w * centers[m]))
        else:
            clients.append(_ProxClient(c, centers[m], w))
    sub = ProblemSpec(
        M=p.M, n=p.n, clients=tuple(clients), mu=mu_sub, L=p.L + 2.0 * w,
        sigma=p.sigma, convexity_class="strongly_convex",
        curvature_lb=mu_sub, seed=p.seed, family=p.family + "_prox",
    )
    return SubproblemSpec(base=p, centers=centers, reg_weight=w, problem=sub)


def certified_primal_gap(sub: SubproblemSpec, x) -> float:
    """Upper bound on F^s(x) - min F^s; exact for quadratic bases."""
    x = np.asarray(x, dtype=float)
    q = sub.problem
    if q.is_quadratic():
        A, b = q.quad_arrays()
        xstar = np.linalg.solve(A.mean(axis=0), b.mean(axis=0))
        fmin = evaluate_global(q, xstar)[0]
        return evaluate_global(q, x)[0] - fmin
    v, g = evaluate_global(q, x)
    return float(g @ g) / (2.0 * q.mu)


# ---------------------------------------------------------------------------
# inner solvers


@dataclass
class InnerResult:
    X: np.ndarray          # final per-client iterates (M, n)
    rounds: int            # communication rounds spent
    samples: int           # samples per client
    achieved_gap: float    # certified gap at the averaged iterate


def exact_inner() -> Callable:
    """Direct consensual solve of quadratic subproblems; 1 round, 0 samples."""

    def solve(sub: SubproblemSpec, eps: float, X_init, seed: int) -> InnerResult:
        q = sub.problem
        if not q.is_quadratic():
            raise ValidationError("exact inner solver needs quadratic clients")
        A, b = q.quad_arrays()
        xstar = np.linalg.solve(A.mean(axis=0), b.mean(axis=0))
        return InnerResult(X=np.tile(xstar, (q.M, 1)), rounds=1, samples=0,
                           achieved_gap=0.0)

    return solve


def _certify_loop(sub, eps, eng, check_every, max_rounds):
    while True:
        for _ in range(check_every):
            eng.step_round()
        gap = certified_primal_gap(sub, eng.x_bar())
        if gap <= eps:
            return InnerResult(X=eng.X.copy(), rounds=eng.t, samples=eng.samples,
                               achieved_gap=float(gap))
        if eng.t >= max_rounds:
            raise BudgetExceededError(
                "inner solver used %d rounds without certifying gap %.3g (at %.3g)"
                % (eng.t, eps, gap), achieved_gap=float(gap), rounds_used=eng.t)


def ga_msgd_inner(K: int = 5, check_every: int = 10, max_rounds: int = 200_000,
                  inner: str = "sgd") -> Callable:
    """GA-MSGD as a certified inner solver (centralized communication)."""

    def solve(sub: SubproblemSpec, eps: float, X_init, seed: int) -> InnerResult:
        params = GaMsgdParams(T=0, K=K, inner=inner, x0=np.asarray(X_init, dtype=float))
        eng = GaMsgdEngine(sub.problem, params, seed)
        return _certify_loop(sub, eps, eng, check_every, max_rounds)

    return solve


def acc_inner(topology: Optional[Topology] = None, K: int = 5, check_every: int = 10,
              max_rounds: int = 200_000, inner: str = "sgd",
              tau2: Optional[float] = None, beta: Optional[float] = None) -> Callable:
    """Accelerated dual ascent as a certified inner solver.

    topology None means exact-mean mixing (the centralized variant);
    otherwise gossip over the given matrix.
    """

    def solve(sub: SubproblemSpec, eps: float, X_init, seed: int) -> InnerResult:
        params = AccParams(T=0, K=K, inner=inner, tau2=tau2, beta=beta,
                           x0=np.asarray(X_init, dtype=float))
        if topology is None:
            M = sub.problem.M
            eng = DualAscentEngine(sub.problem, params, seed,
                                   mixer=lambda X: np.tile(X.mean(axis=0), (M, 1)),
                                   sigma2=0.0, accelerated=True)
        else:
            if topology.M != sub.problem.M:
                raise ValidationError("topology size does not match problem")
            eng = DualAscentEngine(sub.problem, params, seed,
                                   mixer=lambda X: topology.W @ X,
                                   sigma2=topology.sigma2, accelerated=True)
        return _certify_loop(sub, eps, eng, check_every, max_rounds)

    return solve


# ---------------------------------------------------------------------------
# outer loop


@dataclass
class CatalystParams:
    S: int
    gamma: float = 1.0
    delta0: Optional[float] = None      # initial gap scale; estimated when None
    x0: Optional[np.ndarray] = None
    coupling: str = "centralized"       # or "decentralized"
    max_rounds: Optional[int] = None    # optional communication budget
    trace: bool = False


def _estimate_delta_nonconvex(p, x0):
    # short deterministic descent gives a positive scale for the eps schedule
    x = x0.copy()
    f0, _ = evaluate_global(p, x)
    for _ in range(200):
        _, g = evaluate_global(p, x)
        x -= g / p.L
    fend, _ = evaluate_global(p, x)
    return max(f0 - fend, 1e-12 * (1.0 + abs(f0)))


def run_catalyst(p: ProblemSpec, inner: Callable, mode: str,
                 params: CatalystParams, master_seed: int) -> RunRecord:
    """Catalyst outer loop around a certified inner solver.

    Warm starts: sc/convex restart the inner solver at
    x^{s-1} + (2L/(2L+mu))(y^s - y^{s-1}); nonconvex restarts at x^{s-1}.
    Centralized coupling averages and broadcasts the inner output (one
    extra round per outer step); decentralized coupling keeps per-client
    iterates and extrapolates locally at zero communication cost.
    Each outer step draws its inner seed from the master seed and the
    outer index, so inner runs are independent and reproducible.
    """
    if mode not in _MODES:
        raise ValidationError("unknown catalyst mode %r" % (mode,))
    if params.coupling not in ("centralized", "decentralized"):
        raise ValidationError("coupling must be 'centralized' or 'decentralized'")
    if mode == "sc" and p.mu <= 0:
        raise ValidationError("sc mode needs a strongly convex instance")
    if mode != "nonconvex" and p.convexity_class == "nonconvex":
        raise ValidationError("nonconvex instances need mode='nonconvex'")

    M, n = p.M, p.n
    if params.x0 is None:
        Xc = np.zeros((M, n))
    else:
        x0 = np.asarray(params.x0, dtype=float)
        Xc = np.tile(x0, (M, 1)) if x0.shape == (n,) else x0.copy()
    Yc = Xc.copy()
    Yp = Xc.copy()

    ref = None if mode == "nonconvex" else reference_solution(p)
    xbar0 = Xc.mean(axis=0)
    f0, g0 = evaluate_global(p, xbar0)
    if params.delta0 is not None:
        delta = float(params.delta0)
    elif ref is not None:
        delta = f0 - ref.f_star
    else:
        delta = _estimate_delta_nonconvex(p, xbar0)

    q = p.mu / (p.mu + 2.0 * p.L) if mode == "sc" else 0.0
    alphas, betas = momentum_schedule(mode, q, params.S)
    warm_fac = 2.0 * p.L / (2.0 * p.L + p.mu)

    rec = RunRecord(
        algorithm="catalyst_" + mode,
        master_seed=master_seed,
        params=params_snapshot(params),
        meta={"family": p.family, "M": M, "n": n, "mu": p.mu, "L": p.L,
              "sigma": p.sigma, "problem_seed": p.seed, "mode": mode,
              "coupling": params.coupling, "q": q, "delta": delta},
    )
    if params.trace:
        rec.trace = []

    def log(s, cum_rounds, cum_samples, wall_ms, extra):
        xb = Xc.mean(axis=0)
        f, g = evaluate_global(p, xb)
        gap = None if ref is None else float(f - ref.f_star)
        consensus = float(np.mean(np.sum((Xc - xb) ** 2, axis=1)))
        extra = dict(extra, f_value=float(f), grad_sq=float(g @ g))
        rec.rows.append(Row(round=s, cum_rounds=cum_rounds, cum_samples=cum_samples,
                            gap=gap, consensus=consensus, dual_residual=None,
                            wall_ms=wall_ms, extra=extra))
        if rec.trace is not None:
            rec.trace.append({"X": Xc.tolist(), "Y": Yc.tolist()})

    cum_rounds = 0
    cum_samples = 0
    log(0, 0, 0, 0.0, {})
    for s in range(1, params.S + 1):
        if params.max_rounds is not None and cum_rounds >= params.max_rounds:
            break
        t0 = time.perf_counter()
        eps_s = epsilon_schedule(mode, s, delta, q=q, S=params.S, gamma=params.gamma)
        sub = make_subproblem(p, Yc)
        if mode == "nonconvex":
            X_init = Xc.copy()
        else:
            X_init = Xc + warm_fac * (Yc - Yp)
        res = inner(sub, eps_s, X_init, derived_seed(master_seed, s))
        if params.coupling == "centralized":
            xnew = res.X.mean(axis=0)
            Xnew = np.tile(xnew, (M, 1))
            cum_rounds += res.rounds + 1  # +1 for the broadcast of the average
        else:
            Xnew = res.X.copy()
            cum_rounds += res.rounds
        cum_samples += res.samples
        beta_s = betas[s - 1]
        Ynext = Xnew + beta_s * (Xnew - Xc)
        # the extrapolation is linear, so the averaged trajectory must obey
        # the same recursion; record the residual as a consistency metric
        avg_equiv = float(np.linalg.norm(
            Ynext.mean(axis=0)
            - (Xnew.mean(axis=0) + beta_s * (Xnew.mean(axis=0) - Xc.mean(axis=0)))
        ))
        Xc, Yp, Yc = Xnew, Yc, Ynext
        log(s, cum_rounds, cum_samples, (time.perf_counter() - t0) * 1e3, {
            "alpha": float(alphas[s]),
            "beta": float(beta_s),
            "eps": float(eps_s),
            "alpha_residual": alpha_recursion_residual(alphas[s - 1], alphas[s], q),
            "avg_equiv_residual": avg_equiv,
            "inner_rounds": res.rounds,
            "inner_gap": res.achieved_gap,
        })
    rec.finals = {"X": Xc.tolist(), "Y": Yc.tolist()}
    rec.validate()
    return rec
