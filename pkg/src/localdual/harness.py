"""Experiment grids, rate fitting, metric emission and the verify battery.

A configuration describes a grid of problems x topologies x algorithms x
seeds. Every cell runs independently with its own seed-derived streams, so
execution order cannot leak randomness between cells; failures are
recorded per cell and never abort the grid.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import analysis, catalyst, topology as topo_mod
from .central import GaMsgdParams, run_ga_msgd
from .decentral import AccParams, run_acc_ga_msgd, run_centralized_acc, run_led
from .errors import (BudgetExceededError, ConfigError, DivergenceError,
                     LocaldualError, ValidationError)
from .problems import (ProblemSpec, evaluate_global, load_problem, make_logistic,
                       make_nonconvex, make_quadratic, problem_from_dict,
                       problem_to_dict, reference_solution, stoch_grad)
from .records import DivergenceGuard, Row, RunRecord, params_snapshot, sgd_schedule
from .rng import client_stream
from .topology import Topology, build_topology, load_weight_matrix

CSV_COLUMNS = ("algorithm", "seed", "round", "cum_rounds", "cum_samples",
               "gap", "consensus", "dual_residual", "wall_ms")


# ---------------------------------------------------------------------------
# local SGD baseline


@dataclass
class LocalSgdParams:
    T: int
    K: int = 1
    tau: Optional[Callable[[int], float]] = None
    x0: Optional[np.ndarray] = None


def run_local_sgd(p: ProblemSpec, params: LocalSgdParams, master_seed: int) -> RunRecord:
    """FedAvg-style baseline: K local steps on each F_m, then exact averaging.

    One round costs one averaging exchange and K samples per client.
    """
    streams = [client_stream(master_seed, m) for m in range(p.M)]
    if params.x0 is None:
        X = np.zeros((p.M, p.n))
    else:
        x0 = np.asarray(params.x0, dtype=float)
        X = np.tile(x0, (p.M, 1)) if x0.shape == (p.n,) else x0.copy()
    tau = params.tau or sgd_schedule(p.L, p.mu, p.sigma > 0)
    ref = reference_solution(p)
    guard = DivergenceGuard(np.linalg.norm(X))
    rec = RunRecord(algorithm="local_sgd", master_seed=master_seed,
                    params=params_snapshot(params),
                    meta={"family": p.family, "M": p.M, "n": p.n, "mu": p.mu,
                          "L": p.L, "sigma": p.sigma, "problem_seed": p.seed})
    samples = 0

    def log(t, wall_ms):
        xb = X.mean(axis=0)
        gap = evaluate_global(p, xb)[0] - ref.f_star
        consensus = float(np.mean(np.sum((X - xb) ** 2, axis=1)))
        rec.rows.append(Row(round=t, cum_rounds=t, cum_samples=samples,
                            gap=float(gap), consensus=consensus,
                            dual_residual=None, wall_ms=wall_ms))

    log(0, 0.0)
    for t in range(1, params.T + 1):
        t0 = time.perf_counter()
        for k in range(params.K):
            for m in range(p.M):
                X[m] -= tau(k) * stoch_grad(p, m, X[m], streams[m])
        samples += params.K
        X = np.tile(X.mean(axis=0), (p.M, 1))
        guard.check(X, t, stepsize=float(tau(0)))
        log(t, (time.perf_counter() - t0) * 1e3)
    rec.finals = {"X": X.tolist()}
    rec.validate()
    return rec


# ---------------------------------------------------------------------------
# rate fitting


def fit_geometric_rate(values, burn_in: float = 0.2):
    """Least-squares geometric rate of a decaying positive series.

    Keeps the entries above the noise floor 10 * eps * values[0], drops the
    first 20% of them as burn-in, then regresses log(value) on the round
    index. Returns (rate, r_squared) with rate = exp(slope). A flat series
    gives (1.0, 1.0). Needs at least 5 usable points.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise ValidationError("rate fit needs a 1-d series")
    if v.size and not np.all(np.isfinite(v)):
        raise ValidationError("rate fit needs finite values")
    if np.any(v < 0):
        raise ValidationError("rate fit needs nonnegative values")
    floor = 10.0 * np.finfo(float).eps * (v[0] if v.size else 0.0)
    idx = np.nonzero(v > floor)[0]
    if idx.size < 5:
        raise ValidationError("need at least 5 points above the noise floor, got %d" % idx.size)
    idx = idx[int(np.floor(burn_in * idx.size)):]
    t = idx.astype(float)
    y = np.log(v[idx])
    A = np.stack([t, np.ones_like(t)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ np.array([slope, intercept])
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot <= 1e-24:
        return 1.0 if abs(slope) < 1e-12 else float(np.exp(slope)), 1.0
    return float(np.exp(slope)), 1.0 - ss_res / ss_tot


# ---------------------------------------------------------------------------
# experiment grids


@dataclass
class ExperimentConfig:
    problems: list
    algorithms: list
    topologies: list = field(default_factory=lambda: ["complete"])
    seeds: list = field(default_factory=lambda: [0])
    max_rounds: Optional[int] = None
    output: dict = field(default_factory=dict)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("config %s is not valid JSON: %s" % (path, exc))
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    for key in ("problems", "algorithms"):
        if key not in raw or not isinstance(raw[key], list) or not raw[key]:
            raise ConfigError("config.%s must be a nonempty list" % key)
    cfg = ExperimentConfig(
        problems=raw["problems"],
        algorithms=raw["algorithms"],
        topologies=raw.get("topologies", ["complete"]),
        seeds=raw.get("seeds", [0]),
        max_rounds=raw.get("max_rounds"),
        output=raw.get("output", {}),
    )
    if not isinstance(cfg.seeds, list) or not all(isinstance(s, int) for s in cfg.seeds):
        raise ConfigError("config.seeds must be a list of integers")
    if cfg.max_rounds is not None and (not isinstance(cfg.max_rounds, int) or cfg.max_rounds < 0):
        raise ConfigError("config.max_rounds must be a nonnegative integer")
    for i, a in enumerate(cfg.algorithms):
        if not isinstance(a, dict) or "name" not in a:
            raise ConfigError("config.algorithms[%d] needs a 'name' field" % i)
        if a["name"] not in ALGORITHM_TABLE:
            raise ConfigError("config.algorithms[%d].name: unknown algorithm %r "
                              "(known: %s)" % (i, a["name"], ", ".join(sorted(ALGORITHM_TABLE))))
    return cfg


def build_problem(d: dict, where: str = "problem") -> ProblemSpec:
    if not isinstance(d, dict):
        raise ConfigError("%s must be an object" % where)
    if "file" in d:
        return load_problem(d["file"])
    family = d.get("family")
    try:
        if family == "quadratic":
            return make_quadratic(d["seed"], d["M"], d["n"], d["mu"], d["L"],
                                  heterogeneity=d.get("heterogeneity", 1.0),
                                  sigma=d.get("sigma", 0.0))
        if family == "logistic":
            return make_logistic(d["seed"], d["M"], d["n"],
                                 samples_per_client=d.get("samples_per_client", 20),
                                 reg=d.get("reg", 0.1), sigma=d.get("sigma", 0.0))
        if family == "nonconvex":
            return make_nonconvex(d["seed"], d["M"], d["n"],
                                  samples_per_client=d.get("samples_per_client", 20),
                                  reg=d.get("reg", 0.05),
                                  penalty=d.get("penalty", 0.5),
                                  sigma=d.get("sigma", 0.0))
    except KeyError as exc:
        raise ConfigError("%s: missing field %s for family %r" % (where, exc, family))
    raise ConfigError("%s.family must be quadratic, logistic or nonconvex "
                      "(or pass 'file')" % where)


def build_grid_topology(spec, M: int, where: str = "topology") -> Topology:
    if isinstance(spec, str):
        return build_topology(spec, M)
    if isinstance(spec, dict):
        if "file" in spec:
            t = load_weight_matrix(spec["file"])
            if t.M != M:
                raise ConfigError("%s: matrix in %s is %dx%d but the problem has M=%d"
                                  % (where, spec["file"], t.M, t.M, M))
            return t
        if "kind" in spec:
            return build_topology(spec["kind"], M)
    raise ConfigError("%s must be a kind string or an object with 'kind' or 'file'" % where)


def _tau_from_config(d):
    # config files can only ask for a constant inner step
    if d is None:
        return None
    step = float(d)
    return lambda k: step


def _effective_T(d, max_rounds):
    T = int(d.get("T", 100))
    if max_rounds is not None:
        T = min(T, max_rounds)
    return T


def _run_ga_msgd_cell(p, topo, d, seed, max_rounds):
    params = GaMsgdParams(T=_effective_T(d, max_rounds), K=int(d.get("K", 1)),
                          tau3=d.get("tau3"), tau1=_tau_from_config(d.get("tau1")),
                          tau2=_tau_from_config(d.get("tau2")),
                          init_mode=d.get("init_mode", "smoothness_L"),
                          inner=d.get("inner", "sgd"))
    return run_ga_msgd(p, params, seed)


def _acc_params(d, max_rounds):
    return AccParams(T=_effective_T(d, max_rounds), K=int(d.get("K", 1)),
                     tau1=_tau_from_config(d.get("tau1")), tau2=d.get("tau2"),
                     beta=d.get("beta"), inner=d.get("inner", "sgd"))


def _run_acc_cell(p, topo, d, seed, max_rounds):
    return run_acc_ga_msgd(p, topo, _acc_params(d, max_rounds), seed)


def _run_led_cell(p, topo, d, seed, max_rounds):
    return run_led(p, topo, _acc_params(d, max_rounds), seed)


def _run_acc_central_cell(p, topo, d, seed, max_rounds):
    return run_centralized_acc(p, _acc_params(d, max_rounds), seed)


def _run_local_sgd_cell(p, topo, d, seed, max_rounds):
    params = LocalSgdParams(T=_effective_T(d, max_rounds), K=int(d.get("K", 1)),
                            tau=_tau_from_config(d.get("tau")))
    return run_local_sgd(p, params, seed)


def _build_inner(d, topo, coupling):
    d = d or {"name": "acc"}
    name = d.get("name", "acc")
    if name == "exact":
        return catalyst.exact_inner()
    kw = dict(K=int(d.get("K", 5)), check_every=int(d.get("check_every", 10)),
              max_rounds=int(d.get("max_rounds", 200_000)),
              inner=d.get("inner", "sgd"))
    if name == "ga_msgd":
        return catalyst.ga_msgd_inner(**kw)
    if name == "acc":
        t = topo if coupling == "decentralized" else None
        return catalyst.acc_inner(topology=t, **kw)
    raise ConfigError("catalyst inner solver must be 'acc', 'ga_msgd' or 'exact', got %r" % name)


def _run_catalyst_cell(p, topo, d, seed, max_rounds):
    mode = d.get("mode", "sc")
    coupling = d.get("coupling", "centralized")
    inner = _build_inner(d.get("inner"), topo, coupling)
    params = catalyst.CatalystParams(S=int(d.get("S", 10)), gamma=d.get("gamma", 1.0),
                                     delta0=d.get("delta0"), coupling=coupling,
                                     max_rounds=max_rounds)
    return catalyst.run_catalyst(p, inner, mode, params, seed)


ALGORITHM_TABLE = {
    "ga_msgd": {"runner": _run_ga_msgd_cell, "needs_topology": False},
    "acc_ga_msgd": {"runner": _run_acc_cell, "needs_topology": True},
    "led": {"runner": _run_led_cell, "needs_topology": True},
    "acc_central": {"runner": _run_acc_central_cell, "needs_topology": False},
    "local_sgd": {"runner": _run_local_sgd_cell, "needs_topology": False},
    "catalyst": {"runner": _run_catalyst_cell, "needs_topology": None},  # depends on coupling
}


def _algo_needs_topology(d):
    flag = ALGORITHM_TABLE[d["name"]]["needs_topology"]
    if flag is None:
        return d.get("coupling", "centralized") == "decentralized"
    return flag


def run_experiment(cfg: ExperimentConfig) -> list:
    """Run the full grid; one RunRecord per cell, failures recorded in place.

    Topology-free algorithms run once per (problem, seed) on the first
    topology slot instead of being duplicated across topologies.
    """
    records = []
    for pi, pd in enumerate(cfg.problems):
        p = build_problem(pd, "problems[%d]" % pi)
        for ti, td in enumerate(cfg.topologies):
            for ai, ad in enumerate(cfg.algorithms):
                needs_topo = _algo_needs_topology(ad)
                if not needs_topo and ti > 0:
                    continue
                for seed in cfg.seeds:
                    records.append(_run_cell(p, td, ad, seed, cfg.max_rounds,
                                             "topologies[%d]" % ti))
    return records


def _run_cell(p, td, ad, seed, max_rounds, topo_where):
    entry = ALGORITHM_TABLE[ad["name"]]
    try:
        topo = build_grid_topology(td, p.M, topo_where) if _algo_needs_topology(ad) else None
        rec = entry["runner"](p, topo, ad, seed, max_rounds)
        rec.meta.setdefault("problem_seed", p.seed)
        return rec
    except DivergenceError as exc:
        status, err = "diverged", str(exc)
    except BudgetExceededError as exc:
        status, err = "budget_exceeded", str(exc)
    except (LocaldualError, np.linalg.LinAlgError) as exc:
        status, err = "failed", str(exc)
    return RunRecord(algorithm=ad["name"], master_seed=seed, params=dict(ad),
                     meta={"family": p.family, "M": p.M, "n": p.n,
                           "problem_seed": p.seed},
                     rows=[], status=status, error=err)


# ---------------------------------------------------------------------------
# metric emission


def emit_metrics(records, out_dir=".", formats=("csv", "json"), stem="metrics"):
    """Write the per-round table (CSV) and the full records (JSON).

    The CSV holds exactly the columns in CSV_COLUMNS, one line per logged
    round across all records (header only when there are none); missing
    values are empty fields. The JSON file mirrors every RunRecord
    verbatim and round-trips through load_records.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    if "csv" in formats:
        path = os.path.join(out_dir, stem + ".csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for rec in records:
                for r in rec.rows:
                    w.writerow([
                        rec.algorithm, rec.master_seed, r.round, r.cum_rounds,
                        r.cum_samples,
                        "" if r.gap is None else repr(float(r.gap)),
                        repr(float(r.consensus)),
                        "" if r.dual_residual is None else repr(float(r.dual_residual)),
                        repr(float(r.wall_ms)),
                    ])
        paths["csv"] = path
    if "json" in formats:
        path = os.path.join(out_dir, stem + ".json")
        with open(path, "w") as fh:
            json.dump({"records": [rec.to_dict() for rec in records]}, fh, indent=1)
        paths["json"] = path
    return paths


def load_records(path):
    with open(path) as fh:
        raw = json.load(fh)
    return [RunRecord.from_dict(d) for d in raw["records"]]


# ---------------------------------------------------------------------------
# verify battery


def _check(name, fn):
    try:
        detail = fn()
        return {"name": name, "passed": True, "detail": detail or ""}
    except Exception as exc:  # a failed check must not stop the battery
        return {"name": name, "passed": False, "detail": "%s: %s" % (type(exc).__name__, exc)}


def verification_suite():
    """Fast self-contained battery behind `localdual verify`.

    Re-derives the structural facts the simulator relies on (dual curvature
    windows, gradient identities, mixing contraction, schedule fixed
    points) on small seeded instances. Returns a list of check dicts.
    """
    from .problems import QuadraticClient  # local alias for handmade instances

    checks = []

    def centralized_window():
        p = make_quadratic(7, 4, 3, 0.1, 1.0)
        dq = analysis.dual_hessian_centralized(p)
        lo, hi = dq.curvature_range()
        blo, bhi = analysis.predicted_dual_bounds(p, "centralized")
        assert lo >= blo * (1 - 1e-9) and hi <= bhi * (1 + 1e-9), (lo, hi, blo, bhi)
        return "eigs in [%.4g, %.4g] within [%.4g, %.4g]" % (lo, hi, blo, bhi)

    def centralized_hand_value():
        c = [QuadraticClient(np.array([[1.0]]), np.array([0.3])) for _ in range(2)]
        p = ProblemSpec(M=2, n=1, clients=tuple(c), mu=1.0, L=1.0, sigma=0.0,
                        convexity_class="strongly_convex", curvature_lb=1.0)
        dq = analysis.dual_hessian_centralized(p)
        got = dq.neg_hessian[0, 0]
        assert abs(got - 16.0 / 3.0) < 1e-12, got
        return "1x1 curvature = %.12g (expect 16/3)" % got

    def decentralized_window():
        p = make_quadratic(11, 4, 3, 0.1, 1.0)
        t = build_topology("ring", 4)
        dq = analysis.dual_hessian_decentralized(p, t)
        lo, hi = dq.curvature_range()
        blo, bhi = analysis.predicted_dual_bounds(p, "decentralized", t)
        assert lo >= blo * (1 - 1e-9) and hi <= bhi * (1 + 1e-9), (lo, hi, blo, bhi)
        return "restricted eigs in [%.4g, %.4g] within [%.4g, %.4g]" % (lo, hi, blo, bhi)

    def gradient_identity():
        p = make_quadratic(3, 3, 2, 0.2, 2.0)
        t = build_topology("ring", 3)
        rng = np.random.default_rng(0)
        lam = rng.standard_normal((2, 2))
        g = analysis.dual_grad_centralized(p, lam)
        fd = analysis.fd_gradient(lambda l: analysis.dual_value_centralized(p, l), lam)
        rel_c = np.linalg.norm(g - fd) / max(np.linalg.norm(g), 1e-12)
        lam2 = rng.standard_normal((3, 2))
        g2 = analysis.dual_grad_decentralized(p, t, lam2)
        fd2 = analysis.fd_gradient(lambda l: analysis.dual_value_decentralized(p, t, l), lam2)
        rel_d = np.linalg.norm(g2 - fd2) / max(np.linalg.norm(g2), 1e-12)
        assert rel_c < 1e-6 and rel_d < 1e-6, (rel_c, rel_d)
        return "fd rel err centralized %.2e, decentralized %.2e" % (rel_c, rel_d)

    def mixing_contraction():
        t = build_topology("ring", 8)
        X = np.random.default_rng(1).standard_normal((8, 3))
        _, devs = topo_mod.gossip_average(t, X, 10)
        ratios = [b / a for a, b in zip(devs, devs[1:]) if a > 1e-14]
        assert max(ratios) <= t.sigma2 + 1e-12, max(ratios)
        U = topo_mod.u_matrix(t)
        res = np.linalg.norm(U @ U - (np.eye(8) - t.W))
        assert res < 1e-12, res
        return "max per-round ratio %.4f <= sigma2 %.4f; ||U^2-(I-W)|| = %.1e" % (
            max(ratios), t.sigma2, res)

    def catalyst_fixed_point():
        q = 0.25
        alphas, betas = catalyst.momentum_schedule("sc", q, 6)
        assert np.allclose(alphas, 0.5, rtol=1e-15), alphas
        expect = (1 - 0.5) / (1 + 0.5)
        assert np.allclose(betas, expect, rtol=1e-14), betas
        for a0, a1 in zip(alphas, alphas[1:]):
            assert catalyst.alpha_recursion_residual(a0, a1, q) < 1e-12
        return "alpha stays 0.5, beta = 1/3, recursion residual < 1e-12"

    def rate_fit_examples():
        r, r2 = fit_geometric_rate([1.0, 0.5, 0.25, 0.125, 0.0625])
        assert abs(r - 0.5) < 1e-12 and abs(r2 - 1.0) < 1e-12, (r, r2)
        rf, r2f = fit_geometric_rate([3.0] * 8)
        assert rf == 1.0 and r2f == 1.0, (rf, r2f)
        return "halving series -> rate 0.5, flat series -> 1.0"

    def serialization_roundtrip():
        p = make_quadratic(5, 3, 2, 0.5, 5.0)
        q = problem_from_dict(problem_to_dict(p))
        for a, b in zip(p.clients, q.clients):
            assert np.array_equal(a.A, b.A) and np.array_equal(a.b, b.b)
        return "quadratic instance round-trips exactly"

    checks.append(_check("centralized dual curvature window", centralized_window))
    checks.append(_check("centralized dual hand value", centralized_hand_value))
    checks.append(_check("decentralized dual curvature window", decentralized_window))
    checks.append(_check("dual gradient identities (finite differences)", gradient_identity))
    checks.append(_check("gossip contraction and U^2 = I - W", mixing_contraction))
    checks.append(_check("catalyst momentum fixed point", catalyst_fixed_point))
    checks.append(_check("geometric rate fit examples", rate_fit_examples))
    checks.append(_check("problem serialization round-trip", serialization_roundtrip))
    return checks
