"""Synthetic client objectives with certified curvature constants.

A problem instance is a finite-sum of M client objectives F_m; the global
objective is F(x) = (1/M) sum_m F_m(x). Three families are provided:

* quadratic       F_m(x) = 0.5 x'A_m x - b_m'x, spectrum of A_m inside [mu, L]
* logistic        regularized binary logistic loss on per-client data
* nonconvex       logistic plus a bounded smooth nonconvex coordinate penalty

Every generator is deterministic given (seed, shape) and follows the
stream discipline in rng.py: client m consumes only its own child stream,
shared draws come from the algorithm stream. The stochastic gradient
oracle adds Gaussian noise with E||e||^2 = sigma^2, split evenly across
coordinates; sigma = 0 returns the exact gradient without consuming
randomness.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, ValidationError
from .rng import algorithm_stream, client_stream

_REF_TOL_FACTOR = 1e-10  # residual target: 1e-10 * L * (1 + ||x*||)


class QuadraticClient:
    """F_m(x) = 0.5 x'Ax - b'x with A symmetric positive definite."""

    kind = "quadratic"

    def __init__(self, A, b):
        self.A = np.asarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise ValidationError("quadratic client needs a square matrix")
        if self.b.shape != (self.A.shape[0],):
            raise ValidationError("quadratic client linear term has wrong shape")
        if not np.allclose(self.A, self.A.T, atol=1e-12):
            raise ValidationError("quadratic client matrix must be symmetric")

    @property
    def dim(self):
        return self.b.shape[0]

    def value_grad(self, x):
        Ax = self.A @ x
        return 0.5 * float(x @ Ax) - float(self.b @ x), Ax - self.b

    def to_dict(self):
        return {"kind": self.kind, "A": self.A.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["A"]), np.array(d["b"]))


def _stable_sigmoid(z):
    # exp(-logaddexp(0, z)) = 1/(1+e^z) without overflow
    return np.exp(-np.logaddexp(0.0, z))


class LogisticClient:
    """Mean binary logistic loss over local samples plus (reg/2)||x||^2."""

    kind = "logistic"

    def __init__(self, data, labels, reg):
        self.data = np.asarray(data, dtype=float)
        self.labels = np.asarray(labels, dtype=float)
        self.reg = float(reg)
        if self.data.ndim != 2 or self.labels.shape != (self.data.shape[0],):
            raise ValidationError("logistic client data/labels shapes disagree")
        if not np.all(np.abs(self.labels) == 1.0):
            raise ValidationError("logistic labels must be +-1")
        if self.reg < 0:
            raise ValidationError("logistic regularizer must be nonnegative")

    @property
    def dim(self):
        return self.data.shape[1]

    def value_grad(self, x):
        margins = self.labels * (self.data @ x)
        value = float(np.mean(np.logaddexp(0.0, -margins)))
        value += 0.5 * self.reg * float(x @ x)
        weights = self.labels * _stable_sigmoid(margins)
        grad = -(self.data.T @ weights) / self.data.shape[0] + self.reg * x
        return value, grad

    def smoothness_bound(self):
        # hessian of the data term is bounded by D'D/(4N)
        sv = np.linalg.norm(self.data, ord=2)
        return self.reg + 0.25 * sv * sv / self.data.shape[0]

    def to_dict(self):
        return {
            "kind": self.kind,
            "data": self.data.tolist(),
            "labels": self.labels.tolist(),
            "reg": self.reg,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["data"]), np.array(d["labels"]), d["reg"])


class NonconvexClient(LogisticClient):
    """Logistic client plus penalty * sum_j x_j^2 / (1 + x_j^2).

    The penalty term has second derivative in [-penalty/2 * ... ] bounded
    between -0.5*penalty and 2*penalty per coordinate, so it shifts the
    certified curvature window of the logistic part by those amounts.
    """

    kind = "nonconvex"

    def __init__(self, data, labels, reg, penalty):
        super().__init__(data, labels, reg)
        self.penalty = float(penalty)
        if self.penalty < 0:
            raise ValidationError("nonconvex penalty weight must be nonnegative")

    def value_grad(self, x):
        value, grad = super().value_grad(x)
        x2 = x * x
        denom = 1.0 + x2
        value += self.penalty * float(np.sum(x2 / denom))
        grad = grad + self.penalty * 2.0 * x / (denom * denom)
        return value, grad

    def smoothness_bound(self):
        return super().smoothness_bound() + 2.0 * self.penalty

    def to_dict(self):
        d = super().to_dict()
        d["kind"] = self.kind
        d["penalty"] = self.penalty
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["data"]), np.array(d["labels"]), d["reg"], d["penalty"])


_CLIENT_KINDS = {
    QuadraticClient.kind: QuadraticClient,
    LogisticClient.kind: LogisticClient,
    NonconvexClient.kind: NonconvexClient,
}


@dataclass(frozen=True)
class ProblemSpec:
    """A distributed problem instance plus its certified constants.

    mu and L bound every client Hessian spectrum from below/above within
    the declared convexity class; curvature_lb is a lower bound on the
    smallest Hessian eigenvalue of every F_m (negative for nonconvex
    instances). sigma is the stochastic-gradient noise level.
    """

    M: int
    n: int
    clients: tuple
    mu: float
    L: float
    sigma: float
    convexity_class: str
    curvature_lb: float
    seed: Optional[int] = None
    family: str = "custom"

    def __post_init__(self):
        if self.M != len(self.clients) or self.M < 1:
            raise ValidationError("client count does not match M")
        if any(c.dim != self.n for c in self.clients):
            raise ValidationError("client dimension does not match n")
        if self.sigma < 0:
            raise ValidationError("noise level must be nonnegative")
        if self.convexity_class not in ("strongly_convex", "convex", "nonconvex"):
            raise ValidationError("unknown convexity class %r" % (self.convexity_class,))
        if self.mu > self.L * (1 + 1e-12):
            raise ValidationError("mu exceeds L")
        if self.convexity_class == "strongly_convex" and self.mu <= 0:
            raise ValidationError("strongly convex instance needs mu > 0")

    # -- quadratic fast path -------------------------------------------------

    def is_quadratic(self):
        return all(isinstance(c, QuadraticClient) for c in self.clients)

    def quad_arrays(self):
        """Stacked (A, b) with shapes (M, n, n) and (M, n); quadratic only."""
        if not self.is_quadratic():
            raise ValidationError("quadratic arrays requested from a non-quadratic problem")
        A = np.stack([c.A for c in self.clients])
        b = np.stack([c.b for c in self.clients])
        return A, b


@dataclass(frozen=True)
class ReferenceSolution:
    x_star: np.ndarray
    f_star: float
    residual: float
    method: str


# ---------------------------------------------------------------------------
# generators


def _orthogonal(stream, n):
    q, r = np.linalg.qr(stream.standard_normal((n, n)))
    return q * np.sign(np.diag(r))  # sign fix keeps the factorization unique


def _client_eigs(stream, n, mu, L, m):
    if n >= 2:
        eigs = np.empty(n)
        eigs[0] = mu
        eigs[1] = L
        if n > 2:
            eigs[2:] = np.exp(stream.uniform(np.log(mu), np.log(L), size=n - 2))
        return eigs
    # n == 1: a single eigenvalue cannot hit both ends, so pin the extremes
    # on the first two clients and fill the rest log-uniformly
    if m == 0:
        return np.array([L])
    if m == 1:
        return np.array([mu])
    return np.exp(stream.uniform(np.log(mu), np.log(L), size=1))


def make_quadratic(seed, M, n, mu, L, heterogeneity=1.0, sigma=0.0):
    """Seeded quadratic instance with per-client spectra inside [mu, L].

    Each client draws, in order, an orthogonal basis, its eigenvalues and a
    unit heterogeneity direction from its own stream; the shared linear
    center comes from the algorithm stream. For n >= 2 every client carries
    both extreme eigenvalues mu and L exactly.
    """
    if mu <= 0 or L < mu:
        raise ConfigError("need 0 < mu <= L")
    if n == 1 and M == 1 and mu != L:
        raise ConfigError("a 1x1 instance cannot realize distinct mu and L")
    b_bar = algorithm_stream(seed, M).standard_normal(n)
    clients = []
    for m in range(M):
        stream = client_stream(seed, m)
        Q = _orthogonal(stream, n)
        eigs = _client_eigs(stream, n, mu, L, m)
        A = (Q * eigs) @ Q.T
        A = 0.5 * (A + A.T)
        u = stream.standard_normal(n)
        u /= np.linalg.norm(u)
        clients.append(QuadraticClient(A, b_bar + heterogeneity * u))
    return ProblemSpec(
        M=M, n=n, clients=tuple(clients), mu=float(mu), L=float(L),
        sigma=float(sigma), convexity_class="strongly_convex",
        curvature_lb=float(mu), seed=seed, family="quadratic",
    )


def make_logistic(seed, M, n, samples_per_client=20, reg=0.1, sigma=0.0):
    """Seeded regularized logistic regression split across M clients.

    Labels follow a shared ground-truth direction drawn from the algorithm
    stream, so clients are statistically related but heterogeneous. The
    certified smoothness constant is the worst client bound
    reg + lmax(D'D)/(4N); mu equals reg.
    """
    if reg < 0:
        raise ConfigError("reg must be nonnegative")
    x_true = algorithm_stream(seed, M).standard_normal(n)
    x_true /= max(np.linalg.norm(x_true), 1e-12)
    clients = []
    for m in range(M):
        stream = client_stream(seed, m)
        data = stream.standard_normal((samples_per_client, n))
        probs = _stable_sigmoid(-(data @ x_true))  # P(label = +1)
        labels = np.where(stream.uniform(size=samples_per_client) < probs, 1.0, -1.0)
        clients.append(LogisticClient(data, labels, reg))
    L = max(c.smoothness_bound() for c in clients)
    cls = "strongly_convex" if reg > 0 else "convex"
    return ProblemSpec(
        M=M, n=n, clients=tuple(clients), mu=float(reg), L=float(L),
        sigma=float(sigma), convexity_class=cls, curvature_lb=float(reg),
        seed=seed, family="logistic",
    )


def make_nonconvex(seed, M, n, samples_per_client=20, reg=0.05, penalty=0.5, sigma=0.0):
    """Logistic instance plus a smooth bounded nonconvex penalty.

    The penalty s(z) = z^2/(1+z^2) has curvature in [-0.5, 2] per unit
    weight, giving the certified window
    curvature_lb = reg - penalty/2 and L = L_logistic + 2*penalty.
    """
    base = make_logistic(seed, M, n, samples_per_client=samples_per_client,
                         reg=reg, sigma=sigma)
    clients = tuple(
        NonconvexClient(c.data, c.labels, reg, penalty) for c in base.clients
    )
    L = max(c.smoothness_bound() for c in clients)
    return ProblemSpec(
        M=M, n=n, clients=clients, mu=0.0, L=float(L), sigma=float(sigma),
        convexity_class="nonconvex", curvature_lb=float(reg - 0.5 * penalty),
        seed=seed, family="nonconvex",
    )


# ---------------------------------------------------------------------------
# oracles


def evaluate(p: ProblemSpec, m: int, x: np.ndarray):
    """Exact (F_m(x), grad F_m(x)) for client m (0-based)."""
    return p.clients[m].value_grad(np.asarray(x, dtype=float))


def evaluate_global(p: ProblemSpec, x: np.ndarray):
    """Exact (F(x), grad F(x)) of the averaged objective."""
    x = np.asarray(x, dtype=float)
    total = 0.0
    grad = np.zeros(p.n)
    for c in p.clients:
        v, g = c.value_grad(x)
        total += v
        grad += g
    return total / p.M, grad / p.M


def noise_draw(p: ProblemSpec, stream):
    """One additive-noise sample e with E e = 0 and E||e||^2 = sigma^2."""
    return stream.normal(0.0, p.sigma / np.sqrt(p.n), size=p.n)


def stoch_grad(p: ProblemSpec, m: int, x: np.ndarray, stream):
    """Stochastic gradient of F_m at x; exact (no draw) when sigma == 0."""
    _, g = evaluate(p, m, x)
    if p.sigma == 0.0:
        return g
    return g + noise_draw(p, stream)


def client_grads(p: ProblemSpec, X: np.ndarray, streams=None):
    """Stochastic gradients of every client at its own row of X, shape (M, n).

    Row m uses streams[m]; streams may be None when sigma == 0. The per
    client draw order matches stoch_grad exactly.
    """
    X = np.asarray(X, dtype=float)
    if p.is_quadratic():
        A, b = p.quad_arrays()
        G = np.einsum("mij,mj->mi", A, X) - b
    else:
        G = np.stack([p.clients[m].value_grad(X[m])[1] for m in range(p.M)])
    if p.sigma > 0.0:
        if streams is None:
            raise ValidationError("noisy problem requires client streams")
        for m in range(p.M):
            G[m] += noise_draw(p, streams[m])
    return G


def reference_solution(p: ProblemSpec) -> ReferenceSolution:
    """High-accuracy minimizer of the global objective.

    Quadratic instances are solved directly; convex ones by deterministic
    accelerated gradient descent until the gradient residual drops below
    1e-10 * L * (1 + ||x*||). Nonconvex instances have no certified global
    reference and raise.
    """
    if p.convexity_class == "nonconvex":
        raise ValidationError("no certified reference solution for nonconvex instances")
    if p.is_quadratic():
        A, b = p.quad_arrays()
        x = np.linalg.solve(A.mean(axis=0), b.mean(axis=0))
        f, g = evaluate_global(p, x)
        res = float(np.linalg.norm(g))
        return ReferenceSolution(x, f, res, "direct_solve")

    # accelerated gradient with the certified constants
    x = np.zeros(p.n)
    y = x.copy()
    step = 1.0 / p.L
    if p.mu > 0:
        kappa = p.L / p.mu
        momentum = (np.sqrt(kappa) - 1.0) / (np.sqrt(kappa) + 1.0)
    else:
        momentum = None
    t_prev = 1.0
    tol = _REF_TOL_FACTOR * p.L
    for it in range(2_000_000):
        _, g = evaluate_global(p, y)
        x_new = y - step * g
        if momentum is None:
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_prev * t_prev))
            y = x_new + ((t_prev - 1.0) / t_new) * (x_new - x)
            t_prev = t_new
        else:
            y = x_new + momentum * (x_new - x)
        x = x_new
        if it % 10 == 0:
            _, gx = evaluate_global(p, x)
            if np.linalg.norm(gx) <= tol * (1.0 + np.linalg.norm(x)):
                break
    f, g = evaluate_global(p, x)
    res = float(np.linalg.norm(g))
    if res > tol * (1.0 + np.linalg.norm(x)):
        raise ValidationError("reference solver failed to reach target residual")
    return ReferenceSolution(x, f, res, "agd")


def validate_problem(p: ProblemSpec, tol=1e-9):
    """Recheck the certified constants against the actual client spectra."""
    if p.is_quadratic():
        for m, c in enumerate(p.clients):
            eigs = np.linalg.eigvalsh(c.A)
            if eigs.min() < p.mu - tol * p.L or eigs.max() > p.L * (1 + tol):
                raise ValidationError(
                    "client %d spectrum [%.3g, %.3g] escapes [mu, L]" % (m, eigs.min(), eigs.max())
                )
    else:
        for m, c in enumerate(p.clients):
            if c.smoothness_bound() > p.L * (1 + tol):
                raise ValidationError("client %d smoothness bound exceeds L" % m)
    return True


# ---------------------------------------------------------------------------
# serialization

_FORMAT_NAME = "localdual-problem"
_FORMAT_VERSION = 1


def problem_to_dict(p: ProblemSpec) -> dict:
    return {
        "format": _FORMAT_NAME,
        "version": _FORMAT_VERSION,
        "M": p.M,
        "n": p.n,
        "mu": p.mu,
        "L": p.L,
        "sigma": p.sigma,
        "convexity_class": p.convexity_class,
        "curvature_lb": p.curvature_lb,
        "seed": p.seed,
        "family": p.family,
        "clients": [c.to_dict() for c in p.clients],
    }


def problem_from_dict(d: dict) -> ProblemSpec:
    if d.get("format") != _FORMAT_NAME:
        raise ConfigError("not a problem file (format field missing or wrong)")
    if d.get("version") != _FORMAT_VERSION:
        raise ConfigError("unsupported problem file version %r" % (d.get("version"),))
    clients = []
    for i, cd in enumerate(d["clients"]):
        kind = cd.get("kind")
        if kind not in _CLIENT_KINDS:
            raise ConfigError("clients[%d]: unknown kind %r" % (i, kind))
        clients.append(_CLIENT_KINDS[kind].from_dict(cd))
    return ProblemSpec(
        M=d["M"], n=d["n"], clients=tuple(clients), mu=d["mu"], L=d["L"],
        sigma=d["sigma"], convexity_class=d["convexity_class"],
        curvature_lb=d["curvature_lb"], seed=d.get("seed"),
        family=d.get("family", "custom"),
    )


def save_problem(p: ProblemSpec, path):
    tmp = str(path) + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(problem_to_dict(p), fh, indent=1)
    os.replace(tmp, path)


def load_problem(path) -> ProblemSpec:
    with open(path) as fh:
        return problem_from_dict(json.load(fh))
