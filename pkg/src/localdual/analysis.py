"""Dual-function oracles for the two saddle formulations.

Centralized form (one coordinator, M-1 workers holding local copies):

    Lt(x1, X, lam) = (1/M)(F_1(x1) + sum_m F_m(x_m))
                     - mu/(4M) ||X||^2 + mu(M-1)/(4M) ||x1||^2
                     + sum_m <lam_m, x_m - x1>

Decentralized form over a mixing matrix W with U = sqrt(I - W):

    L(X, lam) = (1/M) sum_m F_m(x_m) + <lam, U X>

Both duals are concave quadratics when every client is quadratic; this
module materializes them exactly (dense Hessians, small M and n only) so
their curvature and maximizers can be certified. Runtime algorithms never
touch U or these dense objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError
from .problems import ProblemSpec, evaluate
from .topology import Topology, u_matrix

_SPAN_EIG_CUTOFF = 1e-10  # eigenvalues of I - W above this count as nonzero


# ---------------------------------------------------------------------------
# primal argmin maps (quadratic clients only)


def _require_quadratic(p):
    if not p.is_quadratic():
        raise ValidationError("closed-form dual analysis needs quadratic clients")


def primal_argmin_given_dual(p: ProblemSpec, dual: np.ndarray, formulation: str):
    """Minimizer of the Lagrangian over the primal block at a fixed dual.

    formulation "centralized": dual has shape (M-1, n); returns the (M, n)
    stack whose row 0 is the coordinator block
        x1 = (A_0 + mu(M-1)/2 I)^{-1} (b_0 + M sum_m lam_m)
    and row m >= 1 solves (A_m - mu/2 I) x_m = b_m - M lam_m.

    formulation "decentralized": dual is zeta = U lam with shape (M, n);
    row m solves A_m x_m = b_m - M zeta_m.
    """
    _require_quadratic(p)
    A, b = p.quad_arrays()
    dual = np.asarray(dual, dtype=float)
    n = p.n
    if formulation == "centralized":
        if dual.shape != (p.M - 1, n):
            raise ValidationError("centralized dual must have shape (M-1, n)")
        out = np.empty((p.M, n))
        out[0] = np.linalg.solve(
            A[0] + 0.5 * p.mu * (p.M - 1) * np.eye(n), b[0] + p.M * dual.sum(axis=0)
        )
        for m in range(1, p.M):
            out[m] = np.linalg.solve(A[m] - 0.5 * p.mu * np.eye(n), b[m] - p.M * dual[m - 1])
        return out
    if formulation == "decentralized":
        if dual.shape != (p.M, n):
            raise ValidationError("decentralized dual must have shape (M, n)")
        out = np.empty((p.M, n))
        for m in range(p.M):
            out[m] = np.linalg.solve(A[m], b[m] - p.M * dual[m])
        return out
    raise ValidationError("unknown formulation %r" % (formulation,))


# ---------------------------------------------------------------------------
# Lagrangian and dual values (any client family)


def lagrangian_centralized(p: ProblemSpec, x1, X, lam) -> float:
    """Lt(x1, X, lam); X and lam carry the M-1 worker rows."""
    x1 = np.asarray(x1, dtype=float)
    X = np.asarray(X, dtype=float)
    lam = np.asarray(lam, dtype=float)
    total = evaluate(p, 0, x1)[0]
    for m in range(1, p.M):
        total += evaluate(p, m, X[m - 1])[0]
    val = total / p.M
    val -= 0.25 * p.mu / p.M * float(np.sum(X * X))
    val += 0.25 * p.mu * (p.M - 1) / p.M * float(x1 @ x1)
    val += float(np.sum(lam * (X - x1[None, :])))
    return val


def lagrangian_decentralized(p: ProblemSpec, X, lam, t: Topology) -> float:
    """L(X, lam) = (1/M) sum F_m(x_m) + <lam, U X>. Analysis only."""
    X = np.asarray(X, dtype=float)
    lam = np.asarray(lam, dtype=float)
    total = sum(evaluate(p, m, X[m])[0] for m in range(p.M))
    return total / p.M + float(np.sum(lam * (u_matrix(t) @ X)))


def dual_value_centralized(p: ProblemSpec, lam) -> float:
    full = primal_argmin_given_dual(p, lam, "centralized")
    return lagrangian_centralized(p, full[0], full[1:], lam)


def dual_grad_centralized(p: ProblemSpec, lam) -> np.ndarray:
    """Gradient of the centralized dual: worker iterates minus coordinator."""
    full = primal_argmin_given_dual(p, lam, "centralized")
    return full[1:] - full[0][None, :]


def dual_value_decentralized(p: ProblemSpec, t: Topology, lam) -> float:
    U = u_matrix(t)
    zeta = U @ np.asarray(lam, dtype=float)
    X = primal_argmin_given_dual(p, zeta, "decentralized")
    total = sum(evaluate(p, m, X[m])[0] for m in range(p.M))
    return total / p.M + float(np.sum(np.asarray(lam) * (U @ X)))


def dual_grad_decentralized(p: ProblemSpec, t: Topology, lam) -> np.ndarray:
    """Gradient U X*(U lam) of the decentralized dual at lam, shape (M, n)."""
    U = u_matrix(t)
    zeta = U @ np.asarray(lam, dtype=float)
    return U @ primal_argmin_given_dual(p, zeta, "decentralized")


# ---------------------------------------------------------------------------
# exact dual quadratics


@dataclass(frozen=True)
class DualQuadratic:
    """psi(lam) = constant + <linear, lam> - 0.5 lam' H lam with H = -hess psi.

    For the decentralized formulation the dual is flat along directions with
    U lam = 0; restriction_basis holds an orthonormal basis of the
    complementary (curved) subspace and argmax/curvature_range work inside
    it. Centralized duals have no flat directions and a None basis.
    """

    neg_hessian: np.ndarray
    linear: np.ndarray
    constant: float
    domain_dim: int
    restriction_basis: Optional[np.ndarray] = None

    def value(self, lam_vec):
        lam_vec = np.asarray(lam_vec, dtype=float).ravel()
        return self.constant + float(self.linear @ lam_vec) - 0.5 * float(
            lam_vec @ (self.neg_hessian @ lam_vec)
        )

    def grad(self, lam_vec):
        lam_vec = np.asarray(lam_vec, dtype=float).ravel()
        return self.linear - self.neg_hessian @ lam_vec

    def curvature_range(self):
        """(smallest, largest) eigenvalue of -hess psi on the curved subspace."""
        H = self.neg_hessian
        if self.restriction_basis is not None:
            B = self.restriction_basis
            H = B.T @ H @ B
        if H.shape[0] == 0:
            return 0.0, 0.0
        eigs = np.linalg.eigvalsh(H)
        return float(eigs[0]), float(eigs[-1])

    def argmax(self):
        """Maximizer as a flat vector; the minimum-norm one when restricted."""
        if self.restriction_basis is None:
            if self.domain_dim == 0:
                return np.zeros(0)
            return np.linalg.solve(self.neg_hessian, self.linear)
        B = self.restriction_basis
        coef = np.linalg.solve(B.T @ self.neg_hessian @ B, B.T @ self.linear)
        return B @ coef


def dual_hessian_centralized(p: ProblemSpec) -> DualQuadratic:
    """Exact centralized dual quadratic in the stacked worker duals.

    The negated Hessian is the sum of a block-diagonal worker part
    M (A_m - mu/2 I)^{-1} and a rank-one-in-blocks coordinator part
    1 1' (x) M (A_0 + mu(M-1)/2 I)^{-1}; both come straight from the
    argmin maps, so positive definiteness certifies strong concavity.
    """
    _require_quadratic(p)
    A, b = p.quad_arrays()
    n, M = p.n, p.M
    d = (M - 1) * n
    I = np.eye(n)
    coord_inv = M * np.linalg.inv(A[0] + 0.5 * p.mu * (M - 1) * I)
    H = np.kron(np.ones((M - 1, M - 1)), coord_inv)
    for m in range(1, M):
        blk = M * np.linalg.inv(A[m] - 0.5 * p.mu * I)
        i = (m - 1) * n
        H[i:i + n, i:i + n] += blk
    H = 0.5 * (H + H.T)
    zero = np.zeros((M - 1, n))
    lin = dual_grad_centralized(p, zero).ravel() if M > 1 else np.zeros(0)
    const = dual_value_centralized(p, zero)
    return DualQuadratic(neg_hessian=H, linear=lin, constant=const, domain_dim=d)


def dual_hessian_decentralized(p: ProblemSpec, t: Topology) -> DualQuadratic:
    """Exact decentralized dual quadratic in vec(lam), row-major (client, coord).

    -hess psi = (U (x) I_n) blockdiag(M A_m^{-1}) (U (x) I_n); the
    restriction basis spans the nonzero eigenspace of I - W lifted by the
    identity on coordinates.
    """
    _require_quadratic(p)
    if t.M != p.M:
        raise ValidationError("topology size does not match problem")
    A, b = p.quad_arrays()
    n, M = p.n, p.M
    U = u_matrix(t)
    K = np.kron(U, np.eye(n))
    D = np.zeros((M * n, M * n))
    for m in range(M):
        i = m * n
        D[i:i + n, i:i + n] = M * np.linalg.inv(A[m])
    H = K @ D @ K
    H = 0.5 * (H + H.T)
    X0 = primal_argmin_given_dual(p, np.zeros((M, n)), "decentralized")
    lin = (U @ X0).ravel()
    const = sum(evaluate(p, m, X0[m])[0] for m in range(M)) / M
    evals, evecs = np.linalg.eigh(np.eye(M) - t.W)
    keep = evecs[:, evals > _SPAN_EIG_CUTOFF]
    basis = np.kron(keep, np.eye(n))
    return DualQuadratic(neg_hessian=H, linear=lin, constant=const,
                         domain_dim=M * n, restriction_basis=basis)


def predicted_dual_bounds(p: ProblemSpec, formulation: str, t: Optional[Topology] = None):
    """Certified (lower, upper) curvature bounds for -hess psi."""
    if formulation == "centralized":
        return 2.0 * p.M / (3.0 * p.L), 4.0 * p.M / p.mu
    if formulation == "decentralized":
        if t is None:
            raise ValidationError("decentralized bounds need a topology")
        return p.M * (1.0 - t.sigma2) / p.L, 2.0 * p.M / p.mu
    raise ValidationError("unknown formulation %r" % (formulation,))


# ---------------------------------------------------------------------------
# helpers


def span_residual(zeta) -> float:
    """Norm of the column-wise mean of zeta; zero iff zeta has zero row sums.

    This equals ||c|| when every row of zeta is the same vector c.
    """
    zeta = np.asarray(zeta, dtype=float)
    return float(np.linalg.norm(zeta.mean(axis=0)))


def lam_from_zeta(t: Topology, zeta) -> np.ndarray:
    """Minimum-norm lam with U lam = zeta (pseudoinverse of U applied rowwise)."""
    return np.linalg.pinv(u_matrix(t)) @ np.asarray(zeta, dtype=float)


def fd_gradient(func, lam, h=None):
    """Central-difference gradient of func at lam (any array shape).

    Step h defaults to 1e-5 (1 + ||lam||), one shared value per call.
    """
    lam = np.asarray(lam, dtype=float)
    if h is None:
        h = 1e-5 * (1.0 + float(np.linalg.norm(lam)))
    flat = lam.ravel()
    g = np.empty(flat.size)
    for i in range(flat.size):
        e = np.zeros(flat.size)
        e[i] = h
        g[i] = (func((flat + e).reshape(lam.shape)) - func((flat - e).reshape(lam.shape))) / (2 * h)
    return g.reshape(lam.shape)
