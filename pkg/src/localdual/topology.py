"""Gossip topologies: symmetric doubly stochastic mixing matrices.

The mixing matrix W couples clients through the update X <- W X. Builders
produce the standard lazy families (complete, ring, path) whose spectra are
known in closed form; arbitrary matrices can be loaded from a text file and
are validated on entry. sigma2 denotes the second-largest absolute
eigenvalue; connectivity is equivalent to sigma2 < 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ValidationError

_SYM_TOL = 1e-12


@dataclass(frozen=True)
class Topology:
    kind: str
    M: int
    W: np.ndarray
    sigma2: float
    gap: float           # 1 - sigma2
    sigma_min_U: float   # smallest nonzero singular value of U = sqrt(I - W)


def _validate_matrix(W, source):
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValidationError("%s: weight matrix must be square, got shape %s" % (source, W.shape))
    if not np.all(np.isfinite(W)):
        raise ValidationError("%s: weight matrix has nonfinite entries" % source)
    if np.max(np.abs(W - W.T)) > _SYM_TOL:
        raise ValidationError("%s: weight matrix is not symmetric" % source)
    rows = W.sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > 1e-10:
        raise ValidationError("%s: rows must sum to one (max deviation %.3g)" % (source, np.max(np.abs(rows - 1.0))))
    return W


def _finalize(kind, W, source="topology"):
    W = _validate_matrix(W, source)
    M = W.shape[0]
    eigs = np.linalg.eigvalsh(W)
    if np.max(np.abs(eigs)) > 1.0 + 1e-10:
        raise ValidationError("%s: spectral radius exceeds one" % source)
    # descending by signed value; eigs[-1] is 1 for a valid W
    idx = np.argsort(eigs)[::-1]
    eigs = eigs[idx]
    sigma2 = float(np.max(np.abs(eigs[1:]))) if M > 1 else 0.0
    if sigma2 < 1e-13:
        sigma2 = 0.0  # exact-averaging matrices, modulo eig roundoff
    if sigma2 >= 1.0 - 1e-12:
        raise ValidationError("%s: second-largest absolute eigenvalue must be below one "
                              "(graph disconnected?)" % source)
    # smallest nonzero eigenvalue of I - W is 1 - (second largest signed eig)
    smin_sq = 1.0 - float(eigs[1]) if M > 1 else 1.0
    return Topology(kind=kind, M=M, W=W, sigma2=sigma2, gap=1.0 - sigma2,
                    sigma_min_U=float(np.sqrt(max(smin_sq, 0.0))))


def build_topology(kind: str, M: int) -> Topology:
    """Standard lazy mixing matrices.

    complete: W = (1/M) 11', sigma2 = 0.
    ring:     self weight 1/2, each neighbor 1/4; eigenvalues
              1/2 + cos(2 pi k / M)/2; needs M >= 3.
    path:     interior self 1/2 / neighbors 1/4, endpoints self 3/4;
              eigenvalues 1/2 + cos(pi k / M)/2.
    """
    if M < 1:
        raise ConfigError("M must be positive")
    if kind == "complete":
        W = np.full((M, M), 1.0 / M)
    elif kind == "ring":
        if M < 3:
            raise ConfigError("ring topology needs M >= 3 (use path or complete)")
        W = np.eye(M) * 0.5
        for m in range(M):
            W[m, (m + 1) % M] += 0.25
            W[m, (m - 1) % M] += 0.25
    elif kind == "path":
        if M < 2:
            raise ConfigError("path topology needs M >= 2")
        W = np.eye(M) * 0.5
        W[0, 0] = W[-1, -1] = 0.75
        for m in range(M - 1):
            W[m, m + 1] = W[m + 1, m] = 0.25
    elif kind == "star":
        # a lazy star's mixing spectrum degrades with M and the coordinator
        # role it implies is already covered by the centralized algorithms
        raise ConfigError("star topology is intentionally unsupported; "
                          "use the centralized algorithms for a hub-spoke layout")
    else:
        raise ConfigError("unknown topology kind %r" % (kind,))
    return _finalize(kind, W)


def topology_from_matrix(W, kind="custom") -> Topology:
    return _finalize(kind, W, source="custom matrix")


def load_weight_matrix(path) -> Topology:
    """Load a whitespace-delimited square mixing matrix from a text file."""
    try:
        W = np.loadtxt(path, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError("could not parse weight matrix file %s: %s" % (path, exc))
    return _finalize("custom", W, source=str(path))


def spectral_gap(t: Topology):
    """(sigma2, 1 - sigma2, smallest nonzero singular value of U)."""
    return t.sigma2, t.gap, t.sigma_min_U


def mix(t: Topology, X: np.ndarray) -> np.ndarray:
    """One gossip round: W X. Counts as one communication round."""
    X = np.asarray(X, dtype=float)
    if X.shape[0] != t.M:
        raise ValidationError("state has %d rows, topology has %d nodes" % (X.shape[0], t.M))
    return t.W @ X


def gossip_average(t: Topology, X: np.ndarray, rounds: int):
    """Repeated mixing toward consensus.

    Returns (X_final, deviations) where deviations[k] is the Frobenius
    distance to the row mean after k rounds (entry 0 is the initial
    deviation). Each round contracts the deviation by at least sigma2 and
    leaves the mean untouched.
    """
    X = np.asarray(X, dtype=float).copy()
    devs = []
    for _ in range(rounds + 1):
        devs.append(float(np.linalg.norm(X - X.mean(axis=0, keepdims=True))))
        if len(devs) <= rounds:
            X = t.W @ X
    return X, devs


def u_matrix(t: Topology) -> np.ndarray:
    """Symmetric PSD square root U of I - W. Analysis only; runtime
    algorithms never materialize it."""
    eigs, vecs = np.linalg.eigh(np.eye(t.M) - t.W)
    eigs = np.clip(eigs, 0.0, None)
    eigs[eigs < 1e-12] = 0.0  # sqrt would amplify null-space roundoff to 1e-8
    return (vecs * np.sqrt(eigs)) @ vecs.T
