"""Independent recomputation of the dual-curvature constants frozen in
tests/_frozen.py.

Works on a small hardcoded quadratic instance (literal matrices below, no
seeded generation) and never imports the library. The dual function is
evaluated by black-box BFGS minimization of the Lagrangian over the primal
variables, its Hessian by central finite differences, so the numbers here
share no code path with the closed-form construction under test.

Run:  python3 tools/oracle_dual_curvature.py
"""

from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

# instance: M = 3 clients, n = 2, mu = 0.5, L = 2.0
MU, L = 0.5, 2.0
A = [
    np.array([[2.0, 0.3], [0.3, 0.7]]),
    np.array([[1.5, -0.4], [-0.4, 0.9]]),
    np.array([[0.8, 0.1], [0.1, 1.9]]),
]
B = [
    np.array([1.0, -0.5]),
    np.array([0.2, 0.7]),
    np.array([-1.1, 0.4]),
]
M, N = 3, 2

# lazy ring on 3 nodes: self 1/2, both neighbors 1/4
W3 = np.array([
    [0.5, 0.25, 0.25],
    [0.25, 0.5, 0.25],
    [0.25, 0.25, 0.5],
])


def f_client(m, x):
    return 0.5 * x @ A[m] @ x - B[m] @ x


def lagrangian_central(z, lam):
    # z = [x1, x2, x3] flattened; lam rows for clients 1..2 (0-based workers)
    x1 = z[:N]
    X = z[N:].reshape(M - 1, N)
    val = f_client(0, x1)
    for m in range(1, M):
        val += f_client(m, X[m - 1])
    val /= M
    val -= MU / (4 * M) * float(np.sum(X * X))
    val += MU * (M - 1) / (4 * M) * float(x1 @ x1)
    val += float(np.sum(lam * (X - x1[None, :])))
    return val


def psi_central(lam_flat):
    lam = lam_flat.reshape(M - 1, N)
    res = minimize(lambda z: lagrangian_central(z, lam), np.zeros(M * N),
                   method="BFGS", options={"gtol": 1e-12, "maxiter": 2000})
    return res.fun


def u_sqrt(Wmat):
    evals, evecs = np.linalg.eigh(np.eye(len(Wmat)) - Wmat)
    return (evecs * np.sqrt(np.clip(evals, 0, None))) @ evecs.T


U3 = u_sqrt(W3)


def lagrangian_decen(z, lam):
    X = z.reshape(M, N)
    val = sum(f_client(m, X[m]) for m in range(M)) / M
    val += float(np.sum(lam * (U3 @ X)))
    return val


def psi_decen(lam_flat):
    lam = lam_flat.reshape(M, N)
    res = minimize(lambda z: lagrangian_decen(z, lam), np.zeros(M * N),
                   method="BFGS", options={"gtol": 1e-12, "maxiter": 2000})
    return res.fun


def fd_hessian(fun, dim, h=1e-4):
    H = np.zeros((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            ei = np.zeros(dim); ei[i] = h
            ej = np.zeros(dim); ej[j] = h
            H[i, j] = H[j, i] = (
                fun(ei + ej) - fun(ei - ej) - fun(-ei + ej) + fun(-ei - ej)
            ) / (4 * h * h)
    return H


def main():
    out = {}

    # hand value via exact rational arithmetic: M=2, n=1, mu=L=1,
    # negated dual curvature = M/(a - mu/2) + M/(a + mu(M-1)/2) with a = 1
    hand = Fraction(2, 1) / (Fraction(1) - Fraction(1, 2)) \
        + Fraction(2, 1) / (Fraction(1) + Fraction(1, 2))
    out["hand_value_m2"] = hand  # expect 16/3

    d_c = (M - 1) * N
    Hc = -fd_hessian(psi_central, d_c)
    eig_c = np.linalg.eigvalsh(Hc)
    out["central_eig_min"] = eig_c[0]
    out["central_eig_max"] = eig_c[-1]
    out["central_bound_lo"] = 2 * M / (3 * L)
    out["central_bound_hi"] = 4 * M / MU

    lam_probe = np.array([0.11, -0.07, 0.05, 0.02])
    out["central_psi_at_probe"] = psi_central(lam_probe)

    d_d = M * N
    Hd = -fd_hessian(psi_decen, d_d)
    # restrict to the span of I - W lifted over coordinates
    evals, evecs = np.linalg.eigh(np.eye(M) - W3)
    keep = evecs[:, evals > 1e-10]
    Bmat = np.kron(keep, np.eye(N))
    eig_d = np.linalg.eigvalsh(Bmat.T @ Hd @ Bmat)
    sigma2 = sorted(abs(v) for v in np.linalg.eigvalsh(W3))[-2]
    out["decen_eig_min"] = eig_d[0]
    out["decen_eig_max"] = eig_d[-1]
    out["decen_bound_lo"] = M * (1 - sigma2) / L
    out["decen_bound_hi"] = 2 * M / MU
    out["sigma2_ring3"] = sigma2

    lam_probe_d = np.array([0.04, -0.02, 0.1, 0.06, -0.05, 0.01])
    out["decen_psi_at_probe"] = psi_decen(lam_probe_d)

    print("# frozen constants (paste into tests/_frozen.py)")
    for k, v in out.items():
        if isinstance(v, Fraction):
            print("%s = %s  # = %r" % (k.upper(), float(v), v))
        else:
            print("%s = %.12g" % (k.upper(), v))


if __name__ == "__main__":
    main()
