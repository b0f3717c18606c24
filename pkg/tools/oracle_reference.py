"""Independent reference-solution and argmin-map constants frozen into
tests/_frozen.py. Solves the small linear systems by hand-rolled Gaussian
elimination with partial pivoting; pure Python, no numpy, no library
imports.

Run:  python3 tools/oracle_reference.py
"""

# same literal instance as tools/oracle_dual_curvature.py
MU, L = 0.5, 2.0
A = [
    [[2.0, 0.3], [0.3, 0.7]],
    [[1.5, -0.4], [-0.4, 0.9]],
    [[0.8, 0.1], [0.1, 1.9]],
]
B = [
    [1.0, -0.5],
    [0.2, 0.7],
    [-1.1, 0.4],
]
M, N = 3, 2


def solve(mat, rhs):
    # Gaussian elimination with partial pivoting on copies
    a = [row[:] for row in mat]
    b = rhs[:]
    n = len(b)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            for c in range(col, n):
                a[r][c] -= f * a[col][c]
            b[r] -= f * b[col]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        s = b[r] - sum(a[r][c] * x[c] for c in range(r + 1, n))
        x[r] = s / a[r][r]
    return x


def main():
    # global minimizer: mean(A) x = mean(b)
    Abar = [[sum(A[m][i][j] for m in range(M)) / M for j in range(N)] for i in range(N)]
    bbar = [sum(B[m][i] for m in range(M)) / M for i in range(N)]
    xstar = solve(Abar, bbar)
    fstar = 0.0
    for m in range(M):
        ax = [sum(A[m][i][j] * xstar[j] for j in range(N)) for i in range(N)]
        fstar += 0.5 * sum(xstar[i] * ax[i] for i in range(N)) \
            - sum(B[m][i] * xstar[i] for i in range(N))
    fstar /= M

    # centralized argmin rows at a nonzero dual (lam rows for workers 1, 2)
    lam = [[0.11, -0.07], [0.05, 0.02]]
    lam_sum = [lam[0][i] + lam[1][i] for i in range(N)]
    coord_mat = [[A[0][i][j] + (MU * (M - 1) / 2) * (i == j) for j in range(N)]
                 for i in range(N)]
    coord_rhs = [B[0][i] + M * lam_sum[i] for i in range(N)]
    x1 = solve(coord_mat, coord_rhs)
    workers = []
    for m in (1, 2):
        mat = [[A[m][i][j] - (MU / 2) * (i == j) for j in range(N)] for i in range(N)]
        rhs = [B[m][i] - M * lam[m - 1][i] for i in range(N)]
        workers.append(solve(mat, rhs))

    # scalar hand value: A = I1, b = 0, M = 2, mu = 1, lam = 0.1
    # worker solve: (1 - 1/2) x = 0 - 2 * 0.1  =>  x = -0.4
    x_scalar = (0.0 - 2 * 0.1) / (1.0 - 0.5)

    print("# frozen constants (paste into tests/_frozen.py)")
    print("REF_XSTAR = %r" % (xstar,))
    print("REF_FSTAR = %.17g" % fstar)
    print("ARGMIN_LAM = %r" % (lam,))
    print("ARGMIN_X1 = %r" % (x1,))
    print("ARGMIN_WORKERS = %r" % (workers,))
    print("ARGMIN_SCALAR = %.17g" % x_scalar)


if __name__ == "__main__":
    main()
