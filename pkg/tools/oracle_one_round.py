"""Independent pure-Python trajectory oracle frozen into tests/_frozen.py.

Steps two rounds of each algorithm family by hand (plain floats, explicit
arithmetic, no numpy, no library imports) on a tiny two-client scalar
instance with deterministic gradients, fixed stepsizes and K = 1.

Instance: n = 1, M = 2, F_m(x) = 0.5 a_m x^2 - b_m x,
          a = (1.0, 0.6), b = (0.8, -0.4), mu = 0.6, L = 1.0.

Run:  python3 tools/oracle_one_round.py
"""

A = (1.0, 0.6)
B = (0.8, -0.4)
MU, L = 0.6, 1.0
M = 2
TAU1 = 0.5   # worker / client inner step
TAU2 = 0.4   # coordinator inner step
TAU3 = MU / (4 * M)


def grad(m, x):
    return A[m] * x - B[m]


def ga_msgd_two_rounds():
    # dual init (mode with coefficient L): lam = -(1/M) grad_1(x0) + (L/(2M)) x0
    x0 = 0.0
    lam = -grad(1, x0) / M + (L / (2 * M)) * x0
    x_c, x_w = x0, x0  # coordinator, worker
    states = []
    for _ in range(2):
        # K = 1 inner step, both blocks read the round-start dual
        g_c = grad(0, x_c) / M + (MU * (M - 1) / (2 * M)) * x_c - lam
        g_w = grad(1, x_w) / M - (MU / (2 * M)) * x_w + lam
        x_c = x_c - TAU2 * g_c
        x_w = x_w - TAU1 * g_w
        lam = lam + TAU3 * (x_w - x_c)
        states.append((x_c, x_w, lam))
    return states


W = ((0.5, 0.5), (0.5, 0.5))  # exact averaging on two clients


def acc_two_rounds(beta, tau2):
    x = [0.0, 0.0]
    zeta = [0.0, 0.0]
    zeta_t = [0.0, 0.0]
    states = []
    for _ in range(2):
        x = [x[m] - TAU1 * (grad(m, x[m]) / M + zeta_t[m]) for m in range(M)]
        mixed = [sum(W[m][j] * x[j] for j in range(M)) for m in range(M)]
        zeta_new = [zeta_t[m] + tau2 * (x[m] - mixed[m]) for m in range(M)]
        zeta_t = [zeta_new[m] + beta * (zeta_new[m] - zeta[m]) for m in range(M)]
        zeta = zeta_new
        states.append((tuple(x), tuple(zeta), tuple(zeta_t)))
    return states


def main():
    out = {}
    g = ga_msgd_two_rounds()
    out["ga_round1"] = g[0]
    out["ga_round2"] = g[1]
    acc = acc_two_rounds(beta=0.25, tau2=MU / (4 * M))
    out["acc_round1"] = acc[0]
    out["acc_round2"] = acc[1]
    led = acc_two_rounds(beta=0.0, tau2=MU / (2 * M))
    out["led_round1"] = led[0]
    out["led_round2"] = led[1]

    print("# frozen constants (paste into tests/_frozen.py)")
    for k, v in out.items():
        print("%s = %r" % (k.upper(), v))


if __name__ == "__main__":
    main()
