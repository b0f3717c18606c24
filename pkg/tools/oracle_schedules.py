"""Independent recomputation of outer-loop schedule constants frozen in
tests/_frozen.py. Pure Python arithmetic (Fraction / Decimal), no numpy,
no library imports.

Run:  python3 tools/oracle_schedules.py
"""

from decimal import Decimal, getcontext
from fractions import Fraction

getcontext().prec = 50


def alpha_next(alpha_prev, q):
    # positive root of a^2 + (alpha_prev^2 - q) a - alpha_prev^2 = 0
    c1 = alpha_prev * alpha_prev - q
    disc = c1 * c1 + 4 * alpha_prev * alpha_prev
    return (-c1 + disc.sqrt()) / 2


def main():
    out = {}

    # q = 0 chain from alpha_0 = 1: alpha_1 is the golden-ratio conjugate
    q = Decimal(0)
    alpha = Decimal(1)
    alphas = [alpha]
    betas = []
    for _ in range(5):
        a_new = alpha_next(alpha, q)
        betas.append(alpha * (1 - alpha) / (alpha * alpha + a_new))
        alphas.append(a_new)
        alpha = a_new
    out["alphas_q0"] = [float(a) for a in alphas]
    out["betas_q0"] = [float(b) for b in betas]
    golden = (Decimal(5).sqrt() - 1) / 2
    out["alpha1_q0_expected_golden"] = float(golden)

    # strongly convex fixed point with exact rationals: q = 1/4
    qf = Fraction(1, 4)
    a = Fraction(1, 2)  # sqrt(q)
    c1 = a * a - qf
    assert c1 == 0
    a_next = a  # root of a'^2 - a^2 = 0 with positive sign
    beta_fp = a * (1 - a) / (a * a + a_next)
    out["beta_fixed_point_q_quarter"] = float(beta_fp)  # expect 1/3

    # epsilon schedule plug-in values (Fraction where exact)
    # geometric mode: (2/9) (1 - 0.9 sqrt(q))^s * delta at q = 1/4, s = 2, delta = 9
    val_sc = Fraction(2, 9) * (1 - Fraction(9, 10) * Fraction(1, 2)) ** 2 * 9
    out["eps_sc_q_quarter_s2_delta9"] = float(val_sc)
    # polynomial mode: 2 delta / (9 (s+1)^(4+gamma)) at delta = 9, s = 1, gamma = 1
    val_cv = Fraction(2 * 9, 9 * 2 ** 5)
    out["eps_convex_s1_delta9_gamma1"] = float(val_cv)
    # flat mode: delta / S at delta = 5, S = 50
    out["eps_flat_delta5_S50"] = float(Fraction(5, 50))

    # proximal subproblem hand value: A = I2, b = 0, weight 1, center (1, 0)
    # => A' = 3 I, b' = (2, 0), minimizer (2/3, 0)
    out["prox_min_x"] = [float(Fraction(2, 3)), 0.0]

    print("# frozen constants (paste into tests/_frozen.py)")
    for k, v in out.items():
        print("%s = %r" % (k.upper(), v))


if __name__ == "__main__":
    main()
