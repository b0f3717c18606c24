"""Constants frozen from the standalone oracle scripts in tools/.

Each block records the script that produced it; rerun the script to
regenerate. The oracles recompute these numbers with methods independent
of the library (black-box minimization + finite differences, pure-Python
rational/decimal arithmetic, hand-rolled elimination), so agreement here
is evidence, not tautology.
"""

# --- tools/oracle_dual_curvature.py ---------------------------------------
HAND_VALUE_M2 = 16.0 / 3.0  # Fraction(16, 3)
CENTRAL_EIG_MIN = 2.48402126426
CENTRAL_EIG_MAX = 9.90531530536
CENTRAL_BOUND_LO = 1.0
CENTRAL_BOUND_HI = 24.0
CENTRAL_PSI_AT_PROBE = -0.993480624585
DECEN_EIG_MIN = 1.19910523611
DECEN_EIG_MAX = 3.314145096
DECEN_BOUND_LO = 1.125
DECEN_BOUND_HI = 12.0
SIGMA2_RING3 = 0.25
DECEN_PSI_AT_PROBE = -0.42050865667

# the literal instance those numbers were computed on
ORACLE_MU, ORACLE_L = 0.5, 2.0
ORACLE_A = [
    [[2.0, 0.3], [0.3, 0.7]],
    [[1.5, -0.4], [-0.4, 0.9]],
    [[0.8, 0.1], [0.1, 1.9]],
]
ORACLE_B = [
    [1.0, -0.5],
    [0.2, 0.7],
    [-1.1, 0.4],
]
ORACLE_CENTRAL_PROBE = [[0.11, -0.07], [0.05, 0.02]]
ORACLE_DECEN_PROBE = [[0.04, -0.02], [0.1, 0.06], [-0.05, 0.01]]

# --- tools/oracle_schedules.py ---------------------------------------------
ALPHAS_Q0 = [1.0, 0.6180339887498949, 0.45588678010286654, 0.3636639571190876,
             0.30350121938992125, 0.2609193849290146]
BETAS_Q0 = [0.0, 0.2817535251253208, 0.434042782780302, 0.5310638054044795,
            0.5987785940560388]
ALPHA1_Q0_GOLDEN = 0.6180339887498949
BETA_FIXED_POINT_Q_QUARTER = 1.0 / 3.0
EPS_SC_Q_QUARTER_S2_DELTA9 = 0.605
EPS_CONVEX_S1_DELTA9_GAMMA1 = 0.0625
EPS_FLAT_DELTA5_S50 = 0.1
PROX_MIN_X = [2.0 / 3.0, 0.0]

# --- tools/oracle_one_round.py ---------------------------------------------
ONE_ROUND_A = (1.0, 0.6)
ONE_ROUND_B = (0.8, -0.4)
ONE_ROUND_MU, ONE_ROUND_L = 0.6, 1.0
ONE_ROUND_TAU1, ONE_ROUND_TAU2 = 0.5, 0.4
GA_ROUND1 = (0.08000000000000002, 0.0, -0.20600000000000002)
GA_ROUND2 = (0.1368, 0.0030000000000000027, -0.216035)
ACC_ROUND1 = ((0.2, -0.1), (0.011250000000000001, -0.011250000000000001),
              (0.014062500000000002, -0.014062500000000002))
ACC_ROUND2 = ((0.34296875000000004, -0.17796875),
              (0.03359765625, -0.03359765625),
              (0.0391845703125, -0.0391845703125))
LED_ROUND1 = ((0.2, -0.1), (0.022500000000000003, -0.022500000000000003),
              (0.022500000000000003, -0.022500000000000003))
LED_ROUND2 = ((0.33875, -0.17375000000000002),
              (0.06093749999999999, -0.06093749999999999),
              (0.06093749999999999, -0.06093749999999999))

# --- tools/oracle_topology.py ----------------------------------------------
SIGMA2_RING4 = 0.5
SMIN_U_RING4 = 0.70710678118654757
SIGMA2_RING8 = 0.85355339059327373
SMIN_U_RING8 = 0.38268343236508984
SIGMA2_PATH2 = 0.5
SIGMA2_PATH4 = 0.85355339059327373
SIGMA2_PATH8 = 0.96193976625564337
SMIN_U_PATH8 = 0.1950903220161283

# --- tools/oracle_rate_fit.py ----------------------------------------------
RATE_FIT_SERIES = [2.0, 1.1, 0.7, 0.33, 0.18, 0.09, 0.05, 0.024]
RATE_FIT_RATE = 0.52480436015372955
RATE_FIT_R2 = 0.99794631765845399

# --- tools/oracle_reference.py ---------------------------------------------
REF_XSTAR = [0.023255813953488344, 0.1714285714285714]
REF_FSTAR = -0.017530454042081946
ARGMIN_X1 = [0.677319587628866, -0.7109965635738832]
ARGMIN_WORKERS = [[0.4283524904214559, 1.6636015325670497],
                  [-2.335933147632312, 0.34763231197771594]]
ARGMIN_SCALAR = -0.4
