"""Independent least-squares rate fit frozen into tests/_frozen.py.

Recomputes the geometric-rate fit by the textbook closed-form normal
equations in pure Python (math only, no numpy, no library imports):
keep entries above 10 * eps * first value, drop the first 20% (floor) as
burn-in, regress log(value) on the original index.

Run:  python3 tools/oracle_rate_fit.py
"""

import math

SERIES = [2.0, 1.1, 0.7, 0.33, 0.18, 0.09, 0.05, 0.024]
EPS = 2.220446049250313e-16  # IEEE double machine epsilon


def fit(series):
    floor = 10.0 * EPS * series[0]
    kept = [(i, v) for i, v in enumerate(series) if v > floor]
    drop = math.floor(0.2 * len(kept))
    kept = kept[drop:]
    ts = [float(i) for i, _ in kept]
    ys = [math.log(v) for _, v in kept]
    n = len(ts)
    st, sy = sum(ts), sum(ys)
    stt = sum(t * t for t in ts)
    sty = sum(t * y for t, y in zip(ts, ys))
    slope = (n * sty - st * sy) / (n * stt - st * st)
    intercept = (sy - slope * st) / n
    ss_res = sum((y - (slope * t + intercept)) ** 2 for t, y in zip(ts, ys))
    mean_y = sy / n
    ss_tot = sum((y - mean_y) ** 2 for y in ys)
    return math.exp(slope), 1.0 - ss_res / ss_tot


def main():
    rate, r2 = fit(SERIES)
    print("# frozen constants (paste into tests/_frozen.py)")
    print("RATE_FIT_SERIES = %r" % (SERIES,))
    print("RATE_FIT_RATE = %.17g" % rate)
    print("RATE_FIT_R2 = %.17g" % r2)
    # the doubling-decay example has an exact answer: rate 1/2, perfect fit
    exact_rate, exact_r2 = fit([1.0, 0.5, 0.25, 0.125, 0.0625])
    print("RATE_HALVING_RATE = %.17g" % exact_rate)
    print("RATE_HALVING_R2 = %.17g" % exact_r2)


if __name__ == "__main__":
    main()
