"""Independent spectral constants for the standard topologies, frozen into
tests/_frozen.py. Uses the closed-form eigenvalues (cosine formulas) only;
pure Python math, no numpy, no library imports.

Lazy ring:  eigenvalues 1/2 + cos(2 pi k / M) / 2, k = 0..M-1
Lazy path:  eigenvalues 1/2 + cos(pi k / M) / 2,  k = 0..M-1
Complete:   eigenvalues {1, 0}

sigma2 is the second-largest absolute eigenvalue; the smallest nonzero
singular value of U = sqrt(I - W) is sqrt(1 - second largest signed
eigenvalue).

Run:  python3 tools/oracle_topology.py
"""

import math


def ring_eigs(M):
    return sorted((0.5 + 0.5 * math.cos(2 * math.pi * k / M) for k in range(M)),
                  reverse=True)


def path_eigs(M):
    return sorted((0.5 + 0.5 * math.cos(math.pi * k / M) for k in range(M)),
                  reverse=True)


def stats(eigs):
    sigma2 = max(abs(v) for v in eigs[1:])
    smin_u = math.sqrt(1.0 - eigs[1])
    return sigma2, smin_u


def main():
    out = {}
    for M in (4, 8):
        s2, smin = stats(ring_eigs(M))
        out["sigma2_ring%d" % M] = s2
        out["smin_u_ring%d" % M] = smin
    for M in (2, 4, 8):
        s2, smin = stats(path_eigs(M))
        out["sigma2_path%d" % M] = s2
        out["smin_u_path%d" % M] = smin
    out["sigma2_complete"] = 0.0
    out["smin_u_complete"] = 1.0
    # closed forms worth pinning exactly
    out["sigma2_ring4_exact"] = 0.5
    out["sigma2_ring8_exact"] = 0.5 + 0.25 * math.sqrt(2.0)

    print("# frozen constants (paste into tests/_frozen.py)")
    for k, v in out.items():
        print("%s = %.17g" % (k.upper(), v))


if __name__ == "__main__":
    main()
