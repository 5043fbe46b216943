"""Small- and large-|z| behaviour of Q for loosely bound potentials.

For small x = |z|^2 the series gives Q ~ x (2 g1/g2 - 1/g1), whose sign is
that of (E1 - E0) - (E2 - E1).  For large x the photon number distribution
is peaked with variance ~ <N>/p, so Q -> 1/p - 1.  Both limits are compared
against the full computation over a range of gamma.
"""
import argparse
import math

import numpy as np

from gha_coherent import PowerLawSpec, mandel_q
from gha_coherent.powerlaw import g_factor


def small_x_slope(spec):
    g1 = math.exp(g_factor(1, spec))
    g2 = math.exp(g_factor(2, spec))
    return 2 * g1 / g2 - 1 / g1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, nargs="+", default=[0.5, 1.0, 1.5])
    ap.add_argument("--gamma", type=float, nargs="+", default=[0.0, 1.0, 2.0, 4.0, 8.0])
    args = ap.parse_args()

    print(f"{'k':>5} {'gamma':>6} {'slope':>12} {'Q(x=1e-4)/x':>12} {'Q(mean~1e4)':>12} {'1/p-1':>8}")
    for k in args.k:
        for gamma in args.gamma:
            spec = PowerLawSpec(k, gamma)
            p = spec.exponent
            x_far = 1e4**p
            print(f"{k:5g} {gamma:6g} {small_x_slope(spec):12.6g} "
                  f"{mandel_q(1e-4, spec) / 1e-4:12.6g} {mandel_q(x_far, spec):12.6g} {1 / p - 1:8.4g}")


if __name__ == "__main__":
    np.seterr(under="ignore")
    main()
