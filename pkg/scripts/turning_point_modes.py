"""How closely the mode amplitudes of the 2D correction follow 1/k^2.

For each eps and beta, solves the mode equation on a dense grid and prints
``k^2 |w_k| / |w_1|`` at the layer centre; the ratios tend to 1 as eps -> 0.

    python scripts/turning_point_modes.py [--kmax 4] [--grid 20000]
"""

import argparse

import numpy as np

from supersens.asympt import AsymptoticParams, w_k_bvp_oracle


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--kmax", type=int, default=4)
    ap.add_argument("--grid", type=int, default=20000)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.05, 0.02, 0.01, 0.005])
    ap.add_argument("--x-star", type=float, default=0.3)
    args = ap.parse_args()

    ks = range(1, args.kmax + 1)
    print(f"{'eps':>7} {'beta':>5}  " + " ".join(f"{'k=' + str(k):>7}" for k in ks))
    for eps in args.eps:
        for beta in (0.0, 1.0):
            p = AsymptoticParams(eps=eps, delta0=1.0, a=0.5, beta=beta, x_star_ref=args.x_star)
            mags = []
            for k in ks:
                x, w = w_k_bvp_oracle(p, k, n_grid=args.grid)
                mags.append(abs(w[np.argmin(np.abs(x - args.x_star))]) * k**2)
            print(f"{eps:7.3f} {beta:5.1f}  " + " ".join(f"{m / mags[0]:7.3f}" for m in mags))


if __name__ == "__main__":
    main()
