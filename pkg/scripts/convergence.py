"""max_{|x|<=r} |S_R^z f(x) - f(x)| along R = 2^j for delta and a random f.

    python3 scripts/convergence.py --q 2 --z 0.5+1j --radius 6
"""
import argparse

import numpy as np

from treeharmonic.quadrature import periodic_grid
from treeharmonic.riesz import RieszParams, riesz_apply
from treeharmonic.spectral import SpectralParams
from treeharmonic.tree import TreeParams, ball, delta, random_tree_function


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--z", type=complex, default=1.0)
    ap.add_argument("--radius", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    params = TreeParams(args.q, 2 * args.radius)
    grid = periodic_grid(SpectralParams(args.q))
    pts = list(ball(params, args.radius))
    funcs = {"delta": delta(params), "random": random_tree_function(params, 2, np.random.default_rng(args.seed))}
    print(f"{'R':>8} " + " ".join(f"{k + ' err':>14} {'budget':>10}" for k in funcs))
    for j in range(1, 15):
        R = 2.0**j
        cols = []
        for f in funcs.values():
            s = riesz_apply(RieszParams(args.z, R), f, args.radius, pts, grid)
            cols.append(f"{max(abs(s[x] - f[x]) for x in pts):>14.4e} {s.max_error():>10.2e}")
        print(f"{R:>8g} " + " ".join(cols))


if __name__ == "__main__":
    main()
