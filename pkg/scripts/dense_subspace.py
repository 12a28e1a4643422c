"""Heat-smoothed approximants g = e^{-L/t} e^{-sL} f and their Riesz means.

Prints ||g - f||_p as (s, t) -> (0, inf) and |S_R g - g| at x0 along R = 2^j.

    python3 scripts/dense_subspace.py --q 2
"""
import argparse
import math

from treeharmonic.heat import dense_subspace_experiment
from treeharmonic.tree import TreeParams, delta


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--z", type=complex, default=1.0)
    args = ap.parse_args()

    f = delta(TreeParams(args.q, 16))
    pairs = [(1.0, 1.0), (0.1, 10.0), (0.01, 100.0), (0.001, 1000.0)]
    rows = dense_subspace_experiment(f, pairs, [1.0, 2.0, math.inf], [2.0**j for j in range(1, 15, 3)], args.z)
    for r in rows:
        label = f"p={r['param']:g}" if r["kind"] == "norm" else f"R={r['param']:g}"
        print(f"{r['kind']:>5} s={r['s']:<6g} t={r['t']:<6g} {label:>8} {r['value']:.6e}  (budget {r['error_budget']:.1e})")


if __name__ == "__main__":
    main()
