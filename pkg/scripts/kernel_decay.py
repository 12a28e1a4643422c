"""Empirical decay constant sup_n Q^{n/2}|kappa_R^z(n)| over a (z, R) grid.

    python3 scripts/kernel_decay.py --q 3 --shells 30
"""
import argparse

from treeharmonic.checks import DYADIC_R, STANDARD_Z
from treeharmonic.quadrature import periodic_grid
from treeharmonic.riesz import RieszParams, decay_constant, kernel_report
from treeharmonic.spectral import SpectralParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--shells", type=int, default=30)
    ap.add_argument("--nodes", type=int, default=512)
    args = ap.parse_args()

    sp = SpectralParams(args.q)
    grid = periodic_grid(sp, args.nodes)
    print(f"bound 1/(1-1/Q) = {decay_constant(args.q):.6f}")
    print(f"{'z':>10} {'R':>8} {'max ratio':>12} {'argmax n':>9} {'two-route':>11}")
    for z in STANDARD_Z:
        for R in DYADIC_R:
            rep = kernel_report(RieszParams(z, R), sp, grid, args.shells)
            n = int(rep.decay_ratio.argmax())
            print(f"{str(z):>10} {R:>8g} {rep.empirical_constant:>12.8f} {n:>9d} {rep.cross_check_error:>11.2e}")


if __name__ == "__main__":
    main()
