"""Completeness residual against quadrature size for the fixture graphs.

Prints one row per (graph, site) with the residual at each node count, for
both a first-order rule (visible algebraic convergence) and the default
16-point Gauss-Legendre panels (at roundoff almost immediately).
"""

import argparse

import numpy as np

from qgscatter.fixtures import FIXTURES
from qgscatter.spectral import QuadratureConfig, completeness_residual


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, nargs="+", default=[64, 128, 256, 512, 1024, 2048, 4096])
    ap.add_argument("--orders", type=int, nargs="+", default=[1, 16])
    args = ap.parse_args()

    header = f"{'graph':5s} {'site':10s} {'order':>5s} " + " ".join(f"{n:>9d}" for n in args.nodes)
    print(header)
    print("-" * len(header))
    for name, g in FIXTURES.items():
        sites = [0, (g.labels[0], 1), (g.labels[0], 4)]
        for site in sites:
            tag = f"v{site}" if isinstance(site, int) else f"{site[0]}@{site[1]}"
            for order in args.orders:
                row = []
                for n in args.nodes:
                    if n // order < 8:
                        row.append(f"{'-':>9s}")
                        continue
                    r = abs(completeness_residual(g, site, site, QuadratureConfig(nodes=n, order=order)))
                    row.append(f"{r:9.1e}")
                print(f"{name:5s} {tag:10s} {order:5d} " + " ".join(row))


if __name__ == "__main__":
    np.set_printoptions(precision=3)
    main()
