"""Reflection and transmission probabilities over k for one graph.

Writes a CSV with |s_ij|^2 columns, ready for plotting elsewhere:

    python scripts/sweep_transmission.py graphs/g7.json --steps 400 -o g7_sweep.csv
"""

import argparse
import csv
import sys

import numpy as np

from qgscatter import check_unitarity, load_graph, s_matrix
from qgscatter.spectral import singular_momenta


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("graph")
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--margin", type=float, default=1e-3)
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args()

    g = load_graph(args.graph)
    ks = np.linspace(args.margin, np.pi - args.margin, args.steps)
    labels = [str(lab) for lab in g.labels]
    out = sys.stdout if args.output == "-" else open(args.output, "w", newline="")
    w = csv.writer(out)
    w.writerow(["k", "E"] + [f"P[{a}<-{b}]" for a in labels for b in labels] + ["unitarity_residual"])
    worst = 0.0
    for k in ks:
        S = s_matrix(g, np.exp(1j * k))
        res = check_unitarity(S)
        worst = max(worst, res)
        w.writerow([f"{k:.12g}", f"{-2 * np.cos(k):.12g}"]
                   + [f"{p:.12g}" for p in (np.abs(S.matrix) ** 2).ravel()] + [f"{res:.3e}"])
    if out is not sys.stdout:
        out.close()
    sing = ", ".join(f"{k:.6f}" for k in singular_momenta(g)) or "none"
    print(f"{len(ks)} momenta, worst unitarity residual {worst:.2e}, singular momenta: {sing}", file=sys.stderr)


if __name__ == "__main__":
    main()
