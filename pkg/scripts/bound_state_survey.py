"""Bound-state census over a random graph corpus.

For every graph, compares the first- and second-kind energies beyond |E| > 2
with the spectrum of the same graph whose tails are truncated to long finite
paths, and tallies how often negative z_b (energies above 2) occur.
"""

import argparse
from collections import Counter

import numpy as np

from qgscatter.bound import FIRST, find_bound_states
from qgscatter.fixtures import random_corpus
from qgscatter.graph import build_hamiltonian


def truncated_spectrum(g, length):
    h = g
    while h.n_tails:
        h = h.with_stump(h.labels[0], length)
    return np.linalg.eigvalsh(build_hamiltonian(h))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-vertices", type=int, default=8)
    ap.add_argument("--max-tails", type=int, default=5)
    ap.add_argument("--length", type=int, default=150, help="truncated tail length for the oracle")
    ap.add_argument("--cutoff", type=float, default=2.05)
    args = ap.parse_args()

    tally = Counter()
    worst = 0.0
    for g in random_corpus(args.seed, args.count, max_vertices=args.max_vertices, max_tails=args.max_tails):
        states = find_bound_states(g)
        firsts = [b for b in states if b.kind == FIRST]
        tally["graphs"] += 1
        tally["first kind"] += len(firsts)
        tally["negative z_b"] += sum(b.z_b < 0 for b in firsts)
        tally["second kind"] += len(states) - len(firsts)
        tally["graphs with first kind"] += bool(firsts)

        mine = np.sort([b.energy for b in states if abs(b.energy) > args.cutoff])
        w = truncated_spectrum(g, args.length)
        oracle = np.sort(w[np.abs(w) > args.cutoff])
        if mine.size != oracle.size:
            tally["count mismatches"] += 1
            continue
        if mine.size:
            worst = max(worst, np.abs(mine - oracle).max())

    for key, val in tally.items():
        print(f"{key:24s} {val}")
    print(f"{'worst |E - E_trunc|':24s} {worst:.2e}")


if __name__ == "__main__":
    main()
