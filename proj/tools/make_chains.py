#!/usr/bin/env python3
#
# Project cardiogen - Copyright 2026 cardiogen contributors.
# SPDX-License-Identifier: Apache-2.0
#
"""Writes linear fragment-chain molecules with molecular weights spread
uniformly over a range.

Each molecule is start-group, linker units, end-group. Fragment masses
include their hydrogens, so the running sum is the molecular weight.

    make_chains.py --out data/conditional.smi --n 600 --lo 250 --hi 750
    make_chains.py --out data/disc_synthetic.smi --n 400 --lo 150 --hi 450
"""

import argparse
import random

# (smiles, mass, first element, last element, ring?)
UNITS = [
    ("C", 14.027, "C", "C", False),
    ("CC", 28.054, "C", "C", False),
    ("O", 15.999, "O", "O", False),
    ("N(C)", 29.042, "N", "N", False),
    ("C(=O)", 28.010, "C", "C", False),
    ("C(=O)N", 43.025, "C", "N", False),
    ("S(=O)(=O)", 64.058, "S", "S", False),
    ("C(F)", 32.017, "C", "C", False),
    ("C(C)", 28.054, "C", "C", False),
    ("c1ccc(cc1)", 76.098, "C", "C", True),
    ("c1ccc(nc1)", 77.086, "C", "C", True),
    ("C1CCN(CC1)", 83.134, "C", "N", True),
    ("C1CCC(CC1)", 82.146, "C", "C", True),
    ("c1ccc(s1)", 82.122, "C", "C", True),
]

STARTS = [
    ("C", 15.035, "C"),
    ("CC", 29.062, "C"),
    ("O", 17.007, "O"),
    ("N", 16.023, "N"),
    ("F", 18.998, "F"),
    ("Cl", 35.453, "Cl"),
    ("Br", 79.904, "Br"),
    ("N#C", 26.018, "C"),
    ("FC(F)(F)", 69.006, "C"),
    ("CO", 31.034, "O"),
    ("CN(C)", 44.077, "N"),
    ("c1ccc(cc1)", 77.106, "C"),
]

ENDS = [
    ("C", 15.035, "C"),
    ("CC", 29.062, "C"),
    ("O", 17.007, "O"),
    ("N", 16.023, "N"),
    ("F", 18.998, "F"),
    ("Cl", 35.453, "Cl"),
    ("C#N", 26.018, "C"),
    ("C(F)(F)F", 69.006, "C"),
    ("OC", 31.034, "O"),
    ("N(C)C", 44.077, "N"),
    ("C(=O)O", 45.017, "C"),
    ("c1ccccc1", 77.106, "C"),
]

HETERO = {"O", "N", "S", "F", "Cl", "Br"}


def compatible(left, right):
    return not (left in HETERO and right in HETERO)


def build(target, rng, tolerance=12.0):
    start = rng.choice(STARTS)
    parts, mass, last = [start[0]], start[1], start[2]
    has_ring = False
    while True:
        fits = [e for e in ENDS if compatible(last, e[2])]
        best = min(fits, key=lambda e: abs(mass + e[1] - target))
        if abs(mass + best[1] - target) <= tolerance and has_ring:
            return "".join(parts + [best[0]]), mass + best[1]
        if mass > target:
            return None
        unit = rng.choice([u for u in UNITS if compatible(last, u[2])])
        parts.append(unit[0])
        mass += unit[1]
        last = unit[3]
        has_ring = has_ring or unit[4]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("--n", type=int, default=600)
    ap.add_argument("--lo", type=float, default=250.0)
    ap.add_argument("--hi", type=float, default=750.0)
    ap.add_argument("--seed", type=int, default=20260202)
    ap.add_argument("--split-at", type=float, default=None,
                    help="alternate rows below and above this weight")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    seen = set()
    rows = []
    while len(rows) < args.n:
        target = rng.uniform(args.lo, args.hi)
        got = build(target, rng)
        if got is None or got[0] in seen:
            continue
        if args.split_at is not None:
            want_high = len(rows) % 2 == 1
            if (got[1] > args.split_at) != want_high:
                continue
        seen.add(got[0])
        rows.append(got)
    with open(args.out, "w") as f:
        f.write("# fragment chains, molecular weight %g-%g, seed %d\n"
                % (args.lo, args.hi, args.seed))
        if args.split_at is not None:
            f.write("# rows alternate below/above %g\n" % args.split_at)
        for s, mw in rows:
            f.write("%s\t%.2f\n" % (s, mw))


if __name__ == "__main__":
    main()
