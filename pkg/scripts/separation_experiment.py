#!/usr/bin/env python3
"""Constant-size grammars versus growing substring complexity.

For the family s_k = prod_{i=1}^{k} a^i b the 3-variable iteration
grammar stays at size 8 while delta grows as Theta(sqrt(n)).  This
script tabulates size, n, delta, delta/sqrt(n), the LZ76 phrase count
and BWT runs across a range of k.
"""
import argparse
import math

from islp.corpora import gen_sk
from islp.grammar import expand, size
from islp.measures import bwt_runs, delta, lz76_z


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ks", default="8,16,32,64,128",
                    help="comma-separated k values")
    args = ap.parse_args()
    ks = [int(x) for x in args.ks.split(",")]

    print(f"{'k':>5} {'size':>5} {'n':>8} {'delta':>12} "
          f"{'delta/sqrt(n)':>14} {'z':>6} {'r':>6}")
    for k in ks:
        g = gen_sk(k)
        text = expand(g)
        n = len(text)
        d = delta(text)
        r = bwt_runs(text) if n <= 10 ** 5 else -1
        print(f"{k:>5} {size(g):>5} {n:>8} {str(d):>12} "
              f"{float(d) / math.sqrt(n):>14.4f} {lz76_z(text):>6} {r:>6}")


if __name__ == "__main__":
    main()
