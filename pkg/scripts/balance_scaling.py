#!/usr/bin/env python3
"""Height and size of balanced grammars across a scaling family.

Balances left-chain SLPs for a^n (height n-1) over n = 2^4..2^16 and
reports the height ratio height'/log2(n) and size ratio size'/size,
which should both stay flat as n grows.
"""
import argparse
import math
import time

from islp.balance import balance
from islp.grammar import Binary, Grammar, Terminal, expand, height, size


def left_chain(n: int) -> Grammar:
    rules = [Terminal("a")]
    for i in range(1, n):
        rules.append(Binary(i - 1, 0))
    return Grammar(rules, n - 1)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-exp", type=int, default=16,
                    help="largest n = 2^e to balance")
    args = ap.parse_args()

    print(f"{'n':>8} {'h':>8} {'h_bal':>6} {'h/log2n':>8} "
          f"{'size_ratio':>10} {'seconds':>8}")
    for e in range(4, args.max_exp + 1, 2):
        n = 2 ** e
        g = left_chain(n)
        t0 = time.perf_counter()
        out = balance(g)
        elapsed = time.perf_counter() - t0
        assert expand(out, limit=n) == "a" * n
        print(f"{n:>8} {height(g):>8} {height(out):>6} "
              f"{height(out) / math.log2(n):>8.2f} "
              f"{size(out) / size(g):>10.2f} {elapsed:>8.2f}")


if __name__ == "__main__":
    main()
