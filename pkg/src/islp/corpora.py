"""Deterministic generators: paper string families and random ISLPs."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .grammar import (Binary, Grammar, GrammarBuilder, Iter, Rule, Terminal)
from .poly import power_sum

# 200 reserved separator bytes, disjoint from {a, b}
_SEPARATORS = [chr(c) for c in range(0x01, 0xCB) if c not in (0x61, 0x62)][:200]

RNG_ALGORITHM = "mersenne-twister"  # python stdlib random.Random


def gen_sk(k: int) -> Grammar:
    """The 3-variable ISLP for s_k = prod_{i=1}^{k} a^i b (size 8)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rules: list[Rule] = [Terminal("a"), Terminal("b"),
                         Iter(1, k, ((0, 1), (1, 0)))]
    return Grammar(rules, 2, ("A", "B", "S"))


def gen_fibonacci(i: int) -> str:
    """Fibonacci word F_i: F_0 = a, F_1 = b, F_{i+2} = F_{i+1} F_i."""
    if i < 0:
        raise ValueError("index must be >= 0")
    a, b = "a", "b"
    if i == 0:
        return a
    prev, cur = a, b
    for _ in range(i - 1):
        prev, cur = cur, cur + prev
    return cur


def thue_morse_prefix(n: int) -> str:
    """Length-n prefix of the Thue-Morse word over {a, b}."""
    return "".join("a" if bin(i).count("1") % 2 == 0 else "b" for i in range(n))


def gen_thue_morse_concat(ks: list[int]) -> str:
    """Thue-Morse prefixes T(k_1)..T(k_p) joined with unique separators.

    The first length must be the largest; at most 200 separators exist.
    """
    if not ks:
        raise ValueError("need at least one prefix length")
    if any(k < 1 for k in ks):
        raise ValueError("prefix lengths must be positive")
    if ks[0] != max(ks):
        raise ValueError("the first prefix length must be the largest")
    if len(ks) - 1 > len(_SEPARATORS):
        raise ValueError(f"at most {len(_SEPARATORS)} separators available")
    parts = []
    for idx, k in enumerate(ks):
        parts.append(thue_morse_prefix(k))
        if idx < len(ks) - 1:
            parts.append(_SEPARATORS[idx])
    return "".join(parts)


@dataclass(frozen=True)
class RandomIslpParams:
    seed: int
    variables: int = 12
    max_t: int = 4
    max_k: int = 8
    max_c: int = 3
    iter_fraction: float = 0.35
    length_limit: int = 10 ** 7


def random_islp(p: RandomIslpParams) -> Grammar:
    """Seed-deterministic random ISLP that always validates.

    Rules are generated in topological order (children only among earlier
    variables); candidates that would blow the length limit fall back to
    small binary rules.  Variables unreachable from the start are pruned.
    """
    rng = random.Random(p.seed)
    if p.variables < 2:
        raise ValueError("need at least two variables")
    alphabet = "abcd"[: rng.randint(2, 4)]
    rules: list[Rule] = [Terminal(ch) for ch in alphabet]
    lens: list[int] = [1] * len(alphabet)

    def pick(i: int) -> int:
        # bias toward recent variables so most of the table stays reachable
        if i > 3 and rng.random() < 0.7:
            return rng.randrange(max(0, i - 4), i)
        return rng.randrange(i)

    while len(rules) < max(p.variables, len(alphabet) + 1):
        i = len(rules)
        rule = None
        if rng.random() < p.iter_fraction:
            for _ in range(6):
                t = rng.randint(1, p.max_t)
                factors = tuple((pick(i), rng.randint(0, p.max_c))
                                for _ in range(t))
                k_lo = rng.randint(1, p.max_k)
                k_hi = rng.randint(k_lo, p.max_k)
                k1, k2 = ((k_hi, k_lo) if k_hi > k_lo and rng.random() < 0.15
                          else (k_lo, k_hi))
                length = sum(lens[v] * (power_sum(c, k_hi) - power_sum(c, k_lo - 1))
                             for v, c in factors)
                if length <= p.length_limit:
                    rule = Iter(k1, k2, factors)
                    break
        if rule is None:
            for _ in range(6):
                left, right = pick(i), pick(i)
                if lens[left] + lens[right] <= p.length_limit:
                    rule = Binary(left, right)
                    break
        if rule is None:
            rule = Terminal(rng.choice(alphabet))
        rules.append(rule)
        lens.append(Grammar._rule_length(rule, lens, f"V{i}"))

    b = GrammarBuilder(rules, [f"V{i}" for i in range(len(rules))])
    return b.finish(len(rules) - 1)
