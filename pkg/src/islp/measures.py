"""Brute-force repetitiveness measures on explicit texts.

Substring complexity delta (exact rational), greedy LZ76 phrase count,
and BWT run counts with/without sentinel.  These operate on plain
strings produced by the expansion oracle; nothing here works in
compressed space.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

DELTA_TEXT_LIMIT = 10 ** 6
BWT_TEXT_LIMIT = 10 ** 5
SENTINEL = "\x00"


def suffix_array(s: str) -> list[int]:
    """Suffix array by prefix doubling."""
    n = len(s)
    rank = [ord(c) for c in s]
    sa = list(range(n))
    k = 1
    while True:
        key = lambda i: (rank[i], rank[i + k] if i + k < n else -1)
        sa.sort(key=key)
        new = [0] * n
        for a, b2 in zip(sa, sa[1:]):
            new[b2] = new[a] + (key(a) != key(b2))
        rank = new
        if rank[sa[-1]] == n - 1 or k >= n:
            return sa
        k *= 2


def lcp_array(s: str, sa: list[int]) -> list[int]:
    """Kasai: lcp[i] = LCP(suffix sa[i-1], suffix sa[i]); lcp[0] = 0."""
    n = len(s)
    rank = [0] * n
    for i, p in enumerate(sa):
        rank[p] = i
    lcp = [0] * n
    h = 0
    for i in range(n):
        if rank[i] > 0:
            j = sa[rank[i] - 1]
            while i + h < n and j + h < n and s[i + h] == s[j + h]:
                h += 1
            lcp[rank[i]] = h
            if h:
                h -= 1
        else:
            h = 0
    return lcp


def substring_counts(t: str) -> list[int]:
    """T_k (distinct substrings of each length k), 1-based list of length n."""
    n = len(t)
    sa = suffix_array(t)
    lcp = lcp_array(t, sa)
    # count of lcp values >= k, as a suffix-sum histogram
    hist = [0] * (n + 2)
    for v in lcp:
        hist[min(v, n)] += 1
    ge = [0] * (n + 2)
    for k in range(n, -1, -1):
        ge[k] = ge[k + 1] + hist[k]
    return [(n - k + 1) - ge[k] for k in range(1, n + 1)]


def delta(t: str) -> Fraction:
    """max_k T_k / k as an exact reduced rational."""
    n = len(t)
    if not 1 <= n <= DELTA_TEXT_LIMIT:
        raise ValueError(f"text length {n} outside [1..{DELTA_TEXT_LIMIT}]")
    counts = substring_counts(t)
    return max(Fraction(tk, k) for k, tk in enumerate(counts, start=1))


def lz76_z(t: str) -> int:
    """Number of phrases in the greedy left-to-right LZ76 parse.

    Each phrase is the first occurrence of a symbol, or the longest prefix
    of the remainder with a copy starting strictly earlier (sources may
    overlap the phrase).
    """
    n = len(t)
    z = 0
    p = 0
    while p < n:
        length = 1 if t.find(t[p], 0, p) >= 0 else 0
        while p + length < n:
            cand = t[p:p + length + 1]
            first = t.find(cand)
            if first < p:
                length += 1
            else:
                break
        z += 1
        p += max(length, 1)
    return z


def _rotation_order(s: str) -> list[int]:
    """Rotation start positions in lexicographic order of the rotations."""
    n = len(s)
    rank = [ord(c) for c in s]
    order = list(range(n))
    k = 1
    while True:
        key = lambda i: (rank[i], rank[(i + k) % n])
        order.sort(key=key)
        new = [0] * n
        for a, b in zip(order, order[1:]):
            new[b] = new[a] + (key(a) != key(b))
        rank = new
        if rank[order[-1]] == n - 1 or k >= n:
            return order
        k *= 2


def bwt(t: str, sentinel: bool = False) -> str:
    """Last column of the sorted rotation matrix."""
    if sentinel:
        if SENTINEL in t:
            raise ValueError("text contains the sentinel byte")
        t = t + SENTINEL
    n = len(t)
    return "".join(t[(i - 1) % n] for i in _rotation_order(t))


def run_count(s: str) -> int:
    if not s:
        return 0
    return 1 + sum(1 for a, b in zip(s, s[1:]) if a != b)


def bwt_runs(t: str, sentinel: bool = False) -> int:
    """Size of the run-length encoding of bwt(T) (or bwt(T$))."""
    n = len(t)
    if not 1 <= n <= BWT_TEXT_LIMIT:
        raise ValueError(f"text length {n} outside [1..{BWT_TEXT_LIMIT}]")
    return run_count(bwt(t, sentinel=sentinel))


@dataclass(frozen=True)
class MeasureReport:
    n: int
    delta: Fraction
    z: int
    bwt_runs: int
    bwt_runs_sentinel: int


def measure_report(t: str) -> MeasureReport:
    return MeasureReport(
        n=len(t),
        delta=delta(t),
        z=lz76_z(t),
        bwt_runs=bwt_runs(t, sentinel=False),
        bwt_runs_sentinel=bwt_runs(t, sentinel=True),
    )
