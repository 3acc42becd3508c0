"""Exact-arithmetic machinery for iteration rules.

Bernoulli numbers, power-sum (Faulhaber) polynomials, and the per-rule
navigation index (cumulative-length array, exponent array, chunked
predecessor snapshots) that lets f_r(i) and f+(k) be evaluated with a
number of arithmetic operations linear in the degree.

All arithmetic is exact: rationals are ``fractions.Fraction`` and every
power-sum evaluation is checked to cancel to an integer.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .grammar import Grammar

Rational = Fraction


class NonIntegralPowerSum(Exception):
    """A power-sum evaluation did not cancel to an integer.

    This always indicates an implementation bug; it is raised rather than
    silently truncated.
    """


def bernoulli_numbers(d: int) -> list[Fraction]:
    """Bernoulli numbers B_0..B_d, convention B_1 = -1/2.

    Computed from B_0 = 1 with the binomial recurrence
    sum_{j=0}^{m} C(m+1, j) * B_j = 0 for m >= 1.
    """
    if d < 0:
        raise ValueError("degree must be >= 0")
    out = [Fraction(1)]
    for m in range(1, d + 1):
        s = sum(comb(m + 1, j) * out[j] for j in range(m))
        out.append(Fraction(-s, m + 1))
    return out


@dataclass(frozen=True)
class FaulhaberTable:
    """Bernoulli numbers up to degree ``d`` plus cached power-sum polynomials.

    ``power_sum(c, k)`` evaluates p_c(k) = sum_{i=1}^{k} i^c exactly.  The
    polynomial coefficients for each c are cached in an integer-scaled form
    (common denominator) so evaluation is integer Horner plus one exact
    division.
    """

    d: int
    bernoulli: tuple[Fraction, ...]
    _coeffs: dict = field(default_factory=dict, compare=False, repr=False)

    def _poly(self, c: int) -> tuple[tuple[int, ...], int]:
        cached = self._coeffs.get(c)
        if cached is not None:
            return cached
        # p_c(k) = k^c + 1/(c+1) * sum_{j=0}^{c} C(c+1,j) B_j k^{c+1-j}.
        # The formula holds for c >= 1 under the B_1 = -1/2 convention;
        # for c = 0 the k^c addend is spurious and p_0(k) = k.
        coeffs = [Fraction(0)] * (c + 2)  # index = power of k
        if c == 0:
            coeffs[1] = Fraction(1)
        else:
            for j in range(c + 1):
                coeffs[c + 1 - j] += Fraction(comb(c + 1, j), c + 1) * self.bernoulli[j]
            coeffs[c] += 1
        den = lcm(*(f.denominator for f in coeffs))
        nums = tuple(int(f * den) for f in reversed(coeffs))  # high power first
        self._coeffs[c] = (nums, den)
        return nums, den

    def power_sum(self, c: int, k: int) -> int:
        """p_c(k) = sum_{i=1}^{k} i^c, with p_c(0) = 0."""
        if c < 0 or c > self.d:
            raise ValueError(f"exponent {c} outside table degree {self.d}")
        if k < 0:
            raise ValueError("k must be >= 0")
        if k == 0:
            return 0
        nums, den = self._poly(c)
        acc = 0
        for a in nums:
            acc = acc * k + a
        q, r = divmod(acc, den)
        if r:
            raise NonIntegralPowerSum(f"p_{c}({k}) = {acc}/{den} is not integral")
        return q


def bernoulli_table(d: int) -> FaulhaberTable:
    """Build a FaulhaberTable for all exponents up to ``d``."""
    return FaulhaberTable(d=d, bernoulli=tuple(bernoulli_numbers(d)))


def faulhaber_eval(tbl: FaulhaberTable, c: int, k: int) -> int:
    """Evaluate p_c(k) = sum_{i=1}^{k} i^c using ``tbl``."""
    return tbl.power_sum(c, k)


# Shared table, grown on demand: the power-sum polynomials do not depend on
# any particular grammar, so one process-wide table serves them all.
_shared: FaulhaberTable = bernoulli_table(4)


def shared_table(d: int) -> FaulhaberTable:
    global _shared
    if _shared.d < d:
        _shared = bernoulli_table(max(d, 2 * _shared.d))
    return _shared


def power_sum(c: int, k: int) -> int:
    """p_c(k) via the shared process-wide table."""
    return shared_table(c).power_sum(c, k)


@dataclass
class IterIndex:
    """Navigation structure for one iteration rule.

    ``S[r-1]`` (1-based r) accumulates the expansion lengths of the factors
    up to position r whose exponent equals ``C[r-1]``.  ``snapshots[j]``
    holds, for every exponent value, the predecessor position at the chunk
    boundary ``(d+1)*j`` (None when the exponent has not occurred yet), so a
    ``pred`` query scans at most d+1 entries.
    """

    var: int
    k1: int
    k2: int
    t: int
    d: int
    S: tuple[int, ...]
    C: tuple[int, ...]
    snapshots: tuple[tuple[Optional[int], ...], ...]
    factor_vars: tuple[int, ...]
    factor_lens: tuple[int, ...]
    table: FaulhaberTable
    _top: tuple[tuple[int, int], ...] = ()  # (c, S[pred(t,c)]) pairs
    _fp_cache: dict = field(default_factory=dict, repr=False)

    @property
    def descending(self) -> bool:
        return self.k1 > self.k2

    @property
    def k_lo(self) -> int:
        return min(self.k1, self.k2)

    @property
    def k_hi(self) -> int:
        return max(self.k1, self.k2)

    @property
    def snapshot_entries(self) -> int:
        return sum(len(s) for s in self.snapshots)


def build_iter_index(g: "Grammar", a: int, table: FaulhaberTable | None = None) -> IterIndex:
    """Build the navigation index for the iteration rule of variable ``a``."""
    from .grammar import Iter

    rule = g.rules[a]
    if not isinstance(rule, Iter):
        raise ValueError(f"variable {a} is not an iteration rule")
    t = len(rule.factors)
    C = tuple(c for _, c in rule.factors)
    d = max(C)
    if table is None:
        table = shared_table(d)
    if table.d < d:
        raise ValueError("Faulhaber table degree too small for rule")

    factor_vars = tuple(v for v, _ in rule.factors)
    factor_lens = tuple(g.lengths[v] for v in factor_vars)

    S = []
    running = [0] * (d + 1)  # per-exponent cumulative lengths
    for (v, c), ln in zip(rule.factors, factor_lens):
        running[c] += ln
        S.append(running[c])

    chunk = d + 1
    snapshots = []
    state: list[Optional[int]] = [None] * (d + 1)
    nchunks = (t + chunk - 1) // chunk
    for j in range(nchunks):
        snapshots.append(tuple(state))
        for r in range(chunk * j + 1, min(chunk * (j + 1), t) + 1):
            state[C[r - 1]] = r

    idx = IterIndex(
        var=a, k1=rule.k1, k2=rule.k2, t=t, d=d,
        S=tuple(S), C=C, snapshots=tuple(snapshots),
        factor_vars=factor_vars, factor_lens=factor_lens, table=table,
    )
    top = []
    for c in range(d + 1):
        p = pred(idx, t, c)
        if p is not None:
            top.append((c, idx.S[p - 1]))
    idx._top = tuple(top)
    return idx


def pred(idx: IterIndex, r: int, c: int) -> Optional[int]:
    """Latest position j <= r with C[j] = c, or None.

    Answered from the chunk-boundary snapshot plus a left-to-right scan of
    at most d+1 entries.
    """
    if not 1 <= r <= idx.t:
        raise ValueError(f"position {r} outside [1..{idx.t}]")
    if not 0 <= c <= idx.d:
        raise ValueError(f"exponent {c} outside [0..{idx.d}]")
    chunk = idx.d + 1
    j = (r - 1) // chunk
    best = idx.snapshots[j][c]
    for k in range(chunk * j + 1, r + 1):
        if idx.C[k - 1] == c:
            best = k
    return best


def f_r(idx: IterIndex, r: int, i: int) -> int:
    """f_r(i) = sum_{j=1}^{r} |exp(B_j)| * i^{c_j}, exactly.

    Evaluated as sum_c S[pred(r,c)] * i^c over the exponents present.
    """
    if not 1 <= r <= idx.t:
        raise ValueError(f"factor position {r} outside [1..{idx.t}]")
    acc = 0
    for c in range(idx.d + 1):
        p = pred(idx, r, c)
        if p is not None:
            acc += idx.S[p - 1] * i ** c
    return acc


def f_plus(idx: IterIndex, k: int) -> int:
    """f+(k) = sum_{i=k_lo}^{k} f_t(i); f+(k_lo - 1) = 0.

    Accumulates s_c * (p_c(k) - p_c(k_lo - 1)) over the exponents present.
    """
    lo, hi = idx.k_lo, idx.k_hi
    if not lo - 1 <= k <= hi:
        raise ValueError(f"block index {k} outside [{lo - 1}..{hi}]")
    cached = idx._fp_cache.get(k)
    if cached is not None:
        return cached
    ps = idx.table.power_sum
    acc = 0
    for c, s in idx._top:
        acc += s * (ps(c, k) - ps(c, lo - 1))
    idx._fp_cache[k] = acc
    return acc
