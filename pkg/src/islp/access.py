"""Direct access and substring extraction over an indexed grammar.

The per-level work on an iteration rule is two early-exit binary
searches: one over cumulative block lengths f+(k), one over cumulative
factor lengths f_r(i).  Both compare arbitrary-precision integers and
count their polynomial evaluations so the telescoping bound can be
checked empirically.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .grammar import (Binary, Grammar, Iter, Seq, Terminal, _rule_symbols)
from .poly import FaulhaberTable, IterIndex, build_iter_index, f_plus, f_r, shared_table


class PositionError(Exception):
    """Requested text position or range is out of bounds."""


@dataclass
class AccessStats:
    f_plus_evals: int = 0
    f_r_evals: int = 0

    @property
    def total(self) -> int:
        return self.f_plus_evals + self.f_r_evals

    def reset(self) -> None:
        self.f_plus_evals = 0
        self.f_r_evals = 0


@dataclass
class AccessContext:
    """Grammar plus per-iteration-rule indexes and a shared Faulhaber table."""

    grammar: Grammar
    faulhaber: FaulhaberTable = None  # type: ignore[assignment]
    indexes: dict[int, IterIndex] = field(default_factory=dict)
    stats: AccessStats = field(default_factory=AccessStats)

    def __post_init__(self):
        if self.faulhaber is None:
            self.faulhaber = shared_table(self.grammar.max_degree())
        for v, rule in enumerate(self.grammar.rules):
            if isinstance(rule, Iter):
                self.indexes[v] = build_iter_index(self.grammar, v, self.faulhaber)

    @classmethod
    def build(cls, grammar: Grammar) -> "AccessContext":
        """Clamp the degree first, then index; the standard entry point."""
        from .transform import clamp_degree
        return cls(clamp_degree(grammar))


def _fp(ctx: AccessContext, idx: IterIndex, k: int) -> int:
    ctx.stats.f_plus_evals += 1
    return f_plus(idx, k)


def _fr(ctx: AccessContext, idx: IterIndex, r: int, i: int) -> int:
    if r == 0:
        return 0
    ctx.stats.f_r_evals += 1
    return f_r(idx, r, i)


def block_search(idx: IterIndex, l: int, ctx: AccessContext | None = None) -> tuple[int, int]:
    """Find block i with f+(i-1) < l <= f+(i); return (i, l - f+(i-1)).

    Early-exit binary search: whenever a probe f+(m) lands strictly below
    l, the neighbour f+(m+1) is checked immediately (and symmetrically
    above), so the search stops as soon as the answer block is bracketed.
    """
    if ctx is None:
        ctx = AccessContext.__new__(AccessContext)
        ctx.stats = AccessStats()
    lo, hi = idx.k_lo, idx.k_hi
    if not 1 <= l <= _fp(ctx, idx, hi):
        raise PositionError(f"local position {l} out of range")
    i = lo
    while lo < hi:
        m = (lo + hi) // 2
        if _fp(ctx, idx, m) < l:
            if l <= _fp(ctx, idx, m + 1):
                i = m + 1
                break
            lo = m + 1
        else:
            if m == idx.k_lo or _fp(ctx, idx, m - 1) < l:
                i = m
                break
            hi = m - 1
    else:
        i = lo
    return i, l - _fp(ctx, idx, i - 1)


def factor_search(idx: IterIndex, i: int, rem: int,
                  ctx: AccessContext | None = None) -> tuple[int, int]:
    """Find factor r with f_{r-1}(i) < rem <= f_r(i); return (r, offset)."""
    if ctx is None:
        ctx = AccessContext.__new__(AccessContext)
        ctx.stats = AccessStats()
    lo, hi = 1, idx.t
    r = 1
    while lo < hi:
        m = (lo + hi) // 2
        if _fr(ctx, idx, m, i) < rem:
            if rem <= _fr(ctx, idx, m + 1, i):
                r = m + 1
                break
            lo = m + 1
        else:
            if m == 1 or _fr(ctx, idx, m - 1, i) < rem:
                r = m
                break
            hi = m - 1
    else:
        r = lo
    return r, rem - _fr(ctx, idx, r - 1, i)


@dataclass(frozen=True)
class _BinFrame:
    rule: Binary
    went_left: bool


@dataclass(frozen=True)
class _SeqFrame:
    rule: Seq
    child_index: int


@dataclass(frozen=True)
class _IterFrame:
    idx: IterIndex
    i: int           # block value (not rank)
    r: int           # factor position
    off_run: int     # 1-based offset inside B_r^{i^{c_r}}


def _descend(ctx: AccessContext, l: int, frames: list | None = None,
             trace: list | None = None) -> str:
    """Walk from the start variable to T[l]; optionally record the path."""
    g = ctx.grammar
    a = g.start
    while True:
        rule = g.rules[a]
        if isinstance(rule, Terminal):
            return rule.symbol
        if isinstance(rule, Binary):
            llen = g.lengths[rule.left]
            if l <= llen:
                if frames is not None:
                    frames.append(_BinFrame(rule, True))
                a = rule.left
            else:
                if frames is not None:
                    frames.append(_BinFrame(rule, False))
                a = rule.right
                l -= llen
            continue
        if isinstance(rule, Seq):
            for pos, c in enumerate(rule.children):
                clen = g.lengths[c]
                if l <= clen:
                    if frames is not None:
                        frames.append(_SeqFrame(rule, pos))
                    a = c
                    break
                l -= clen
            continue
        idx = ctx.indexes[a]
        if idx.descending:
            n_local = g.lengths[a]
            i, rem_rev = block_search(idx, n_local - l + 1, ctx)
            rem = _fp(ctx, idx, i) - (n_local - l)
        else:
            i, rem = block_search(idx, l, ctx)
        r, off_run = factor_search(idx, i, rem, ctx)
        b, c = idx.factor_vars[r - 1], idx.C[r - 1]
        blen = idx.factor_lens[r - 1]
        off = (off_run - 1) % blen + 1  # 1-based residue: multiples map to blen
        if frames is not None:
            frames.append(_IterFrame(idx, i, r, off_run))
        if trace is not None:
            trace.append((i, r, off))
        a = b
        l = off


def access(ctx: AccessContext, l: int, trace: list | None = None) -> str:
    """T[l], 1-based.  ``trace`` collects (i, r, offset) per iteration level."""
    n = ctx.grammar.n
    if not 1 <= l <= n:
        raise PositionError(f"position {l} out of range [1..{n}]")
    return _descend(ctx, l, trace=trace)


class _Sink:
    """Append-only character consumer with an optional cap."""

    def __init__(self):
        self.chars: list[str] = []

    def write(self, ch: str) -> None:
        self.chars.append(ch)

    def value(self) -> str:
        return "".join(self.chars)


def report(ctx: AccessContext, c: int, lam: int, sink: _Sink | None = None) -> int:
    """Append min(lam, |exp(c)|) characters of exp(c); return the new lam."""
    if sink is None:
        sink = _Sink()
    if lam <= 0:
        return 0
    g = ctx.grammar
    cap = min(lam, g.lengths[c])
    written = 0
    stack = [iter((c,))]
    while stack and written < cap:
        v = next(stack[-1], None)
        if v is None:
            stack.pop()
            continue
        rule = g.rules[v]
        if isinstance(rule, Terminal):
            sink.write(rule.symbol)
            written += 1
        else:
            stack.append(_rule_symbols(g, rule))
    return lam - written


def extract(ctx: AccessContext, l: int, lam: int) -> str:
    """T[l..l+lam-1], via one access plus return-path reporting."""
    g = ctx.grammar
    n = g.n
    if lam < 0:
        raise PositionError("negative extraction length")
    if lam == 0:
        return ""
    if l < 1 or l + lam - 1 > n:
        raise PositionError(
            f"range [{l}..{l + lam - 1}] out of bounds for n={n}")
    frames: list = []
    sink = _Sink()
    first = _descend(ctx, l, frames=frames)
    sink.write(first)
    lam -= 1
    for frame in reversed(frames):
        if lam == 0:
            break
        if isinstance(frame, _BinFrame):
            if frame.went_left:
                lam = report(ctx, frame.rule.right, lam, sink)
        elif isinstance(frame, _SeqFrame):
            for c in frame.rule.children[frame.child_index + 1:]:
                if lam == 0:
                    break
                lam = report(ctx, c, lam, sink)
        else:
            lam = _report_iter_rest(ctx, frame, lam, sink)
    return sink.value()


def _report_iter_rest(ctx: AccessContext, frame: _IterFrame, lam: int,
                      sink: _Sink) -> int:
    idx = frame.idx
    i, r = frame.i, frame.r
    b = idx.factor_vars[r - 1]
    blen = idx.factor_lens[r - 1]
    c_r = idx.C[r - 1]
    # (a) remaining copies inside the current run B_r^{i^{c_r}}
    further = i ** c_r - (-(-frame.off_run // blen))  # ceil division
    while further > 0 and lam > 0:
        lam = report(ctx, b, lam, sink)
        further -= 1
    # (b) remaining factors of the current block
    for s in range(r + 1, idx.t + 1):
        if lam == 0:
            return 0
        copies = i ** idx.C[s - 1]
        v = idx.factor_vars[s - 1]
        while copies > 0 and lam > 0:
            lam = report(ctx, v, lam, sink)
            copies -= 1
    # (c) remaining whole blocks, in text order
    blocks = range(i - 1, idx.k2 - 1, -1) if idx.descending else range(i + 1, idx.k2 + 1)
    for j in blocks:
        if lam == 0:
            return 0
        for s in range(1, idx.t + 1):
            if lam == 0:
                return 0
            copies = j ** idx.C[s - 1]
            v = idx.factor_vars[s - 1]
            while copies > 0 and lam > 0:
                lam = report(ctx, v, lam, sink)
                copies -= 1
    return lam
