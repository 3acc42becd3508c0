"""Grammar rewrites: degree clamp, reversal, morphisms, single-char edits."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from .balance import _binarize_seq
from .grammar import (Binary, Grammar, GrammarBuilder, Iter, Rule, Seq,
                      Terminal, ValidationError)
from .poly import f_plus

logger = logging.getLogger(__name__)

EDIT_KINDS = ("substitute", "insert-before", "insert-after", "delete")


@dataclass(frozen=True)
class EditOp:
    kind: str
    position: int
    character: Optional[str] = None

    def __post_init__(self):
        if self.kind not in EDIT_KINDS:
            raise ValueError(f"unknown edit kind {self.kind!r}")
        if self.kind != "delete" and (self.character is None
                                      or len(self.character) != 1):
            raise ValueError("edit needs a single replacement character")


def _ilog(base: int, value: int) -> int:
    """Largest e with base**e <= value (value >= 1, base >= 2)."""
    e = 0
    acc = base
    while acc <= value:
        e += 1
        acc *= base
    return e


def clamp_degree(g: Grammar) -> Grammar:
    """Equivalent grammar of the same size with all exponents <= log2 n.

    Single-block rules over i=1 get all exponents zeroed.  For the rest
    the exponent cap already holds in any valid grammar (every block value
    >= 2 in range forces i^c <= |exp(A)|); a rule whose capped monomials
    would change the expansion is left untouched and logged.
    """
    rules = list(g.rules)
    changed = False
    for v, rule in enumerate(rules):
        if not isinstance(rule, Iter):
            continue
        if rule.k_lo == 1 and rule.k_hi == 1:
            if any(c != 0 for _, c in rule.factors):
                rules[v] = Iter(rule.k1, rule.k2,
                                tuple((fv, 0) for fv, _ in rule.factors))
                changed = True
            continue
        cap = _ilog(max(rule.k_lo, 2), g.lengths[v])
        if any(c > cap for _, c in rule.factors):
            # i^c == i^cap for every block only when the range is {1},
            # impossible here; leave the rule as-is.
            logger.warning("clamp: rule %s exceeds exponent cap %d, left untouched",
                           g.names[v], cap)
    if not changed:
        return g
    return Grammar(rules, g.start, g.names)


def reverse(g: Grammar) -> Grammar:
    """Grammar of identical size generating the reversed text."""
    rules: list[Rule] = []
    for rule in g.rules:
        if isinstance(rule, Terminal):
            rules.append(rule)
        elif isinstance(rule, Binary):
            rules.append(Binary(rule.right, rule.left))
        elif isinstance(rule, Iter):
            rules.append(Iter(rule.k2, rule.k1, tuple(reversed(rule.factors))))
        else:
            rules.append(Seq(tuple(reversed(rule.children))))
    return Grammar(rules, g.start, g.names)


def apply_morphism(g: Grammar, phi: dict[str, str]) -> Grammar:
    """Replace each terminal a by a sub-grammar for phi(a).

    The sub-grammar for each character is built once and shared; the added
    size depends only on the morphism, not on the input grammar.
    """
    for a in sorted(g.alphabet):
        if phi.get(a, a) == "":
            raise ValidationError(
                f"morphism erases character {a!r}; empty rules are unsupported")
    b = GrammarBuilder(g.rules, g.names)
    leaves: dict[str, int] = {}

    def leaf(ch: str) -> int:
        if ch not in leaves:
            leaves[ch] = b.add(Terminal(ch))
        return leaves[ch]

    plans: dict[str, Rule] = {}
    for a in sorted(g.alphabet):
        img = phi.get(a, a)
        if img == a:
            continue
        if len(img) == 1:
            plans[a] = Terminal(img)
        else:
            plans[a] = _binarize_seq(b, tuple(leaf(ch) for ch in img))
    for v, rule in enumerate(g.rules):
        if isinstance(rule, Terminal) and rule.symbol in plans:
            b.set(v, plans[rule.symbol])
    return b.finish(g.start)


def edit(g: Grammar, op: EditOp) -> Grammar:
    """Apply a single-character edit, rebuilding the root-to-leaf path.

    Every visited node gets a primed copy; iteration rules are split into
    before/at/after pieces around the touched copy of the touched factor.
    Empty pieces are dropped, chains inlined, and the result binarized.
    """
    from .access import AccessContext, block_search, factor_search
    from .poly import f_r

    n = g.n
    if not 1 <= op.position <= n:
        raise ValidationError(f"edit position {op.position} out of range [1..{n}]")
    if op.kind == "delete" and n == 1:
        raise ValidationError("deleting the only character would empty the text")

    ctx = AccessContext(g)
    path = []
    a, l = g.start, op.position
    while True:
        rule = g.rules[a]
        if isinstance(rule, Terminal):
            break
        if isinstance(rule, Binary):
            llen = g.lengths[rule.left]
            if l <= llen:
                path.append(("bin", rule, "L"))
                a = rule.left
            else:
                path.append(("bin", rule, "R"))
                a, l = rule.right, l - llen
        elif isinstance(rule, Seq):
            for posn, c in enumerate(rule.children):
                clen = g.lengths[c]
                if l <= clen:
                    path.append(("seq", rule, posn))
                    a = c
                    break
                l -= clen
        else:
            idx = ctx.indexes[a]
            if idx.descending:
                nloc = g.lengths[a]
                i, _ = block_search(idx, nloc - l + 1, ctx)
                rem = f_plus(idx, i) - (nloc - l)
            else:
                i, rem = block_search(idx, l, ctx)
            r, off_run = factor_search(idx, i, rem, ctx)
            blen = idx.factor_lens[r - 1]
            q = -(-off_run // blen)
            path.append(("iter", rule, i, r, q))
            a, l = idx.factor_vars[r - 1], off_run - (q - 1) * blen

    b = GrammarBuilder(g.rules, g.names)
    if op.kind == "substitute":
        cur: Optional[int] = b.add(Terminal(op.character))
    elif op.kind == "insert-before":
        cur = b.add(Seq((b.add(Terminal(op.character)), a)))
    elif op.kind == "insert-after":
        cur = b.add(Seq((a, b.add(Terminal(op.character)))))
    else:
        cur = None  # epsilon; eliminated while rebuilding upwards

    for frame in reversed(path):
        if frame[0] == "bin":
            _, rule, side = frame
            parts = ((cur, rule.right) if side == "L" else (rule.left, cur))
        elif frame[0] == "seq":
            _, rule, posn = frame
            parts = rule.children[:posn] + (cur,) + rule.children[posn + 1:]
        else:
            _, rule, i, r, q = frame
            parts = _split_iter(b, rule, i, r, q, cur)
        kept = tuple(p for p in parts if p is not None)
        cur = b.add(Seq(kept)) if kept else None

    if cur is None:
        raise ValidationError("edit produced an empty text")
    for v, rule in enumerate(list(b.rules)):
        if isinstance(rule, Seq) and len(rule.children) >= 2:
            b.set(v, _binarize_seq(b, rule.children))
    return b.finish(cur)


def _split_iter(b: GrammarBuilder, rule: Iter, i: int, r: int, q: int,
                cur: Optional[int]) -> tuple[Optional[int], ...]:
    """Pieces equivalent to the rule with copy q of factor r in block i
    replaced by ``cur``; empty pieces are None."""
    fv, c_r = rule.factors[r - 1]
    m = i ** c_r

    def runs(count: int, var: int) -> Optional[int]:
        if count <= 0:
            return None
        if count == 1:
            return var
        return b.add(Iter(1, count, ((var, 0),)))

    if rule.descending:
        before = (b.add(Iter(rule.k1, i + 1, rule.factors))
                  if i < rule.k1 else None)
        after = (b.add(Iter(i - 1, rule.k2, rule.factors))
                 if i > rule.k2 else None)
    else:
        before = (b.add(Iter(rule.k1, i - 1, rule.factors))
                  if i > rule.k1 else None)
        after = (b.add(Iter(i + 1, rule.k2, rule.factors))
                 if i < rule.k2 else None)
    a2 = b.add(Iter(i, i, rule.factors[:r - 1])) if r > 1 else None
    a5 = b.add(Iter(i, i, rule.factors[r:])) if r < len(rule.factors) else None
    return (before, a2, runs(q - 1, fv), cur, runs(m - q, fv), a5, after)
