"""Balancing of generalized SLPs via symmetric-centroid path decomposition.

The grammar is viewed as a DAG whose edge multiplicities for iteration
rules are computed with power sums, never by unfolding.  Nodes are
labeled with floor-log path counts (exact bit lengths of big integers,
no floating point), chained into SC-paths, and every interior path node
is rewritten into a length-<=3 rule built from suffix/prefix variables
of weight-balanced sequence SLPs.  Iteration rules themselves are left
untouched; the final pass binarizes everything else.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field

from .grammar import (Binary, Grammar, GrammarBuilder, Iter, Rule, Seq,
                      Terminal, rule_children)
from .poly import power_sum


# ---------------------------------------------------------------------------
# Binarization
# ---------------------------------------------------------------------------

def binarize(g: Grammar) -> Grammar:
    """Rewrite all sequence rules into binary rules; inline chain rules.

    Idempotent on grammars that are already binary/terminal/iteration.
    """
    b = GrammarBuilder(g.rules, g.names)
    for v, rule in enumerate(list(b.rules)):
        if isinstance(rule, Seq) and len(rule.children) >= 2:
            b.set(v, _binarize_seq(b, rule.children))
    return b.finish(g.start)


def _binarize_seq(b: GrammarBuilder, children: tuple[int, ...]) -> Binary:
    """Balanced binary combination of >= 2 symbols; returns the root rule."""
    def combine(syms: tuple[int, ...]) -> int:
        if len(syms) == 1:
            return syms[0]
        mid = len(syms) // 2
        return b.add(Binary(combine(syms[:mid]), combine(syms[mid:])))

    mid = len(children) // 2
    return Binary(combine(children[:mid]), combine(children[mid:]))


# ---------------------------------------------------------------------------
# Balanceability normalization and DAG construction
# ---------------------------------------------------------------------------

def _iter_occurrences(rule: Iter) -> dict[int, int]:
    """Occurrences of each variable in OUT(x), computed with power sums."""
    lo, hi = rule.k_lo, rule.k_hi
    occ: dict[int, int] = {}
    for v, c in rule.factors:
        occ[v] = occ.get(v, 0) + power_sum(c, hi) - power_sum(c, lo - 1)
    return occ


def normalize_balanceable(g: Grammar) -> Grammar:
    """Rewrite iteration rules in which some variable occurs once in OUT(x).

    With at least two blocks every factor variable occurs at least twice,
    so only single-block rules (k1 = k2) need rewriting: each factor
    B^{k^c} becomes either the plain variable (one copy) or a run-length
    iteration rule (>= 2 copies), glued by a sequence rule.
    """
    b = GrammarBuilder(g.rules, g.names)
    for v, rule in enumerate(list(b.rules)):
        if not isinstance(rule, Iter):
            continue
        if rule.k1 != rule.k2:
            assert all(m >= 2 for m in _iter_occurrences(rule).values())
            continue
        k = rule.k1
        parts = []
        for fv, c in rule.factors:
            m = k ** c
            if m == 1:
                parts.append(fv)
            else:
                parts.append(b.add(Iter(1, m, ((fv, 0),))))
        b.set(v, Seq(tuple(parts)))
    return b.finish(g.start)


@dataclass
class Dag:
    """Multigraph view of a grammar with symbolic edge multiplicities."""

    grammar: Grammar
    mult: list[dict[int, int]]          # node -> child -> occurrence count
    topo: list[int]                     # children before parents
    root: int
    sinks: frozenset[int]

    def multiplicity(self, u: int, v: int) -> int:
        return self.mult[u].get(v, 0)


def to_dag(g: Grammar) -> Dag:
    """DAG of the (normalized, binarized) grammar.

    Non-iteration rules are binarized first so every interior SC-path node
    has exactly one off-path child; unbalanceable iteration rules are
    rewritten before that.
    """
    g = binarize(normalize_balanceable(g))
    mult: list[dict[int, int]] = []
    for rule in g.rules:
        if isinstance(rule, Terminal):
            mult.append({})
        elif isinstance(rule, Iter):
            mult.append(_iter_occurrences(rule))
        else:
            m: dict[int, int] = {}
            for c in rule_children(rule):
                m[c] = m.get(c, 0) + 1
            mult.append(m)
    topo = Grammar._topo_order(g.rules, g.names)
    sinks = frozenset(v for v, r in enumerate(g.rules) if isinstance(r, Terminal))
    return Dag(grammar=g, mult=mult, topo=topo, root=g.start, sinks=sinks)


def path_counts(dag: Dag) -> tuple[list[int], list[int]]:
    """Exact path counts (pi(root, v), pi(v, sinks)) for every node."""
    n = len(dag.grammar.rules)
    from_root = [0] * n
    from_root[dag.root] = 1
    for u in reversed(dag.topo):  # parents before children
        for v, m in dag.mult[u].items():
            from_root[v] += m * from_root[u]
    to_sinks = [0] * n
    for v in dag.topo:  # children before parents
        if v in dag.sinks:
            to_sinks[v] = 1
        else:
            to_sinks[v] = sum(m * to_sinks[c] for c, m in dag.mult[v].items())
    return from_root, to_sinks


@dataclass(frozen=True)
class LambdaLabel:
    in_log: int   # floor(log2 pi(root, v))
    out_log: int  # floor(log2 pi(v, sinks))


def lambda_labels(dag: Dag) -> list[LambdaLabel]:
    from_root, to_sinks = path_counts(dag)
    return [LambdaLabel(p.bit_length() - 1, s.bit_length() - 1)
            for p, s in zip(from_root, to_sinks)]


@dataclass
class ScPath:
    """Maximal SC-path A_0..A_p with the off-path child of each step."""

    nodes: list[int]
    off_path: list[tuple[int, str]] = field(default_factory=list)  # (var, side)

    @property
    def length(self) -> int:
        return len(self.nodes) - 1


def sc_decomposition(dag: Dag) -> list[ScPath]:
    """Chain nodes with equal lambda labels into maximal disjoint paths."""
    g = dag.grammar
    lam = lambda_labels(dag)
    nxt: dict[int, tuple[int, int, str]] = {}  # u -> (child, off_child, side of off)
    has_prev: set[int] = set()
    for u, rule in enumerate(g.rules):
        if not isinstance(rule, Binary):
            continue  # terminals and iteration rules have no outgoing SC edge
        left_eq = lam[rule.left] == lam[u]
        right_eq = lam[rule.right] == lam[u]
        assert not (left_eq and right_eq), "two outgoing SC edges from one node"
        if left_eq:
            assert rule.left not in has_prev, "two incoming SC edges"
            nxt[u] = (rule.left, rule.right, "right")
            has_prev.add(rule.left)
        elif right_eq:
            assert rule.right not in has_prev, "two incoming SC edges"
            nxt[u] = (rule.right, rule.left, "left")
            has_prev.add(rule.right)
    for u, rule in enumerate(g.rules):
        if isinstance(rule, Iter):
            for c in rule_children(rule):
                assert lam[c] != lam[u], "iteration rule must end its SC-path"
    paths = []
    for u in range(len(g.rules)):
        if u in has_prev:
            continue
        path = ScPath(nodes=[u])
        v = u
        while v in nxt:
            child, off, side = nxt[v]
            path.off_path.append((off, side))
            path.nodes.append(child)
            v = child
        paths.append(path)
    return paths


def non_scd_edges_on_walk(dag: Dag, walk: list[int]) -> int:
    """Count edges along a root-to-sink walk that join different labels."""
    lam = lambda_labels(dag)
    return sum(1 for a, b in zip(walk, walk[1:]) if lam[a] != lam[b])


# ---------------------------------------------------------------------------
# Weighted-string SLPs (suffix / prefix variables)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightedSeq:
    symbols: tuple[int, ...]
    weights: tuple[int, ...]

    def __post_init__(self):
        if not self.symbols or len(self.symbols) != len(self.weights):
            raise ValueError("non-empty symbols with matching weights required")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be strictly positive")


@dataclass
class _TreeNode:
    lo: int
    hi: int                     # positions [lo..hi], 1-based inclusive
    var: int                    # grammar symbol deriving this subtree
    left: "_TreeNode | None" = None
    right: "_TreeNode | None" = None


def _build_tree(b: GrammarBuilder, seq: WeightedSeq) -> _TreeNode:
    """Weight-balanced tree: split so the heavier side is minimal, ties left."""
    n = len(seq.symbols)
    prefix = [0]
    for w in seq.weights:
        prefix.append(prefix[-1] + w)

    # iterative post-order construction to avoid deep recursion
    root = _TreeNode(1, n, -1)
    stack = [root]
    post: list[_TreeNode] = []
    while stack:
        node = stack.pop()
        post.append(node)
        lo, hi = node.lo, node.hi
        if lo == hi:
            node.var = seq.symbols[lo - 1]
            continue
        total = prefix[hi] - prefix[lo - 1]
        # find split s in [lo..hi-1] minimizing max(left, right) weight
        target = prefix[lo - 1] + total // 2
        s = bisect.bisect_left(prefix, target, lo, hi)
        best_s, best_w = None, None
        for cand in (s - 1, s, s + 1):
            if lo <= cand <= hi - 1:
                w = max(prefix[cand] - prefix[lo - 1], prefix[hi] - prefix[cand])
                if best_w is None or w < best_w:
                    best_s, best_w = cand, w
        node.left = _TreeNode(lo, best_s, -1)
        node.right = _TreeNode(best_s + 1, hi, -1)
        stack.append(node.left)
        stack.append(node.right)
    for node in reversed(post):
        if node.left is not None:
            node.var = b.add(Binary(node.left.var, node.right.var))
    return root


def weighted_slp(b: GrammarBuilder, seq: WeightedSeq, mode: str) -> list[int]:
    """Add an SLP fragment for ``seq`` with suffix (or prefix) variables.

    Returns, 1-based by position, the variable deriving the suffix
    seq[i..n] (mode "suffix") or the prefix seq[1..i] (mode "prefix").
    The fragment adds at most 3*len(seq) variables with right-hand sides
    of length <= 2.
    """
    if mode not in ("suffix", "prefix"):
        raise ValueError("mode must be 'suffix' or 'prefix'")
    n = len(seq.symbols)
    root = _build_tree(b, seq)
    entry: list[int | None] = [None] * (n + 1)
    # rest[u]: symbol deriving everything after (suffix) / before (prefix)
    # the subtree u, or None at the boundary.
    stack: list[tuple[_TreeNode, int | None]] = [(root, None)]
    while stack:
        node, rest = stack.pop()
        if node.left is None:
            i = node.lo
            if rest is None:
                entry[i] = node.var
            elif mode == "suffix":
                entry[i] = b.add(Binary(node.var, rest))
            else:
                entry[i] = b.add(Binary(rest, node.var))
            continue
        if mode == "suffix":
            left_rest = node.right.var if rest is None else b.add(
                Binary(node.right.var, rest))
            stack.append((node.left, left_rest))
            stack.append((node.right, rest))
        else:
            right_rest = node.left.var if rest is None else b.add(
                Binary(rest, node.left.var))
            stack.append((node.right, right_rest))
            stack.append((node.left, rest))
    assert all(e is not None for e in entry[1:])
    return entry  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# The balancing rewrite
# ---------------------------------------------------------------------------

def balance(g: Grammar) -> Grammar:
    """Equivalent grammar of logarithmic height and proportional size.

    Iteration rules are preserved verbatim; every interior node of each
    SC-path gets a rule (suffix of left off-path vars) A_p (prefix of
    reversed right off-path vars), then everything is binarized.
    """
    dag = to_dag(g)
    h = dag.grammar
    paths = sc_decomposition(dag)
    b = GrammarBuilder(h.rules, h.names)
    for path in paths:
        p = path.length
        if p == 0:
            continue
        a_last = path.nodes[-1]
        lefts = [(j, v) for j, (v, side) in enumerate(path.off_path, start=1)
                 if side == "left"]
        rights = [(j, v) for j, (v, side) in enumerate(path.off_path, start=1)
                  if side == "right"]
        rights.reverse()  # descending j = text order after A_p
        suffix_vars = prefix_vars = None
        if lefts:
            seq = WeightedSeq(tuple(v for _, v in lefts),
                              tuple(h.lengths[v] for _, v in lefts))
            suffix_vars = weighted_slp(b, seq, "suffix")
        if rights:
            seq = WeightedSeq(tuple(v for _, v in rights),
                              tuple(h.lengths[v] for _, v in rights))
            prefix_vars = weighted_slp(b, seq, "prefix")
        left_js = [j for j, _ in lefts]
        right_js_asc = sorted(j for j, _ in rights)
        for i, a_i in enumerate(path.nodes[:-1]):
            parts = []
            # left off-path vars with index > i form a suffix of L
            pos = bisect.bisect_right(left_js, i)
            if suffix_vars is not None and pos < len(left_js):
                parts.append(suffix_vars[pos + 1])
            parts.append(a_last)
            # right off-path vars with index > i form a prefix of R
            cnt = len(right_js_asc) - bisect.bisect_right(right_js_asc, i)
            if prefix_vars is not None and cnt > 0:
                parts.append(prefix_vars[cnt])
            b.set(a_i, Seq(tuple(parts)))
    rewritten = b.finish(h.start)
    return binarize(rewritten)
