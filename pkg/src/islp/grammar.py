"""Representation, parsing, validation and brute-force expansion of ISLPs.

The grammar has three user-visible rule kinds (terminal, binary,
iteration) plus an internal sequence kind used by the rewriting passes
before binarization.  ``expand`` is the ground-truth oracle for every
other module; it is deliberately simple and iterative so that very deep
grammars (pre-balancing chains) do not overflow the call stack.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from .poly import power_sum

ORACLE_LIMIT_DEFAULT = 10 ** 7

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class GrammarError(Exception):
    """Base class for grammar construction and parsing failures."""


class ParseError(GrammarError):
    def __init__(self, message: str, line: int, column: int | None = None):
        loc = f"line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"{loc}: {message}")
        self.line = line
        self.column = column


class ValidationError(GrammarError):
    pass


class OracleLimitError(GrammarError):
    """An expansion-size limit was exceeded by a brute-force operation."""


@dataclass(frozen=True)
class Terminal:
    symbol: str


@dataclass(frozen=True)
class Binary:
    left: int
    right: int


@dataclass(frozen=True)
class Iter:
    """A -> prod_{i=k1}^{k2} B_1^{i^{c_1}} ... B_t^{i^{c_t}}.

    ``k1 > k2`` means the iteration runs downwards; the polynomial
    machinery always works on the ascending range [k_lo..k_hi] plus a
    direction flag.
    """

    k1: int
    k2: int
    factors: tuple[tuple[int, int], ...]  # (variable, exponent c_j)

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
    def degree(self) -> int:
        return max(c for _, c in self.factors)

    def blocks(self) -> Iterable[int]:
        if self.descending:
            return range(self.k1, self.k2 - 1, -1)
        return range(self.k1, self.k2 + 1)


@dataclass(frozen=True)
class Seq:
    """Internal flat rule A -> B_1 ... B_t (size t); not parseable/emittable."""

    children: tuple[int, ...]


Rule = Union[Terminal, Binary, Iter, Seq]


def rule_children(rule: Rule) -> tuple[int, ...]:
    if isinstance(rule, Terminal):
        return ()
    if isinstance(rule, Binary):
        return (rule.left, rule.right)
    if isinstance(rule, Iter):
        return tuple(v for v, _ in rule.factors)
    return rule.children


def rule_size(rule: Rule) -> int:
    if isinstance(rule, Terminal):
        return 1
    if isinstance(rule, Binary):
        return 2
    if isinstance(rule, Iter):
        return 2 + 2 * len(rule.factors)
    return len(rule.children)


class Grammar:
    """A validated ISLP: acyclic, fully reachable, lengths precomputed.

    Immutable after construction; safe to share across threads.
    """

    __slots__ = ("rules", "start", "names", "lengths", "alphabet")

    def __init__(self, rules: Iterable[Rule], start: int,
                 names: Optional[Iterable[str]] = None):
        rules = tuple(rules)
        n = len(rules)
        if names is None:
            names = tuple(f"V{i}" for i in range(n))
        else:
            names = tuple(names)
        if len(names) != n:
            raise ValidationError("names/rules length mismatch")
        if not 0 <= start < n:
            raise ValidationError(f"start variable {start} out of range")
        self._check_rules(rules, names)
        order = self._topo_order(rules, names)
        lengths = [0] * n
        for v in order:
            lengths[v] = self._rule_length(rules[v], lengths, names[v])
        reachable = self._reachable(rules, start)
        if len(reachable) != n:
            missing = sorted(set(range(n)) - reachable)
            label = ", ".join(names[v] for v in missing[:5])
            raise ValidationError(f"unreachable variables: {label}")
        self.rules = rules
        self.start = start
        self.names = names
        self.lengths = tuple(lengths)
        self.alphabet = frozenset(
            r.symbol for r in rules if isinstance(r, Terminal))

    @staticmethod
    def _check_rules(rules: tuple[Rule, ...], names: tuple[str, ...]) -> None:
        n = len(rules)
        for v, rule in enumerate(rules):
            name = names[v]
            if isinstance(rule, Terminal):
                if len(rule.symbol) != 1:
                    raise ValidationError(f"{name}: terminal must be a single character")
                if ord(rule.symbol) > 0xFF:
                    raise ValidationError(f"{name}: terminal outside byte range")
            elif isinstance(rule, Iter):
                if rule.k1 < 1 or rule.k2 < 1:
                    raise ValidationError(f"{name}: iteration endpoints must be >= 1")
                if not rule.factors:
                    raise ValidationError(f"{name}: empty factor list")
                for fv, c in rule.factors:
                    if c < 0:
                        raise ValidationError(f"{name}: negative exponent")
            elif isinstance(rule, Seq):
                if not rule.children:
                    raise ValidationError(f"{name}: empty sequence rule")
            for child in rule_children(rule):
                if not 0 <= child < n:
                    raise ValidationError(f"{name}: undefined variable id {child}")

    @staticmethod
    def _topo_order(rules: tuple[Rule, ...], names: tuple[str, ...]) -> list[int]:
        """Children-before-parents order; raises on cycles."""
        n = len(rules)
        indeg = [0] * n  # number of distinct children not yet finished
        parents: list[list[int]] = [[] for _ in range(n)]
        children_sets = [set(rule_children(r)) for r in rules]
        for v, cs in enumerate(children_sets):
            if v in cs:
                raise ValidationError(f"cycle detected at {names[v]}")
            indeg[v] = len(cs)
            for c in cs:
                parents[c].append(v)
        queue = [v for v in range(n) if indeg[v] == 0]
        order = []
        while queue:
            v = queue.pop()
            order.append(v)
            for p in parents[v]:
                indeg[p] -= 1
                if indeg[p] == 0:
                    queue.append(p)
        if len(order) != n:
            bad = next(names[v] for v in range(n) if indeg[v] > 0)
            raise ValidationError(f"cycle detected at {bad}")
        return order

    @staticmethod
    def _rule_length(rule: Rule, lengths: list[int], name: str) -> int:
        if isinstance(rule, Terminal):
            return 1
        if isinstance(rule, Binary):
            return lengths[rule.left] + lengths[rule.right]
        if isinstance(rule, Seq):
            return sum(lengths[c] for c in rule.children)
        total = 0
        lo, hi = rule.k_lo, rule.k_hi
        for v, c in rule.factors:
            total += lengths[v] * (power_sum(c, hi) - power_sum(c, lo - 1))
        return total

    @staticmethod
    def _reachable(rules: tuple[Rule, ...], start: int) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for c in rule_children(rules[v]):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return seen

    # -- equality is structural (rules, start and names) --------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grammar):
            return NotImplemented
        return (self.rules == other.rules and self.start == other.start
                and self.names == other.names)

    def __hash__(self):
        return hash((self.rules, self.start, self.names))

    def __repr__(self):
        return (f"Grammar({len(self.rules)} vars, start={self.names[self.start]}, "
                f"n={self.lengths[self.start]})")

    @property
    def n(self) -> int:
        return self.lengths[self.start]

    def max_degree(self) -> int:
        """Largest exponent c_j over all iteration rules (0 if none)."""
        d = 0
        for r in self.rules:
            if isinstance(r, Iter):
                d = max(d, r.degree)
        return d


def exp_len(g: Grammar, a: int) -> int:
    """|exp(a)|, precomputed at validation time."""
    return g.lengths[a]


def size(g: Grammar) -> int:
    """Sum of rule sizes: terminal 1, binary 2, iteration 2+2t, sequence t."""
    return sum(rule_size(r) for r in g.rules)


def height(g: Grammar, a: int | None = None) -> int:
    """Derivation-tree height; an iteration node counts as one level."""
    if a is None:
        a = g.start
    h = [0] * len(g.rules)
    for v in g._topo_order(g.rules, g.names):
        cs = rule_children(g.rules[v])
        h[v] = 1 + max(h[c] for c in cs) if cs else 0
    return h[a]


def _rule_symbols(g: Grammar, rule: Rule) -> Iterator[int]:
    """Yield the flat variable sequence of a rule's right-hand side."""
    if isinstance(rule, Binary):
        yield rule.left
        yield rule.right
    elif isinstance(rule, Seq):
        yield from rule.children
    elif isinstance(rule, Iter):
        for i in rule.blocks():
            for v, c in rule.factors:
                count = i ** c
                for _ in range(count):
                    yield v
    else:
        raise TypeError("terminal rules have no symbol sequence")


def expand(g: Grammar, a: int | None = None,
           limit: int = ORACLE_LIMIT_DEFAULT) -> str:
    """Full expansion of ``a`` (default: start).  Ground-truth oracle."""
    if a is None:
        a = g.start
    if g.lengths[a] > limit:
        raise OracleLimitError(
            f"expansion length {g.lengths[a]} exceeds oracle limit {limit}")
    out: list[str] = []
    stack: list[Iterator[int]] = [iter((a,))]
    while stack:
        v = next(stack[-1], None)
        if v is None:
            stack.pop()
            continue
        rule = g.rules[v]
        if isinstance(rule, Terminal):
            out.append(rule.symbol)
        else:
            stack.append(_rule_symbols(g, rule))
    return "".join(out)


def unfold_iter(g: Grammar, a: int,
                limit: int = ORACLE_LIMIT_DEFAULT) -> list[int]:
    """The variable sequence OUT(x) of an iteration rule, fully unfolded."""
    rule = g.rules[a]
    if not isinstance(rule, Iter):
        raise ValueError(f"{g.names[a]} is not an iteration rule")
    count = 0
    lo, hi = rule.k_lo, rule.k_hi
    for v, c in rule.factors:
        count += power_sum(c, hi) - power_sum(c, lo - 1)
    if count > limit:
        raise OracleLimitError(
            f"unfolded sequence length {count} exceeds oracle limit {limit}")
    return list(_rule_symbols(g, rule))


# ---------------------------------------------------------------------------
# Grammar file format
# ---------------------------------------------------------------------------

_ESCAPES = {"\\'": "'", "\\\\": "\\", "\\n": "\n", "\\t": "\t"}
_REV_ESCAPES = {v: k for k, v in _ESCAPES.items()}

_TERMINAL_LINE = re.compile(
    r"^\s*([A-Za-z_]\w*)\s*=\s*'((?:\\.|[^'\\])*)'\s*$")
_BINARY_LINE = re.compile(
    r"^\s*([A-Za-z_]\w*)\s*=\s*([A-Za-z_]\w*)\s+([A-Za-z_]\w*)\s*$")
_ITER_LINE = re.compile(
    r"^\s*([A-Za-z_]\w*)\s*=\s*prod\s+i\s+in\s+(\d+)\s*\.\.\s*(\d+)"
    r"\s*\{(.*)\}\s*$")
_FACTOR = re.compile(r"([A-Za-z_]\w*)\^\(i\^(\d+)\)")
_START_LINE = re.compile(r"^\s*start\s+([A-Za-z_]\w*)\s*$")


def _unescape(raw: str, lineno: int) -> str:
    out = []
    i = 0
    while i < len(raw):
        if raw[i] == "\\":
            pair = raw[i:i + 2]
            if pair not in _ESCAPES:
                raise ParseError(f"unknown escape {pair!r}", lineno, i + 1)
            out.append(_ESCAPES[pair])
            i += 2
        else:
            out.append(raw[i])
            i += 1
    return "".join(out)


def _escape(ch: str) -> str:
    return _REV_ESCAPES.get(ch, ch)


def parse_grammar(text: str) -> Grammar:
    """Parse the line-oriented grammar file format into a validated Grammar."""
    pending: list[tuple[str, object, int]] = []  # (name, raw rule, lineno)
    ids: dict[str, int] = {}
    start_name: str | None = None
    start_line = 0

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _START_LINE.match(line)
        if m:
            if start_name is not None:
                raise ParseError("duplicate start line", lineno)
            start_name = m.group(1)
            start_line = lineno
            continue
        m = _TERMINAL_LINE.match(line)
        if m:
            name, raw = m.group(1), m.group(2)
            sym = _unescape(raw, lineno)
            if len(sym) != 1:
                raise ParseError("terminal must be a single character", lineno)
            _define(ids, pending, name, Terminal(sym), lineno)
            continue
        m = _ITER_LINE.match(line)
        if m:
            name, k1, k2, body = m.group(1), int(m.group(2)), int(m.group(3)), m.group(4)
            if k1 == 0 or k2 == 0:
                raise ParseError("iteration endpoints must be >= 1", lineno)
            factors = []
            rest = body
            for fm in _FACTOR.finditer(body):
                factors.append((fm.group(1), int(fm.group(2))))
                rest = rest.replace(fm.group(0), "", 1)
            if rest.strip():
                raise ParseError(f"malformed factor list near {rest.strip()[:20]!r}",
                                 lineno)
            if not factors:
                raise ParseError("empty factor list", lineno)
            _define(ids, pending, name, ("iter", k1, k2, factors), lineno)
            continue
        m = _BINARY_LINE.match(line)
        if m:
            _define(ids, pending, m.group(1), ("bin", m.group(2), m.group(3)), lineno)
            continue
        raise ParseError(f"unrecognized line: {stripped[:40]!r}", lineno)

    if start_name is None:
        raise ParseError("missing start line", len(text.splitlines()) + 1)
    if start_name not in ids:
        raise ParseError(f"undefined start variable {start_name}", start_line)

    def resolve(name: str, lineno: int) -> int:
        if name not in ids:
            raise ParseError(f"undefined variable {name}", lineno)
        return ids[name]

    rules: list[Rule] = []
    names: list[str] = []
    for name, raw, lineno in pending:
        names.append(name)
        if isinstance(raw, Terminal):
            rules.append(raw)
        elif raw[0] == "bin":
            rules.append(Binary(resolve(raw[1], lineno), resolve(raw[2], lineno)))
        else:
            _, k1, k2, factors = raw
            rules.append(Iter(k1, k2, tuple(
                (resolve(fn, lineno), c) for fn, c in factors)))
    try:
        return Grammar(rules, ids[start_name], names)
    except ValidationError as exc:
        raise ValidationError(str(exc)) from None


def _define(ids, pending, name, rule, lineno):
    if name in ids:
        raise ParseError(f"duplicate definition of {name}", lineno)
    ids[name] = len(pending)
    pending.append((name, rule, lineno))


def emit(g: Grammar) -> str:
    """Serialize to the grammar file format (bit-exact round trip)."""
    lines = []
    for v, rule in enumerate(g.rules):
        name = g.names[v]
        if isinstance(rule, Terminal):
            lines.append(f"{name} = '{_escape(rule.symbol)}'")
        elif isinstance(rule, Binary):
            lines.append(f"{name} = {g.names[rule.left]} {g.names[rule.right]}")
        elif isinstance(rule, Iter):
            factors = " ".join(
                f"{g.names[fv]}^(i^{c})" for fv, c in rule.factors)
            lines.append(f"{name} = prod i in {rule.k1}..{rule.k2} {{ {factors} }}")
        else:
            raise ValueError(
                f"{name}: sequence rules are internal; binarize before emitting")
    lines.append(f"start {g.names[g.start]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Builder used by the rewriting passes
# ---------------------------------------------------------------------------

class GrammarBuilder:
    """Mutable rule table for constructing rewritten grammars.

    ``finish`` inlines chain rules (one-child sequences), prunes variables
    unreachable from the start, and validates the result.
    """

    def __init__(self, rules: Iterable[Rule] = (), names: Iterable[str] = ()):
        self.rules: list[Rule] = list(rules)
        self.names: list[str] = list(names)
        self._used = set(self.names)
        self._counter = 0

    def fresh_name(self, prefix: str = "X") -> str:
        while True:
            name = f"{prefix}{self._counter}"
            self._counter += 1
            if name not in self._used:
                self._used.add(name)
                return name

    def add(self, rule: Rule, name: str | None = None) -> int:
        if name is None:
            name = self.fresh_name()
        else:
            if name in self._used:
                raise ValueError(f"duplicate name {name}")
            self._used.add(name)
        self.rules.append(rule)
        self.names.append(name)
        return len(self.rules) - 1

    def set(self, var: int, rule: Rule) -> None:
        self.rules[var] = rule

    def _resolve_chains(self) -> list[int]:
        """Map every variable to its chain-free representative."""
        n = len(self.rules)
        target = list(range(n))

        def rep(v: int) -> int:
            seen = []
            while True:
                rule = self.rules[v]
                if isinstance(rule, Seq) and len(rule.children) == 1:
                    seen.append(v)
                    v = rule.children[0]
                else:
                    break
            for s in seen:
                target[s] = v
            return v

        for v in range(n):
            rep(v)
        return target

    def finish(self, start: int) -> Grammar:
        target = self._resolve_chains()
        rules = []
        for rule in self.rules:
            if isinstance(rule, Binary):
                rules.append(Binary(target[rule.left], target[rule.right]))
            elif isinstance(rule, Seq):
                rules.append(Seq(tuple(target[c] for c in rule.children)))
            elif isinstance(rule, Iter):
                rules.append(Iter(rule.k1, rule.k2, tuple(
                    (target[v], c) for v, c in rule.factors)))
            else:
                rules.append(rule)
        start = target[start]
        # prune unreachable, remap ids preserving order
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for c in rule_children(rules[v]):
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        keep = sorted(seen)
        remap = {old: new for new, old in enumerate(keep)}
        out_rules: list[Rule] = []
        out_names = []
        for old in keep:
            rule = rules[old]
            if isinstance(rule, Binary):
                rule = Binary(remap[rule.left], remap[rule.right])
            elif isinstance(rule, Seq):
                rule = Seq(tuple(remap[c] for c in rule.children))
            elif isinstance(rule, Iter):
                rule = Iter(rule.k1, rule.k2, tuple(
                    (remap[v], c) for v, c in rule.factors))
            out_rules.append(rule)
            out_names.append(self.names[old])
        return Grammar(out_rules, remap[start], out_names)
