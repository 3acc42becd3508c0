import math
import random

import pytest

from islp.corpora import RandomIslpParams, gen_sk, random_islp
from islp.grammar import (Binary, Grammar, Iter, Terminal, ValidationError,
                          expand, parse_grammar, size)
from islp.transform import EditOp, apply_morphism, clamp_degree, edit, reverse
from conftest import fig1_grammar

S5 = "abaabaaabaaaabaaaaab"


def _random_grammars(count, length_limit=3000):
    return [random_islp(RandomIslpParams(seed=s, length_limit=length_limit))
            for s in range(count)]


# -- clamp -------------------------------------------------------------------

def test_clamp_zeroes_single_block_exponents():
    g = parse_grammar("B='b'\nS=prod i in 1..1 { B^(i^9) }\nstart S")
    out = clamp_degree(g)
    assert out.rules[1] == Iter(1, 1, ((0, 0),))
    assert expand(out) == expand(g) == "b"
    assert size(out) == size(g)


def test_clamp_is_fixpoint_when_within_bound():
    for g in (gen_sk(5), fig1_grammar()[0]):
        assert clamp_degree(g) is g


def test_clamp_preserves_expansion_and_size():
    for g in _random_grammars(40):
        out = clamp_degree(g)
        assert expand(out) == expand(g)
        assert size(out) == size(g)
        n = out.n
        assert out.max_degree() <= max(1, int(math.log2(n))) or n == 1


def test_clamp_bound_holds_on_multi_block_rules():
    # with two or more blocks, i >= 2 occurs and i^c <= |exp(A)| forces
    # c <= log2 n; clamp leaves such rules alone but the bound must hold
    for g in _random_grammars(40):
        out = clamp_degree(g)
        for v, rule in enumerate(out.rules):
            if isinstance(rule, Iter) and rule.k_hi >= 2:
                for _, c in rule.factors:
                    assert rule.k_lo ** c <= out.lengths[v] or rule.k_lo == 1
                    assert max(rule.k_lo, 2) ** c <= out.lengths[v] * 2


# -- reverse -----------------------------------------------------------------

def test_reverse_example():
    g = reverse(gen_sk(5))
    assert expand(g) == S5[::-1]
    assert size(g) == 8


def test_reverse_involution_and_size():
    for g in _random_grammars(40) + [fig1_grammar()[0]]:
        r = reverse(g)
        assert size(r) == size(g)
        assert expand(r) == expand(g)[::-1]
        assert expand(reverse(r)) == expand(g)


# -- morphism ----------------------------------------------------------------

def test_morphism_example():
    g = apply_morphism(gen_sk(5), {"a": "ab", "b": "b"})
    assert expand(g) == S5.replace("a", "ab")


def test_morphism_identity():
    g = gen_sk(5)
    out = apply_morphism(g, {})
    assert expand(out) == S5
    assert size(out) <= size(g) + len(g.alphabet)


def test_morphism_oracle_random():
    rng = random.Random(1)
    for g in _random_grammars(25):
        phi = {a: "".join(rng.choice("xyz")
                          for _ in range(rng.randint(1, 4)))
               for a in sorted(g.alphabet)}
        t = expand(g)
        assert expand(apply_morphism(g, phi)) == "".join(phi[ch] for ch in t)


def test_morphism_added_size_is_grammar_independent():
    # same alphabet, one terminal rule per character: the added size must
    # depend only on the morphism
    gs = [gen_sk(3), gen_sk(50),
          parse_grammar("A='a'\nB='b'\nX = A B\nS = X X\nstart S")]
    phi = {"a": "abba", "b": "ba"}
    deltas = {size(apply_morphism(g, phi)) - size(g) for g in gs}
    assert len(deltas) == 1


def test_morphism_rejects_erasure():
    with pytest.raises(ValidationError):
        apply_morphism(gen_sk(3), {"a": ""})


# -- edit --------------------------------------------------------------------

def test_edit_substitute_worked_example():
    g = edit(gen_sk(5), EditOp("substitute", 14, "a"))
    assert expand(g) == "abaabaaabaaaaaaaaaab"


def test_edit_all_kinds_at_boundary_positions():
    g = gen_sk(5)
    t = expand(g)
    n = len(t)
    for pos in (1, 10, n):
        cases = {
            EditOp("substitute", pos, "c"): t[:pos - 1] + "c" + t[pos:],
            EditOp("insert-before", pos, "c"): t[:pos - 1] + "c" + t[pos - 1:],
            EditOp("insert-after", pos, "c"): t[:pos] + "c" + t[pos:],
            EditOp("delete", pos): t[:pos - 1] + t[pos:],
        }
        for op, want in cases.items():
            out = edit(g, op)
            assert expand(out) == want, op
            assert size(out) <= 16 * size(g)


def test_edit_random_pairs_ratio_bound():
    rng = random.Random(3)
    for g in _random_grammars(30):
        t = expand(g)
        n = len(t)
        for _ in range(3):
            kind = rng.choice(("substitute", "insert-before",
                               "insert-after", "delete"))
            pos = rng.randint(1, n)
            if kind == "delete" and n == 1:
                continue
            ch = rng.choice("pq")
            op = EditOp(kind, pos, None if kind == "delete" else ch)
            out = edit(g, op)
            if kind == "substitute":
                want = t[:pos - 1] + ch + t[pos:]
            elif kind == "insert-before":
                want = t[:pos - 1] + ch + t[pos - 1:]
            elif kind == "insert-after":
                want = t[:pos] + ch + t[pos:]
            else:
                want = t[:pos - 1] + t[pos:]
            assert expand(out) == want, (g, op)
            assert size(out) <= 16 * size(g), (g, op)


def test_edit_descending_rule():
    g = parse_grammar("A='a'\nB='b'\nS=prod i in 5..2 { A^(i^1) B^(i^0) }\n"
                      "start S")
    t = expand(g)
    for pos in (1, 7, len(t)):
        out = edit(g, EditOp("substitute", pos, "z"))
        assert expand(out) == t[:pos - 1] + "z" + t[pos:]


def test_edit_rejects_degenerate_cases():
    single = parse_grammar("A='a'\nstart A")
    with pytest.raises(ValidationError):
        edit(single, EditOp("delete", 1))
    with pytest.raises(ValidationError):
        edit(gen_sk(3), EditOp("substitute", 100, "a"))
    with pytest.raises(ValueError):
        EditOp("frobnicate", 1, "a")
    with pytest.raises(ValueError):
        EditOp("substitute", 1, None)
