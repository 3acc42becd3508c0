import pytest

from islp.grammar import Binary, Grammar, Iter, Terminal


def fig1_grammar() -> tuple[Grammar, int]:
    """The worked 8-factor iteration rule with |exp| = 2, 3, 4, 7 blocks.

    Variables: a(0), B(1)=aa, C(2)=Ba, D(3)=BB, E(4)=CD, and
    A(5) = prod i in 1..5 { B^(i^1) C^(i^2) D^(i^1) E^(i^0) E^(i^0)
                            E^(i^1) B^(i^2) C^(i^3) }.
    Returns (grammar, id of the iteration variable).
    """
    rules = [
        Terminal("a"),
        Binary(0, 0),
        Binary(1, 0),
        Binary(1, 1),
        Binary(2, 3),
        Iter(1, 5, ((1, 1), (2, 2), (3, 1), (4, 0), (4, 0),
                    (4, 1), (1, 2), (2, 3))),
    ]
    return Grammar(rules, 5, ("a", "B", "C", "D", "E", "A")), 5


def left_chain(n: int) -> Grammar:
    """Unbalanced SLP for a^n: V_i = V_{i-1} a, height n - 1."""
    rules = [Terminal("a")]
    for i in range(1, n):
        rules.append(Binary(i - 1, 0))
    return Grammar(rules, n - 1)


@pytest.fixture
def fig1():
    return fig1_grammar()
