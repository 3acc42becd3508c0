import pytest

from islp.corpora import (RandomIslpParams, gen_fibonacci, gen_sk,
                          gen_thue_morse_concat, random_islp,
                          thue_morse_prefix)
from islp.grammar import expand, size


def test_gen_sk_examples():
    assert expand(gen_sk(5)) == "abaabaaabaaaabaaaaab"
    assert expand(gen_sk(1)) == "ab"
    assert gen_sk(8).n == 44


def test_gen_sk_size_and_length_family():
    for k in range(1, 257):
        g = gen_sk(k)
        assert size(g) == 8
        assert g.n == k * (k + 3) // 2


def test_gen_sk_rejects_zero():
    with pytest.raises(ValueError):
        gen_sk(0)


def test_fibonacci_words():
    assert gen_fibonacci(0) == "a"
    assert gen_fibonacci(1) == "b"
    assert gen_fibonacci(2) == "ba"
    assert gen_fibonacci(3) == "bab"
    assert len(gen_fibonacci(7)) == 21
    with pytest.raises(ValueError):
        gen_fibonacci(-1)


def _has_kth_power(t, k):
    n = len(t)
    for plen in range(1, n // k + 1):
        for i in range(n - k * plen + 1):
            if t[i:i + plen] * k == t[i:i + k * plen]:
                return True
    return False


def test_fibonacci_fourth_power_free():
    for i in range(2, 13):
        assert not _has_kth_power(gen_fibonacci(i), 4), i


def test_thue_morse_prefix():
    assert thue_morse_prefix(4) == "abba"
    assert thue_morse_prefix(8) == "abbabaab"


def test_thue_morse_cube_free():
    assert not _has_kth_power(thue_morse_prefix(2048), 3)


def test_thue_morse_concat():
    assert gen_thue_morse_concat([4]) == "abba"
    s = gen_thue_morse_concat([2, 1])
    assert s[:2] == "ab" and s[-1] == "a" and len(s) == 4
    assert s[2] not in "ab"  # separator disjoint from the alphabet
    with pytest.raises(ValueError):
        gen_thue_morse_concat([1, 2])  # first length must be largest
    with pytest.raises(ValueError):
        gen_thue_morse_concat([])
    with pytest.raises(ValueError):
        gen_thue_morse_concat([2, 0])


def test_thue_morse_separators_unique():
    ks = [32] + [1] * 10
    s = gen_thue_morse_concat(ks)
    seps = [ch for ch in s if ch not in "ab"]
    assert len(seps) == 10 and len(set(seps)) == 10


def test_thue_morse_separator_limit():
    with pytest.raises(ValueError):
        gen_thue_morse_concat([250] + [1] * 201)


def test_random_islp_deterministic():
    p = RandomIslpParams(seed=42)
    assert random_islp(p) == random_islp(p)
    assert random_islp(RandomIslpParams(seed=1)) != random_islp(
        RandomIslpParams(seed=2))


def test_random_islp_validates_and_fits_limit():
    for seed in range(100):
        p = RandomIslpParams(seed=seed, length_limit=10 ** 5)
        g = random_islp(p)  # Grammar construction validates
        assert 1 <= g.n
        assert len(expand(g, limit=10 ** 6)) == g.n


def test_random_islp_plain_slp():
    g = random_islp(RandomIslpParams(seed=9, iter_fraction=0.0))
    from islp.grammar import Iter
    assert not any(isinstance(r, Iter) for r in g.rules)


def test_random_islp_rejects_tiny_variable_count():
    with pytest.raises(ValueError):
        random_islp(RandomIslpParams(seed=0, variables=1))
