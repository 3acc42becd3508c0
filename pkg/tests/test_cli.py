import pytest

from islp.cli import run
from islp.corpora import gen_sk
from islp.grammar import emit, expand, parse_grammar

S5 = "abaabaaabaaaabaaaaab"


@pytest.fixture
def sk5_file(tmp_path):
    path = tmp_path / "sk5.islp"
    path.write_text(emit(gen_sk(5)))
    return str(path)


def test_access(sk5_file, capsys):
    assert run(["access", sk5_file, "14"]) == 0
    assert capsys.readouterr().out == "b\n"


def test_access_trace(sk5_file, capsys):
    assert run(["access", sk5_file, "14", "--trace"]) == 0
    assert capsys.readouterr().out == "i=4 r=2 off=1\nb\n"


def test_access_out_of_range(sk5_file, capsys):
    assert run(["access", sk5_file, "21"]) == 3
    assert "error" in capsys.readouterr().err


def test_extract(sk5_file, capsys):
    assert run(["extract", sk5_file, "13", "4"]) == 0
    assert capsys.readouterr().out == "abaa\n"


def test_expand(sk5_file, capsys):
    assert run(["expand", sk5_file]) == 0
    assert capsys.readouterr().out == S5 + "\n"


def test_expand_oracle_limit(sk5_file, capsys):
    assert run(["expand", sk5_file, "--oracle-limit", "5"]) == 3


def test_stats(sk5_file, capsys):
    assert run(["stats", sk5_file]) == 0
    assert capsys.readouterr().out == "size=8\nn=20\nheight=1\nd=1\n"


def test_emit_round_trip(sk5_file, capsys):
    assert run(["emit", sk5_file]) == 0
    out = capsys.readouterr().out
    assert parse_grammar(out) == gen_sk(5)


def test_usage_errors(sk5_file, capsys):
    assert run([]) == 1
    assert run(["frobnicate"]) == 1
    assert run(["access", sk5_file]) == 1
    capsys.readouterr()


def test_grammar_error(tmp_path, capsys):
    bad = tmp_path / "bad.islp"
    bad.write_text("A='a'\nS = S A\nstart S\n")
    assert run(["access", str(bad), "1"]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_file(capsys):
    assert run(["stats", "/nonexistent.islp"]) == 1


def test_clamp_reverse_morph(sk5_file, capsys, tmp_path):
    assert run(["clamp", sk5_file]) == 0
    assert parse_grammar(capsys.readouterr().out) == gen_sk(5)
    assert run(["reverse", sk5_file]) == 0
    assert expand(parse_grammar(capsys.readouterr().out)) == S5[::-1]
    assert run(["morph", sk5_file, "--map", "a=ab,b=b"]) == 0
    assert expand(parse_grammar(capsys.readouterr().out)) == \
        S5.replace("a", "ab")
    assert run(["morph", sk5_file, "--map", "garbage"]) == 1
    capsys.readouterr()


def test_edit(sk5_file, capsys):
    assert run(["edit", sk5_file, "--sub", "14", "a"]) == 0
    assert expand(parse_grammar(capsys.readouterr().out)) == \
        "abaabaaabaaaaaaaaaab"
    assert run(["edit", sk5_file, "--del", "1"]) == 0
    assert expand(parse_grammar(capsys.readouterr().out)) == S5[1:]
    assert run(["edit", sk5_file, "--ins-after", "20", "c"]) == 0
    assert expand(parse_grammar(capsys.readouterr().out)) == S5 + "c"
    assert run(["edit", sk5_file, "--sub", "99", "a"]) == 2
    capsys.readouterr()


def test_balance(sk5_file, capsys):
    assert run(["balance", sk5_file]) == 0
    out = capsys.readouterr().out
    assert "old_size=8" in out
    assert "sc_paths=" in out
    assert expand(parse_grammar(out)) == S5  # stats lines are comments


def test_measure(sk5_file, capsys):
    assert run(["measure", sk5_file]) == 0
    out = capsys.readouterr().out
    assert "n=20" in out and "delta=" in out and "z=" in out \
        and "bwt_runs=" in out
    assert run(["measure", sk5_file, "--z"]) == 0
    out = capsys.readouterr().out
    assert "z=" in out and "delta=" not in out


def test_measure_text_file(tmp_path, capsys):
    f = tmp_path / "t.txt"
    f.write_text("aaaa")
    assert run(["measure", "--text", str(f), "--z"]) == 0
    assert "z=2" in capsys.readouterr().out


def test_gen_families(tmp_path, capsys):
    out = tmp_path / "g.islp"
    assert run(["gen", "--family", "sk", "--k", "5", "-o", str(out)]) == 0
    assert parse_grammar(out.read_text()) == gen_sk(5)
    assert run(["gen", "--family", "fib", "--i", "3"]) == 0
    assert capsys.readouterr().out == "bab"
    assert run(["gen", "--family", "tm", "--ks", "4"]) == 0
    assert capsys.readouterr().out == "abba"
    assert run(["gen", "--family", "random", "--seed", "7"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("# generator=random_islp rng=mersenne-twister")
    parse_grammar(text)
    assert run(["gen", "--family", "sk"]) == 1  # missing --k
    capsys.readouterr()


def test_bench(sk5_file, capsys):
    assert run(["bench", sk5_file, "--queries", "50"]) == 0
    out = capsys.readouterr().out
    assert "queries=50" in out and "mean_poly_evals=" in out
