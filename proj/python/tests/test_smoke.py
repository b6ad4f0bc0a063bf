from pathlib import Path

import pytest

import lamina

EXAMPLES = Path(__file__).resolve().parents[2] / "tools" / "examples"


def read(name):
    return (EXAMPLES / name).read_text()


def test_golden_poset():
    r = lamina.poset(read("golden.txt"))
    assert r.exit_code == 0
    assert r.report["poset"]["depth"] == 2
    assert r.report["poset"]["spectrum"] == [1, 2]
    assert '"Λ_ab" -> "Λ_cd"' in r.dot


def test_identity_analysis():
    r = lamina.analyze(read("identity.txt"))
    assert r.report["status"] == "ok"
    assert r.report["depth"] == 0
    assert all(c["pass"] for c in r.report["checks"])


def test_fibonacci_pair_and_restrict():
    fib = read("fibonacci.txt")
    p = lamina.pair(fib)
    assert p.report["nonattracting_equal"] is True
    r = lamina.restrict(fib, read("fibonacci_cover.txt"))
    assert r.report["power"] == 3
    assert r.report["invariant"] is True
    with pytest.raises(lamina.NotPreserved):
        lamina.restrict(fib, read("fibonacci_cover.txt"), max_power=2)


def test_torus_text():
    r = lamina.torus(read("unipotent.txt"))
    assert r.report["mapping_torus"].startswith("<")


def test_undetermined_is_reported():
    r = lamina.poset(read("golden.txt"), {"nmax": 1})
    assert r.undetermined
    assert r.report["status"] == "undetermined"
    assert "poset" not in r.report


def test_errors():
    with pytest.raises(lamina.ParseError, match="line 4, column 13"):
        lamina.analyze(read("malformed.txt"))
    with pytest.raises(lamina.InputError):
        lamina.analyze(read("identity.txt"), {"window": 0})
    with pytest.raises(ValueError):
        lamina.analyze(read("identity.txt"), {"no_such_key": 1})


def test_default_config_round_trip():
    cfg = lamina.default_config()
    assert cfg["nmax"] == 24
    assert lamina.poset(read("fibonacci.txt"), cfg).exit_code == 0
