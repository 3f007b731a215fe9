import json

import pytest

from za_engine.cache import ModeCache
from za_engine.cli import ConfigError, SuiteConfig, main, parse_rational, read_config_file, run_suite, strip_times
from za_engine.fock import ModuleLabel, enumerate_basis
from za_engine.rational import Rational
from za_engine.vop import ModeProvider, build_operator, check_intertwining, mode_matrix

LABEL = ModuleLabel(Rational(1, 2), 1)


def test_cache_store_load_roundtrip(tmp_path):
    cache = ModeCache(tmp_path)
    m = mode_matrix(build_operator("Phi+", LABEL), Rational(-1, 3), enumerate_basis(LABEL, 3))
    cache.store("Phi+", LABEL, Rational(-1, 3), 3, m)
    again = cache.load("Phi+", LABEL, Rational(-1, 3), 3)
    assert again is not None and again.to_json() == m.to_json()
    assert cache.load("Phi-", LABEL, Rational(-1, 3), 3) is None
    assert cache.path("Phi+", LABEL, 0, 3) != cache.path("Phi-", LABEL, 0, 3)


def test_cache_ignores_other_versions(tmp_path):
    cache = ModeCache(tmp_path)
    m = mode_matrix(build_operator("x", LABEL), 0, enumerate_basis(LABEL, 2))
    cache.store("x", LABEL, 0, 2, m)
    p = cache.path("x", LABEL, 0, 2)
    doc = json.loads(p.read_text())
    doc["version"] = 999
    p.write_text(json.dumps(doc))
    assert cache.load("x", LABEL, 0, 2) is None


def test_cache_is_transparent(tmp_path):
    cold = check_intertwining(LABEL, 3, 2, ModeProvider()).to_dict()
    warm1 = check_intertwining(LABEL, 3, 2, ModeProvider(ModeCache(tmp_path))).to_dict()
    cache = ModeCache(tmp_path)
    warm2 = check_intertwining(LABEL, 3, 2, ModeProvider(cache)).to_dict()
    assert cache.hits > 0
    for r in (cold, warm1, warm2):
        r.pop("wall_time")
    assert cold == warm1 == warm2


def test_verify_detects_corruption_and_purge(tmp_path):
    cache = ModeCache(tmp_path)
    n = cache.warm([LABEL], 2, 1, names=("x", "beta"))
    assert n == 6 and cache.verify(sample=10) == []
    victim = next(p for p in cache.entries() if any(c[1] for c in json.loads(p.read_text())["columns"]))
    doc = json.loads(victim.read_text())
    col = next(c for c in doc["columns"] if c[1])
    col[1][0][1] = "12345"
    victim.write_text(json.dumps(doc, separators=(",", ":")))
    assert cache.verify(sample=10) == [victim.name]
    assert cache.purge() == 6 and cache.entries() == []


def test_rational_parsing_rejects_floats():
    assert parse_rational("-2/4") == Rational(-1, 2)
    with pytest.raises(ConfigError):
        parse_rational("0.5")
    with pytest.raises(ConfigError):
        SuiteConfig("sl2-relations", j="1e-1", k="1")
    with pytest.raises(ConfigError):
        SuiteConfig("nope")
    with pytest.raises(ConfigError):
        SuiteConfig("sl2-relations", j="1", k="-2")


def test_config_file(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("suite = character\nj = 1/2\nk = -3\ndegree = 6\norders = x=4\n")
    values = read_config_file(str(p))
    assert values == {"suite": "character", "j": "1/2", "k": "-3", "degree": 6, "orders": {"x": 4}}
    p.write_text("bogus = 1\n")
    with pytest.raises(ConfigError):
        read_config_file(str(p))


def test_zalgebra_unsupported_level_is_skipped():
    report = run_suite(SuiteConfig("zalgebra", j="1/2", k="3", degree=2, modes=1))
    (rec,) = report["records"]
    assert rec["verdict"] == "skipped" and rec["skipped_reason"]
    assert report["verdict"] == "pass"


def test_reports_are_deterministic():
    cfg = SuiteConfig("eta", j="1/2", k="-3", degree=3, modes=2)
    assert strip_times(run_suite(cfg)) == strip_times(run_suite(cfg))


def test_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["character", "--j", "1/2", "--k", "-3", "--degree", "6", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["verdict"] == "pass" and doc["records"][0]["name"] == "character"
    assert "overall: pass" in capsys.readouterr().out
    assert main(["character", "--j", "0.5", "--k", "-3"]) == 2
    assert main([]) == 2
    assert main(["cache", "warm"]) == 2


def test_cli_cache_cycle(tmp_path):
    d = str(tmp_path / "c")
    assert main(["cache", "warm", "--cache", d, "--j", "1/2", "--k", "1", "--degree", "2", "--modes", "1"]) == 0
    assert main(["cache", "verify", "--cache", d, "--sample", "5"]) == 0
    assert main(["cache", "purge", "--cache", d]) == 0
