import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from qmz.cache import ValueCache, make_key
from qmz.cli import main
from qmz.textio import ArgParseError, format_complex, parse_complex, parse_vector

SCHEMA = json.loads((Path(__file__).resolve().parents[1] / "docs" / "schema.json").read_text())
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


@pytest.fixture(autouse=True)
def _no_env_cache(monkeypatch):
    monkeypatch.delenv("QMZ_CACHE", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    doc = json.loads(out)
    VALIDATOR.validate(doc)
    return code, doc


def test_eval_value(capsys):
    code, doc = run_json(capsys, "eval", "--model", "sz", "--q", "0.5", "--args", "2")
    assert code == 0
    assert doc["value"]["re"] == pytest.approx(0.28433, abs=1e-5)
    assert doc["converged"] and doc["terms"] > 0


def test_eval_cache_returns_identical_bits(capsys, tmp_path):
    path = str(tmp_path / "c.jsonl")
    _, first = run_json(capsys, "eval", "--q", "0.5", "--args", "2,1", "--cache-path", path)
    _, second = run_json(capsys, "eval", "--q", "0.5", "--args", "2,1", "--cache-path", path)
    assert not first["cached"] and second["cached"]
    assert first["value"] == second["value"]
    _, nocache = run_json(capsys, "eval", "--q", "0.5", "--args", "2,1", "--no-cache", "--cache-path", path)
    assert nocache["value"] == first["value"] and not nocache["cached"]


def test_env_var_overrides_cache_path(capsys, tmp_path, monkeypatch):
    env_path = tmp_path / "env.jsonl"
    monkeypatch.setenv("QMZ_CACHE", str(env_path))
    run_json(capsys, "eval", "--args", "3", "--cache-path", str(tmp_path / "other.jsonl"))
    assert env_path.exists()
    assert not (tmp_path / "other.jsonl").exists()


def test_eval_domain_error(capsys):
    code, doc = run_json(capsys, "eval", "--model", "bz", "--q", "0.5", "--args", "1.5,0.4")
    assert code == 2 and doc["error"]["type"] == "domain"


def test_eval_budget_error(capsys):
    code, doc = run_json(capsys, "eval", "--args", "0.01", "--max-terms", "50")
    assert code == 3 and doc["error"]["type"] == "budget"


def test_parse_error_reports_position(capsys):
    code, doc = run_json(capsys, "eval", "--args", "2,3x")
    assert code == 2
    assert doc["error"]["type"] == "parse" and doc["error"]["position"] == 3


def test_q_out_of_range_rejected(capsys):
    with pytest.raises(SystemExit) as info:
        main(["eval", "--q", "1.5", "--args", "2"])
    assert info.value.code == 2


def test_eval_csv_grid(capsys):
    code, out = run(capsys, "eval", "--args", "2;3;2,1", "--output", "csv")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "re(s1),im(s1),re(s2),im(s2),re(value),im(value),err_est"
    assert len(lines) == 4
    assert float(lines[1].split(",")[4]) == pytest.approx(0.28433, abs=1e-5)


def test_eval_json_grid(capsys):
    code, doc = run_json(capsys, "eval", "--args", "2;3")
    assert code == 0 and len(doc["points"]) == 2


def test_eval_fq(capsys):
    code, doc = run_json(capsys, "eval", "--model", "fq", "--args", "0,0", "--t", "1,1")
    assert code == 0 and doc["value"]["re"] == pytest.approx(1 / 3, abs=1e-11)


def test_continue_negative_argument(capsys):
    code, doc = run_json(capsys, "continue", "--q", "0.5", "--args", "-0.5+0.3i,2.2")
    assert code == 0 and doc["K"] >= 1
    _, again = run_json(capsys, "continue", "--q", "0.5", "--args", "-0.5+0.3i,2.2", "--K", "4")
    assert abs(complex(doc["value"]["re"], doc["value"]["im"]) - complex(again["value"]["re"], again["value"]["im"])) < 1e-8


def test_continue_pole_exit(capsys):
    code, doc = run_json(capsys, "continue", "--q", "0.5", "--args", "0")
    assert code == 4
    assert doc["error"]["hyperplanes"] == [{"j": 1, "k": 0, "m": 0}]


def test_continue_matches_eval(capsys):
    _, a = run_json(capsys, "continue", "--q", "0.5", "--args", "3")
    _, b = run_json(capsys, "eval", "--q", "0.5", "--args", "3")
    assert abs(a["value"]["re"] - b["value"]["re"]) < 1e-8


def test_residue_and_poles(capsys):
    code, doc = run_json(capsys, "residue", "--args", "0", "--numeric")
    assert code == 0
    assert doc["residues"][0]["value"]["re"] == pytest.approx(1.442695, abs=1e-6)
    code, doc = run_json(capsys, "residue", "--args", "0.3,0.2")
    assert code == 2
    code, doc = run_json(capsys, "poles", "--args", "-1,0.5")
    assert doc["on_locus"] and doc["hyperplanes"] == [{"j": 1, "k": 1, "m": 0}]
    code, doc = run_json(capsys, "residue", "--args", "0.3,0.2,1", "--j", "2", "--k", "0")
    assert code == 0 and doc["residues"][0]["hyperplane"] == {"j": 2, "k": 0, "m": 0}


def test_coeff(capsys):
    code, doc = run_json(capsys, "coeff", "--n", "3", "--t", "1", "--q", "0.5")
    assert code == 0 and doc["L_n"] == pytest.approx(5 / 6)
    code, doc = run_json(capsys, "coeff", "--n", "3", "--t", "0.5+1i")
    assert isinstance(doc["L_n"], dict)
    code, doc = run_json(capsys, "coeff", "--n", "2", "--t", "-1")
    assert code == 4


def test_matrix(capsys):
    code, doc = run_json(capsys, "matrix", "--which", "H", "--t", "1", "--K", "3", "--q", "0.5")
    assert code == 0
    assert len(doc["matrix"]) == 3 and all(len(r) == 3 for r in doc["matrix"])
    assert doc["matrix"][0][0] == 1.0


def test_check_suites(capsys):
    code, doc = run_json(capsys, "check", "--suite", "inverse", "--samples", "50", "--seed", "42")
    assert code == 0 and doc["passed"] and doc["n_cases"] == 100


def test_check_is_deterministic(capsys):
    _, a = run(capsys, "check", "--suite", "coeff", "--samples", "5", "--seed", "7")
    _, b = run(capsys, "check", "--suite", "coeff", "--samples", "5", "--seed", "7")
    assert a == b


def test_check_failure_exit(capsys, monkeypatch):
    import qmz.cli as cli

    monkeypatch.setattr(cli, "run_suite", lambda name, samples, seed: [
        {"suite": "x", "case": "c", "residual": 1.0, "threshold": 0.1, "passed": False}])
    code, doc = run_json(capsys, "check", "--suite", "coeff")
    assert code == 1 and doc["error"]["type"] == "suite"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qmz", "coeff", "--n", "3", "--t", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["L_n"] == pytest.approx(5 / 6)


@pytest.mark.parametrize("text, value", [("2", 2), ("2.5+3i", 2.5 + 3j), ("-0.5-0.3i", -0.5 - 0.3j),
                                         ("3i", 3j), ("-2i", -2j), ("1e-3+2e5i", 0.001 + 2e5j)])
def test_grammar(text, value):
    z = parse_complex(text)
    assert z == value
    assert parse_complex(format_complex(z)) == z
    assert format_complex(parse_complex(format_complex(z))) == format_complex(z)


@pytest.mark.parametrize("bad", ["", "abc", "2+", "1+2", "2x", "i2"])
def test_grammar_rejects(bad):
    with pytest.raises(ArgParseError):
        parse_complex(bad)


def test_vector_position():
    with pytest.raises(ArgParseError) as info:
        parse_vector("1,2,x3")
    assert info.value.position == 4


def test_cache_keeps_tightest_and_compacts(tmp_path):
    path = tmp_path / "c.jsonl"
    cache = ValueCache(path)
    cache.put(make_key("sz", 0.5, "2", 1e-8), 1.0 + 0j, 1e-9)
    cache.put(make_key("sz", 0.5, "2", 1e-12), 2.0 + 0j, 1e-13)
    cache.put(make_key("sz", 0.5, "2", 1e-10), 3.0 + 0j, 1e-11)
    fresh = ValueCache(path)
    assert fresh.get(make_key("sz", 0.5, "2", 1e-12)).value_re == 2.0
    assert fresh.get(make_key("sz", 0.5, "2", 1e-14)) is None
    assert len(path.read_text().splitlines()) == 1


def test_cache_skips_torn_lines(tmp_path):
    path = tmp_path / "c.jsonl"
    cache = ValueCache(path)
    cache.put(make_key("sz", 0.5, "3", 1e-12), 0.13 + 0j, 1e-13)
    with open(path, "a") as fh:
        fh.write('{"key": "sz|0.5|4|1e-12", "value_re"')
    fresh = ValueCache(path)
    assert fresh.get(make_key("sz", 0.5, "3", 1e-12)).value_re == 0.13
