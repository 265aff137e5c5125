import json

import pytest

from preserver_lab.cli import (
    EXIT_CONTRACT,
    EXIT_FAIL,
    EXIT_OK,
    EXIT_USAGE,
    RunReport,
    UsageError,
    main,
    parse_lambda_set,
)
from preserver_lab.matrix import Matrix

REPORT_KEYS = {"command", "seed", "n_values", "trials", "passes", "failures", "wall_time_ms"}


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def write_spec(tmp_path, spec):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    return str(path)


def test_verify_lemma_ok(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, rep = run(capsys, ["verify-lemma", "pq", "--n", "3", "--n", "4", "--trials", "10", "--seed", "7", "--json", str(target)])
    assert code == EXIT_OK
    assert REPORT_KEYS <= rep.keys()
    assert rep["trials"] == 20 and rep["passes"] == 20 and rep["n_values"] == [3, 4]
    assert json.loads(target.read_text()) == rep


@pytest.mark.parametrize(
    "argv",
    [
        ["verify-lemma", "corr-d", "--n", "2"],
        ["verify-lemma", "no-such"],
        ["verify-lemma", "pq", "--lambda-set", "1,0"],
        ["verify-lemma", "pq", "--trials", "-1"],
        ["fuzz", "scale_one_output", "--n", "1"],
        ["fuzz", "bogus"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    code, _ = run(capsys, argv)
    assert code == EXIT_USAGE


def test_reconstruct_ok(capsys, tmp_path):
    spec = {"kind": "canonical", "lambda": -1, "t": [[1, 1, 0], [0, 1, 0], [0, 0, 1]], "diamond": "transpose", "sigma": "conj"}
    code, rep = run(capsys, ["reconstruct", write_spec(tmp_path, spec), "--residual", "10"])
    assert code == EXIT_OK
    assert rep["agreement"] is True and rep["map"]["lambda"] == "-1"
    assert rep["queries"] > 0


def test_reconstruct_corrupted(capsys, tmp_path):
    spec = {"kind": "corrupted", "t": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "corruption": "swap_two_idempotents"}
    code, rep = run(capsys, ["reconstruct", write_spec(tmp_path, spec), "--residual", "10"])
    assert code == EXIT_FAIL
    assert rep["failures"] and "violation" in rep["failures"][0]


def test_reconstruct_contract_violation(capsys, tmp_path):
    spec = {"kind": "table", "n": 3, "entries": []}
    code, _ = run(capsys, ["reconstruct", write_spec(tmp_path, spec)])
    assert code == EXIT_CONTRACT


def test_reconstruct_bad_file(capsys, tmp_path):
    code, _ = run(capsys, ["reconstruct", str(tmp_path / "missing.json")])
    assert code == EXIT_USAGE
    code, _ = run(capsys, ["reconstruct", write_spec(tmp_path, {"kind": "weird"})])
    assert code == EXIT_USAGE


@pytest.mark.parametrize("mode", ["scale_one_output", "swap_two_idempotents", "transpose_one_cell"])
def test_fuzz_modes(capsys, mode):
    code, rep = run(capsys, ["fuzz", mode, "--n", "3", "--trials", "3", "--seed", "2"])
    assert code == EXIT_OK and rep["passes"] == 3


def test_fuzz_none(capsys):
    code, rep = run(capsys, ["fuzz", "none", "--n", "3", "--trials", "2", "--budget", "100"])
    assert code == EXIT_OK and rep["failures"] == []


def test_parse_lambda_set():
    assert [str(v) for v in parse_lambda_set("1, -1, 1/2, i")] == ["1", "-1", "1/2", "i"]
    for bad in ("", "0", "x"):
        with pytest.raises(UsageError):
            parse_lambda_set(bad)


def test_report_bookkeeping():
    rep = RunReport("x", 0, [3], 2, passes=1)
    with pytest.raises(AssertionError):
        rep.finish()
    rep.failures.append({})
    out = rep.finish().to_json()
    assert out["trials"] == 2 and "extra" not in out


def test_failure_dump_reproduces(capsys, monkeypatch):
    from preserver_lab import suites

    def flaky(n, rng, lambdas):
        return rng.randint(0, 1) == 0, {"m": Matrix.identity(n).to_json()}

    monkeypatch.setitem(suites.SUITES, "pq", suites.Suite("pq", 2, flaky))
    code, rep = run(capsys, ["verify-lemma", "pq", "--n", "3", "--trials", "20", "--seed", "5"])
    assert code == EXIT_FAIL
    dump = rep["failures"][0]
    code, again = run(capsys, ["verify-lemma", "pq", "--n", "3", "--trials", "1", "--seed", str(dump["trial_seed"])])
    assert code == EXIT_FAIL and again["failures"][0]["trial_seed"] == dump["trial_seed"]
