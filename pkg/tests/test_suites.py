import pytest

from preserver_lab.suites import SUITES, WORKERS_ENV, SuiteError, check_suite, run_suite, run_trial, worker_count


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_small_run(name):
    for n in sorted({SUITES[name].min_n, 4}):
        passes, failures = run_suite(name, n, 15, seed=3, workers=1)
        assert failures == [] and passes == 15


def test_trial_is_deterministic():
    a = run_trial("pq", 3, 7, 5)
    b = run_trial("pq", 3, 7, 5)
    assert a == b
    assert a[1]["trial_seed"] == 7 ^ 5


def test_min_n_and_unknown():
    assert check_suite("f-zero", 2).min_n == 2
    with pytest.raises(SuiteError):
        check_suite("corr-d", 2)
    with pytest.raises(SuiteError):
        check_suite("no-such-suite", 3)
    with pytest.raises(SuiteError):
        run_suite("pq", 3, 1, 0, lambdas=["0"])


def test_workers_path_matches_serial():
    serial = run_suite("observation", 3, 8, 1, workers=1)
    pooled = run_suite("observation", 3, 8, 1, workers=2)
    assert serial == pooled


def test_worker_env(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert worker_count() == 1
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert worker_count() == 3
    monkeypatch.setenv(WORKERS_ENV, "many")
    with pytest.raises(SuiteError):
        worker_count()


def test_crash_is_reported(monkeypatch):
    from preserver_lab import suites

    def boom(n, rng, lambdas):
        raise ZeroDivisionError("synthetic")

    monkeypatch.setitem(suites.SUITES, "pq", suites.Suite("pq", 2, boom))
    ok, dump = run_trial("pq", 3, 0, 0)
    assert not ok and dump["error"].startswith("ZeroDivisionError")
