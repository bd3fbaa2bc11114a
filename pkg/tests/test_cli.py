import json

import numpy as np
import pytest

from margindim.cli import main
from margindim.reportio import (ParseError, load_labeled_matrix, load_matrix,
                                load_spectrum, save_matrix, save_spectrum)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_kgamma_spike_file(tmp_path, capsys):
    path = tmp_path / "spike.txt"
    save_spectrum(path, [1000.0] + [0.001] * 1000)
    code, out, _ = run_cli(capsys, "kgamma", "--spectrum", str(path),
                           "--gamma", "1.0")
    assert code == 0
    report = json.loads(out)
    assert report["k_gamma"] == 1
    assert report["d"] == 1001
    assert report["min_bound_check"]["holds"]


def test_kgamma_inline_specs(capsys):
    code, out, _ = run_cli(capsys, "kgamma", "--spec", "[0, 0, 0]",
                           "--gamma", "0.5")
    assert code == 0 and json.loads(out)["k_gamma"] == 0
    code, out, _ = run_cli(capsys, "kgamma", "--spec",
                           '{"twin": "P", "d": 9}', "--gamma", "1.0")
    assert code == 0 and json.loads(out)["k_gamma"] == 3


def test_kgamma_unsorted_file_is_fine(tmp_path, capsys):
    # loader sorts; the scan sees a valid non-increasing spectrum
    path = tmp_path / "s.txt"
    path.write_text("0.5\n4.0\n1.0\n")
    code, out, _ = run_cli(capsys, "kgamma", "--spectrum", str(path),
                           "--gamma", "1.0")
    assert code == 0
    assert json.loads(out)["trace"] == 5.5


def test_shatter_exit_codes(tmp_path, capsys):
    ok = tmp_path / "ok.txt"
    save_matrix(ok, 2.0 * np.eye(4))
    code, out, _ = run_cli(capsys, "shatter", "--matrix", str(ok),
                           "--gamma", "1.0")
    assert code == 0
    cert = json.loads(out)
    assert cert["shattered"] and cert["gamma_star"] == pytest.approx(1.0)

    dup = tmp_path / "dup.txt"
    save_matrix(dup, np.array([[1.0, 2.0], [1.0, 2.0]]))
    code, out, _ = run_cli(capsys, "shatter", "--matrix", str(dup),
                           "--gamma", "0.5")
    assert code == 1
    assert json.loads(out)["shattered"] is False

    bad = tmp_path / "bad.txt"
    bad.write_text("1,2\n3\n")
    code, _, err = run_cli(capsys, "shatter", "--matrix", str(bad),
                           "--gamma", "1.0")
    assert code == 2
    payload = json.loads(err)
    assert payload["type"] == "ParseError" and "line 2" in payload["error"]


def test_experiment_cli(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "shatter-prob",
        "spec": {"iid": {"kind": "gaussian", "sigma": 1.0, "d": 12}},
        "gamma": 0.5, "m_list": [3], "trials": 10}))
    code, out, _ = run_cli(capsys, "experiment", "--config", str(cfg),
                           "--out-dir", str(tmp_path / "out"),
                           "--seed", "7", "--threads", "2", "--no-figures")
    assert code == 0
    summary = json.loads(out)
    assert summary["config"]["seed"] == 7
    assert (tmp_path / "out" / "shatter_prob.csv").exists()
    assert not (tmp_path / "out" / "shatter_prob.png").exists()


def test_experiment_cli_unknown_name(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "wat"}))
    code, _, err = run_cli(capsys, "experiment", "--config", str(cfg))
    assert code == 2
    assert "unknown experiment" in json.loads(err)["error"]


def test_mem_fit_cli(tmp_path, capsys):
    data = tmp_path / "data.txt"
    rows = np.hstack([2.0 * np.eye(3), np.array([[1.0], [-1.0], [1.0]])])
    save_matrix(data, rows)
    code, out, _ = run_cli(capsys, "mem", "fit", "--data", str(data),
                           "--gamma", "1.0")
    assert code == 0
    report = json.loads(out)
    assert report["error_count"] == 0
    assert report["certificate"] == "enumerated"
    code, out, _ = run_cli(capsys, "mem", "fit", "--data", str(data),
                           "--gamma", "1.0", "--heuristic")
    assert json.loads(out)["certificate"] == "heuristic"


def test_mem_sample_complexity_cli(tmp_path, capsys):
    code, out, _ = run_cli(
        capsys, "mem", "sample-complexity",
        "--spec", json.dumps({"planted": {"d": 4, "gamma": 2.0}}),
        "--gamma", "1.0", "--epsilon", "0.3", "--delta", "0.5",
        "--m-grid", "2,4", "--trials", "10", "--test-size", "200",
        "--out-dir", str(tmp_path), "--no-figures")
    assert code == 0
    assert json.loads(out)["algorithm"] == "exact"
    assert (tmp_path / "sample_complexity.csv").exists()


def test_mem_adversarial_cli(tmp_path, capsys):
    code, out, _ = run_cli(
        capsys, "mem", "adversarial-demo",
        "--spec", json.dumps({"iid": {"kind": "gaussian", "sigma": 1.0,
                                      "d": 25}}),
        "--gamma", "0.4", "--m", "6", "--trials", "10", "--test-size", "200",
        "--out-dir", str(tmp_path), "--no-figures")
    assert code == 0
    assert "shatter_rate" in json.loads(out)


def test_bounds_compare_cli(tmp_path, capsys):
    path = tmp_path / "spike.txt"
    save_spectrum(path, [1000.0] + [0.001] * 1000)
    code, out, _ = run_cli(capsys, "bounds", "compare", "--spectrum", str(path),
                           "--gamma", "1.0", "--epsilon", "0.1",
                           "--delta", "0.5")
    assert code == 0
    report = json.loads(out)
    assert report["k_gamma"] == 1
    assert report["kgamma_upper_bound"]["m"] < report["dimension_bound"]["m"]
    assert report["kgamma_upper_bound"]["m"] < report["norm_bound"]["m"]
    assert report["kgamma_upper_bound"]["c1"] == 1.0


def test_reportio_parse_errors(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("1.0\n2.0 3.0\n")
    with pytest.raises(ParseError) as err:
        load_spectrum(p)
    assert err.value.line == 2

    p.write_text("")
    with pytest.raises(ParseError):
        load_matrix(p)

    p.write_text("1,2,0.5\n")
    with pytest.raises(ParseError, match="labels"):
        load_labeled_matrix(p)

    p.write_text("# comment\n1, 2\n3 4\n")
    X = load_matrix(p)
    assert np.array_equal(X, [[1.0, 2.0], [3.0, 4.0]])
