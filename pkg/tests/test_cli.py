import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from privacy_estimates import OutcomeRecord, credible_interval, tally_from_outcomes
from privacy_estimates.cli import main
from privacy_estimates.io import format_outcomes, parse_outcomes, read_outcomes, write_outcomes
from conftest import WORKED_EXAMPLE

WORKED = ["--tp", "65", "--fn", "35", "--fp", "25", "--tn", "75"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_tsv(path, rows, header="model_id\ttrial_id\tb\tb_hat"):
    path.write_text("\n".join([header] + rows) + "\n")
    return str(path)


# estimate ------------------------------------------------------------------


def test_estimate_bayesian_json(capsys):
    code, out, _ = run(capsys, "estimate", *WORKED, "--delta", "1e-5", "--alpha", "0.1", "--json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) >= {"method", "alpha", "delta", "interval", "tally"}
    assert set(doc["interval"]) == {"lo", "hi", "unbounded"}
    assert doc["tally"] == {"tp": 65, "fn": 35, "fp": 25, "tn": 75}
    assert doc["method"] == "bayesian" and doc["delta"] == 1e-5 and doc["alpha"] == 0.1
    iv = credible_interval(WORKED_EXAMPLE, 1e-5, 0.1)
    assert doc["interval"]["lo"] == pytest.approx(iv.lo) and doc["interval"]["hi"] == pytest.approx(iv.hi)


def test_estimate_reference_interval(capsys):
    code, out, _ = run(capsys, "estimate", *WORKED, "--delta", "1e-5", "--method", "bayesian", "--json")
    doc = json.loads(out)
    assert doc["interval"]["lo"] == pytest.approx(0.522, abs=0.01)
    assert doc["interval"]["hi"] == pytest.approx(1.268, abs=0.01)


def test_estimate_unbounded_uses_null(capsys):
    code, out, _ = run(capsys, "estimate", "--tp", "2", "--fn", "511", "--fp", "0", "--tn", "487",
                       "--delta", "1e-5", "--method", "clopper-pearson", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["interval"] == {"lo": 0.0, "hi": None, "unbounded": True}


def test_estimate_all_methods(capsys):
    code, out, _ = run(capsys, "estimate", *WORKED, "--delta", "1e-5", "--method", "all", "--json")
    docs = json.loads(out)
    assert [d["method"] for d in docs] == ["bayesian", "jeffreys", "clopper-pearson"]
    widths = [d["interval"]["hi"] - d["interval"]["lo"] for d in docs]
    assert widths == sorted(widths)
    code, out, _ = run(capsys, "estimate", *WORKED, "--delta", "1e-5", "--method", "all")
    assert len(out.strip().splitlines()) == 3


def test_estimate_is_deterministic(capsys):
    args = ("estimate", *WORKED, "--delta", "1e-5", "--method", "all", "--json")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


@pytest.mark.parametrize(
    "argv",
    [
        ["estimate", *WORKED],
        ["estimate", "--tp", "1", "--delta", "1e-5"],
        ["estimate", *WORKED, "--delta", "2"],
        ["estimate", *WORKED, "--delta", "1e-5", "--alpha", "1.5"],
        ["estimate", *WORKED, "--delta", "1e-5", "--prior", "0,1"],
        ["estimate", *WORKED, "--delta", "1e-5", "--method", "magic"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors_exit_1_without_stdout(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1
    assert capsys.readouterr().out == ""


def test_invalid_counts_exit_2(capsys):
    code, out, err = run(capsys, "estimate", "--tp", "-1", "--fn", "1", "--fp", "1", "--tn", "1", "--delta", "0")
    assert code == 2 and out == ""
    code, out, err = run(capsys, "estimate", "--tp", "0", "--fn", "0", "--fp", "1", "--tn", "1",
                         "--delta", "0", "--method", "jeffreys")
    assert code == 2 and out == ""


def test_estimate_from_input_file(capsys, tmp_path):
    rows = ["0\t0\t1\t1"] * 65 + ["0\t0\t1\t0"] * 35 + ["0\t0\t0\t1"] * 25 + ["0\t0\t0\t0"] * 75
    path = write_tsv(tmp_path / "o.tsv", rows)
    from_file = run(capsys, "estimate", "--input", path, "--delta", "1e-5", "--json")[1]
    from_counts = run(capsys, "estimate", *WORKED, "--delta", "1e-5", "--json")[1]
    assert from_file == from_counts
    assert run(capsys, "estimate", "--input", path, "--tp", "1", "--delta", "1e-5")[0] == 1


# tally ---------------------------------------------------------------------


def test_tally_all_combinations(capsys, tmp_path):
    path = write_tsv(tmp_path / "o.tsv", ["0\t0\t1\t1", "0\t1\t1\t0", "1\t0\t0\t1", "1\t1\t0\t0"])
    code, out, _ = run(capsys, "tally", "--input", path, "--json")
    assert code == 0
    assert json.loads(out) == {"tp": 1, "fn": 1, "fp": 1, "tn": 1, "fnr": 0.5, "fpr": 0.5}


def test_tally_empty_data(capsys, tmp_path):
    path = write_tsv(tmp_path / "o.tsv", [])
    code, out, _ = run(capsys, "tally", "--input", path)
    assert code == 0
    assert "fnr\tundefined" in out and "fpr\tundefined" in out and "tp\t0" in out
    doc = json.loads(run(capsys, "tally", "--input", path, "--json")[1])
    assert doc["fnr"] is None and doc["tp"] == 0


@pytest.mark.parametrize(
    "rows, bad_row",
    [(["0\t0\t1\t1", "0\t1\t2\t0"], 3), (["0\t0\t1"], 2), (["0\t0\tx\t1"], 2), (["0\t0\t-1\t1"], 2)],
)
def test_tally_malformed_row(capsys, tmp_path, rows, bad_row):
    path = write_tsv(tmp_path / "o.tsv", rows)
    code, out, err = run(capsys, "tally", "--input", path)
    assert code == 2 and out == ""
    assert f"row {bad_row}" in err


def test_tally_bad_header_and_missing_file(capsys, tmp_path):
    path = write_tsv(tmp_path / "o.tsv", ["0\t0\t1\t1"], header="a\tb\tc\td")
    code, _, err = run(capsys, "tally", "--input", path)
    assert code == 2 and "row 1" in err
    assert run(capsys, "tally", "--input", str(tmp_path / "missing.tsv"))[0] == 2


# curve ---------------------------------------------------------------------


def read_curve(text):
    lines = text.strip().splitlines()
    assert lines[0] == "epsilon\tcdf\tpdf"
    return np.array([[float(v) for v in ln.split("\t")] for ln in lines[1:]])


@pytest.fixture(scope="module")
def worked_curve():
    buf = io.StringIO()
    old, sys.stdout = sys.stdout, buf
    try:
        assert main(["curve", *WORKED, "--delta", "1e-5", "--eps-max", "4", "--steps", "401"]) == 0
    finally:
        sys.stdout = old
    return read_curve(buf.getvalue())


def test_curve_shape_and_monotone(worked_curve):
    eps, cdf, pdf = worked_curve.T
    assert len(eps) == 401 and eps[0] == 0.0 and eps[-1] == 4.0
    assert np.allclose(np.diff(eps), 0.01)
    assert np.all(np.diff(cdf) >= 0) and np.all(cdf[-1] >= cdf)
    assert np.all(pdf >= 0)


def test_curve_crosses_upper_reference_point(worked_curve):
    eps, cdf, _ = worked_curve.T
    row = np.argmin(np.abs(eps - 1.268))
    assert abs(cdf[row] - 0.95) <= 0.01


def test_curve_pdf_integrates_to_cdf(worked_curve):
    eps, cdf, pdf = worked_curve.T
    area = float(np.sum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(eps)))
    assert abs(area + cdf[0] - cdf[-1]) <= 5e-3


def test_curve_to_file_and_validation(capsys, tmp_path):
    out_path = tmp_path / "c.tsv"
    code = run(capsys, "curve", "--tp", "3", "--fn", "1", "--fp", "1", "--tn", "3", "--delta", "0",
               "--steps", "5", "--output", str(out_path))[0]
    assert code == 0 and len(read_curve(out_path.read_text())) == 5
    assert run(capsys, "curve", *WORKED, "--delta", "0", "--steps", "1")[0] == 1
    assert run(capsys, "curve", *WORKED, "--delta", "0", "--eps-max", "0")[0] == 1


# simulate ------------------------------------------------------------------


def simulate(capsys, tmp_path, name, *extra):
    path = tmp_path / name
    code, out, err = run(capsys, "simulate", "--output", str(path), *extra)
    return code, out, path


def test_simulate_rr_rates(capsys, tmp_path):
    code, out, path = simulate(capsys, tmp_path, "rr.tsv", "--mechanism", "rr", "--eps-true", "1.0986",
                               "--m", "1", "--models", "100000", "--seed", "7")
    assert code == 0
    code, out, _ = run(capsys, "tally", "--input", str(path), "--json")
    doc = json.loads(out)
    assert abs(doc["fnr"] - 0.25) <= 0.005 and abs(doc["fpr"] - 0.25) <= 0.005


def test_simulate_is_byte_identical(capsys, tmp_path):
    args = ("--mechanism", "rr", "--eps-true", "1.0986", "--m", "3", "--models", "500", "--seed", "7")
    a = simulate(capsys, tmp_path, "a.tsv", *args)
    b = simulate(capsys, tmp_path, "b.tsv", *args)
    assert a[2].read_bytes() == b[2].read_bytes()
    assert a[1] == b[1]


def test_simulate_one_model(capsys, tmp_path):
    code, out, path = simulate(capsys, tmp_path, "one.tsv", "--mechanism", "rr", "--eps-true", "1",
                               "--m", "1000", "--models", "1", "--seed", "3")
    recs = read_outcomes(path)
    assert len(recs) == 1000 and {r.model_id for r in recs} == {0}
    assert "records\t1000" in out


def test_simulate_gaussian_and_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mechanism": "gaussian-mean", "eps": 2.0, "m": 4, "models": 30,
                               "seed": 5, "dimension": 4}))
    code, out, path = simulate(capsys, tmp_path, "g.tsv", "--config", str(cfg))
    assert code == 0 and len(read_outcomes(path)) == 120
    # explicit flags win over the file
    code, out, path = simulate(capsys, tmp_path, "g2.tsv", "--config", str(cfg), "--models", "10")
    assert code == 0 and len(read_outcomes(path)) == 40


@pytest.mark.parametrize(
    "extra",
    [
        ("--mechanism", "laplace", "--models", "5"),
        ("--eps-true", "1", "--models", "5"),
        ("--mechanism", "rr", "--models", "5"),
        ("--mechanism", "rr", "--eps-true", "1"),
    ],
)
def test_simulate_usage_errors(capsys, tmp_path, extra):
    try:
        code = simulate(capsys, tmp_path, "x.tsv", *extra)[0]
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_simulate_bad_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mechanism": "rr", "nested": {"a": 1}}))
    assert simulate(capsys, tmp_path, "x.tsv", "--config", str(cfg), "--models", "2")[0] == 1


# sweep and coverage --------------------------------------------------------


def test_sweep_output(capsys):
    code, out, _ = run(capsys, "sweep", "--n-min", "100", "--n-max", "400", "--n-step", "100",
                       "--target-width", "0.6")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split("\t")[0] == "n"
    assert [ln.split("\t")[0] for ln in lines[1:5]] == ["100", "200", "300", "400"]
    minimal = {ln.split("\t")[1]: ln.split("\t")[2] for ln in lines if ln.startswith("minimal_n")}
    assert set(minimal) == {"bayesian", "jeffreys", "clopper_pearson"}
    assert run(capsys, "sweep", "--n-step", "3")[0] == 1


def test_sweep_perfect_accuracy(capsys):
    code, out, _ = run(capsys, "sweep", "--accuracy", "1.0", "--n-min", "20", "--n-max", "200",
                       "--n-step", "20", "--target-width", "100")
    lines = out.strip().splitlines()
    methods = lines[0].split("\t")[1:]
    rows = [ln.split("\t") for ln in lines[1:] if not ln.startswith("minimal_n")]
    for j, m in enumerate(methods):
        finite = [r[0] for r in rows if math.isfinite(float(r[j + 1]))]
        expect = finite[0] if finite else "none"
        assert f"minimal_n\t{m}\t{expect}" in out


def test_coverage_single_rep(capsys):
    code, out, _ = run(capsys, "coverage", "--mechanism", "rr", "--eps-true", "1", "--trials", "200",
                       "--reps", "1")
    assert code == 0
    frac = float(out.splitlines()[0].split("\t")[1])
    assert frac in (0.0, 1.0)


# io ------------------------------------------------------------------------


def test_outcome_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    recs = [OutcomeRecord(int(m), int(t), int(b), int(g))
            for m, t, b, g in zip(rng.integers(0, 50, 300), rng.integers(0, 9, 300),
                                  rng.integers(0, 2, 300), rng.integers(0, 2, 300))]
    path = tmp_path / "r.tsv"
    write_outcomes(recs, path)
    assert read_outcomes(path) == recs
    assert parse_outcomes(io.StringIO(format_outcomes(recs))) == recs
    assert tally_from_outcomes(read_outcomes(path)) == tally_from_outcomes(recs)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "privacy_estimates", "estimate", *WORKED],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stdout == ""
    proc = subprocess.run([sys.executable, "-m", "privacy_estimates", "estimate", *WORKED,
                           "--delta", "1e-5", "--method", "clopper-pearson"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("clopper-pearson\t[")
