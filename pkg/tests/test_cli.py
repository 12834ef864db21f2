import csv
import io
import json
import math
import subprocess
import sys

import pytest

from pfreq import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eigenvalue_flat_case(capsys):
    code, out, _ = run(capsys, "eigenvalue", "--p", "2", "--n", "2", "--K", "0", "--D", "1",
                       "--format", "csv")
    assert code == 0
    row = rows(out)[0]
    assert float(row["lambda_quad"]) == pytest.approx((math.pi / 2) ** 2, rel=1e-11)
    assert row["large_D_ref"] == "" and row["mckean"] == ""


def test_eigenvalue_all_methods(capsys):
    code, out, _ = run(capsys, "eigenvalue", "--p", "2", "--n", "2", "--K", "-1", "--D", "2",
                       "--methods", "all", "--format", "json")
    assert code == 0
    rec = json.loads(out)["rows"][0]
    assert all(rec[k] > 0 for k in ("lambda_quad", "lambda_shoot", "lambda_rayleigh"))
    assert rec["spread"] <= 1e-6


def test_sqrt_minus_K_is_equivalent(capsys):
    _, a, _ = run(capsys, "eigenvalue", "--K", "-4", "--D", "1.5", "--n", "3", "--format", "csv")
    _, b, _ = run(capsys, "eigenvalue", "--sqrt-minus-K", "2", "--D", "1.5", "--n", "3", "--format", "csv")
    assert a == b


def test_csv_header_and_precision(capsys):
    _, out, _ = run(capsys, "eigenvalue", "--p", "3", "--D", "0.7", "--format", "csv")
    header, line = out.splitlines()
    assert header == ",".join(cli.CSV_COLUMNS)
    assert header == "p,n,K,D,lambda_quad,lambda_shoot,lambda_rayleigh,small_D_ref,large_D_ref,mckean,spread"
    lam = line.split(",")[4]
    assert len(lam.replace(".", "").lstrip("0")) <= 12


@pytest.mark.parametrize("argv,needle", [
    (["eigenvalue", "--p", "0.5", "--D", "1"], "p > 1"),
    (["eigenvalue", "--K", "1", "--D", "1"], "K <= 0"),
    (["eigenvalue", "--D", "-1"], "D > 0"),
    (["eigenvalue", "--methods", "magic"], "methods"),
    (["eigenvalue", "--K", "-1", "--sqrt-minus-K", "1"], "either"),
    (["sweep", "--n", "1"], "n"),
])
def test_validation_exit_code(capsys, argv, needle):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert needle in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["eigenvalue", "--format", "xml"])
    assert exc.value.code == 2


def test_numerical_failure_exit_code(capsys, monkeypatch):
    from pfreq.errors import NonConvergence

    def boom(*a, **k):
        raise NonConvergence("forced")

    monkeypatch.setattr(cli.model1d, "eigenvalue_from_D", boom)
    code, _, err = run(capsys, "eigenvalue", "--D", "1")
    assert code == 3 and "forced" in err


def test_sweep_monotone_and_ordered(capsys, monkeypatch):
    monkeypatch.setenv(cli.WORKERS_ENV, "1")
    code, serial, _ = run(capsys, "sweep", "--D", "log:0.1:30:9", "--format", "csv")
    assert code == 0
    lam = [float(r["lambda_quad"]) for r in rows(serial)]
    assert all(a > b for a, b in zip(lam, lam[1:]))
    monkeypatch.setenv(cli.WORKERS_ENV, "3")
    _, pooled, _ = run(capsys, "sweep", "--D", "log:0.1:30:9", "--format", "csv")
    assert pooled == serial


def test_sweep_records_failures_in_row(capsys, monkeypatch):
    real = cli.model1d.eigenvalue_from_D

    def flaky(params, *a, **k):
        if params.D == 2.0:
            raise cli.model1d.NonConvergence("no luck")
        return real(params, *a, **k)

    monkeypatch.setattr(cli.model1d, "eigenvalue_from_D", flaky)
    code, out, err = run(capsys, "sweep", "--D", "1,2,3", "--format", "json")
    recs = json.loads(out)["rows"]
    assert code == 3 and len(recs) == 3
    assert recs[1]["error"].startswith("NonConvergence") and recs[1]["lambda_quad"] is None
    assert recs[0]["lambda_quad"] > recs[2]["lambda_quad"] > 0
    assert "D=2.0" in err


def test_sweep_asymptotic_columns(capsys):
    _, out, _ = run(capsys, "sweep", "--D", "20,30,40", "--format", "csv")
    offsets = [float(r["large_D_ref"]) for r in rows(out)]
    assert max(offsets) - min(offsets) < 1.0
    _, out, _ = run(capsys, "sweep", "--D", "1e-3,1e-4", "--format", "csv")
    ratios = [float(r["lambda_quad"]) / float(r["small_D_ref"]) for r in rows(out)]
    assert abs(ratios[1] - 1) < abs(ratios[0] - 1) < 1e-2


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep definition\np = 3\nD = 1,2\nformat = csv\n")
    code, out, _ = run(capsys, "sweep", "--config", str(cfg), "--p", "2")
    assert code == 0
    assert [r["p"] for r in rows(out)] == ["2", "2"]
    assert [r["D"] for r in rows(out)] == ["1", "2"]
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "sweep", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_out_path_and_byte_stability(capsys, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        assert cli.main(["sweep", "--p", "1.5,3", "--D", "0.5,5", "--format", "json",
                         "--out", str(path)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert capsys.readouterr().out == ""


def test_sharpness_table(capsys):
    code, out, _ = run(capsys, "sharpness", "--format", "csv")
    assert code == 0
    table = rows(out)
    gaps = [float(r["gap"]) for r in table]
    assert gaps[0] > gaps[1] > gaps[2] and all(r["bracket_ok"] == "true" for r in table)


def test_sharpness_bracket_violation_flagged(capsys, monkeypatch):
    monkeypatch.setattr(cli.sharpness, "quotient_on_domain", lambda prof, p, sol=None: 0.0)
    code, out, err = run(capsys, "sharpness", "--eps", "1e-2", "--format", "csv")
    assert code != 0
    assert rows(out)[0]["bracket_ok"] == "false"
    assert "bracket violated" in err


def test_sharpness_other_target(capsys):
    _, out, _ = run(capsys, "sharpness", "--D-target", "5", "--format", "json")
    doc = json.loads(out)
    last = doc["rows"][-1]
    assert doc["D_target"] == 5.0
    assert last["gap"] / last["lower"] < 2e-3


def test_selftest_json(capsys):
    code, out, _ = run(capsys, "selftest", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["all_passed"]
    assert {"trig_identity", "cross_method_spread", "scaling_law", "ricci_certificate"} <= {
        r["check"] for r in doc["rows"]}
    assert all(isinstance(r["value"], float) for r in doc["rows"])


def test_selftest_negative_control(capsys):
    code, out, _ = run(capsys, "selftest", "--tol-rel", "1e-3", "--format", "json")
    failed = [r["check"] for r in json.loads(out)["rows"] if not r["passed"]]
    assert code == 1
    assert "cross_method_spread" in failed


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pfreq", "eigenvalue", "--p", "0.5"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "p > 1" in proc.stderr
