import csv
import io
import json
import subprocess
import sys

import pytest

from ddseries import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gauss(capsys):
    code, out, _ = run(capsys, "gauss", "1", "5")
    rec = json.loads(out)
    assert code == 0 and abs(rec["H"] - 5**0.5) < 1e-12


def test_lfun_primitive_flag(capsys):
    _, out, _ = run(capsys, "lfun", "2", "1")
    assert abs(json.loads(out)["re"] - 3.141592653589793**2 / 8) < 1e-13
    _, out, _ = run(capsys, "lfun", "2", "1", "--primitive")
    assert abs(json.loads(out)["re"] - 3.141592653589793**2 / 6) < 1e-13


def test_zeval(capsys):
    code, out, _ = run(capsys, "zeval", "4.5", "2", "chi4", "chi8", "--repr", "B")
    rec = json.loads(out)
    assert code == 0 and rec["repr"] == "B" and rec["tail_bound"] < 1e-6
    assert rec["tolerance"] == 1e-8 and rec["coeff"] == "divisor"


def test_zeval_outside_region(capsys):
    code, _, err = run(capsys, "zeval", "0.5", "0.5", "triv", "triv")
    assert code == 2 and "Re(" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["identities", "nosuch"],
        ["gauss", "1", "5", "--tol", "1"],
        ["gauss", "1", "5", "--budget", "0"],
        ["lfun", "2", "1", "--chi", "chi3"],
        ["scan", "mass", "--rect", "0,1,0.2"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_pole_is_usage_error(capsys):
    assert run(capsys, "lfun", "1", "1")[0] == 2


def test_numeric_failure_exit(capsys):
    assert run(capsys, "gauss", "1", "4")[0] == 1


def test_identity_report_shape(capsys):
    code, out, _ = run(capsys, "identities", "gauss", "--seed", "3")
    rep = json.loads(out)
    assert code == 0
    assert set(rep) == {"identity", "n_points", "max_residual", "tolerance", "pass", "seed"}
    assert rep["seed"] == 3 and rep["pass"] and rep["max_residual"] <= rep["tolerance"]


def test_determinism(capsys):
    first = run(capsys, "identities", "corrpoly", "--seed", "5")[1]
    second = run(capsys, "identities", "corrpoly", "--seed", "5")[1]
    assert first == second


def test_config_file_and_precedence(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# settings\ntol = 1e-6\nbudget=500\nformat=json\n")
    _, out, _ = run(capsys, "zeval", "5", "2.5", "triv", "triv", "--config", str(conf), "--budget", "800")
    rec = json.loads(out)
    assert rec["tolerance"] == 1e-6 and rec["budget"] == 800
    bad = tmp_path / "bad.conf"
    bad.write_text("colour = red\n")
    assert run(capsys, "gauss", "1", "5", "--config", str(bad))[0] == 2


def test_csv_table_has_metadata(tmp_path, capsys):
    path = tmp_path / "w.csv"
    code, _, _ = run(capsys, "whittaker", "--kappa", "0.25", "--mu", "0.5i", "--y", "1:3:1", "--out", str(path))
    text = path.read_text()
    meta = [ln for ln in text.splitlines() if ln.startswith("#")]
    body = list(csv.reader(io.StringIO("\n".join(ln for ln in text.splitlines() if not ln.startswith("#")))))
    assert code == 0
    assert any("tolerance" in ln for ln in meta) and any("seed" in ln for ln in meta)
    assert body[0] == ["y", "re_W", "im_W"] and len(body) == 4


def test_json_table(capsys):
    code, out, _ = run(capsys, "eisen", "--s", "1.5", "--n", "1,2", "--format", "json")
    tab = json.loads(out)
    assert code == 0 and tab["columns"] == ["n", "re_phi", "im_phi"] and len(tab["rows"]) == 2


def test_scan_errors_become_rows(capsys):
    code, out, _ = run(capsys, "scan", "growth", "--re-s", "2", "--re-w", "0.6", "--t", "0", "--budget", "200")
    rows = [ln for ln in out.splitlines() if ln and not ln.startswith("#")]
    assert code == 1 and rows[0].endswith("error") and rows[1].split(",")[-1]


def test_experiment_slope(capsys):
    code, out, _ = run(capsys, "experiment", "moment", "--X", "200", "--power", "2")
    assert code == 0 and "slope" in out


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "ddseries.cli", "gauss", "3", "9"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["d"] == 9
