import csv
import io
import json
import os
import subprocess
import sys
from dataclasses import asdict, fields

import pytest

from zml import cli
from zml.reports import Report, format_value, parse_rational


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


QUICK = {
    "moments": ["--T", "1000"],
    "sweep": ["--T", "1000", "--shifts", "0,0.1"],
    "verify-g": ["--trials", "3"],
    "mertens": ["--z", "1e4", "--a", "0,1"],
    "partition": ["--T", "1e4", "--samples", "50"],
    "sound-check": ["--T", "1e4", "--samples", "20"],
    "identities": ["--T", "1e4", "--draws", "20"],
}


@pytest.mark.parametrize("command", cli.COMMANDS)
def test_every_command_runs(capsys, command):
    code, out, _ = run(capsys, command, *QUICK[command], "--no-timestamp")
    assert code == 0
    table = rows(out)
    assert table and all(r["version"] for r in table)
    for r in table:
        for v in r.values():
            assert v not in ("nan", "inf", "-inf")


def test_default_config_is_runnable():
    cfg = cli.RunConfig()
    assert cfg.command in cli.COMMANDS
    assert all(f.default is not None for f in fields(cli.RunConfig))


def test_moments_columns(capsys):
    code, out, _ = run(capsys, "moments", "--T", "1000", "--k", "1", "--alpha1", "0", "--alpha2", "0")
    assert code == 0
    (r,) = rows(out)
    for col in ("value", "conjecture_ratio", "f_value", "reference", "timestamp", "runtime_seconds"):
        assert col in r
    assert float(r["value"]) == pytest.approx(float(r["reference"]), rel=0.01)


def test_byte_determinism(capsys):
    argv = ["verify-g", "--seed", "7", "--trials", "5", "--no-timestamp"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b
    assert "timestamp" not in a and "runtime" not in a
    c = run(capsys, *argv[:-1])[1]
    assert "timestamp" in c


def test_seed_changes_output(capsys):
    a = run(capsys, "verify-g", "--seed", "1", "--trials", "5", "--no-timestamp")[1]
    b = run(capsys, "verify-g", "--seed", "2", "--trials", "5", "--no-timestamp")[1]
    assert a != b


def test_verify_g_fifty_rows(capsys):
    code, out, _ = run(capsys, "verify-g", "--seed", "7", "--trials", "50", "--T", "1e6")
    assert code == 0
    table = rows(out)
    assert len(table) == 50
    assert all(r["passed"] == "true" for r in table)
    for r in table:
        assert abs(float(r["numeric"]) - float(r["main"])) == pytest.approx(float(r["deviation"]))
        assert float(r["deviation"]) <= float(r["error_bound"])
        assert parse_rational(r["g"]) > 0


def test_verify_g_doubled(capsys):
    code, out, _ = run(capsys, "verify-g", "--seed", "3", "--trials", "10", "--doubled")
    assert code == 0
    assert all(r["passed"] == "true" for r in rows(out))


def test_partition_totality(capsys):
    code, out, _ = run(capsys, "partition", "--T", "1e5", "--samples", "300", "--seed", "1")
    assert code == 0
    table = rows(out)
    st = [r for r in table if r["family"] == "S/T"]
    assert sum(int(r["count"]) for r in st) == 300
    pf = [r for r in table if r["family"] == "P"]
    assert sum(int(r["count"]) for r in pf) == 300


def test_literal_threshold_mode(capsys):
    code, out, _ = run(capsys, "partition", "--T", "1e4", "--samples", "20", "--paper-mode")
    assert code == 0
    st = [r for r in rows(out) if r["family"] == "S/T"]
    assert {r["cal_I"] for r in st} == {"1"}


def test_json_round_trip(capsys, tmp_path):
    out_file = tmp_path / "m.json"
    code, _, _ = run(capsys, "moments", "--T", "1234.5", "--alpha2", "0.3", "--tol", "1e-5", "--seed", "99",
                     "--format", "json", "--out", str(out_file))
    assert code == 0
    doc = json.loads(out_file.read_text(encoding="utf-8"))
    cfg = {k: cli._coerce(k, v) for k, v in doc["config"].items()}
    want = cli.resolve_config(["moments", "--T", "1234.5", "--alpha2", "0.3", "--tol", "1e-5", "--seed", "99",
                               "--format", "json", "--out", str(out_file)])
    assert cli.RunConfig(**cfg) == want
    (row,) = doc["rows"]
    assert float(row["T"]) == 1234.5 and float(row["alpha2"]) == 0.3
    assert list(doc) == sorted(doc)


def test_config_precedence(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text("# settings\nT = 2000\nk=2\nout-format = json\nseed = 5  # trailing\n", encoding="utf-8")
    cfg = cli.resolve_config(["moments", "--config", str(path), "--k", "1"])
    assert cfg.T == 2000 and cfg.k == 1 and cfg.out_format == "json" and cfg.seed == 5
    assert cfg.tol == cli.RunConfig().tol

    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n", encoding="utf-8")
    assert run(capsys, "moments", "--config", str(bad))[0] == 2
    assert run(capsys, "moments", "--config", str(tmp_path / "missing.cfg"))[0] == 2


def test_sweep_rows_and_duplicates(capsys):
    code, out, _ = run(capsys, "sweep", "--T", "1000", "--shifts", "0,0.1,0.1,1", "--no-timestamp")
    assert code == 0
    table = rows(out)
    assert table[0]["experiment"] == "sweep-warning"
    body = [r for r in table if r["experiment"] == "sweep"]
    assert [float(r["alpha2"]) for r in body] == [0, 0.1, 1]
    for r in body:
        for col in ("delta", "delta_log_T", "regime", "value", "conjecture_ratio"):
            assert r[col]


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "sweep", "--T", "1000", "--shifts", "")[0] == 2
    assert run(capsys, "moments", "--T", "-5")[0] == 2
    assert run(capsys, "moments", "--k", "0.5")[0] == 2
    assert run(capsys, "moments", "--T", "1000", "--alpha2", "0.3", "--tol", "1e-300")[0] == 3
    assert run(capsys, "partition", "--T", "1e4", "--threshold", "1e200", "--samples", "5")[0] == 3
    assert run(capsys, "verify-g", "--trials", "1", "--out", str(tmp_path / "no" / "such" / "dir.csv"))[0] == 4
    with pytest.raises(SystemExit) as exc:
        cli.main(["moments", "--k", "abc"])
    assert exc.value.code == 2


def test_permissive_flag(capsys):
    assert run(capsys, "moments", "--T", "200", "--k", "0.5", "--permissive")[0] == 0


def test_thread_cap_subprocess(tmp_path):
    env = dict(os.environ, ZML_THREADS="1")
    out = tmp_path / "id.csv"
    proc = subprocess.run([sys.executable, "-m", "zml", "identities", "--T", "1e4", "--draws", "5", "--out", str(out)],
                          env=env, capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    assert all(r["passed"] == "true" for r in rows(out.read_text()))
    env["ZML_THREADS"] = "0"
    proc = subprocess.run([sys.executable, "-m", "zml", "identities", "--draws", "1"], env=env,
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 2


def test_format_value():
    from fractions import Fraction

    import numpy as np

    from zml.errors import InvariantViolation

    assert format_value(Fraction(3, 8)) == "3/8"
    assert format_value(np.bool_(True)) == "true"
    x = 0.1 + 0.2
    assert float(format_value(x)) == x
    with pytest.raises(InvariantViolation):
        format_value(float("nan"))


def test_csv_quoting_and_lf():
    r = Report("x", {})
    r.add("e", note='has, comma and "quote"')
    text = r.to_csv()
    assert "\r" not in text
    assert rows(text)[0]["note"] == 'has, comma and "quote"'
