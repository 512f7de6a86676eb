import csv
import io
import json
import subprocess
import sys

import pytest

from parisian.cli import CliError, parse_range, render, run


def _run(args, env=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(args, env=env or {}, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_finite_single_value():
    code, out, _ = _run(["finite", "--dist", "binomial:3,0.3", "--u", "5", "--zeta", "3", "--t", "20"])
    assert code == 0
    assert out == "0.9701426\n"


def test_finite_sweep_csv_roundtrip():
    code, out, _ = _run(["finite", "--t", "1..26", "--format", "csv"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t", "probability"]
    assert [int(r[0]) for r in rows[1:]] == list(range(1, 27))
    vals = [float(r[1]) for r in rows[1:]]
    assert vals[:6] == [1.0] * 6
    assert vals[19] == pytest.approx(0.9701426, abs=5e-7)


def test_finite_methods_agree():
    vals = []
    for method in ("recursion", "dp", "brute"):
        code, out, _ = _run(["finite", "--u", "2", "--zeta", "2", "--t", "10", "--method", method, "--format", "csv"])
        assert code == 0
        vals.append(float(out.splitlines()[1].split(",")[1]))
    assert max(vals) - min(vals) < 1e-12


def test_finite_u_zero_note():
    code, out, err = _run(["finite", "--u", "0..2", "--format", "csv"])
    assert code == 0
    assert "u=0" in err
    assert out.splitlines()[1].startswith("0,0.40933")


def test_two_ranges_rejected():
    code, _, err = _run(["finite", "--u", "1..3", "--t", "1..3"])
    assert code == 2
    payload = json.loads(err)
    assert payload["exit"] == 2 and payload["error"] == "ParseError"


def test_parse_errors():
    assert _run(["finite", "--t", "abc"])[0] == 2
    assert _run(["finite", "--dist", "nonsense:1"])[0] == 2
    assert _run(["finite", "--method", "magic"])[0] == 2
    assert _run(["bogus"])[0] == 2
    assert _run(["table", "--which", "9"])[0] == 2


def test_domain_error_exit():
    code, _, err = _run(["infinite", "--dist", "binomial:3,0.5", "--u", "2"])
    assert code == 3
    assert json.loads(err)["error"] == "DomainError"


def test_resource_error_exit():
    code, _, err = _run(["finite", "--method", "brute", "--u", "1", "--zeta", "1", "--t", "60"])
    assert code == 4
    assert json.loads(err)["error"] == "ResourceLimitError"


def test_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"t": 10, "u": 3}))
    base = ["finite", "--config", str(cfg), "--format", "csv"]
    _, from_cfg, _ = _run(base)
    _, from_env, _ = _run(base, env={"PARISIAN_T": "12"})
    _, from_flag, _ = _run(base + ["--t", "15"], env={"PARISIAN_T": "12"})
    assert from_cfg.splitlines()[1].startswith("10,")
    assert from_env.splitlines()[1].startswith("12,")
    assert from_flag.splitlines()[1].startswith("15,")
    _, via_env_cfg, _ = _run(["finite", "--format", "csv"], env={"PARISIAN_CONFIG": str(cfg)})
    assert via_env_cfg == from_cfg


def test_bad_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("[1, 2]")
    assert _run(["finite", "--config", str(p)])[0] == 2
    assert _run(["finite", "--config", str(tmp_path / "missing.json")])[0] == 2


def test_out_file(tmp_path):
    target = tmp_path / "o.csv"
    code, out, _ = _run(["finite", "--t", "5..7", "--format", "csv", "--out", str(target)])
    assert code == 0 and out == ""
    assert target.read_text().startswith("t,probability\n")


def test_infinite_command():
    code, out, _ = _run(["infinite", "--u", "5", "--zeta", "3", "--format", "csv"])
    assert code == 0
    header, row = out.splitlines()[:2]
    assert header == "u,probability,abserr,classical"
    assert float(row.split(",")[1]) < float(row.split(",")[3])


def test_asymptotic_json():
    code, out, _ = _run(["asymptotic", "--zeta", "3", "--u-grid", "5,10", "--format", "json"])
    assert code == 0
    lines = [json.loads(x) for x in out.splitlines()]
    assert lines[0]["regime"] == "cramer"
    assert len(lines) == 3


def test_asymptotic_heavy_negative_alpha():
    assert _run(["asymptotic", "--regime", "heavy", "--alpha", "-1"])[0] == 3


def test_mc_deterministic():
    args = ["mc", "--paths", "2000", "--seed", "5", "--format", "csv"]
    a, b = _run(args)[1], _run(args)[1]
    assert a == b
    assert a.splitlines()[0] == "t,probability,stderr"


def test_mc_schedule():
    code, out, _ = _run(["mc", "--schedule", "100,200", "--format", "csv"])
    assert code == 0
    lines = out.splitlines()
    assert lines[1].startswith("exact,")
    assert lines[2].startswith("MC 100,")


def test_table_byte_stable():
    args = ["table", "--which", "2..4", "--format", "csv"]
    a, b = _run(args)[1], _run(args)[1]
    assert a == b
    assert "# Table 2" in a and "# Table 4" in a


def test_parse_range():
    assert parse_range("7") == [7]
    assert parse_range("1..4") == [1, 2, 3, 4]
    assert parse_range("1,2,8") == [1, 2, 8]
    for bad in ("", "3..1", "2,1", "a..b"):
        with pytest.raises(CliError):
            parse_range(bad)


def test_render_pretty_alignment():
    text = render(["x", "value"], [[1, 0.123456789], [10, 1.0]], "pretty", 3)
    lines = text.splitlines()
    assert lines[0].startswith("x ") and set(lines[1]) <= {"-", " "}
    assert lines[2].split() == ["1", "0.123"]


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "parisian.cli", "finite"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.strip() == "0.9701426"
