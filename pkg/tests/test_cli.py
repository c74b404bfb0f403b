import csv
import io
import json
import subprocess
import sys

import pytest

from npa import acceptance, cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_coherent():
    cfg = cli.parse_args(["coherent", "--alpha", "1", "--g", "2"])
    assert cfg.scenario == "coherent"
    assert cfg.params == {"alpha": 1 + 0j, "g": 2.0}


def test_parse_complex_alpha():
    assert cli.parse_complex("1.5,-0.5") == 1.5 - 0.5j
    with pytest.raises(ValueError):
        cli.parse_complex("1,2,3")


def test_parse_nu_becomes_gain():
    assert cli.parse_args(["fock", "--n", "1", "--nu", "0.5"]).params["g"] == 2.0


def test_sweep_grid_has_five_points():
    cfg = cli.parse_args(["sweep", "--scenario", "coherent", "--g", "1:3:0.5", "--alpha", "1"])
    assert [p["g"] for p in cfg.grid] == [1.0, 1.5, 2.0, 2.5, 3.0]
    assert all(p["alpha"] == 1 for p in cfg.grid)


def test_grid_endpoint_within_half_step():
    assert cli.parse_grid("0:1:0.3") == pytest.approx([0, 0.3, 0.6, 0.9])
    assert cli.parse_grid("0:0.95:0.3") == pytest.approx([0, 0.3, 0.6, 0.9])
    assert len(cli.parse_grid("0:1.05:0.3")) == 5
    with pytest.raises(ValueError):
        cli.parse_grid("1:0:0.5")


@pytest.mark.parametrize(
    "argv, message",
    [
        (["coherent", "--g", "0.5"], "g must be ≥ 1"),
        (["coherent", "--alpha", "1", "--g", "2", "--nu", "0.5"], "mutually exclusive"),
        (["fock", "--n", "-1", "--g", "2"], "n must be"),
        (["fock", "--g", "2"], "--n"),
        (["qubit", "--g", "2", "--dim", "1"], "dim must be"),
        (["coherent", "--alpha", "1", "--nu", "1.5"], "nu must"),
        (["teleport"], "invalid choice"),
    ],
)
def test_usage_errors_exit_two(argv, message, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.parse_args(argv)
    assert exc.value.code == 2
    assert message in capsys.readouterr().err


def test_truncation_failure_exits_two(capsys):
    code, _, err = run(["coherent", "--alpha", "2", "--g", "2", "--dim", "10"], capsys)
    assert code == 2
    assert "truncation" in err


def test_coherent_passes(capsys):
    code, out, _ = run(["coherent", "--alpha", "1", "--g", "2"], capsys)
    assert code == 0
    assert "0.118091638" in out and "PASS" in out


def test_fock_json_contains_analytic_factor(capsys):
    code, out, _ = run(["fock", "--n", "2", "--g", "2", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"scenario", "params", "records"}
    rec = doc["records"][0]
    assert rec["analytic"]["amplitude"] == 0.125
    assert {"inputs", "numeric", "analytic", "residuals", "pass"} <= set(rec)


def test_qubit_table_shows_probability(capsys):
    code, out, _ = run(["qubit", "--g", "2"], capsys)
    assert code == 0
    assert "0.15625" in out


def test_tolerance_failure_exits_one(capsys):
    code, out, _ = run(["op-equiv", "--g", "3"], capsys)
    assert code == 1
    assert "FAIL" in out


def test_herald_k_runs(capsys):
    code, out, _ = run(["fock", "--n", "1", "--g", "2", "--k", "1", "--format", "csv"], capsys)
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["k"] == "1"
    assert float(row["p_numeric"]) == pytest.approx(3 / 32, abs=1e-12)


def test_json_round_trip(capsys):
    _, out, _ = run(["cat", "--alpha", "1", "--g", "2", "--format", "json"], capsys)
    recs = cli.parse_json(out)
    doc = json.loads(out)
    assert [r.to_dict() for r in recs] == doc["records"]
    rec = cli.run_point("cat", {"alpha": 1 + 0j, "g": 2.0})
    assert cli.parse_json(cli.emit_json("cat", {}, [rec]))[0] == rec


def test_csv_columns_and_precision(capsys):
    _, out, _ = run(["sweep", "--scenario", "fock", "--n", "0:2:1", "--g", "2", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == cli.CSV_COLUMNS
    assert len(rows) == 4
    body = [dict(zip(rows[0], r)) for r in rows[1:]]
    assert [b["n"] for b in body] == ["0", "1", "2"]
    assert body[0]["p_analytic"] == "0.25"
    assert body[1]["nu"] == "0.5"
    # a value needing all 17 digits survives the text round trip
    assert float(body[0]["p_numeric"]) == cli.run_point("fock", {"n": 0, "g": 2.0}).numeric["probability"]


def test_machine_output_is_byte_identical(tmp_path):
    paths = [tmp_path / f"out{i}.json" for i in range(2)]
    for p in paths:
        cli.main(["sweep", "--scenario", "coherent", "--alpha", "1", "--g", "1:2:0.5",
                  "--format", "json", "--out", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_out_path(tmp_path, capsys):
    p = tmp_path / "r.csv"
    code, out, _ = run(["qubit", "--g", "2", "--format", "csv", "--out", str(p)], capsys)
    assert code == 0 and out == ""
    assert p.read_text().startswith("scenario,")


def test_verify_all_exit_reflects_criteria(capsys):
    code, out, _ = run(["verify-all"], capsys)
    results = acceptance.verify_all()
    assert code == (0 if all(c.passed for c in results) else 1)
    assert f"{sum(c.passed for c in results)}/{len(results)} criteria passed" in out
    for c in results:
        assert c.line() in out


def test_verify_all_exits_zero(capsys):
    code, _, _ = run(["verify-all"], capsys)
    assert code == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "npa", "fock", "--n", "0", "--g", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "PASS" in proc.stdout
