import csv
import json
from pathlib import Path

import numpy as np
import pytest

from sysimportance.cli import EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, main
from sysimportance.oracles import ship_case1


def run(tmp_path, *argv):
    out = tmp_path / argv[0]
    code = main([*argv, "--out", str(out)])
    return code, out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_validate(tmp_path, capsys):
    code, out = run(tmp_path, "validate", "ship_exponential")
    assert code == EXIT_OK
    assert "4 components" in capsys.readouterr().out
    assert (out / "manifest.json").exists()


def test_importance_exact_table(tmp_path, capsys):
    code, out = run(tmp_path, "importance", "bridge_exponential", "--method", "exact")
    assert code == EXIT_OK
    text = capsys.readouterr().out
    assert "0.872727" in text and "0.024242" in text
    rows = read_csv(out / "importance.csv")
    assert [r["k"] for r in rows] == ["1", "2", "3"]
    assert float(rows[0]["r2"]) == pytest.approx(48 / 55, abs=1e-8)


def test_importance_mc_is_byte_identical(tmp_path):
    argv = ["importance", "bridge_exponential", "--method", "mc", "--n", "5000", "--seed", "42"]
    assert main([*argv, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main([*argv, "--out", str(tmp_path / "b"), "--threads", "4"]) == EXIT_OK
    assert (tmp_path / "a" / "importance.csv").read_bytes() == (tmp_path / "b" / "importance.csv").read_bytes()


def test_mc_reps_rows(tmp_path):
    code, out = run(tmp_path, "importance", "series2_exponential", "--method", "mc", "--n", "500", "--reps", "3")
    assert code == EXIT_OK
    rows = read_csv(out / "importance.csv")
    assert len(rows) == 6 and {r["rep"] for r in rows} == {"0", "1", "2"}


def test_curve_matches_oracle(tmp_path):
    code, out = run(tmp_path, "curve", "ship_exponential", "--component", "1", "--grid", "100")
    assert code == EXIT_OK
    rows = read_csv(out / "curve.csv")
    x = np.array([float(r["x"]) for r in rows])
    m = np.array([float(r["m"]) for r in rows])
    np.testing.assert_allclose(m, ship_case1(1.0).curves[1](x), atol=1e-6)
    assert all(float(r["e"]) >= 0 for r in rows)


def test_reliability(tmp_path, capsys):
    code, out = run(tmp_path, "reliability", "bridge_exponential", "--grid", "50")
    assert code == EXIT_OK
    rows = read_csv(out / "reliability.csv")
    assert float(rows[0]["system"]) == 1.0 and len(rows) == 50
    assert "E(T)=1.16666667" in capsys.readouterr().out


def test_signature(tmp_path):
    code, out = run(tmp_path, "signature", "series2_exponential", "--component", "1")
    assert code == EXIT_OK
    mass = {(r["i"], r["j"]): float(r["mass"]) for r in read_csv(out / "signature.csv")}
    assert mass[("1", "1")] == 0.5 and mass[("1", "2")] == 0.5 and mass[("2", "1")] == 0.0


def test_compare_closed_form(tmp_path):
    code, out = run(tmp_path, "compare", "series2_exponential")
    assert code == EXIT_OK
    (row,) = read_csv(out / "compare.csv")
    assert row["quantile_crossing"] == "1<=2" and row["concordance"] == "1<=2"


def test_compare_empirical_with_signatures(tmp_path):
    code, out = run(tmp_path, "compare", "bridge_exponential", "--n", "20000", "--grid", "49")
    assert code == EXIT_OK
    rows = {(r["i"], r["j"]): r for r in read_csv(out / "compare.csv")}
    assert rows[("2", "3")]["signature_st"] == "equal"
    assert rows[("1", "2")]["quantile_crossing"] == "2<=1"


def test_error_study(tmp_path):
    code, out = run(tmp_path, "error-study", "bridge_exponential", "--component", "1", "--n", "100", "1000",
                    "--reps", "10")
    assert code == EXIT_OK
    rows = read_csv(out / "error-study.csv")
    assert [r["n"] for r in rows] == ["100", "1000"]
    assert float(rows[1]["sd"]) < float(rows[0]["sd"])


def test_replay_reproduces(tmp_path, capsys):
    code, out = run(tmp_path, "importance", "ship_exponential", "--method", "mc", "--n", "2000", "--seed", "7")
    assert code == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["flags"]["seed"] == 7 and manifest["flags"]["n"] == 2000
    assert manifest["spec_sha256"] and "numpy" in manifest["versions"]
    # Replay from the manifest alone, after the original spec reference is gone.
    moved = tmp_path / "elsewhere"
    moved.mkdir()
    (moved / "manifest.json").write_text(json.dumps(manifest))
    assert main(["replay", str(moved / "manifest.json")]) == EXIT_OK
    assert (moved / "replay" / "importance.csv").read_bytes() == (out / "importance.csv").read_bytes()


def test_replay_detects_tampering(tmp_path):
    code, out = run(tmp_path, "importance", "series2_exponential")
    manifest = json.loads((out / "manifest.json").read_text())
    manifest["outputs"]["importance.csv"] = "0" * 64
    (out / "manifest.json").write_text(json.dumps(manifest))
    assert main(["replay", str(out / "manifest.json")]) == EXIT_NUMERIC


def test_spec_file_path_and_validation_exit(tmp_path, capsys):
    spec = tmp_path / "bad.yaml"
    text = Path(__file__).parent.parent.joinpath("src/sysimportance/specs/ship_exponential.yaml").read_text()
    spec.write_text(text.replace("theta: 1", "theta: 2"))
    code, _ = run(tmp_path, "validate", str(spec))
    assert code == EXIT_INVALID
    assert "line" in capsys.readouterr().err
    code, _ = run(tmp_path, "validate", "no_such_spec")
    assert code == EXIT_INVALID


def test_bad_component_is_invalid_input(tmp_path):
    code, _ = run(tmp_path, "curve", "bridge_exponential", "--component", "9")
    assert code == EXIT_INVALID


def test_numeric_failure_exit(tmp_path, monkeypatch):
    import sysimportance.cli as cli
    from sysimportance.quadrature import QuadratureError

    def boom(*a, **k):
        raise QuadratureError("forced", 1.0)

    monkeypatch.setitem(cli.HANDLERS, "importance", boom)
    code, _ = run(tmp_path, "importance", "bridge_exponential")
    assert code == EXIT_NUMERIC
