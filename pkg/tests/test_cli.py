import json

import numpy as np
import pytest

from kreinx import CsvWriteError
from kreinx.cli import main
from kreinx.csvio import emit_csv, format_value, render_csv

CFG_3D = {
    "backend": "laplacian3d",
    "points": [[0.0, 0.0, 0.0]],
    "theta": [[-0.0795774715]],
    "scan": {"a": 0.5, "b": 2.0, "grid": 64},
}


def read_csv(path):
    lines = path.read_text().split("\n")
    assert lines[-1] == ""
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:-1]]
    return header, rows


class TestEmitCsv:
    def test_header_only_for_empty_rows(self, tmp_path):
        out = tmp_path / "empty.csv"
        emit_csv([], ["a", "b"], out)
        assert out.read_bytes() == b"a,b\n"

    def test_17_digit_round_trip(self):
        x = 0.1 + 0.2
        text = render_csv([[x]], ["v"])
        assert float(text.splitlines()[1]) == x

    def test_refuses_non_finite(self):
        with pytest.raises(CsvWriteError):
            render_csv([[float("nan")]], ["v"])
        with pytest.raises(CsvWriteError):
            render_csv([[float("inf")]], ["v"])

    def test_refuses_ragged_rows(self):
        with pytest.raises(CsvWriteError):
            render_csv([[1.0]], ["a", "b"])

    def test_unix_line_endings(self):
        text = render_csv([[1.0], [2.0]], ["v"])
        assert "\r" not in text and text.endswith("\n")

    def test_negative_zero_normalized(self):
        assert format_value(-0.0) == "0"


class TestGreenCommand:
    def test_values_at_unit_radius(self, tmp_path, capsys):
        out = tmp_path / "green.csv"
        assert main(["green", "--dim", "3", "--z", "1", "-o", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["r", "g0", "gz_re", "gz_im", "renorm_re", "renorm_im"]
        row = next(r for r in rows if float(r["r"]) == 1.0)
        assert float(row["g0"]) == pytest.approx(1.0 / (4.0 * np.pi), rel=1e-12)
        assert float(row["gz_re"]) == pytest.approx(np.exp(-1.0) / (4.0 * np.pi), rel=1e-12)
        assert float(row["renorm_re"]) == pytest.approx(1.0 / (4.0 * np.pi), rel=1e-12)

    def test_branch_cut_is_validation_failure(self, tmp_path):
        assert main(["green", "--dim", "2", "--z", "-1", "-o", str(tmp_path / "x.csv")]) == 2


class TestSpectrumCommand:
    def test_minimal_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(CFG_3D))
        out = tmp_path / "spec.csv"
        assert main(["spectrum", "--config", str(cfg), "-o", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == [
            "root_index", "z0", "energy", "multiplicity", "residual", "Q_re_1", "Q_im_1",
        ]
        assert len(rows) == 1
        assert float(rows[0]["z0"]) == pytest.approx(1.0, abs=1e-6)
        assert float(rows[0]["energy"]) == pytest.approx(-1.0, abs=1e-6)

    def test_no_roots_exits_3(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(dict(CFG_3D, theta=[[1.0]])))
        out = tmp_path / "spec.csv"
        assert main(["spectrum", "--config", str(cfg), "-o", str(out)]) == 3
        assert out.read_text().count("\n") == 1  # header-only

    def test_bad_config_exits_2(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(dict(CFG_3D, theta=[[0.0, 1.0], [0.0, 0.0]])))
        assert main(["spectrum", "--config", str(cfg), "-o", str(tmp_path / "s.csv")]) == 2

    def test_flag_overrides(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(dict(CFG_3D, scan={"a": 5.0, "b": 9.0})))
        out = tmp_path / "spec.csv"
        # default window misses the root; overriding brackets it again
        assert main(["spectrum", "--config", str(cfg), "-o", str(out)]) == 3
        assert main([
            "spectrum", "--config", str(cfg), "--a", "0.5", "--b", "2.0",
            "-o", str(out),
        ]) == 0

    def test_byte_identical_reruns(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(CFG_3D))
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        main(["spectrum", "--config", str(cfg), "-o", str(out1)])
        main(["spectrum", "--config", str(cfg), "-o", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_multiplier_backend_end_to_end(self, tmp_path):
        # anchored coupling 0 at w0 = 1 is the absolute coupling 1/2 for the
        # pure second-order symbol: pole at z0 = 1
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "backend": "multiplier1d",
            "points": [0.0],
            "symbol": {"poly": [0.0, 0.0, -1.0], "anchor": 1.0},
            "theta": [[0.0]],
            "scan": {"a": 0.5, "b": 2.0, "grid": 24},
        }))
        out = tmp_path / "spec.csv"
        assert main(["spectrum", "--config", str(cfg), "-o", str(out)]) == 0
        _, rows = read_csv(out)
        assert len(rows) == 1
        assert float(rows[0]["z0"]) == pytest.approx(1.0, abs=1e-6)


class TestVerifyCommand:
    def test_passes_and_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "v1.csv", tmp_path / "v2.csv"
        assert main(["verify", "--seed", "42", "--models", "4", "-o", str(out1)]) == 0
        assert main(["verify", "--seed", "42", "--models", "4", "-o", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        header, rows = read_csv(out1)
        assert header == ["check", "residual", "tolerance", "pass"]
        assert all(r["pass"] == "1" for r in rows)

    def test_env_seed_honored(self, tmp_path, monkeypatch):
        out1, out2 = tmp_path / "v1.csv", tmp_path / "v2.csv"
        monkeypatch.setenv("KREINX_SEED", "77")
        main(["verify", "--models", "3", "-o", str(out1)])
        monkeypatch.delenv("KREINX_SEED")
        main(["verify", "--seed", "77", "--models", "3", "-o", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_tolerance_breach_exits_3(self, tmp_path):
        out = tmp_path / "v.csv"
        code = main([
            "verify", "--seed", "42", "--models", "3",
            "--tol-matrix", "1e-18", "-o", str(out),
        ])
        assert code == 3
        _, rows = read_csv(out)
        assert any(r["pass"] == "0" for r in rows)


class TestResolventCommand:
    def test_matrix_backend_matches_library(self, tmp_path):
        from kreinx import (
            ExtensionProblem, MatrixEvaluator, MatrixModel, ThetaMatrix, krein_apply,
        )

        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "backend": "matrix",
            "matrix": {"a": [[1.0, 0.0], [0.0, -1.0]], "tau": [[1.0, 1.0]]},
            "theta": [[1.0]],
            "z": [0.0, 2.0],
            "f": [1.0, [0.5, -0.25]],
        }))
        out = tmp_path / "res.csv"
        assert main(["resolvent", "--config", str(cfg), "-o", str(out)]) == 0
        _, rows = read_csv(out)
        model = MatrixModel(np.diag([1.0, -1.0]), [[1.0, 1.0]])
        problem = ExtensionProblem(MatrixEvaluator(model), ThetaMatrix([[1.0]]))
        want = krein_apply(problem, 2.0j, np.array([1.0, 0.5 - 0.25j]))
        got = np.array(
            [float(r["rf_re"]) + 1j * float(r["rf_im"]) for r in rows]
        )
        assert np.allclose(got, want, rtol=0, atol=1e-15)

    def test_pole_exits_3(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "backend": "matrix",
            "matrix": {"a": [[1.0, 0.0], [0.0, -1.0]], "tau": [[1.0, 1.0]]},
            "theta": [[1.0]],
            "z": 1.0 + float(np.sqrt(2.0)),
            "f": [1.0, 0.0],
        }))
        assert main(["resolvent", "--config", str(cfg), "-o", str(tmp_path / "r.csv")]) == 3

    def test_laplacian1d_grid(self, tmp_path):
        n = 801
        xs = np.linspace(-10.0, 10.0, n)
        f = np.exp(-xs**2).tolist()
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "backend": "laplacian1d",
            "points": [0.0],
            "theta": [[0.5]],
            "grid1d": {"lo": -10.0, "hi": 10.0, "n": n},
            "f": f,
            "z": [0.0, 1.0],
        }))
        out = tmp_path / "res.csv"
        assert main(["resolvent", "--config", str(cfg), "-o", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["x", "f_re", "f_im", "rf_re", "rf_im"]
        assert len(rows) == n


class TestOracleCommand:
    def test_table_is_sorted_and_deterministic(self, tmp_path):
        out1, out2 = tmp_path / "o1.csv", tmp_path / "o2.csv"
        assert main(["oracle", "--seed", "7", "--n", "6", "--ncharges", "2",
                     "-o", str(out1)]) == 0
        main(["oracle", "--seed", "7", "--n", "6", "--ncharges", "2", "-o", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()
        _, rows = read_csv(out1)
        eigs = [float(r["eigenvalue"]) for r in rows]
        assert eigs == sorted(eigs)
        assert len(eigs) == 6

    def test_bad_ncharges_exits_2(self, tmp_path):
        assert main(["oracle", "--seed", "1", "--n", "2", "--ncharges", "5",
                     "-o", str(tmp_path / "o.csv")]) == 2
