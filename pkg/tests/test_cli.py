import json
import math

import numpy as np
import pytest

from coherence_kit import channels as ch
from coherence_kit import monotones as mo
from coherence_kit.cli import main
from coherence_kit.harness import run_suite
from coherence_kit.states import DensityMatrix, PureStateVector


@pytest.fixture()
def files(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    plus = PureStateVector(np.array([1.0, 1.0]) / math.sqrt(2.0))
    target = PureStateVector(np.sqrt([8 / 9, 1 / 18, 1 / 18]))
    return {
        "example": write("example.json", ch.qubit_to_qutrit_mio_example().to_json_dict()),
        "identity": write("identity.json", ch.KrausChannel([np.eye(2)]).to_json_dict()),
        "hadamard": write(
            "hadamard.json",
            ch.KrausChannel([np.array([[1, 1], [1, -1]]) / math.sqrt(2)]).to_json_dict(),
        ),
        "plus": write("plus.json", plus.to_json_dict()),
        "psi": write("psi.json", target.to_json_dict()),
        "mixed_qubit": write(
            "mixed.json", DensityMatrix([[0.7, 0.2], [0.2, 0.3]]).to_json_dict()
        ),
        "weak_qubit": write(
            "weak.json", DensityMatrix([[0.8, 0.2], [0.2, 0.2]]).to_json_dict()
        ),
        "strong_qubit": write(
            "strong.json", DensityMatrix([[0.5, 0.3], [0.3, 0.5]]).to_json_dict()
        ),
        "dir": tmp_path,
    }


def run_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


class TestClassify:
    def test_example_channel(self, files, capsys):
        code, out = run_cli(capsys, ["classify", files["example"]])
        assert code == 0
        report = json.loads(out)
        assert report["cptp"] is True
        assert report["mio"] is True
        assert report["io_rep"] is False
        assert report["dio"] is False

    def test_identity_channel(self, files, capsys):
        code, out = run_cli(capsys, ["classify", files["identity"]])
        report = json.loads(out)
        assert code == 0
        assert all(
            report[key] for key in ("cptp", "mio", "dio", "io_rep", "sio_rep", "pio_rep")
        )

    def test_hadamard(self, files, capsys):
        code, out = run_cli(capsys, ["classify", files["hadamard"]])
        report = json.loads(out)
        assert code == 0
        assert report["cptp"] is True and report["mio"] is False

    def test_missing_file_is_parse_error(self, files, capsys):
        code, _ = run_cli(capsys, ["classify", str(files["dir"] / "nope.json")])
        assert code == 2

    def test_invalid_channel_is_object_error(self, files, capsys):
        bad = files["dir"] / "bad.json"
        payload = {
            "din": 2,
            "dout": 2,
            "kraus": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]],
        }
        bad.write_text(json.dumps(payload))
        code, _ = run_cli(capsys, ["classify", str(bad)])
        assert code == 3

    def test_bad_usage(self, files, capsys):
        assert main(["classify"]) == 4


class TestMonotones:
    def test_plus_panel(self, files, capsys):
        code, out = run_cli(capsys, ["monotones", files["plus"]])
        assert code == 0
        values = {entry["name"]: entry["value"] for entry in json.loads(out)}
        for key in ("c_rel", "c_l1", "c_r", "c_delta_r", "r_d"):
            assert values[key] == pytest.approx(1.0, abs=1e-9)

    def test_incoherent_panel_is_zero(self, files, capsys, tmp_path):
        path = tmp_path / "diag.json"
        path.write_text(json.dumps(DensityMatrix(np.diag([0.3, 0.7])).to_json_dict()))
        code, out = run_cli(capsys, ["monotones", str(path)])
        assert code == 0
        for entry in json.loads(out):
            assert abs(entry["value"]) < 1e-9

    def test_qubit_closed_forms(self, files, capsys):
        code, out = run_cli(
            capsys, ["monotones", files["mixed_qubit"], "--measures", "c_r,c_delta_r"]
        )
        assert code == 0
        values = {e["name"]: e["value"] for e in json.loads(out)}
        assert values["c_r"] == pytest.approx(0.4, abs=1e-12)
        assert values["c_delta_r"] == pytest.approx(0.2 / math.sqrt(0.21), abs=1e-9)

    def test_csv_format(self, files, capsys):
        code, out = run_cli(
            capsys, ["monotones", files["plus"], "--measures", "c_rel", "--format", "csv"]
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "measure,value,method"
        assert lines[1].startswith("c_rel,1,")

    def test_matches_direct_library_call(self, files, capsys):
        code, out = run_cli(capsys, ["monotones", files["mixed_qubit"]])
        assert code == 0
        reported = {e["name"]: e["value"] for e in json.loads(out)}
        rho = DensityMatrix([[0.7, 0.2], [0.2, 0.3]])
        assert reported["c_rel"] == mo.c_rel(rho).value
        assert reported["c_r"] == mo.c_r(rho).value


class TestTransform:
    def test_mio_pure_with_witness_file(self, files, capsys, tmp_path):
        witness_path = tmp_path / "witness.json"
        code, out = run_cli(
            capsys,
            [
                "transform",
                files["plus"],
                files["psi"],
                "--class",
                "mio-pure",
                "--witness-out",
                str(witness_path),
            ],
        )
        assert code == 0
        decision = json.loads(out)
        assert decision["verdict"] is True
        stored = json.loads(witness_path.read_text())
        witness = ch.KrausChannel.from_json_dict(stored)
        assert ch.is_mio(witness)

    def test_qubit_violation_record(self, files, capsys):
        code, out = run_cli(
            capsys,
            ["transform", files["weak_qubit"], files["strong_qubit"], "--class", "qubit"],
        )
        assert code == 0
        decision = json.loads(out)
        assert decision["verdict"] is False
        assert decision["violation"]["monotone"] == "c_r"

    def test_identity_transform_all_classes(self, files, capsys):
        for klass in ("sio", "qubit", "pio"):
            code, out = run_cli(
                capsys, ["transform", files["plus"], files["plus"], "--class", klass]
            )
            assert code == 0
            assert json.loads(out)["verdict"] is True

    def test_class_input_mismatch(self, files, capsys):
        code, _ = run_cli(
            capsys,
            ["transform", files["mixed_qubit"], files["plus"], "--class", "sio"],
        )
        assert code == 4


class TestReproduce:
    def test_example_artifact(self, files, capsys):
        code, out = run_cli(capsys, ["reproduce", "--artifact", "example"])
        assert code == 0
        log = json.loads(out)
        assert log["max_residual"] <= 1e-10
        assert log["mio"] is True and log["io_rep"] is False and log["dio"] is False

    def test_fig1_crossing(self, files, capsys):
        code, out = run_cli(capsys, ["reproduce", "--artifact", "fig1", "--format", "csv"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "alpha,s_alpha_uniform,s_alpha_target"
        rows = [line.split(",") for line in lines[1:]]
        at_half = [r for r in rows if abs(float(r[0]) - 0.5) < 1e-12][0]
        assert float(at_half[1]) == pytest.approx(1.0, abs=1e-9)
        assert float(at_half[2]) == pytest.approx(1.0, abs=1e-9)
        assert len(rows) == 201

    def test_cp_threshold(self, files, capsys):
        code, out = run_cli(capsys, ["reproduce", "--artifact", "cp-threshold"])
        assert code == 0
        for row in json.loads(out):
            assert row["threshold"] == pytest.approx(row["expected"], abs=1e-6)
        assert [row["d"] for row in json.loads(out)] == list(range(2, 9))

    def test_qubit_formulas(self, files, capsys):
        code, out = run_cli(capsys, ["reproduce", "--artifact", "qubit-formulas", "--seed", "3"])
        assert code == 0
        for row in json.loads(out):
            assert row["c_r_solver"] == pytest.approx(row["c_r_closed"], abs=1e-8)
            assert row["c_delta_r_eigen"] == pytest.approx(row["c_delta_r_closed"], abs=1e-8)

    def test_deterministic_bytes(self, files, capsys):
        _, first = run_cli(capsys, ["reproduce", "--artifact", "qubit-formulas", "--seed", "5"])
        _, second = run_cli(capsys, ["reproduce", "--artifact", "qubit-formulas", "--seed", "5"])
        assert first == second


class TestHarnessCommand:
    def test_small_suites_pass(self, files, capsys):
        for suite in ("inclusions", "roundtrips"):
            code, out = run_cli(
                capsys, ["harness", "--suite", suite, "--samples", "10", "--seed", "3"]
            )
            assert code == 0
            assert json.loads(out)["passed"] is True

    def test_injected_corruption_fails(self, files, capsys, monkeypatch):
        monkeypatch.setenv("COHERENCE_KIT_HARNESS_INJECT", "2")
        code, out = run_cli(
            capsys, ["harness", "--suite", "inclusions", "--samples", "5", "--seed", "3"]
        )
        assert code == 1
        summary = json.loads(out)
        assert summary["passed"] is False
        assert all(f["index"] == 2 for f in summary["failures"])

    def test_thread_determinism(self):
        single = run_suite("roundtrips", 8, seed=9, threads=1)
        multi = run_suite("roundtrips", 8, seed=9, threads=4)
        assert single == multi

    def test_env_thread_cap(self, monkeypatch):
        from coherence_kit.harness import thread_count

        monkeypatch.setenv("COHERENCE_KIT_THREADS", "3")
        assert thread_count() == 3
        assert thread_count(1) == 1
