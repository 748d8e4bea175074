"""File formats and the command-line pipeline, exercised via subprocess."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qreadout import io
from qreadout.fixtures import device_povm
from qreadout.povm import born_probabilities, diagonal_projective
from qreadout.simulate import (
    coherent_readout_povm,
    haar_state,
    max_coherent_magnitude,
    sample_counts,
    synthetic_calibration,
)
from qreadout.tomography import CalibrationRecord


def run_cli(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "qreadout", *args],
                          capture_output=True, text=True, cwd=cwd)


class TestPovmFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "povm.json"
        povm = device_povm("ibm_q1")
        io.save_povm(path, povm)
        assert np.allclose(io.load_povm(path), povm, atol=1e-15)

    def test_dim_mismatch_detected(self, tmp_path):
        path = tmp_path / "povm.json"
        io.save_povm(path, device_povm("ibm_q0"))
        data = json.loads(path.read_text())
        data["dim"] = 3
        path.write_text(json.dumps(data))
        with pytest.raises(Exception):
            io.load_povm(path)

    def test_invalid_effects_rejected_on_load(self, tmp_path):
        path = tmp_path / "povm.json"
        io.save_povm(path, device_povm("ibm_q0"))
        data = json.loads(path.read_text())
        data["effects"][0][0][0] = [2.0, 0.0]  # breaks completeness
        path.write_text(json.dumps(data))
        with pytest.raises(Exception):
            io.load_povm(path)


class TestCountsFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "counts.json"
        io.save_counts(path, np.array([10, 20, 30, 40]), num_qubits=2)
        counts, nq = io.load_counts(path)
        assert nq == 2
        assert np.array_equal(counts, [10, 20, 30, 40])

    def test_zero_counts_omitted_and_restored(self, tmp_path):
        path = tmp_path / "counts.json"
        io.save_counts(path, np.array([5, 0, 0, 7]), num_qubits=2)
        data = json.loads(path.read_text())
        assert set(data["counts"]) == {"00", "11"}
        counts, _ = io.load_counts(path)
        assert np.array_equal(counts, [5, 0, 0, 7])

    def test_bad_bitstring_key_rejected(self, tmp_path):
        path = tmp_path / "counts.json"
        io.save_counts(path, np.array([1, 2]), num_qubits=1)
        data = json.loads(path.read_text())
        data["counts"]["2"] = 3
        path.write_text(json.dumps(data))
        with pytest.raises(ValueError):
            io.load_counts(path)

    def test_declared_shots_checked(self, tmp_path):
        path = tmp_path / "counts.json"
        io.save_counts(path, np.array([3, 4]), num_qubits=1)
        data = json.loads(path.read_text())
        data["shots"] = 99
        path.write_text(json.dumps(data))
        with pytest.raises(ValueError):
            io.load_counts(path)


class TestCalibrationFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "cal.json"
        records = synthetic_calibration(device_povm("ibm_q0"), 1, shots=128,
                                        seed=3)
        io.save_calibration(path, records, num_qubits=1)
        loaded, nq = io.load_calibration(path)
        assert nq == 1
        assert len(loaded) == len(records)
        for a, b in zip(loaded, records):
            assert a.label == b.label
            assert np.array_equal(a.counts, b.counts)

    def test_bad_record_names_file(self, tmp_path):
        path = tmp_path / "cal.json"
        records = [CalibrationRecord(label="z+", shots=10,
                                     counts=np.array([6, 4]))]
        io.save_calibration(path, records, num_qubits=1)
        data = json.loads(path.read_text())
        data["records"][0]["counts"]["0"] = 11
        path.write_text(json.dumps(data))
        with pytest.raises(Exception) as exc:
            io.load_calibration(path)
        assert "cal.json" in str(exc.value)


class TestCsv:
    def test_layout(self, tmp_path):
        path = tmp_path / "data.csv"
        io.write_csv(path, ["a", "b"], [(1.5, None), (0.25, 2.0)])
        text = path.read_text()
        assert text == "a,b\n1.5,\n0.25,2.0\n"


class TestFixtureScheme:
    def test_resolves_bundled_names(self):
        path = io.resolve_input_path("fixture:ibm_q0")
        assert Path(path).exists()

    def test_unknown_fixture(self):
        with pytest.raises(KeyError):
            io.resolve_input_path("fixture:missing")

    def test_plain_paths_untouched(self):
        assert io.resolve_input_path("some/file.json") == Path("some/file.json")


class TestCliFit:
    def test_fit_from_fixture_calibration(self, tmp_path):
        out = tmp_path / "fitted.json"
        report = tmp_path / "fit_report.json"
        res = run_cli("fit", "fixture:ibm_q0_calibration", "--out", str(out),
                      "--report", str(report))
        assert res.returncode == 0, res.stderr
        effects = io.load_povm(out)
        from qreadout.distances import operational_distance_exact
        # the bundled dataset is documented to recover its source this well
        assert operational_distance_exact(effects, device_povm("ibm_q0")) <= 0.01
        fitted = io.load_report(report)
        assert fitted["kind"] == "fit"
        assert fitted["converged"] is True

    def test_iteration_cap_exits_2(self, tmp_path):
        out = tmp_path / "fitted.json"
        res = run_cli("fit", "fixture:ibm_q0_calibration", "--out", str(out),
                      "--max-iter", "1")
        assert res.returncode == 2
        assert out.exists()  # partial result still written

    def test_probe_set_filter(self, tmp_path):
        out = tmp_path / "fitted.json"
        res = run_cli("fit", "fixture:ibm_q0_calibration", "--out", str(out),
                      "--probe-set", "minimal")
        assert res.returncode == 0, res.stderr
        assert "4 records" in res.stdout


class TestCliCharacterize:
    def test_fixture_q0_report(self, tmp_path):
        out = tmp_path / "char.json"
        res = run_cli("characterize", "fixture:ibm_q0", "--out", str(out))
        assert res.returncode == 0, res.stderr
        report = io.load_report(out)
        assert report["kind"] == "characterization"
        # The three headline quantities for this detector.
        assert report["distance_to_ideal"]["lower"] == pytest.approx(0.137092,
                                                                     abs=1e-5)
        assert report["coherent_distance"]["lower"] == pytest.approx(0.004,
                                                                     abs=1e-12)
        assert report["norm_1to1"] == pytest.approx(1.331719128329298, rel=1e-12)
        assert report["readout_params"]["p"] == pytest.approx(0.037)
        assert report["readout_params"]["q"] == pytest.approx(0.137)

    def test_rerun_is_byte_identical(self, tmp_path):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        assert run_cli("characterize", "fixture:rigetti_q3", "--out",
                       str(out1)).returncode == 0
        assert run_cli("characterize", "fixture:rigetti_q3", "--out",
                       str(out2)).returncode == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_tensor_of_two_files(self, tmp_path):
        out = tmp_path / "char2.json"
        res = run_cli("characterize", "fixture:ibm_q0", "fixture:ibm_q1",
                      "--out", str(out))
        assert res.returncode == 0, res.stderr
        report = io.load_report(out)
        assert report["num_outcomes"] == 4
        assert len(report["factors"]) == 2
        assert report["factors"][0]["q"] == pytest.approx(0.137)
        assert report["factors"][1]["q"] == pytest.approx(0.37)

    def test_singular_noise_exits_2(self, tmp_path):
        povm_path = tmp_path / "singular.json"
        first = np.diag([0.5, 0.5]).astype(complex)
        io.save_povm(povm_path, np.stack([first, np.eye(2) - first]))
        res = run_cli("characterize", str(povm_path), "--out",
                      str(tmp_path / "x.json"))
        assert res.returncode == 2
        assert "singular" in res.stderr.lower()

    def test_missing_file_exits_1(self, tmp_path):
        res = run_cli("characterize", str(tmp_path / "absent.json"), "--out",
                      str(tmp_path / "x.json"))
        assert res.returncode == 1


class TestCliMitigate:
    @pytest.fixture
    def characterized_q0(self, tmp_path):
        char = tmp_path / "char.json"
        assert run_cli("characterize", "fixture:ibm_q0", "--out",
                       str(char)).returncode == 0
        return char

    def _counts_file(self, tmp_path, povm, seed=11, shots=8192):
        rho = haar_state(2, seed=seed)
        counts = sample_counts(born_probabilities(rho, povm), shots, seed=seed)
        path = tmp_path / f"counts_{seed}.json"
        io.save_counts(path, counts, num_qubits=1)
        return path

    def test_successful_verdict(self, tmp_path, characterized_q0):
        counts = self._counts_file(tmp_path, device_povm("ibm_q0"))
        out = tmp_path / "mit.json"
        res = run_cli("mitigate", str(counts), str(characterized_q0), "--out",
                      str(out))
        assert res.returncode == 0, res.stderr
        report = io.load_report(out)
        assert report["successful"] is True
        assert report["kind"] == "mitigation"
        assert sum(report["corrected"]) == pytest.approx(1.0, abs=1e-9)

    def test_failed_verdict_exits_3_but_writes(self, tmp_path):
        # A detector dominated by its coherent part: the budget exceeds
        # the distance reference and the verdict comes out negative.
        z = 0.99 * max_coherent_magnitude(0.02, 0.02)
        povm = coherent_readout_povm(0.02, 0.02, z)
        povm_path = tmp_path / "coh.json"
        io.save_povm(povm_path, povm)
        char = tmp_path / "char.json"
        assert run_cli("characterize", str(povm_path), "--out",
                       str(char)).returncode == 0
        counts = self._counts_file(tmp_path, povm, seed=5)
        out = tmp_path / "mit.json"
        res = run_cli("mitigate", str(counts), str(char), "--out", str(out))
        assert res.returncode == 3
        assert io.load_report(out)["successful"] is False

    def test_outcome_count_mismatch_exits_1(self, tmp_path, characterized_q0):
        path = tmp_path / "counts4.json"
        io.save_counts(path, np.array([1, 2, 3, 4]), num_qubits=2)
        res = run_cli("mitigate", str(path), str(characterized_q0), "--out",
                      str(tmp_path / "x.json"))
        assert res.returncode == 1

    def test_wrong_report_kind_exits_1(self, tmp_path, characterized_q0):
        counts = self._counts_file(tmp_path, device_povm("ibm_q0"))
        res = run_cli("mitigate", str(counts), str(counts), "--out",
                      str(tmp_path / "x.json"))
        assert res.returncode == 1


class TestCliSimulate:
    def test_single_run_report(self, tmp_path):
        out = tmp_path / "frac.json"
        res = run_cli("simulate-f", "fixture:ibm_q2", "--out", str(out),
                      "--trials", "100", "--shots", "1024", "--seed", "7")
        assert res.returncode == 0, res.stderr
        report = io.load_report(out)
        assert report["kind"] == "fraction"
        assert len(report["runs"]) == 1
        assert 0.0 <= report["runs"][0]["f"] <= 1.0

    def test_sweep_csv_layout(self, tmp_path):
        out = tmp_path / "frac.json"
        csv = tmp_path / "frac.csv"
        res = run_cli("simulate-f", "fixture:ibm_q0", "--out", str(out),
                      "--csv", str(csv), "--trials", "60", "--z-sweep", "4")
        assert res.returncode == 0, res.stderr
        lines = csv.read_text().splitlines()
        assert lines[0] == "z_mag,ratio,f,mean_alpha"
        assert len(lines) == 5
        assert float(lines[1].split(",")[0]) == pytest.approx(0.0)

    def test_deterministic_rerun(self, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        for out in (out1, out2):
            assert run_cli("simulate-f", "fixture:rigetti_q1", "--out",
                           str(out), "--trials", "80", "--seed",
                           "3").returncode == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_exact_mode(self, tmp_path):
        out = tmp_path / "frac.json"
        res = run_cli("simulate-f", "fixture:ibm_q3", "--out", str(out),
                      "--trials", "40", "--shots", "0")
        assert res.returncode == 0, res.stderr
        run = io.load_report(out)["runs"][0]
        assert run["epsilon"] == 0.0
        assert run["shots"] is None

    def test_sweep_rejected_on_two_qubits(self, tmp_path):
        povm_path = tmp_path / "pair.json"
        from qreadout.povm import tensor_povm
        io.save_povm(povm_path,
                     tensor_povm(device_povm("ibm_q0"), device_povm("ibm_q1")))
        res = run_cli("simulate-f", str(povm_path), "--out",
                      str(tmp_path / "x.json"), "--z-sweep", "3")
        assert res.returncode == 1


class TestCliUsage:
    def test_no_arguments(self):
        res = run_cli()
        assert res.returncode == 1

    def test_unknown_subcommand(self):
        res = run_cli("transmogrify")
        assert res.returncode == 1

    def test_version_flag(self):
        res = run_cli("--version")
        assert res.returncode == 0
        assert "qreadout" in res.stdout

    def test_console_script_matches_module(self, tmp_path):
        out = tmp_path / "char.json"
        res = subprocess.run(["qreadout", "characterize", "fixture:ibm_q0",
                              "--out", str(out)], capture_output=True,
                             text=True)
        assert res.returncode == 0, res.stderr
