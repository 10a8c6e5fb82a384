import json

import numpy as np
import pytest

from varcmo.cli import main
from varcmo.fileio import read_coeffs, read_signal, write_signal
from varcmo.specs import RunConfig, exponent_from_spec, family_from_spec
from varcmo.core import ConfigError, Grid


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def signal_file(tmp_path, capsys):
    code, out, _ = run(capsys, "gen", "signal", "--grid", "7", "--seed", "3")
    assert code == 0
    path = tmp_path / "f.csv"
    path.write_text(out)
    return str(path)


class TestVerify:
    def test_luxemburg_basic_passes(self, capsys):
        code, out, err = run(capsys, "verify", "luxemburg-basic", "--grid", "8")
        rep = json.loads(out)
        assert code == 0 and rep["verdict"] == "pass" and rep["schema"] == "varcmo.report/1"
        assert rep["config"]["rng"] == "philox4x64-10"
        assert "PASS luxemburg-basic" in err

    def test_duality_hypothesis_is_usage_error(self, capsys):
        code, out, err = run(capsys, "verify", "duality", "--exponent", "1.3")
        assert code == 2 and out == ""
        assert "p_plus <= 1" in err and "1.3" in err
        assert "Thm" not in err and "Theorem" not in err

    def test_duality_custom_exponent(self, capsys):
        spec = json.dumps({"kind": "sinusoid", "mean": 0.9, "amplitude": 0.05})
        code, out, _ = run(capsys, "verify", "duality", "--exponent", spec, "--grid", "6", "--trials", "5")
        rep = json.loads(out)
        assert code == 0
        assert [c["name"] for c in rep["checks"]][0] == "duality_ratio_refinement_pcustom"

    def test_fixed_exponent_suite_rejects_exponent(self, capsys):
        code, _, err = run(capsys, "verify", "solver-oracle", "--exponent", "0.9")
        assert code == 2 and "fixed exponents" in err

    def test_check_failure_exit_code(self, capsys, tmp_path):
        code, _, _ = run(capsys, "verify", "czo-cmo", "--grid", "7", "--trials", "5", "--out", str(tmp_path))
        rep = json.loads((tmp_path / "report.json").read_text())
        assert code == 1 and rep["verdict"] == "fail"
        failed = [c["name"] for c in rep["checks"] if not c["passed"]]
        assert failed == ["sharp_size_constant_grows"]
        assert "czo-cmo" in json.loads((tmp_path / "timings.json").read_text())["seconds"]

    def test_thread_count_does_not_change_report(self, capsys):
        outs = [run(capsys, "verify", "plancherel-polya", "--grid", "6", "--trials", "6", "--threads", str(t))[1]
                for t in (1, 3)]
        assert outs[0] == outs[1]

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, "verify", "solver-oracle", "--grid", "6", "--trials", "3", "--format", "csv")
        lines = out.strip().splitlines()
        assert code == 0 and lines[0] == "suite,check,value,threshold,passed"
        assert lines[1].startswith("solver-oracle,bisection_vs_golden_section,")

    def test_config_document(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"grid": 6, "trials": 3, "seed": 9}))
        code, out, _ = run(capsys, "--config", str(cfg), "verify", "solver-oracle")
        rep = json.loads(out)
        assert code == 0 and rep["config"]["log2_size"] == 6 and rep["config"]["seed"] == 9

    def test_unknown_config_field(self, capsys):
        code, _, err = run(capsys, "--config", '{"grid": 6, "tolerance": 1}', "verify", "solver-oracle")
        assert code == 2 and "tolerance" in err

    def test_argparse_usage(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "no-such-suite"])
        assert exc.value.code == 2


class TestOps:
    def test_norm_cmo_single_value(self, capsys, signal_file):
        code, out, _ = run(capsys, "norm", "--space", "cmo", "--input", signal_file, "--exponent", "0.9")
        rep = json.loads(out)
        assert code == 0 and rep["result"]["space"] == "cmo" and rep["result"]["value"] > 0

    @pytest.mark.parametrize("space", ["lp", "hardy", "campanato", "zygmund"])
    def test_norm_spaces(self, capsys, signal_file, space):
        code, out, _ = run(capsys, "norm", "--space", space, "--input", signal_file)
        assert code == 0 and np.isfinite(json.loads(out)["result"]["value"])

    def test_sequence_norm(self, capsys, tmp_path):
        code, out, _ = run(capsys, "gen", "coeffs", "--grid", "6", "--count", "1")
        path = tmp_path / "c.txt"
        path.write_text(out)
        code, out, _ = run(capsys, "norm", "--space", "c", "--input", str(path))
        assert code == 0 and json.loads(out)["result"]["value"] > 0

    def test_grid_mismatch(self, capsys, signal_file):
        code, _, err = run(capsys, "norm", "--space", "lp", "--input", signal_file, "--grid", "8")
        assert code == 2 and "--grid" in err

    def test_transform_files_roundtrip(self, capsys, signal_file, tmp_path):
        run(capsys, "transform", "analyze", "--input", signal_file, "--out", str(tmp_path))
        coeffs = read_coeffs(str(tmp_path / "coeffs.txt"))
        assert coeffs.log2_size == 7 and coeffs.nnz() > 0
        run(capsys, "transform", "synthesize", "--input", str(tmp_path / "coeffs.txt"), "--out", str(tmp_path))
        np.testing.assert_allclose(read_signal(str(tmp_path / "signal.csv")), read_signal(signal_file), atol=1e-12)
        code, out, _ = run(capsys, "transform", "roundtrip", "--input", signal_file)
        assert code == 0 and json.loads(out)["result"]["error"] <= 1e-8

    def test_decompose(self, capsys, signal_file, tmp_path):
        code, _, _ = run(capsys, "decompose", "--input", signal_file, "--exponent", "0.9", "--out", str(tmp_path))
        rep = json.loads((tmp_path / "report.json").read_text())
        assert code == 0 and rep["verdict"] == "pass"
        res = rep["result"]
        assert res["stopping_cubes"] and len(res["atoms"]) == len(res["stopping_cubes"])
        assert all(a["support_ok"] for a in res["atoms"])

    def test_pair(self, capsys, signal_file):
        code, out, _ = run(capsys, "pair", "--f", signal_file, "--g", signal_file)
        res = json.loads(out)["result"]
        assert code == 0 and res["pairing_re"] > 0 and abs(res["pairing_im"]) < 1e-12

    def test_czo(self, capsys, signal_file, tmp_path):
        code, out, _ = run(capsys, "czo", "kernel", "--grid", "7", "--operator", "zero")
        assert code == 0 and json.loads(out)["result"]["c_size"] == 0
        code, out, _ = run(capsys, "czo", "experiment", "--grid", "7", "--trials", "4", "--exponent", "0.9")
        assert code == 0 and json.loads(out)["result"]["max_ratio"] > 0
        code, out, _ = run(capsys, "czo", "apply", "--input", signal_file, "--out", str(tmp_path),
                           "--operator", '{"kind": "identity_band"}')
        np.testing.assert_allclose(read_signal(str(tmp_path / "signal.csv")), read_signal(signal_file), atol=1e-12)

    def test_czo_bad_operator(self, capsys):
        code, _, err = run(capsys, "czo", "kernel", "--operator", "riesz")
        assert code == 2

    def test_czo_hypothesis(self, capsys):
        code, _, err = run(capsys, "czo", "experiment", "--exponent", "0.4", "--trials", "2")
        assert code == 2 and "p_minus" in err

    def test_gen_deterministic(self, capsys):
        a = run(capsys, "gen", "signal", "--seed", "5", "--kind", "band")[1]
        b = run(capsys, "gen", "signal", "--seed", "5", "--kind", "band")[1]
        c = run(capsys, "gen", "signal", "--seed", "6", "--kind", "band")[1]
        assert a == b != c

    def test_gen_exponent(self, capsys):
        code, out, _ = run(capsys, "gen", "exponent", "--grid", "4", "--exponent",
                           '{"kind": "smoothstep", "low": 0.6, "high": 1.0}')
        rows = out.strip().splitlines()
        assert code == 0 and len(rows) == 17 and rows[0] == "index,p"


class TestSpecsAndFiles:
    def test_exponent_kinds(self):
        g = Grid(5)
        assert exponent_from_spec(0.7, g).p_plus == 0.7
        assert exponent_from_spec('{"kind": "samples", "values": [' + ",".join(["1.5"] * 32) + "]}", g).is_constant
        with pytest.raises(ConfigError):
            exponent_from_spec('{"kind": "sinusoid", "mean": 1}', g)
        with pytest.raises(ConfigError):
            exponent_from_spec('{"kind": "constant", "value": 1, "extra": 2}', g)
        with pytest.raises(ConfigError):
            exponent_from_spec('{"kind": "samples", "values": [1, 2]}', g)

    def test_kernel_spec(self):
        fam = family_from_spec('{"window": "shannon_sharp", "j_max": 4}', Grid(7))
        assert fam.shift == 1 and fam.j_max == 4
        with pytest.raises(ConfigError):
            family_from_spec('{"window": "meyer_smooth", "shift": 3, "j_max": 6}', Grid(7))
        with pytest.raises(ConfigError):
            family_from_spec('{"window": "meyer_smooth", "depth": 3}', Grid(7))

    def test_run_config_validation(self):
        with pytest.raises(ConfigError):
            RunConfig(grid=1).validate()
        with pytest.raises(ConfigError):
            RunConfig(seed=-1).validate()
        with pytest.raises(ConfigError):
            RunConfig(format="xml").validate()

    def test_binary_signal(self, tmp_path):
        f = np.exp(2j * np.pi * np.arange(16) / 16)
        path = str(tmp_path / "s.bin")
        write_signal(path, f)
        np.testing.assert_array_equal(read_signal(path), f)

    def test_csv_rejects_bad_length(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("index,re,im\n" + "".join(f"{i},1,0\n" for i in range(12)))
        with pytest.raises(Exception, match="power of two"):
            read_signal(str(path))
