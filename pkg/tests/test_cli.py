import json

import pytest

import scalelab
from scalelab import cli
from scalelab import reports

from .helpers import load_example
from .helpers import write_config

FAST_QUADRATURE = {
    "radial_nodes": 64,
    "planar_nodes": 32,
    "lebedev_order": 23,
    "rtol": 1.0e-7,
}


def d3_config(command, mass=0.0, **sections):
    config = {
        "command": command,
        "model": {"dim": 3, "measure": {"atoms": [{"mass": mass}]}},
        "functions": {
            "f": {"widths": 1.0},
            "g": {"widths": 1.0, "center": [0.5, 0.3, 0.0]},
        },
        "probes": [["f", "g"]],
        "renorm": {"kind": "power_law", "delta": "canonical"},
        "sequences": [
            {"lambda0": 1.0, "ratio": 0.5, "length": 6, "phase": 0.0},
            {"lambda0": 1.0, "ratio": 0.5, "length": 6, "phase": 0.5},
        ],
        "quadrature": dict(FAST_QUADRATURE),
        "output": {"prefix": "run"},
    }
    config.update(sections)
    return config


def run(tmp_path, config, *extra):
    path = write_config(tmp_path, config)
    out = tmp_path / "out"
    code = cli.main([config["command"], "--config", path, "--out", str(out), *extra])
    return code, out


def read_json(path):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


class TestParser:
    def test_missing_config_is_a_usage_error(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["limit"])
        assert excinfo.value.code == cli.EXIT_CONFIG
        assert "--config" in capsys.readouterr().err

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["extrapolate", "--config", "x.yaml"])
        assert excinfo.value.code == cli.EXIT_CONFIG

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["--version"])
        assert excinfo.value.code == 0
        assert scalelab.__version__ in capsys.readouterr().out


class TestConfigErrors:
    def test_invalid_configuration(self, tmp_path, capsys):
        code, out = run(tmp_path, {"command": "limit"})
        assert code == cli.EXIT_CONFIG
        assert "1. model: missing" in capsys.readouterr().err
        assert not out.exists()

    def test_yaml_syntax_error(self, tmp_path, capsys):
        path = tmp_path / "broken.yaml"
        path.write_text("command: limit\nmodel: [1, 2\n", encoding="utf-8")
        assert cli.main(["limit", "--config", str(path)]) == cli.EXIT_CONFIG
        assert str(path) in capsys.readouterr().err

    def test_command_mismatch(self, tmp_path):
        path = write_config(tmp_path, d3_config("limit"))
        assert cli.main(["classify", "--config", path]) == cli.EXIT_CONFIG


class TestLimit:
    def test_massless_limit(self, tmp_path):
        config = d3_config("limit", limit={"massless_comparison": True, "dilation": [0.5]})
        code, out = run(tmp_path, config)
        assert code == cli.EXIT_OK
        with open(out / "run_estimates.csv", encoding="utf-8") as handle:
            header = handle.readline()
        assert header.startswith(f"# scalelab {scalelab.__version__} config_sha256=")
        frame = reports.read_csv(out / "run_estimates.csv")
        assert list(frame.columns) == cli.ESTIMATE_COLUMNS
        assert len(frame) == 12
        payload = read_json(out / "run_limit.json")
        assert payload["converged"]
        assert payload["massless"]["z"] == pytest.approx(1.0, rel=1e-9)
        assert payload["dilation"]["status"] == "pass"
        assert payload["config_sha256"] == header.strip().rsplit("=", 1)[1]

    def test_output_does_not_depend_on_threads(self, tmp_path):
        config = d3_config("limit", mass=1.0)
        serial = tmp_path / "serial"
        threaded = tmp_path / "threaded"
        serial.mkdir()
        threaded.mkdir()
        run(serial, config, "--threads", "1")
        run(threaded, config, "--threads", "4")
        for name in ("run_estimates.csv", "run_limit.json"):
            first = (serial / "out" / name).read_bytes()
            assert first == (threaded / "out" / name).read_bytes()

    def test_environment_output_dir(self, tmp_path, monkeypatch):
        target = tmp_path / "from-env"
        monkeypatch.setenv("SCALELAB_OUTPUT_DIR", str(target))
        path = write_config(tmp_path, d3_config("limit"))
        assert cli.main(["limit", "--config", path]) == cli.EXIT_OK
        assert (target / "run_limit.json").exists()


class TestClassify:
    def test_quantum(self, tmp_path):
        code, out = run(tmp_path, d3_config("classify"))
        assert code == cli.EXIT_OK
        verdict = read_json(out / "run_verdict.json")
        assert verdict["verdict"] == scalelab.QUANTUM
        assert verdict["degenerate_test"]
        evidence = reports.read_csv(out / "run_evidence.csv")
        assert sorted(set(evidence["sequence"])) == ["s0", "s1"]

    def test_over_damped_is_classical(self, tmp_path):
        config = d3_config("classify", renorm={"kind": "power_law", "delta": -2.0})
        for seq in config["sequences"]:
            seq["length"] = 10
        code, out = run(tmp_path, config)
        assert code == cli.EXIT_OK
        assert read_json(out / "run_verdict.json")["verdict"] == scalelab.CLASSICAL

    @pytest.mark.slow
    def test_degenerate_example(self, tmp_path):
        code, out = run(tmp_path, load_example("classify_degenerate.yaml"))
        assert code == cli.EXIT_OK
        assert read_json(out / "degenerate_verdict.json")["verdict"] == scalelab.DEGENERATE


class TestEmt:
    def config(self, **model):
        config = d3_config(
            "emt",
            mass=1.0,
            emt={
                "functions": ["f"],
                "lambdas": [1.0, 0.1],
                "axes": [0],
                "radius_lambdas": [1.0, 0.5],
            },
        )
        del config["probes"]
        del config["sequences"]
        config["model"].update(model)
        return config

    def test_identity_and_radius(self, tmp_path):
        code, out = run(tmp_path, self.config())
        assert code == cli.EXIT_OK
        identity = reports.read_csv(out / "run_emt_identity.csv")
        assert list(identity.columns) == cli.IDENTITY_COLUMNS
        assert len(identity) == 2
        radius = reports.read_csv(out / "run_emt_radius.csv")
        assert list(radius["lambda"]) == [1.0, 0.5]
        payload = read_json(out / "run_emt.json")
        assert payload["max_rel_diff"] < 1e-5
        assert payload["quantile"] == 0.9

    def test_computation_error(self, tmp_path):
        measure = {"atoms": [{"mass": 1.0}, {"mass": 2.0}]}
        code, _ = run(tmp_path, self.config(measure=measure))
        assert code == cli.EXIT_ERROR


class TestStability:
    def test_minkowski(self, tmp_path):
        code, out = run(tmp_path, load_example("stability_minkowski.yaml"))
        assert code == cli.EXIT_OK
        report = read_json(out / "minkowski_stability.json")
        assert report["verdict"] == "stable"
        assert report["command"] == "stability"

    def test_modulated_state_is_inconclusive(self, tmp_path):
        config = load_example("stability_modulated.yaml")
        config["stability"]["spacetime"] = {"kind": "minkowski", "dim": 4}
        code, out = run(tmp_path, config)
        assert code == cli.EXIT_INCONCLUSIVE
        assert read_json(out / "modulated_stability.json")["verdict"] == "inconclusive"
