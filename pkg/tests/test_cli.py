import json

import pytest

from codesign.cli import main
from codesign.model import load_model


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalysisCommands:
    def test_spof_json(self, capsys, fixture_path):
        code, out, _ = run(capsys, "spof", "--model", str(fixture_path), "--json")
        assert code == 0
        assert json.loads(out)["spofs"] == [
            "CollisionAvoidance",
            "GPS",
            "Map",
            "PathPlanner",
            "SensorFusion",
            "VehicleController",
        ]

    def test_propagate_json(self, capsys, fixture_path):
        code, out, _ = run(
            capsys,
            "propagate",
            "--model",
            str(fixture_path),
            "--faults",
            "Radar1,Radar2,IMU",
            "--json",
        )
        assert code == 0
        assert json.loads(out)["faulty"] == ["IMU", "Radar1", "Radar2", "SignalProcessor"]

    def test_json_output_is_byte_identical_across_runs(self, capsys, fixture_path):
        _, first, _ = run(capsys, "spof", "--model", str(fixture_path), "--json")
        _, second, _ = run(capsys, "spof", "--model", str(fixture_path), "--json")
        assert first == second

    def test_critical_path_exclude_last_fault(self, capsys, fixture_path):
        code, out, _ = run(
            capsys,
            "critical-path",
            "--model",
            str(fixture_path),
            "--faults",
            "Radar1,Radar2,IMU",
            "--exclude-last-fault",
            "--json",
        )
        assert code == 0
        body = json.loads(out)
        assert body["excluded_faults"] == ["IMU", "Radar1", "Radar2", "SignalProcessor"]

    def test_suggest_human_output(self, capsys, fixture_path):
        code, out, _ = run(capsys, "suggest", "--model", str(fixture_path))
        assert code == 0
        assert "SensorFusion" in out


class TestModelCommands:
    def test_verbalize_exact_ir(self, capsys, tmp_path, two_node_xml):
        path = tmp_path / "two.xml"
        path.write_text(two_node_xml)
        code, out, _ = run(capsys, "verbalize", "--model", str(path))
        assert code == 0
        assert out == (
            "Nodes:\n    - A\n    - B\n"
            "Edges:\n    - A --> B\n"
            "Attributes:\n    - A: start = true\n"
            "    - B: gate = OR(A)\n    - B: end = true\n"
        )

    def test_parse_summary(self, capsys, fixture_path):
        code, out, _ = run(capsys, "parse", "--model", str(fixture_path))
        assert code == 0
        assert "17 nodes, 17 edges" in out

    def test_dot_output(self, capsys, fixture_path):
        code, out, _ = run(capsys, "dot", "--model", str(fixture_path))
        assert code == 0
        assert '"Camera1" -> "ImageProcessor";' in out

    def test_replicate_writes_in_place(self, capsys, fixture_path):
        code, out, _ = run(
            capsys,
            "replicate",
            "--model",
            str(fixture_path),
            "--target",
            "SensorFusion",
            "--json",
        )
        assert code == 0
        body = json.loads(out)
        assert body["replicas"] == ["SensorFusion_1", "SensorFusion_2"]
        on_disk = load_model(fixture_path)
        assert "SensorFusion" not in on_disk.node_names()

    def test_replicate_to_output_path(self, capsys, fixture_path, tmp_path):
        out_path = tmp_path / "mutated.xml"
        code, _, _ = run(
            capsys,
            "replicate",
            "--model",
            str(fixture_path),
            "--target",
            "Lidar1",
            "--output",
            str(out_path),
        )
        assert code == 0
        assert "Lidar1" in load_model(fixture_path).node_names()
        assert "Lidar1_1" in load_model(out_path).node_names()


class TestExitCodes:
    def test_usage_error_is_one(self, capsys):
        code, _, _ = run(capsys, "no-such-command")
        assert code == 1

    def test_missing_required_option_is_one(self, capsys):
        code, _, _ = run(capsys, "spof")
        assert code == 1

    def test_model_error_is_two(self, capsys, tmp_path):
        bad = tmp_path / "bad.xml"
        bad.write_text("<system><node name='A'/><edge from='A' to='B'/></system>")
        code, _, err = run(capsys, "spof", "--model", str(bad))
        assert code == 2
        assert "cannot load model" in err

    def test_missing_file_is_two(self, capsys):
        code, _, _ = run(capsys, "parse", "--model", "/does/not/exist.xml")
        assert code == 2

    def test_analysis_error_is_three(self, capsys, fixture_path):
        code, _, _ = run(
            capsys, "propagate", "--model", str(fixture_path), "--faults", "Ghost"
        )
        assert code == 3

    def test_no_end_marker_is_three(self, capsys, tmp_path):
        path = tmp_path / "noend.xml"
        path.write_text("<system><node name='A' start='true'/></system>")
        code, _, _ = run(capsys, "critical-path", "--model", str(path))
        assert code == 3


class TestChatCommand:
    def test_scripted_session(self, capsys, fixture_path, monkeypatch):
        lines = iter(
            [
                "What are the single points of failure?",
                "Replicate SensorFusion.",
                "quit",
            ]
        )
        monkeypatch.setattr("builtins.input", lambda *a: next(lines))
        code = main(["chat", "--model", str(fixture_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "SensorFusion" in out
        assert "revision 1" in out
        on_disk = load_model(fixture_path)
        assert "SensorFusion_1" in on_disk.node_names()
