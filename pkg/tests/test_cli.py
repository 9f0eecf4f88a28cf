"""Tests for the command-line interface, run in process."""

import json

import numpy as np
import pytest

from upoblab.cli import main
from upoblab.matrix import matrix_to_json
from upoblab.product import OperatorSet


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


class TestConstruct:
    def test_envelope(self, capsys):
        rc, out, _ = run(capsys, "construct", "--name", "u2")
        assert rc == 0
        obj = json.loads(out)
        assert obj["command"] == "construct"
        assert obj["inputs"]["name"] == "u2"
        assert len(obj["result"]["members"]) == 12

    def test_writes_file(self, tmp_path, capsys):
        path = tmp_path / "set.json"
        rc, _, _ = run(capsys, "construct", "--name", "qutrit-uuo", "--out", str(path))
        assert rc == 0
        obj = json.loads(path.read_text())
        assert len(obj["result"]["members"]) == 6

    def test_unknown_name(self, capsys):
        rc, _, err = run(capsys, "construct", "--name", "bogus")
        assert rc == 2
        assert "error" in err


class TestExport:
    def test_bare_operator_set(self, capsys):
        rc, out, _ = run(capsys, "export", "--set", "example2")
        assert rc == 0
        obj = json.loads(out)
        s = OperatorSet.from_json(obj)
        assert len(s) == 30


class TestVerify:
    def test_u2_exit_zero(self, tmp_path, capsys):
        path = tmp_path / "u2.json"
        run(capsys, "construct", "--name", "u2", "--out", str(path))
        rc, out, _ = run(capsys, "verify", "--set", str(path))
        assert rc == 0
        obj = json.loads(out)
        assert "strongly-UPUOB" in obj["result"]["verdict_labels"]

    def test_example2_exit_zero_with_witness(self, tmp_path, capsys):
        path = tmp_path / "ex2.json"
        run(capsys, "export", "--set", "example2", "--out", str(path))
        rc, out, _ = run(capsys, "verify", "--set", str(path), "--restarts", "4",
                         "--iters", "50")
        assert rc == 0
        obj = json.loads(out)
        assert obj["result"]["verdict_labels"] == ["UPUOB-evidence"]
        assert obj["result"]["upob"]["status"] == "extendible"
        assert "witness" in obj["result"]["upob"]

    def test_tiny_extendible_exit_one(self, tmp_path, capsys):
        x = [[0, 1], [1, 0]]
        obj = {
            "shape": [[2, 2], [2, 2]],
            "members": [
                {
                    "label": "A",
                    "factors": [matrix_to_json(np.eye(2)), matrix_to_json(np.eye(2))],
                },
                {
                    "label": "B",
                    "factors": [matrix_to_json(x), matrix_to_json(x)],
                },
            ],
        }
        path = tmp_path / "tiny.json"
        path.write_text(json.dumps(obj))
        rc, out, _ = run(capsys, "verify", "--set", str(path), "--restarts", "4",
                         "--iters", "50")
        assert rc == 1
        report = json.loads(out)
        assert report["result"]["upob"]["status"] == "extendible"
        assert "witness" in report["result"]["upob"]

    def test_budget_exhaustion_exit_three(self, tmp_path, capsys):
        path = tmp_path / "u2.json"
        run(capsys, "construct", "--name", "u2", "--out", str(path))
        rc, out, _ = run(capsys, "verify", "--set", str(path), "--budget", "5")
        assert rc == 3
        assert json.loads(out)["result"]["upob"]["status"] == "unknown"

    def test_missing_file_exit_two(self, capsys):
        rc, _, err = run(capsys, "verify", "--set", "/does/not/exist.json")
        assert rc == 2
        assert "error" in err

    def test_malformed_json_exit_two(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        rc, _, _ = run(capsys, "verify", "--set", str(path))
        assert rc == 2


class TestSimulate:
    def test_three_ebit(self, tmp_path, capsys):
        path = tmp_path / "trace.json"
        rc, _, _ = run(capsys, "simulate", "--protocol", "three-ebit",
                       "--json", str(path))
        assert rc == 0
        obj = json.loads(path.read_text())
        assert obj["result"]["ebits_consumed"] == 3

    def test_nonlocality_evidence(self, capsys):
        rc, out, _ = run(capsys, "simulate", "--protocol", "nonlocality-evidence")
        assert rc == 0
        assert json.loads(out)["result"]["all_passed"]

    def test_unknown_protocol_exit_two(self, capsys):
        rc, _, err = run(capsys, "simulate", "--protocol", "bogus")
        assert rc == 2
        assert "unknown protocol" in err


class TestParser:
    def test_no_subcommand_exit_two(self, capsys):
        assert run(capsys, )[0] == 2

    def test_unknown_subcommand_exit_two(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2

    def test_version_exit_zero(self, capsys):
        rc, out, _ = run(capsys, "--version")
        assert rc == 0

    def test_round_trip_determinism(self, tmp_path, capsys):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        run(capsys, "export", "--set", "lift:2", "--out", str(a))
        run(capsys, "export", "--set", "lift:2", "--out", str(b))
        assert a.read_text() == b.read_text()
