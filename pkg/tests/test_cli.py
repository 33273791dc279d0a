"""
CLI Tests
Tests for the command-line surface and its exit codes
"""

import sys
import os

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import json

import pytest

from src.main import main


def run(capsys, *argv):
    """Run the CLI and return (exit code, stdout)"""
    code = main(list(argv))
    return code, capsys.readouterr().out


class TestUsage:
    """Test argument and input errors"""

    def test_no_command(self, capsys):
        code, _ = run(capsys)
        assert code == 2

    def test_unknown_suite(self, capsys):
        code, _ = run(capsys, "verify", "everything")
        assert code == 2

    def test_positive_discriminant(self, capsys):
        code, _ = run(capsys, "field", "--dk", "5")
        assert code == 2

    def test_non_fundamental_discriminant(self, capsys):
        code, _ = run(capsys, "rayclass", "--dk", "-12", "-N", "5")
        assert code == 2

    def test_digits_below_minimum(self, capsys):
        code, _ = run(capsys, "table", "--dk", "-20", "-N", "5", "--digits", "10", "--threads", "1")
        assert code == 2

    def test_version(self, capsys):
        code, _ = run(capsys, "--version")
        assert code == 0


class TestField:
    """Test the field command"""

    def test_field_json(self, capsys):
        code, out = run(capsys, "field", "--dk", "-20", "--json")
        assert code == 0
        info = json.loads(out)
        assert info["class_number"] == 2
        assert info["reduced_forms"] == [[1, 0, 5], [2, 2, 3]]

    def test_field_text(self, capsys):
        code, out = run(capsys, "field", "--dk", "-23")
        assert code == 0
        assert "-23" in out


class TestRayClass:
    """Test the rayclass command"""

    def test_rayclass_json(self, capsys):
        code, out = run(capsys, "rayclass", "--dk", "-20", "-N", "7", "--json")
        assert code == 0
        report = json.loads(out)
        assert report["order"] == 36
        assert report["ring_subgroup_order"] == 3
        assert report["hilbert_subgroup_order"] == 18
        assert report["degree_KN_over_H"] == 18

    def test_rayclass_checks(self, capsys):
        code, out = run(capsys, "rayclass", "--dk", "-23", "-N", "10", "--check", "--json")
        assert code == 0
        report = json.loads(out)
        assert report["collapses_to_half"] is True
        assert report["collapsing_divisors"] == [5]
        assert all(check["passed"] for check in report["checks"])

    def test_level_one_rejected(self, capsys):
        code, _ = run(capsys, "rayclass", "--dk", "-20", "-N", "1")
        assert code == 2


class TestTable:
    """Test the table command"""

    def test_table_csv(self, capsys):
        code, out = run(capsys, "table", "--dk", "-20", "-N", "5", "--format", "csv", "--digits", "30", "--threads", "1")
        assert code == 0
        assert len(out.strip().split("\n")) == 21

    def test_table_json(self, capsys):
        code, out = run(capsys, "table", "--dk", "-20", "-N", "5", "--digits", "30", "--threads", "1")
        assert code == 0
        assert len(json.loads(out)["rows"]) == 20


class TestVerify:
    """Test verify suites and the report envelope"""

    def test_choice_of_t_suite(self, capsys):
        code, out = run(capsys, "verify", "table1", "--max-n", "100", "--digits", "30", "--threads", "1")
        assert code == 0
        report = json.loads(out)
        assert report["schema"] == 1
        assert report["command"] == "verify table1"
        assert report["results"][0]["pass"] is True

    def test_table1_up_to_500(self, capsys):
        code, out = run(capsys, "verify", "table1", "--max-n", "500", "--threads", "1")
        assert code == 0
        assert json.loads(out)["results"][0]["name"] == "table1"

    def test_fricke_siegel(self, capsys):
        code, out = run(
            capsys, "verify", "fricke-siegel", "--samples", "3", "--seed", "7", "--digits", "30", "--threads", "1"
        )
        assert code == 0
        report = json.loads(out)
        assert report["config"]["seed"] == 7
        assert len(report["results"]) == 3

    def test_timing_recorded(self, capsys):
        code, out = run(capsys, "verify", "table1", "--max-n", "50", "--timing", "--threads", "1")
        assert code == 0
        assert json.loads(out)["timing"]["seconds"] >= 0

    def test_main_generated(self, capsys):
        code, out = run(capsys, "verify", "main", "--dk", "-20", "-N", "7", "--digits", "30", "--threads", "1")
        assert code == 0
        report = json.loads(out)
        assert all(result["pass"] for result in report["results"])

    def test_exceptional_field_is_usage_error(self, capsys):
        code, _ = run(capsys, "verify", "main", "--dk", "-4", "-N", "7", "--digits", "30", "--threads", "1")
        assert code == 2


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
