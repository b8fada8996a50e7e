"""Tests for the command-line interface."""

import csv
import json
from unittest.mock import MagicMock, patch

import pytest

from atomlaser.main import cli
from atomlaser.utils.errors import RegimeError


def invoke(runner, *args):
    """Run the CLI quietly so stdout carries only data."""
    return runner.invoke(cli, ["--log-level", "ERROR", *args])


def data_rows(text):
    return list(csv.DictReader(line for line in text.splitlines() if not line.startswith("#")))


class TestScanPump:
    """Test cases for scan-pump."""

    def test_pump_range(self, runner):
        """Test one row per pump value with linear and asymptotic columns."""
        result = invoke(
            runner, "scan-pump", "--is", "40", "--c", "20",
            "--r-range", "2", "3", "--r-step", "0.5",
        )
        assert result.exit_code == 0, result.output
        rows = data_rows(result.stdout)
        assert [float(row["r"]) for row in rows] == [2.0, 2.5, 3.0]
        assert all(row["branch_kind"] == "generating" for row in rows)
        assert float(rows[0]["n_asym"]) == pytest.approx(11.463, abs=0.05)
        assert "n_oracle" not in rows[0]

    def test_deterministic(self, runner):
        """Test two identical runs give identical bytes."""
        args = ("scan-pump", "--is", "40", "--c", "20", "--r", "9")
        assert invoke(runner, *args).stdout == invoke(runner, *args).stdout

    def test_ratio_over_several_c(self, runner):
        """Test --r-ratio with repeated --c; Qf changes sign between c = 100 and 400."""
        result = invoke(
            runner, "scan-pump", "--is", "40", "--c", "100", "--c", "400", "--r-ratio", "5",
            "--format", "json",
        )
        assert result.exit_code == 0, result.output
        rows = json.loads(result.stdout)["rows"]
        assert [row["r"] for row in rows] == [20.0, 80.0]
        assert rows[0]["qf_asym"] > 0 > rows[1]["qf_asym"]

    def test_reason_codes(self, runner):
        """Test empty cells carry reasons below threshold and without a window."""
        result = invoke(runner, "scan-pump", "--is", "40", "--c", "20", "--r", "0.5")
        row = data_rows(result.stdout)[0]
        assert row["qf_lin"] == ""
        assert "qf_lin:regime" in row["reason"]
        assert row["branch_kind"] == "thermal"

        result = invoke(runner, "scan-pump", "--is", "40", "--c", "5", "--r", "2")
        assert "qf_lin:no_lasing" in data_rows(result.stdout)[0]["reason"]

    def test_with_oracle(self, runner):
        """Test the oracle columns and the cutoff used."""
        result = invoke(
            runner, "scan-pump", "--is", "2", "--c", "40", "--r", "3", "--with-oracle",
        )
        assert result.exit_code == 0, result.output
        row = data_rows(result.stdout)[0]
        assert int(row["cutoff"]) == 35
        assert float(row["n_oracle"]) > 0
        assert row["qf_oracle"] != ""

    @pytest.mark.parametrize(
        "args",
        [
            ("--is", "40", "--c", "20", "--r-range", "5", "2", "--r-step", "0.5"),
            ("--is", "40", "--r", "2"),
            ("--is", "40", "--c", "20", "--r-range", "2", "5"),
            ("--is", "-1", "--c", "20", "--r", "2"),
        ],
    )
    def test_usage_errors(self, runner, args):
        """Test invalid combinations exit with status 2."""
        assert invoke(runner, "scan-pump", *args).exit_code == 2

    @patch("atomlaser.main.RunManager")
    def test_library_error(self, mock_manager_cls, runner):
        """Test library errors exit with status 1 and their reason code."""
        manager = MagicMock()
        manager.scan_pump.side_effect = RegimeError("outside the window")
        mock_manager_cls.return_value = manager
        result = invoke(runner, "scan-pump", "--is", "40", "--c", "20", "--r", "2")
        assert result.exit_code == 1
        assert "regime: outside the window" in result.output

    def test_output_file(self, runner, tmp_path):
        """Test --out writes the file and leaves stdout empty."""
        target = tmp_path / "scan.csv"
        result = invoke(
            runner, "scan-pump", "--is", "40", "--c", "20", "--r", "9", "--out", str(target),
        )
        assert result.exit_code == 0, result.output
        assert result.stdout == ""
        assert data_rows(target.read_text())[0]["r"] == "9"

    def test_header_block(self, runner):
        """Test each run parameter appears once and numbers read as in the data."""
        result = invoke(runner, "scan-pump", "--is", "40", "--c", "20", "--r", "9")
        lines = result.stdout.splitlines()
        keys = [
            line[2:].split("=", 1)[0] for line in lines if line.startswith("# ") and "=" in line
        ]
        assert len(keys) == len(set(keys))
        assert "gaussian" not in keys
        assert "# c=20" in lines
        assert "# r=9" in lines
        assert "# with_oracle=false" in lines


class TestConfigFile:
    """Test cases for --config run files."""

    @pytest.fixture
    def run_file(self, tmp_path):
        """A scan-pump run file."""
        path = tmp_path / "run.env"
        path.write_text("is=40\nc=20\nr-range=2,3\nr-step=0.5\nformat=json\n")
        return path

    def test_file_values(self, runner, run_file):
        """Test the file alone configures a run."""
        result = invoke(runner, "--config", str(run_file), "scan-pump")
        assert result.exit_code == 0, result.output
        assert len(json.loads(result.stdout)["rows"]) == 3

    def test_flags_win(self, runner, run_file):
        """Test command-line flags override file values."""
        result = invoke(runner, "--config", str(run_file), "scan-pump", "--r-step", "1.0")
        assert result.exit_code == 0, result.output
        assert [row["r"] for row in json.loads(result.stdout)["rows"]] == [2.0, 3.0]

    def test_unknown_key(self, runner, tmp_path):
        """Test an unknown key is a usage error."""
        path = tmp_path / "bad.env"
        path.write_text("pump=3\n")
        assert invoke(runner, "--config", str(path), "scan-pump").exit_code == 2


class TestTable:
    """Test cases for table."""

    def test_columns(self, runner):
        """Test linear theory, Q0 and Gaussian columns against the reference table."""
        result = invoke(runner, "table", "--format", "json")
        assert result.exit_code == 0, result.output
        columns = json.loads(result.stdout)["columns"]
        assert [column["label"] for column in columns] == ["95.95", "8.83", "0.87"]
        for column, qf_lin, qf_q0 in zip(columns, (0.056, -0.040, -0.049), (0.057, -0.039, -0.047)):
            assert column["i0"] == pytest.approx(700.0)
            assert column["qf_lin"] == pytest.approx(qf_lin, abs=0.001)
            assert column["n_q0"] == pytest.approx(700.1, abs=0.5)
            assert column["qf_q0"] == pytest.approx(qf_q0, abs=0.003)
            assert column["n_oracle"] is None
        assert columns[0]["sigma2"] == pytest.approx(1440.2, abs=1.0)

    def test_header_block(self, runner):
        """Test the heavy flag is recorded once."""
        lines = invoke(runner, "table").stdout.splitlines()
        assert lines.count("# heavy=false") == 1
        assert not any(line.startswith("# with_oracle=") for line in lines)


class TestProfile:
    """Test cases for profile."""

    @pytest.mark.parametrize("c", [50.0, 100.0, 175.0])
    def test_curves(self, runner, c):
        """Test Q0 and the Gaussian at I_s = 100 and r = r_m."""
        result = invoke(
            runner, "profile", "--is", "100", "--c", str(c), "--r", str(c / 2 - 1),
            "--format", "json",
        )
        assert result.exit_code == 0, result.output
        report = json.loads(result.stdout)
        assert report["errors"] == {}
        assert report["branch_kind"] == "generating"
        assert report["norm_constants"]["q_asym"] > 0
        points = report["points"]
        assert len(points) >= 401
        assert all(point["q_asym"] >= 0 for point in points)
        assert all(point["q_oracle"] is None for point in points)

    def test_no_gaussian(self, runner):
        """Test --no-gaussian leaves the Gaussian column empty."""
        result = invoke(runner, "profile", "--is", "40", "--c", "20", "--r", "9", "--no-gaussian")
        rows = data_rows(result.stdout)
        assert all(row["q_gaussian"] == "" for row in rows)
        assert rows[0]["i"] == "0"
        lines = result.stdout.splitlines()
        assert "# gaussian=false" in lines
        assert lines.count("# c=20") == 1
        assert any(line.startswith("# norm.q_asym=") for line in lines)

    def test_oracle_curve(self, runner):
        """Test the oracle curve is sampled on the same grid."""
        result = invoke(
            runner, "profile", "--is", "2", "--c", "40", "--r", "3", "--with-oracle",
            "--format", "json",
        )
        points = json.loads(result.stdout)["points"]
        assert all(point["q_oracle"] is not None for point in points)

    def test_needs_one_c(self, runner):
        """Test profile refuses several cooperativities."""
        result = invoke(runner, "profile", "--is", "40", "--c", "20", "--c", "30", "--r", "9")
        assert result.exit_code == 2


class TestValidate:
    """Test cases for validate."""

    def test_single_point(self, runner):
        """Test a passing point exits 0 with a JSON report."""
        result = invoke(runner, "validate", "--point", "2,40,3,80")
        assert result.exit_code == 0, result.output
        report = json.loads(result.stdout)
        assert report["passed"] is True
        assert report["mutated"] is None

    def test_mutation(self, runner):
        """Test a perturbed coefficient exits 1."""
        result = invoke(runner, "validate", "--point", "2,40,3,80", "--mutate", "b41")
        assert result.exit_code == 1
        checks = json.loads(result.stdout)["checks"]
        failed = [check["name"] for check in checks if not check["passed"]]
        assert "ode_residual" in failed

    def test_unknown_coefficient(self, runner):
        """Test an unknown --mutate name is a usage error."""
        assert invoke(runner, "validate", "--mutate", "b99").exit_code == 2

    def test_bad_point(self, runner):
        """Test a malformed point is a usage error."""
        assert invoke(runner, "validate", "--point", "2,40").exit_code == 2


class TestSchema:
    """Test cases for schema."""

    def test_schema(self, runner):
        """Test every report schema is printed."""
        result = invoke(runner, "schema")
        assert result.exit_code == 0
        schemas = json.loads(result.stdout)
        assert set(schemas) == {"scan-pump", "table", "profile", "validate"}
        assert "rows" in schemas["scan-pump"]["properties"]

    def test_version(self, runner):
        """Test --version."""
        result = runner.invoke(cli, ["--version"])
        assert "0.1.0" in result.output
