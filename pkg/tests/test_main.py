"""Tests for the command-line interface."""

import json

import pytest
from src.main import EXIT_FAILURE, EXIT_NOT_RESOLVED, EXIT_OK, build_parser, main, setup_logging
from src.utils.config import get_config


@pytest.fixture
def chain_files(tmp_path):
    """Generated 20-node chain with a noiseless boundary-guided observation."""
    code = main(
        [
            "generate",
            "chain",
            "--n",
            "20",
            "--cluster-size",
            "10",
            "--samples",
            "4",
            "--seed",
            "1",
            "--out",
            str(tmp_path),
        ]
    )
    assert code == EXIT_OK
    return tmp_path


class TestParser:
    """Test suite for argument parsing."""

    def test_subcommand_required(self):
        """Test a subcommand must be given."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_band_indices(self):
        """Test comma-separated frequency lists."""
        args = build_parser().parse_args(["spectral", "--graph", "g.json", "--band", "1,3"])
        assert args.band == [1, 3]

    def test_lambda_option(self):
        """Test --lambda maps to lam."""
        args = build_parser().parse_args(
            ["solve", "--graph", "g", "--observation", "o", "--lambda", "0.5", "--out", "x"]
        )
        assert args.lam == 0.5


class TestCommands:
    """Test suite for subcommands and exit codes."""

    def test_generate_files(self, chain_files):
        """Test generate writes the graph, partition, signal and observation."""
        names = {p.name for p in chain_files.iterdir()}
        assert {"graph.json", "partition.json", "signal.json", "observation.json"} <= names
        assert json.loads((chain_files / "graph.json").read_text())["n"] == 20

    def test_certify_find_k(self, chain_files):
        """Test the smallest resolving K is certified."""
        out = chain_files / "cert.json"
        code = main(
            [
                "certify",
                "--graph",
                str(chain_files / "graph.json"),
                "--partition",
                str(chain_files / "partition.json"),
                "--samples",
                str(chain_files / "observation.json"),
                "--L",
                "2",
                "--find-k",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        assert json.loads(out.read_text())["verdict"] == "resolved"

    def test_certify_not_resolved(self, chain_files):
        """Test exit code 2 when a cluster has no samples."""
        samples = chain_files / "m.json"
        samples.write_text(json.dumps({"nodes": [1]}))
        code = main(
            [
                "certify",
                "--graph",
                str(chain_files / "graph.json"),
                "--partition",
                str(chain_files / "partition.json"),
                "--samples",
                str(samples),
                "--K",
                "1",
                "--L",
                "2",
                "--out",
                str(chain_files / "cert.json"),
            ]
        )
        assert code == EXIT_NOT_RESOLVED

    def test_certify_needs_k(self, chain_files):
        """Test certify without --K or --find-k fails."""
        code = main(
            [
                "certify",
                "--graph",
                str(chain_files / "graph.json"),
                "--partition",
                str(chain_files / "partition.json"),
                "--samples",
                str(chain_files / "observation.json"),
                "--L",
                "2",
            ]
        )
        assert code == EXIT_FAILURE

    def test_solve_oracle(self, chain_files):
        """Test solve writes a full-length estimate."""
        out = chain_files / "x_hat.json"
        code = main(
            [
                "solve",
                "--graph",
                str(chain_files / "graph.json"),
                "--observation",
                str(chain_files / "observation.json"),
                "--K",
                "1",
                "--oracle",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        assert len(json.loads(out.read_text())["values"]) == 20

    def test_solve_admm_trace(self, chain_files):
        """Test the ADMM objective trace file."""
        trace = chain_files / "trace.csv"
        code = main(
            [
                "solve",
                "--graph",
                str(chain_files / "graph.json"),
                "--observation",
                str(chain_files / "observation.json"),
                "--lambda",
                "0.5",
                "--iters",
                "15",
                "--out",
                str(chain_files / "x_hat.csv"),
                "--trace",
                str(trace),
            ]
        )
        assert code == EXIT_OK
        assert len(trace.read_text().splitlines()) == 16
        assert (chain_files / "x_hat.csv").read_text().startswith("node,value")

    def test_spectral_table(self, chain_files):
        """Test the spectrum table of the generated signal."""
        table = chain_files / "spectrum.csv"
        code = main(
            [
                "spectral",
                "--graph",
                str(chain_files / "graph.json"),
                "--signal",
                str(chain_files / "signal.json"),
                "--out",
                str(table),
            ]
        )
        assert code == EXIT_OK
        lines = table.read_text().splitlines()
        assert lines[0] == "l,eigenvalue,coefficient"
        assert len(lines) == 21

    def test_missing_graph(self, tmp_path):
        """Test unreadable inputs give exit code 1."""
        code = main(["spectral", "--graph", str(tmp_path / "missing.json")])
        assert code == EXIT_FAILURE

    def test_experiment_spec_file(self, tmp_path):
        """Test experiments from a spec file."""
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"name": "cli", "n_nodes": 50, "iterations": 5}))
        code = main(["experiment", "--spec", str(spec), "--out", str(tmp_path / "run")])
        assert code == EXIT_OK
        assert (tmp_path / "run" / "result.json").exists()


class TestSettings:
    """Test suite for config-driven CLI settings."""

    def test_description_from_config(self):
        """Test the parser description is app.description."""
        assert build_parser().description == get_config().get("app.description")

    def test_version(self, capsys):
        """Test --version prints app.version."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["--version"])
        assert get_config().get("app.version") in capsys.readouterr().out

    def test_logging_settings_from_config(self, mocker):
        """Test setup_logging applies the logging section, console output included."""
        configure = mocker.patch("src.main.configure_logging")
        setup_logging(None)
        configure.assert_called_once_with(
            level="INFO", log_dir="logs", file_logging=False, console_output=True
        )

    def test_cli_level_wins(self, mocker):
        """Test --log-level overrides logging.level."""
        configure = mocker.patch("src.main.configure_logging")
        setup_logging("DEBUG")
        assert configure.call_args.kwargs["level"] == "DEBUG"
