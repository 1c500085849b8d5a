"""End-to-end CLI behavior through main(argv)."""
import json
import re

import pytest

from hlcd import CSV_COLUMNS, forward_sample, network_to_json, save_dataset
from hlcd.cli import _threads, build_parser, main
from hlcd.oracle import VerifyReport


@pytest.fixture(scope="module")
def cli_files(tmp_path_factory, chain_net, hand5_net):
    root = tmp_path_factory.mktemp("cli")
    chain_json = root / "chain.json"
    chain_json.write_text(network_to_json(chain_net))
    hand5_json = root / "hand5.json"
    hand5_json.write_text(network_to_json(hand5_net))
    chain_csv = root / "chain.csv"
    with open(chain_csv, "w", newline="") as fh:
        save_dataset(forward_sample(chain_net, 400, 0), fh)
    return {"root": root, "chain": chain_json, "hand5": hand5_json, "data": chain_csv}


class TestSample:
    def test_writes_loadable_csv(self, cli_files, tmp_path):
        out = tmp_path / "s.csv"
        rc = main(["sample", "--net", str(cli_files["chain"]), "--n", "50",
                   "--seed", "3", "--out", str(out)])
        assert rc == 0
        text = out.read_text()
        assert text.splitlines()[0] == "#arities: 2,2,2"
        assert text.splitlines()[1] == "X0,X1,X2"
        assert len(text.splitlines()) == 52

    def test_byte_identical_reruns(self, cli_files, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["sample", "--net", str(cli_files["chain"]), "--n", "40", "--seed", "9"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_stdout_when_out_is_dash(self, cli_files, capsys):
        rc = main(["sample", "--net", str(cli_files["chain"]), "--n", "5",
                   "--seed", "0", "--out", "-"])
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "#arities: 2,2,2"
        assert len(lines) == 7


class TestDiscover:
    def test_prints_local_structure(self, cli_files, capsys):
        rc = main(["discover", "--data", str(cli_files["data"]),
                   "--target", "X1", "--score", "aic"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "target: X1" in out
        assert "parents: (none)" in out
        assert "children: (none)" in out
        assert "undirected: X0, X2" in out
        assert re.search(r"visited 3 variables, \d+ CI tests", out)

    def test_json_record(self, cli_files, tmp_path, capsys):
        jpath = tmp_path / "rec.json"
        rc = main(["discover", "--data", str(cli_files["data"]), "--target", "X1",
                   "--score", "aic", "--json", str(jpath)])
        assert rc == 0
        record = json.loads(jpath.read_text())
        assert record["target"] == "X1"
        assert record["undirected"] == ["X0", "X2"]
        assert record["visited"][0] == "X1"
        assert record["diagnostics"]["ci_tests"] > 0
        assert record["options"]["score"] == "aic"
        assert isinstance(record["runtime_s"], float)

    def test_case_insensitive_target(self, cli_files, capsys):
        rc = main(["discover", "--data", str(cli_files["data"]),
                   "--target", "x1", "--score", "aic"])
        assert rc == 0
        assert "target: X1" in capsys.readouterr().out

    def test_unknown_target_is_runtime_error(self, cli_files, capsys):
        rc = main(["discover", "--data", str(cli_files["data"]), "--target", "ZZ"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_file_is_runtime_error(self, tmp_path, capsys):
        rc = main(["discover", "--data", str(tmp_path / "nope.csv"), "--target", "X0"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestBenchmark:
    def test_csv_and_summary(self, cli_files, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        rc = main(["benchmark", "--net", str(cli_files["chain"]), "--sizes", "150",
                   "--reps", "2", "--out", str(out), "--score", "aic"])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + 2 * 3
        stdout = capsys.readouterr().out
        assert re.search(r"^n=150: f1 \d\.\d{2}±\d\.\d{2} ", stdout, re.M)
        assert "shd" in stdout

    def test_stdout_output(self, cli_files, capsys):
        rc = main(["benchmark", "--net", str(cli_files["chain"]), "--sizes", "60",
                   "--reps", "1", "--out", "-", "--score", "aic"])
        assert rc == 0
        out = capsys.readouterr().out
        assert out.startswith(",".join(CSV_COLUMNS) + "\n")

    def test_bad_sizes_is_usage_error(self, cli_files, capsys):
        with pytest.raises(SystemExit) as err:
            main(["benchmark", "--net", str(cli_files["chain"]),
                  "--sizes", "a,b", "--out", "-"])
        assert err.value.code == 2


class TestThreads:
    def parse(self, extra):
        return build_parser().parse_args(
            ["benchmark", "--net", "x", "--sizes", "10", "--out", "-"] + extra
        )

    def test_flag_value(self, monkeypatch):
        monkeypatch.delenv("HLCD_THREADS", raising=False)
        assert _threads(self.parse(["--threads", "4"])) == 4
        assert _threads(self.parse(["--threads", "0"])) == 1

    def test_env_overrides_flag(self, monkeypatch):
        monkeypatch.setenv("HLCD_THREADS", "2")
        assert _threads(self.parse(["--threads", "8"])) == 2
        monkeypatch.setenv("HLCD_THREADS", "0")
        assert _threads(self.parse(["--threads", "8"])) == 1


class TestAblate:
    def test_both_theorems(self, cli_files, capsys):
        rc = main(["ablate", "--net", str(cli_files["hand5"]), "--n", "2000",
                   "--reps", "2", "--score", "aic", "--theorem", "both"])
        assert rc == 0
        out = capsys.readouterr().out.splitlines()
        assert re.fullmatch(
            r"theorem-1  Total_PC 6  Get_PC \d\.\d{2}±\d\.\d{2}"
            r"  Total_NoPC 14  Delete_NoPC \d\.\d{2}±\d\.\d{2}",
            out[0],
        )
        assert re.fullmatch(
            r"theorem-2  Total_V 1  V_acc \d\.\d{2}±\d\.\d{2}"
            r"  Total_NoV 0  NoV_acc n/a",
            out[1],
        )

    def test_single_theorem(self, cli_files, capsys):
        rc = main(["ablate", "--net", str(cli_files["hand5"]), "--n", "500",
                   "--reps", "1", "--theorem", "1"])
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("theorem-1 ")


class TestVerify:
    SMALL = ["--max-nodes", "2", "--sample6", "2", "--fuzz-trials", "5",
             "--class-datasets", "2", "--dsep-trials", "10"]

    def test_small_run_passes(self, cli_files, capsys):
        rc = main(["verify"] + self.SMALL + ["--networks", str(cli_files["chain"])])
        assert rc == 0
        out = capsys.readouterr().out
        assert "ok   dag-count-k2: 3 DAGs (expected 3)" in out
        assert "ok   oracle-discover-chain:" in out
        assert re.search(r"^all \d+ checks passed$", out, re.M)
        assert "FAIL" not in out

    def test_verbose_logs_to_stderr(self, cli_files, capsys):
        rc = main(["verify"] + self.SMALL
                  + ["--networks", str(cli_files["chain"]), "-v"])
        assert rc == 0
        assert "  .. " in capsys.readouterr().err

    def test_failure_exits_3(self, cli_files, monkeypatch, capsys):
        report = VerifyReport()
        report.add("bogus", False, "made to fail")
        monkeypatch.setattr("hlcd.cli.run_verification", lambda *a, **k: report)
        rc = main(["verify", "--networks", str(cli_files["chain"])])
        assert rc == 3
        out = capsys.readouterr().out
        assert "FAIL bogus: made to fail" in out
        assert "1 of 1 checks failed" in out


class TestUsage:
    def test_no_command_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 2

    def test_unknown_command_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["solve"])
        assert err.value.code == 2
