"""End-to-end tests of the command-line entry points, run in process."""

import csv
import json
from pathlib import Path

import pytest

from sflow.cli import main
from sflow.experiments import COMPARE_COLUMNS
from sflow.metrics import SUMMARY_COLUMNS


def write_config(path: Path, **overrides) -> Path:
    config = {
        "label": "tiny chain",
        "workload": {"shape": "chain", "n": 2, "p": 1.0,
                     "period_minutes": 30.0, "run_count": 1},
        "systems": ["faas"],
        "seeds": [3],
    }
    config.update(overrides)
    path.write_text(json.dumps(config))
    return path


class TestRun:
    def test_writes_artifacts(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json", systems=["faas", "baseline"])
        out = tmp_path / "results"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0

        assert (out / "summary.csv").is_file()
        assert (out / "config.json").is_file()
        for system in ("faas", "baseline"):
            run_dir = out / system / "seed-3"
            assert (run_dir / "trace.json").is_file()
            assert (run_dir / "tasks.csv").is_file()
            assert (run_dir / "events.csv").is_file()

        with open(out / "summary.csv", newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert rows and list(rows[0]) == SUMMARY_COLUMNS
        assert {r["system"] for r in rows} == {"faas", "baseline"}

        text = capsys.readouterr().out
        assert "workload: tiny chain" in text
        assert "makespan ratio baseline/faas:" in text
        assert f"artifacts written to {out}" in text

    def test_no_out_dir_prints_only(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        assert main(["run", "--config", str(cfg)]) == 0
        text = capsys.readouterr().out
        assert "makespan_s" in text
        assert "artifacts" not in text
        assert list(tmp_path.iterdir()) == [cfg]

    def test_seed_flag_beats_env_beats_config(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path / "cfg.json")  # config seed 3
        monkeypatch.setenv("SFLOW_SEED", "5")

        out = tmp_path / "flag"
        main(["run", "--config", str(cfg), "--out", str(out), "--seed", "7"])
        assert (out / "faas" / "seed-7").is_dir()
        assert json.loads((out / "config.json").read_text())["seeds"] == [7]

        out = tmp_path / "env"
        main(["run", "--config", str(cfg), "--out", str(out)])
        assert (out / "faas" / "seed-5").is_dir()

        monkeypatch.delenv("SFLOW_SEED")
        out = tmp_path / "config"
        main(["run", "--config", str(cfg), "--out", str(out)])
        assert (out / "faas" / "seed-3").is_dir()

    def test_system_flag_restricts(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json", systems=["faas", "baseline"])
        out = tmp_path / "results"
        main(["run", "--config", str(cfg), "--out", str(out), "--system", "baseline"])
        assert (out / "baseline").is_dir()
        assert not (out / "faas").exists()

    def test_same_seed_same_bytes(self, tmp_path):
        cfg = write_config(tmp_path / "cfg.json")
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "a")])
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "b")])
        rel = Path("faas") / "seed-3"
        for name in ("trace.json", "tasks.csv", "events.csv"):
            assert ((tmp_path / "a" / rel / name).read_bytes()
                    == (tmp_path / "b" / rel / name).read_bytes())


class TestCost:
    def test_scenario_prints_all_ledgers(self, capsys):
        assert main(["cost", "scenario1"]) == 0
        text = capsys.readouterr().out
        assert "[variable]" in text
        assert "[fixed]" in text
        assert "[baseline]" in text
        assert "platform daily total: 5.1875" in text
        assert "baseline daily total: 12.2550" in text

    def test_ha_flag_selects_replicated_tier(self, capsys):
        main(["cost", "scenario1", "--ha"])
        text = capsys.readouterr().out
        assert "[fixed_ha]" in text
        assert "platform daily total: 7.2975" in text

    def test_out_writes_ledger_csv(self, tmp_path):
        out = tmp_path / "costs"
        main(["cost", "scenario3", "--out", str(out)])
        path = out / "costs-scenario3.csv"
        assert path.is_file()
        with open(path, newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert list(rows[0]) == ["section", "component", "notes", "usd"]
        assert {r["section"] for r in rows} == {"variable", "fixed", "baseline"}
        total = next(r for r in rows
                     if r["section"] == "variable" and r["component"] == "total")
        assert float(total["usd"]) == pytest.approx(0.0145, abs=1e-3)

    def test_trace_mode(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "cfg.json")
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "r")])
        capsys.readouterr()

        trace = tmp_path / "r" / "faas" / "seed-3" / "trace.json"
        out = tmp_path / "costs"
        assert main(["cost", "--trace", str(trace), "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert f"trace: {trace} (faas, seed 3)" in text
        assert "[variable]" in text
        assert "baseline daily total" not in text  # no scenario, no comparator
        assert (out / "costs-trace.csv").is_file()

    def test_no_target_is_an_error(self, capsys):
        assert main(["cost"]) == 2
        assert "scenario name or --trace" in capsys.readouterr().err


class TestAnalyze:
    def test_json_dag(self, tmp_path, capsys):
        dag = {"dag_id": "demo", "period_minutes": 5.0, "run_count": 1,
               "tasks": [{"id": "a", "duration_s": 4.0, "deps": []},
                         {"id": "b", "duration_s": 6.0, "deps": ["a"]}]}
        path = tmp_path / "dag.json"
        path.write_text(json.dumps(dag))
        out = tmp_path / "stats.json"

        assert main(["analyze", str(path), "--out", str(out)]) == 0
        stats = json.loads(out.read_text())
        assert stats == {"dag_id": "demo", "n_tasks": 2, "critical_path_s": 10.0,
                         "longest_path_len": 2, "max_parallelism": 1,
                         "total_work_s": 10.0, "suggested_period_minutes": 5.0}
        assert json.loads(capsys.readouterr().out) == stats

    def test_trace_csv_fixture(self, capsys):
        fixture = Path(__file__).parent.parent / "src" / "sflow" / "fixtures"
        assert main(["analyze", str(fixture / "job_chainlike.csv")]) == 0
        stats = json.loads(capsys.readouterr().out)
        assert stats["n_tasks"] == 34
        assert stats["critical_path_s"] == pytest.approx(439.0)
        assert stats["longest_path_len"] == 8


class TestCompare:
    def make_summaries(self, tmp_path) -> tuple[Path, Path]:
        cfg = write_config(tmp_path / "cfg.json", systems=["faas", "baseline"])
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "r")])
        return tmp_path / "r" / "summary.csv", tmp_path / "r" / "summary.csv"

    def test_joins_and_writes(self, tmp_path, capsys):
        left, right = self.make_summaries(tmp_path)
        capsys.readouterr()
        out = tmp_path / "joined.csv"
        assert main(["compare", str(left), str(right), "--out", str(out)]) == 0

        printed = capsys.readouterr().out
        assert out.read_text() == printed
        with open(out, newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert list(rows[0]) == COMPARE_COLUMNS
        # self-join: every ratio with a nonzero denominator is exactly 1.
        for row in rows:
            if float(row["right_median"]):
                assert float(row["median_ratio"]) == 1.0

    def test_system_filter(self, tmp_path, capsys):
        left, right = self.make_summaries(tmp_path)
        capsys.readouterr()
        main(["compare", str(left), str(right), "--system", "faas"])
        with open(left, newline="") as handle:
            n_faas = sum(r["system"] == "faas" for r in csv.DictReader(handle))
        rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
        assert len(rows) == n_faas
        assert all(r["left_system"] == "faas" for r in rows)

    def test_disjoint_summaries_fail(self, tmp_path, capsys):
        left, right = self.make_summaries(tmp_path)
        capsys.readouterr()
        assert main(["compare", str(left), str(right), "--system", "caas"]) == 1
        assert "no joinable rows" in capsys.readouterr().err
