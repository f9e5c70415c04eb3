import csv
import io
import json
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path

from edca_markov.core.schemas.documents import COMPARISON_COLUMNS, ROW_COLUMNS, TRACE_COLUMNS
from edca_markov.main import EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_OK, run_cli_command


def invoke(*argv: str) -> tuple[int, str]:
    """运行一条命令，返回 (退出码, 标准输出)"""
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = run_cli_command(list(argv))
    return code, buffer.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


class TestSolveCommand(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_json_document(self):
        code, out = invoke("solve", "--config", "reference")
        self.assertEqual(code, EXIT_OK)
        document = json.loads(out)
        self.assertEqual(document["scenario"], "reference")
        self.assertTrue(document["converged"])
        self.assertEqual([ac["name"] for ac in document["per_ac"]], ["AC1", "AC3"])

    def test_csv_rows(self):
        code, out = invoke("solve", "-c", "reference", "-f", "csv")
        self.assertEqual(code, EXIT_OK)
        rows = read_csv(out)
        self.assertEqual(len(rows), 2)
        self.assertEqual(tuple(rows[0]), ROW_COLUMNS)
        self.assertEqual(rows[0]["source"], "analytic")

    def test_trace_and_matrix_dump(self):
        trace = self.dir / "trace.csv"
        matrices = self.dir / "matrices"
        out_file = self.dir / "metrics.json"
        code, _ = invoke("solve", "--out", str(out_file), "--trace", str(trace), "--dump-matrix", str(matrices))
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(out_file.is_file())
        with open(trace, encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
        self.assertEqual(tuple(rows[0]), TRACE_COLUMNS)
        self.assertEqual({row["ac"] for row in rows}, {"0", "1"})
        for name in ("ac0.txt", "ac1.txt"):
            with open(matrices / name, encoding="utf-8") as f:
                self.assertTrue(f.readline().startswith("# states "))

    def test_not_converged_exit_code(self):
        code, out = invoke("solve", "--max-iters", "1")
        self.assertEqual(code, EXIT_NOT_CONVERGED)
        self.assertFalse(json.loads(out)["converged"])

    def test_malformed_config(self):
        bad = self.dir / "bad.yaml"
        bad.write_text("acs:\n  - name: [unclosed\n", encoding="utf-8")
        code, out = invoke("solve", "--config", str(bad))
        self.assertEqual(code, EXIT_CONFIG)
        self.assertEqual(out, "")

    def test_unknown_scenario(self):
        code, _ = invoke("solve", "--config", "no-such-scenario")
        self.assertEqual(code, EXIT_CONFIG)

    def test_bad_solver_option(self):
        code, _ = invoke("solve", "--damping", "0")
        self.assertEqual(code, EXIT_CONFIG)


class TestSweepCommand(unittest.TestCase):
    def test_empty_values_rejected(self):
        code, _ = invoke("sweep", "--axis", "offered_load_per_ac", "--values")
        self.assertEqual(code, EXIT_CONFIG)

    def test_decreasing_values_rejected(self):
        code, _ = invoke("sweep", "--axis", "offered_load_per_ac", "--values", "2e6", "1e6")
        self.assertEqual(code, EXIT_CONFIG)

    def test_selected_columns(self):
        code, out = invoke("sweep", "--axis", "offered_load_per_ac", "--values", "1e6", "2e6",
                           "--columns", "value", "ac", "throughput", "status", "--workers", "1")
        self.assertEqual(code, EXIT_OK)
        rows = read_csv(out)
        self.assertEqual(tuple(rows[0]), ("value", "ac", "throughput", "status"))
        self.assertEqual([row["ac"] for row in rows], ["AC1", "AC3", "AC1", "AC3"])
        self.assertEqual([float(row["value"]) for row in rows], [1e6, 1e6, 2e6, 2e6])
        self.assertTrue(all(row["status"] == "ok" for row in rows))
        self.assertLess(float(rows[0]["throughput"]), float(rows[2]["throughput"]))

    def test_unknown_column(self):
        code, _ = invoke("sweep", "--axis", "stations_per_ac", "--values", "2", "--columns", "nope")
        self.assertEqual(code, EXIT_CONFIG)

    def test_station_split(self):
        code, out = invoke("sweep", "--axis", "stations_total", "--values", "5", "-f", "json", "--workers", "1")
        self.assertEqual(code, EXIT_OK)
        rows = json.loads(out)
        self.assertEqual([row["flows"] for row in rows], [3, 2])


class TestSimulationCommands(unittest.TestCase):
    def test_compare_single_seed(self):
        code, out = invoke("compare", "--seeds", "1", "--duration", "0.3", "--workers", "1")
        self.assertEqual(code, EXIT_OK)
        rows = read_csv(out)
        self.assertEqual(tuple(rows[0]), COMPARISON_COLUMNS)
        self.assertTrue(all(row["half_width"] == "" for row in rows))
        self.assertEqual(rows[-1]["metric"], "p_idle")

    def test_sim_trace_per_seed(self):
        with tempfile.TemporaryDirectory() as tmp:
            base = Path(tmp) / "events.txt"
            code, out = invoke("sim", "--seeds", "2", "--duration", "0.2", "--workers", "1",
                               "--trace-events", str(base))
            self.assertEqual(code, EXIT_OK)
            self.assertTrue((Path(tmp) / "events.1.txt").is_file())
            self.assertTrue((Path(tmp) / "events.2.txt").is_file())
        rows = read_csv(out)
        self.assertEqual(len(rows), 4)
        self.assertEqual({row["seed"] for row in rows}, {"1", "2"})
        self.assertTrue(all(row["source"] == "sim" and row["tau"] == "" for row in rows))

    def test_seed_count_must_be_positive(self):
        code, _ = invoke("sim", "--seeds", "0", "--duration", "0.1")
        self.assertEqual(code, EXIT_CONFIG)

    def test_multi_ac_scenario_is_rejected_by_simulator(self):
        code, _ = invoke("sim", "--config", "multi_ac", "--duration", "0.1")
        self.assertEqual(code, EXIT_CONFIG)


if __name__ == "__main__":
    unittest.main()
