import csv
import io
import json
import subprocess
import sys

import pytest

from renyi_ib.cli import EXIT_INFEASIBLE, EXIT_OK, EXIT_VALIDATION, joint_digest, load_joint, main, parse_beta_grid
from renyi_ib.errors import ValidationError

TABLE_DOC = {
    "y_labels": ["1", "2", "3", "4"],
    "x_labels": ["1", "2", "3", "4", "5"],
    "pyx": [
        ["1/4", 0, 0, 0, 0],
        [0, "1/8", "1/8", 0, 0],
        [0, "1/8", "1/8", 0, 0],
        [0, 0, 0, "1/8", "1/8"],
    ],
}


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def write(tmp_path, doc, name="joint.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestLoad:
    def test_table_file_matches_builtin(self, tmp_path, t1a):
        j = load_joint(write(tmp_path, TABLE_DOC))
        assert joint_digest(j) == joint_digest(t1a)

    def test_info(self, tmp_path):
        code, out = run("info", write(tmp_path, TABLE_DOC))
        assert code == EXIT_OK
        assert "H(X) = 2.25 bits" in out and "I(Y;X) = 1.5 bits" in out

    def test_bad_sum(self, tmp_path):
        doc = {"pyx": [[0.4, 0.5]]}
        with pytest.raises(ValidationError, match="sum=0.900000"):
            load_joint(write(tmp_path, doc))

    def test_negative_cell_named(self, tmp_path):
        doc = {"y_labels": ["a", "b"], "x_labels": ["u", "v"], "pyx": [[0.6, 0.5], [0.0, -0.1]]}
        with pytest.raises(ValidationError, match=r"row 1 \(y=b\), column 1 \(x=v\)"):
            load_joint(write(tmp_path, doc))

    def test_ragged(self, tmp_path):
        with pytest.raises(ValidationError, match="row 1 has 1 entries"):
            load_joint(write(tmp_path, {"pyx": [[0.5, 0.25], [0.25]]}))

    def test_bad_json(self, tmp_path):
        p = tmp_path / "x.json"
        p.write_text("{")
        with pytest.raises(ValidationError, match="not valid JSON"):
            load_joint(str(p))

    def test_missing(self):
        with pytest.raises(ValidationError, match="no such"):
            load_joint("/nonexistent/joint.json")

    def test_validation_exit_code(self, tmp_path, capsys):
        code, _ = run("info", write(tmp_path, {"pyx": [[0.4, 0.5]]}))
        assert code == EXIT_VALIDATION
        assert "sum=0.900000" in capsys.readouterr().err

    def test_beta_grid(self):
        assert parse_beta_grid("0, 1/2, 4") == (0.0, 0.5, 4.0)
        assert parse_beta_grid("default")[0] == 0.0
        with pytest.raises(ValidationError):
            parse_beta_grid("a,b")


class TestFrontier:
    def test_two_clusters(self, tmp_path):
        out = tmp_path / "out"
        code, _ = run("frontier", "table1a", "--alpha", "1", "--M", "2", "--out", str(out))
        assert code == EXIT_OK
        env = rows((out / "envelope.csv").read_text())
        assert [(r["gamma"], r["eta"], r["is_vertex"]) for r in env] == [("0", "0", "1"), ("1", "1", "1")]
        pts = rows((out / "points.csv").read_text())
        assert list(pts[0]) == ["gamma", "eta", "alpha", "M", "source", "map"]
        assert {r["source"] for r in pts} == {"bruteforce"}
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "frontier" and manifest["config"]["M"] == 2

    def test_half_order_flat_start(self):
        code, out = run("frontier", "table1a", "--alpha", "0.5", "--M", "3")
        assert code == EXIT_OK
        last = rows(out.split("\n", 1)[1])[-1]
        assert float(last["gamma"]) == pytest.approx(1.5431066063272, abs=1e-11)

    def test_single_cluster(self):
        code, out = run("frontier", "table1a", "--M", "1")
        assert code == EXIT_OK
        assert rows(out.split("\n", 1)[1]) == [{"gamma": "0", "eta": "0", "is_vertex": "1"}]

    def test_grid_rows(self):
        _, out = run("frontier", "table1a", "--M", "2", "--grid", "5")
        env = rows(out.split("\n", 1)[1])
        assert sum(r["is_vertex"] == "0" for r in env) == 3  # 0 and 1 are already vertices

    def test_cap(self, tmp_path, capsys):
        doc = {"pyx": [[1 / 12] * 12]}
        code, _ = run("frontier", write(tmp_path, doc), "--M", "5")
        assert code == EXIT_INFEASIBLE
        assert "5^12" in capsys.readouterr().err

    def test_bad_order(self):
        assert run("frontier", "table1a", "--alpha", "1.5")[0] == EXIT_VALIDATION

    def test_usage_error_is_validation(self):
        with pytest.raises(SystemExit) as exc:
            main(["frontier", "table1a", "--M", "two"])
        assert exc.value.code == EXIT_VALIDATION


class TestSolve:
    def test_byte_identical(self, tmp_path):
        outs = []
        for k in range(2):
            d = tmp_path / f"run{k}"
            code, _ = run("solve", "table1a", "--alpha", "0.5", "--M", "3", "--restarts", "3", "--seed", "7", "--out", str(d))
            assert code == EXIT_OK
            outs.append({n: (d / n).read_bytes() for n in ("points.csv", "envelope.csv", "runs.csv", "manifest.json")})
        assert outs[0] == outs[1]

    def test_run_log(self, tmp_path):
        d = tmp_path / "solve"
        run("solve", "table1a", "--M", "2", "--beta-grid", "0,2", "--restarts", "1", "--out", str(d))
        log = rows((d / "runs.csv").read_text())
        assert len(log) == 2 * 3
        assert {r["init"] for r in log} == {"identity", "greedy", "random0"}
        env = rows((d / "envelope.csv").read_text())
        assert [(r["gamma"], r["eta"]) for r in env] == [("0", "0"), ("1", "1")]


class TestTimeshare:
    def test_midpoint(self):
        code, out = run("timeshare", "table1a", "--M", "3", "--gamma", "0.75", "--n", "10000")
        assert code == EXIT_OK
        assert "analytic (gamma_n, eta_n) = (0.75, 0.75)" in out
        assert "map 12233" in out

    def test_simulated(self):
        code, out = run("timeshare", "table1a", "--M", "3", "--gamma", "0.75", "--n", "2000", "--simulate", "--seed", "3")
        assert code == EXIT_OK and "simulated" in out

    def test_negative_gamma(self):
        assert run("timeshare", "table1a", "--M", "3", "--gamma", "-1")[0] == EXIT_VALIDATION


@pytest.mark.parametrize("name", ["table1a", "example1", "example2"])
def test_demo(name):
    code, out = run("demo", name)
    assert code == EXIT_OK
    assert "FAIL" not in out and out.count("PASS") >= 3


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "renyi_ib.cli", "info", "table1a"], capture_output=True, text=True)
    assert proc.returncode == 0 and "I(Y;X) = 1.5 bits" in proc.stdout
