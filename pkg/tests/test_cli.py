"""End-to-end CLI behavior: formats, exit codes, determinism."""

import json
import os
import subprocess
import sys

import pytest

from mpoly import build_instance, parse_graph
from mpoly.cli import run_pipeline
from mpoly.linalg import matrices_to_json

import corpus

C5_TEXT = "c five cycle\np edge 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 1\n"
K3_TEXT = "p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n"
MMATRIX_JSON = '{"n":2,"entries":[["2","-1"],["-1","2"]],"exact":true}\n'
NOT_MMATRIX_JSON = '{"n":2,"entries":[["1","-2"],["-2","1"]],"exact":true}\n'


def mpoly_cmd(*args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "mpoly", *args],
        capture_output=True,
        text=True,
        env=env,
    )


@pytest.fixture
def workspace(tmp_path):
    (tmp_path / "c5.col").write_text(C5_TEXT)
    (tmp_path / "k3.col").write_text(K3_TEXT)
    (tmp_path / "good.json").write_text(MMATRIX_JSON)
    (tmp_path / "bad_matrix.json").write_text(NOT_MMATRIX_JSON)
    (tmp_path / "garbage.json").write_text("{not json")
    return tmp_path


class TestCertifyCommand:
    def test_yes_exit_zero(self, workspace):
        res = mpoly_cmd("certify", str(workspace / "good.json"), "--json")
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert payload["consensus"] == "YES"
        assert set(payload["verdicts"]) == {
            "E17",
            "D16",
            "N38",
            "POS_STABLE",
            "RHO_SPLIT",
        }

    def test_no_exit_one(self, workspace):
        res = mpoly_cmd("certify", str(workspace / "bad_matrix.json"))
        assert res.returncode == 1

    def test_malformed_input_exit_65(self, workspace):
        res = mpoly_cmd("certify", str(workspace / "garbage.json"))
        assert res.returncode == 65

    def test_missing_file_exit_65(self, workspace):
        res = mpoly_cmd("certify", str(workspace / "nope.json"))
        assert res.returncode == 65


class TestReduceCommand:
    def test_reduce_is_byte_idempotent(self, workspace):
        first = mpoly_cmd("reduce", str(workspace / "c5.col"), "2")
        second = mpoly_cmd("reduce", str(workspace / "c5.col"), "2")
        assert first.returncode == 0
        assert first.stdout == second.stdout
        graph = parse_graph(C5_TEXT)
        expected = matrices_to_json(build_instance(graph, 2).gadgets)
        assert first.stdout == expected

    def test_corner_entry_for_empty_graph(self, tmp_path):
        (tmp_path / "e2.col").write_text("p edge 2 0\n")
        res = mpoly_cmd("reduce", str(tmp_path / "e2.col"), "2")
        assert res.returncode == 0
        assert '"1/2"' in res.stdout

    def test_j_zero_usage_error(self, workspace):
        res = mpoly_cmd("reduce", str(workspace / "c5.col"), "0")
        assert res.returncode == 64

    def test_j_too_large_usage_error(self, workspace):
        res = mpoly_cmd("reduce", str(workspace / "c5.col"), "6")
        assert res.returncode == 64


class TestCombineCommand:
    def test_round_trip_through_search_input(self, workspace, tmp_path):
        inst = tmp_path / "inst.json"
        mpoly_cmd("reduce", str(workspace / "c5.col"), "1", "-o", str(inst))
        res = mpoly_cmd(
            "combine",
            str(inst),
            "--weights",
            "1/5,1/5,1/5,1/5,1/5",
        )
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert payload["exact"] is True
        assert payload["entries"][5][5] == "1"

    def test_weight_count_mismatch(self, workspace, tmp_path):
        inst = tmp_path / "inst.json"
        mpoly_cmd("reduce", str(workspace / "c5.col"), "1", "-o", str(inst))
        res = mpoly_cmd("combine", str(inst), "--weights", "1/2,1/2")
        assert res.returncode == 64

    def test_bad_weights(self, workspace, tmp_path):
        inst = tmp_path / "inst.json"
        mpoly_cmd("reduce", str(workspace / "c5.col"), "1", "-o", str(inst))
        res = mpoly_cmd("combine", str(inst), "--weights", "1,1,1,1,1")
        assert res.returncode == 64


class TestOracleCommands:
    def test_alpha(self, workspace):
        res = mpoly_cmd("alpha", str(workspace / "c5.col"), "--json")
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert payload["alpha"] == 2
        assert len(payload["witness"]) == 2

    def test_ms_solve_deterministic(self, workspace):
        args = (
            "ms-solve",
            str(workspace / "c5.col"),
            "--restarts",
            "40",
            "--seed",
            "3",
            "--json",
        )
        first = mpoly_cmd(*args)
        second = mpoly_cmd(*args)
        assert first.returncode == 0
        assert first.stdout == second.stdout
        payload = json.loads(first.stdout)
        assert abs(payload["value"] - 0.5) < 1e-6
        assert payload["alpha_lower_bound"] == 2


class TestSearchCommands:
    def test_search_feasible_exit_zero(self, workspace, tmp_path):
        inst = tmp_path / "inst.json"
        mpoly_cmd("reduce", str(workspace / "c5.col"), "1", "-o", str(inst))
        res = mpoly_cmd("search", str(inst), "--json", "--seed", "0")
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert payload["status"] == "FEASIBLE"
        assert payload["certificate"] is not None
        assert payload["budget_spent"] > 0

    def test_search_unknown_exit_two(self, workspace, tmp_path):
        inst = tmp_path / "inst.json"
        mpoly_cmd("reduce", str(workspace / "k3.col"), "1", "-o", str(inst))
        res = mpoly_cmd("search", str(inst), "--json", "--budget", "3000")
        assert res.returncode == 2
        assert json.loads(res.stdout)["status"] == "UNKNOWN"

    def test_symmetric_infeasible_exit_one(self, tmp_path):
        mats = (
            '[{"n":2,"entries":[[-1.0,0.0],[0.0,-1.0]],"exact":false},'
            '{"n":2,"entries":[[-2.0,0.0],[0.0,-2.0]],"exact":false}]'
        )
        path = tmp_path / "neg.json"
        path.write_text(mats)
        res = mpoly_cmd("search", str(path), "--symmetric", "--json")
        assert res.returncode == 1
        assert json.loads(res.stdout)["status"] == "INFEASIBLE"

    def test_radius_min(self, tmp_path):
        mats = (
            '[{"n":2,"entries":[[0.0,1.0],[1.0,0.0]],"exact":false},'
            '{"n":2,"entries":[[0.0,0.0],[0.0,0.0]],"exact":false}]'
        )
        path = tmp_path / "nn.json"
        path.write_text(mats)
        res = mpoly_cmd("radius-min", str(path), "--json", "--budget", "2000")
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert payload["below_one"] is True
        assert payload["spectral_radius"] < 0.5

    def test_radius_min_negative_entry_is_input_error(self, tmp_path):
        path = tmp_path / "neg_entry.json"
        path.write_text('[{"n":1,"entries":[[-1.0]],"exact":false}]')
        res = mpoly_cmd("radius-min", str(path))
        assert res.returncode == 65

    def test_hurwitz(self, tmp_path):
        path = tmp_path / "negid.json"
        path.write_text('[{"n":2,"entries":[[-1.0,0.0],[0.0,-1.0]],"exact":false}]')
        res = mpoly_cmd("hurwitz-search", str(path), "--json")
        assert res.returncode == 0
        assert json.loads(res.stdout)["status"] == "FEASIBLE"


class TestPipelineCommand:
    def test_c5_j1_agree(self, workspace):
        res = mpoly_cmd("pipeline", str(workspace / "c5.col"), "1", "--json")
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert payload["verdict"] == "AGREE"
        assert payload["search"]["status"] == "FEASIBLE"
        assert payload["alpha"] == 2

    def test_c5_j2_agree_infeasible(self, workspace):
        res = mpoly_cmd("pipeline", str(workspace / "c5.col"), "2", "--json")
        assert res.returncode == 0
        payload = json.loads(res.stdout)
        assert payload["verdict"] == "AGREE"
        assert payload["search"]["status"] == "UNKNOWN"

    def test_k3_j1_agree(self, workspace):
        res = mpoly_cmd("pipeline", str(workspace / "k3.col"), "1", "--json")
        assert res.returncode == 0
        assert json.loads(res.stdout)["verdict"] == "AGREE"

    def test_identical_config_byte_identical_output(self, workspace):
        args = ("pipeline", str(workspace / "c5.col"), "1", "--json", "--seed", "5")
        assert mpoly_cmd(*args).stdout == mpoly_cmd(*args).stdout

    def test_run_pipeline_library_entry(self):
        report = run_pipeline(corpus.cycle(5), 1, budget=20_000, seed=0)
        assert report["verdict"] == "AGREE"
        assert report["exit_code"] == 0
        assert report["alpha"] == 2

    def test_oversized_graph_usage_error(self, tmp_path):
        path = tmp_path / "big.col"
        path.write_text("p edge 13 0\n")
        res = mpoly_cmd("pipeline", str(path), "1")
        assert res.returncode == 64


class TestGlobalFlags:
    def test_usage_error_is_64(self):
        assert mpoly_cmd("no-such-command").returncode == 64
        assert mpoly_cmd().returncode == 64

    def test_env_tolerance_applies(self, workspace):
        # a huge tolerance pushes every float margin into the MARGINAL band
        res = mpoly_cmd(
            "certify",
            str(workspace / "good.json"),
            "--float",
            env_extra={"MPOLY_TOL": "1000"},
        )
        assert res.returncode == 2

    def test_tol_flag_overrides_env(self, workspace):
        res = mpoly_cmd(
            "certify",
            str(workspace / "good.json"),
            "--float",
            "--tol",
            "1e-9",
            env_extra={"MPOLY_TOL": "1000"},
        )
        assert res.returncode == 0

    def test_bad_env_tolerance(self, workspace):
        res = mpoly_cmd(
            "certify",
            str(workspace / "good.json"),
            env_extra={"MPOLY_TOL": "banana"},
        )
        assert res.returncode == 64
