import csv
import json
import os

import pytest

from glassbench.cli import (
    ExperimentConfig,
    TopologyConfig,
    cmd_compare,
    cmd_isometry,
    cmd_scaling,
    load_config,
    main,
)
from glassbench.errors import ConfigError, NoOverlapError


def small_config(out_dir, **overrides) -> ExperimentConfig:
    base = dict(
        master_seed=7,
        sizes=(2, 3),
        instances_per_size=3,
        topologies=(TopologyConfig("chimera", (6, 6, 4)),
                    TopologyConfig("pegasus", (4,))),
        ladder=(2, 4, 8),
        batch_size=50,
        target_hits=10,
        max_batches=2,
        out_dir=str(out_dir),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def read_manifest(out_dir):
    with open(os.path.join(str(out_dir), "manifest.json")) as fh:
        return json.load(fh)


class TestConfig:
    def test_round_trip(self, tmp_path):
        config = small_config(tmp_path)
        loaded = ExperimentConfig.from_json(json.loads(json.dumps(config.to_json())))
        assert loaded == config
        assert loaded.hash() == config.hash()

    def test_env_seed_override(self, tmp_path, monkeypatch):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(small_config(tmp_path).to_json()))
        monkeypatch.setenv("GLASSBENCH_SEED", "99")
        config = load_config(str(path))
        assert config.master_seed == 99

    def test_rejects_unknown_keys(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json({"bogus": 1})

    def test_rejects_bad_ladder(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(ladder=(4, 2))


class TestFileCommands:
    def test_topology_and_validate_flow(self, tmp_path):
        graph_path = str(tmp_path / "graph.json")
        rc = main(["topology", "--family", "pegasus", "--shape", "4",
                   "--out", graph_path])
        assert rc == 0
        emb_path = str(tmp_path / "emb.json")
        rc = main(["embed", "--family", "pegasus", "--L", "2",
                   "--graph", graph_path, "--out", emb_path])
        assert rc == 0
        rc = main(["validate", "--emb", emb_path, "--graph", graph_path])
        assert rc == 0

    def test_validate_detects_corruption(self, tmp_path):
        graph_path = str(tmp_path / "graph.json")
        main(["topology", "--family", "pegasus", "--shape", "4",
              "--out", graph_path])
        emb_path = str(tmp_path / "emb.json")
        main(["embed", "--family", "pegasus", "--L", "2",
              "--graph", graph_path, "--out", emb_path])
        with open(emb_path) as fh:
            doc = json.load(fh)
        first = sorted(doc["chains"])[0]
        second = sorted(doc["chains"])[1]
        doc["chains"][second][0] = doc["chains"][first][0]  # duplicate a qubit
        with open(emb_path, "w") as fh:
            json.dump(doc, fh)
        rc = main(["validate", "--emb", emb_path, "--graph", graph_path])
        assert rc == 1

    def test_gen_and_solve(self, tmp_path):
        inst_dir = str(tmp_path / "instances")
        rc = main(["gen", "--L", "2", "--count", "2", "--seed", "3",
                   "--out", inst_dir])
        assert rc == 0
        files = sorted(os.listdir(inst_dir))
        assert len(files) == 2
        inst_path = os.path.join(inst_dir, files[0])
        rc = main(["solve", "--instance", inst_path, "--kind", "exact"])
        assert rc == 0
        out_path = str(tmp_path / "samples.jsonl")
        rc = main(["solve", "--instance", inst_path, "--kind", "sa-logical",
                   "--effort", "64", "--reads", "20", "--seed", "1",
                   "--out", out_path])
        assert rc == 0
        rows = [json.loads(line) for line in open(out_path)]
        assert sum(r["multiplicity"] for r in rows) == 20

    def test_topology_defects(self, tmp_path):
        graph_path = str(tmp_path / "graph.json")
        rc = main(["topology", "--family", "chimera", "--shape", "4,4,4",
                   "--defect-qubits", "3", "--defect-seed", "5",
                   "--out", graph_path])
        assert rc == 0
        with open(graph_path) as fh:
            doc = json.load(fh)
        assert len(doc["defects"]["qubits"]) == 3

    def test_bad_flags_exit_2(self, tmp_path):
        rc = main(["embed", "--family", "pegasus", "--L", "2",
                   "--graph", str(tmp_path / "missing.json"),
                   "--out", str(tmp_path / "emb.json")])
        assert rc == 2


class TestScaling:
    def test_small_run(self, tmp_path):
        config = small_config(tmp_path / "run")
        summary = cmd_scaling(config)
        out = tmp_path / "run"
        for rel in ("manifest.json", "summary/scaling_chimera.csv",
                    "summary/scaling_pegasus.csv", "summary/findings.json",
                    "curves/results_chimera.jsonl", "instances/L2.jsonl"):
            assert (out / rel).exists(), rel
        with open(out / "summary/scaling_pegasus.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["L"] for r in rows] == ["2", "3"]
        assert not summary["skips"]

    def test_capacity_skip_recorded(self, tmp_path):
        # pegasus(4) hosts sides <= 3; chimera(6,6,4) hosts sides <= 3;
        # size 4 must be skipped by both with a recorded reason
        config = small_config(tmp_path / "run", sizes=(2, 4))
        summary = cmd_scaling(config)
        skipped = {(s["family"], s["L"]) for s in summary["skips"]}
        assert ("chimera", 4) in skipped and ("pegasus", 4) in skipped
        assert all("CapacityExceeded" in s["reason"] for s in summary["skips"])

    def test_determinism(self, tmp_path):
        a = cmd_scaling(small_config(tmp_path / "a"))
        b = cmd_scaling(small_config(tmp_path / "b"))
        ha = read_manifest(tmp_path / "a")["outputs"]
        hb = read_manifest(tmp_path / "b")["outputs"]
        assert ha == hb

    def test_shared_instances_across_families(self, tmp_path):
        config = small_config(tmp_path / "run")
        cmd_scaling(config)
        out = tmp_path / "run"
        ids = {}
        for family in ("chimera", "pegasus"):
            with open(out / f"curves/results_{family}.jsonl") as fh:
                ids[family] = {json.loads(line)["instance_id"] for line in fh}
        assert ids["chimera"] == ids["pegasus"]


class TestIsometryCommand:
    def test_small_run(self, tmp_path):
        config = small_config(tmp_path / "iso", topologies=(
            TopologyConfig("pegasus", (4,)),))
        summary = cmd_isometry(config, L=2, count=1, effort=32)
        out = tmp_path / "iso"
        with open(out / "summary/isometry.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 48
        assert {int(r["isometry_index"]) for r in rows} == set(range(48))
        assert all(r["effort"] == "32" for r in rows)
        assert (out / "summary/isometry_ratio.csv").exists()
        assert (out / "summary/isometry_ratio_hist.csv").exists()

    def test_determinism(self, tmp_path):
        for name in ("a", "b"):
            config = small_config(tmp_path / name, topologies=(
                TopologyConfig("pegasus", (4,)),))
            cmd_isometry(config, L=2, count=1, effort=16)
        ha = read_manifest(tmp_path / "a")["outputs"]
        hb = read_manifest(tmp_path / "b")["outputs"]
        assert ha == hb


class TestCompare:
    def test_self_comparison(self, tmp_path):
        config = small_config(tmp_path / "run")
        cmd_scaling(config)
        results = str(tmp_path / "run/curves/results_pegasus.jsonl")
        out_csv = str(tmp_path / "speedup.csv")
        n = cmd_compare(results, results, out_csv)
        assert n > 0
        with open(out_csv) as fh:
            rows = list(csv.DictReader(fh))
        solved = [r for r in rows if r["ratio"] != "unsolved"]
        assert all(float(r["ratio"]) == 1.0 for r in solved)

    def test_no_overlap(self, tmp_path):
        a = tmp_path / "a.jsonl"
        b = tmp_path / "b.jsonl"
        a.write_text(json.dumps({"instance_id": "x", "solved": True,
                                 "t_opt": 2, "tts_opt": 1.0}) + "\n")
        b.write_text(json.dumps({"instance_id": "y", "solved": True,
                                 "t_opt": 2, "tts_opt": 1.0}) + "\n")
        with pytest.raises(NoOverlapError):
            cmd_compare(str(a), str(b), str(tmp_path / "out.csv"))
