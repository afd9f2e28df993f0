"""Command-line benchmark harness.

Subcommands
-----------
topology   build a (working) graph and write its JSON document
gen        generate random lattice instances
embed      build an embedding for a lattice size, repaired to the graph
validate   re-check an embedding file against a graph file
solve      sample one instance (exact, or SA on the logical/physical problem)
scaling    full size-scaling study across both embedding families
compare    instance-to-instance TTS ratios between two result files
isometry   TTS consistency across the 48 cube isometries
verify     run the built-in invariant suite

All experiment commands are driven by an ExperimentConfig (JSON file plus
flag overrides), derive every random stream from the master seed, and write
a manifest with SHA-256 hashes of every output so reruns can be compared
byte for byte.  The environment variable GLASSBENCH_SEED overrides the
master seed.  Exit codes: 0 ok, 1 verification failure, 2 configuration
error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass

from . import __version__, checks
from .embedding import (
    embed_cubic,
    embedding_from_json,
    embedding_to_json,
    maximize_yield,
    set_parameters,
    validate_embedding,
)
from .errors import CapacityExceededError, ConfigError, GlassbenchError, NoOverlapError
from .lattice import (
    LatticeSpec,
    LogicalGraph,
    apply_isometry,
    build_lattice,
    enumerate_isometries,
    generate_instance,
    instance_from_json,
    instance_to_json,
)
from .metrics import (
    InstanceResult,
    aggregate,
    isometry_consistency,
    run_protocol_raw,
    select_optimal,
    speedup_pairs,
)
from .rng import spawn_seeds
from .sampler import (
    GroundTruthRegistry,
    SamplerConfig,
    sample_sa,
    solve_exact,
)
from .topology import (
    build_graph,
    graph_from_json,
    graph_stats,
    graph_to_json,
    sample_defect_mask,
    apply_defects,
)

# Ratio histogram bin edges for the isometry study: half-powers of two from
# 1 to 256; ratios beyond the last edge land in the final bin.
RATIO_BIN_EDGES = tuple(2 ** (i / 2) for i in range(17))


@dataclass(frozen=True)
class TopologyConfig:
    family: str
    shape: tuple[int, ...]
    defect_qubits: int = 0
    defect_couplers: int = 0

    def label(self) -> str:
        return self.family


@dataclass(frozen=True)
class ExperimentConfig:
    """Defaults mirror the benchmark protocol: 100 instances per size,
    batches of 500 reads, 50 target hits, effort ladder 2..256."""

    master_seed: int = 1
    sizes: tuple[int, ...] = (5, 6, 7, 8, 9, 10)
    instances_per_size: int = 100
    topologies: tuple[TopologyConfig, ...] = (
        TopologyConfig("chimera", (16, 16, 4)),
        TopologyConfig("pegasus", (16,)),
    )
    ladder: tuple[int, ...] = (2, 4, 8, 16, 32, 64, 128, 256)
    batch_size: int = 500
    target_hits: int = 50
    max_batches: int = 10
    chain_strength: float = 2.0
    beta_min: float = 0.1
    beta_max: float = 10.0
    yield_passes: int = 20
    out_dir: str = "out"
    parallelism: int = 1

    def __post_init__(self):
        positive = {"instances_per_size": self.instances_per_size,
                    "batch_size": self.batch_size,
                    "target_hits": self.target_hits,
                    "max_batches": self.max_batches,
                    "parallelism": self.parallelism}
        for name, value in positive.items():
            if value < 1:
                raise ConfigError(f"{name} must be >= 1")
        if list(self.ladder) != sorted(set(self.ladder)) or self.ladder[0] < 1:
            raise ConfigError("ladder must be positive and strictly increasing")
        if not self.sizes:
            raise ConfigError("no lattice sizes configured")

    def to_json(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["topologies"] = [dataclasses.asdict(t) for t in self.topologies]
        return doc

    @staticmethod
    def from_json(doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        topos = []
        for t in doc.pop("topologies", ()):
            t = dict(t)
            t["shape"] = tuple(t["shape"])
            topos.append(TopologyConfig(**t))
        kwargs = {}
        for f in dataclasses.fields(ExperimentConfig):
            if f.name == "topologies":
                continue
            if f.name in doc:
                value = doc.pop(f.name)
                if f.name in ("sizes", "ladder"):
                    value = tuple(value)
                kwargs[f.name] = value
        if doc:
            raise ConfigError(f"unknown config keys: {sorted(doc)}")
        if topos:
            kwargs["topologies"] = tuple(topos)
        return ExperimentConfig(**kwargs)

    def hash(self) -> str:
        payload = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


def load_config(path: str | None, **overrides) -> ExperimentConfig:
    doc = {}
    if path:
        with open(path) as fh:
            doc = json.load(fh)
    config = ExperimentConfig.from_json(doc)
    env_seed = os.environ.get("GLASSBENCH_SEED")
    if env_seed is not None:
        overrides.setdefault("master_seed", int(env_seed))
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        config = dataclasses.replace(config, **overrides)
    return config


# --------------------------------------------------------------------------
# Output plumbing
# --------------------------------------------------------------------------

class OutputTree:
    """Writes under out/{graphs,embeddings,instances,samples,curves,summary}
    and records a SHA-256 per file for the manifest."""

    STAGES = ("graphs", "embeddings", "instances", "samples", "curves", "summary")

    def __init__(self, root: str):
        self.root = root
        self.hashes: dict[str, str] = {}
        os.makedirs(root, exist_ok=True)
        for stage in self.STAGES:
            os.makedirs(os.path.join(root, stage), exist_ok=True)

    def path(self, rel: str) -> str:
        return os.path.join(self.root, rel)

    def write_text(self, rel: str, text: str):
        data = text.encode()
        with open(self.path(rel), "wb") as fh:
            fh.write(data)
        self.hashes[rel] = hashlib.sha256(data).hexdigest()

    def write_json(self, rel: str, doc):
        self.write_text(rel, json.dumps(doc, indent=1, sort_keys=True) + "\n")

    def write_jsonl(self, rel: str, rows):
        self.write_text(rel, "".join(
            json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n"
            for r in rows))

    def write_csv(self, rel: str, header: list[str], rows):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
        self.write_text(rel, buf.getvalue())

    def write_manifest(self, config: ExperimentConfig, extra: dict):
        doc = {
            "version": __version__,
            "config": config.to_json(),
            "config_hash": config.hash(),
            "outputs": dict(sorted(self.hashes.items())),
            "generated_unix_time": int(time.time()),
        }
        doc.update(extra)
        with open(self.path("manifest.json"), "w") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")


def _fmt(value: float | None) -> str:
    if value is None or (isinstance(value, float) and math.isinf(value)):
        return "unsolved"
    return repr(float(value))


def _seed_word(master: int, *tags) -> int:
    return int(spawn_seeds(1, master, *tags)[0])


# --------------------------------------------------------------------------
# Experiment core shared by scaling / isometry
# --------------------------------------------------------------------------

def _build_working_graphs(config: ExperimentConfig, out: OutputTree | None):
    graphs = {}
    for topo in config.topologies:
        ideal = build_graph(topo.family, topo.shape)
        working = ideal
        if topo.defect_qubits or topo.defect_couplers:
            mask = sample_defect_mask(ideal, topo.defect_qubits,
                                      topo.defect_couplers,
                                      seed=_seed_word(config.master_seed,
                                                      "defects", topo.family))
            working = apply_defects(ideal, mask)
        graphs[topo.family] = (ideal, working)
        if out is not None:
            out.write_json(f"graphs/{topo.family}.json", graph_to_json(working))
    return graphs


def _embed_for_size(config: ExperimentConfig, graphs, L: int):
    """Per family: (logical graph, embedding, yield report) or a skip reason."""
    spec = LatticeSpec(L, L, L)
    embedded, skipped = {}, {}
    for topo in config.topologies:
        ideal, working = graphs[topo.family]
        try:
            template = embed_cubic(spec, ideal)
        except CapacityExceededError as exc:
            skipped[topo.family] = f"CapacityExceeded: {exc}"
            continue
        logical, emb, report = maximize_yield(
            template, working,
            seed=_seed_word(config.master_seed, "yield", topo.family, L),
            passes=config.yield_passes)
        embedded[topo.family] = (logical, emb, report)
    return spec, embedded, skipped


def _shared_logical(embedded) -> LogicalGraph:
    logicals = [logical for logical, _, _ in embedded.values()]
    shared = logicals[0]
    for other in logicals[1:]:
        shared = shared.intersect(other)
    return shared


def _protocol_for(config: ExperimentConfig, instance, problem, family: str,
                  L: int, index: int, registry, ladder=None, target_hits=None,
                  max_batches=None, registry_key=None):
    template = SamplerConfig(
        kind="sa-physical", effort=config.ladder[0], reads=config.batch_size,
        seed=_seed_word(config.master_seed, "sampler", family, L, index),
        beta_min=config.beta_min, beta_max=config.beta_max)
    raw, _ = run_protocol_raw(
        instance, problem, template,
        ladder=list(ladder if ladder is not None else config.ladder),
        batch_size=config.batch_size,
        target_hits=target_hits if target_hits is not None else config.target_hits,
        max_batches=max_batches if max_batches is not None else config.max_batches,
        registry=registry, sampler=sample_sa, registry_key=registry_key)
    return raw


def _curve_rows(key: str, L: int, family: str, curve) -> dict:
    result = select_optimal(curve)
    return {
        "instance_id": key,
        "L": L,
        "family": family,
        "points": [{"effort": p.effort, "reads": p.estimate.reads,
                    "hits": p.estimate.hits,
                    "tts": (None if not p.solved else p.tts),
                    "batches": p.batches,
                    "target_reached": p.target_reached}
                   for p in curve.points],
        "solved": result.solved,
        "t_opt": result.t_opt,
        "tts_opt": (None if not result.solved else result.tts_opt),
    }


def _raw_sample_rows(raw, family: str, L: int):
    for effort, energy_chunks, mult_chunks, _ in raw.per_effort:
        for b, (energies, mults) in enumerate(zip(energy_chunks, mult_chunks)):
            yield {
                "instance_id": raw.key, "family": family, "L": L,
                "effort": effort, "batch": b,
                "energies": [float(e) for e in energies],
                "multiplicities": [int(m) for m in mults],
            }


def cmd_scaling(config: ExperimentConfig) -> dict:
    """Size-scaling study: embed, generate shared instances, run the batch
    protocol on every family that can host each size, aggregate TTS."""
    out = OutputTree(config.out_dir)
    graphs = _build_working_graphs(config, out)
    registry = GroundTruthRegistry()
    skips: list[dict] = []
    results: dict[str, dict[int, list[InstanceResult]]] = {
        t.family: {} for t in config.topologies}
    curve_rows: dict[str, list] = {t.family: [] for t in config.topologies}
    sample_rows: dict[str, list] = {t.family: [] for t in config.topologies}
    yields: list[dict] = []

    for L in config.sizes:
        spec, embedded, skipped = _embed_for_size(config, graphs, L)
        for family, reason in skipped.items():
            skips.append({"L": L, "family": family, "reason": reason})
        if not embedded:
            continue
        for family, (logical, emb, report) in sorted(embedded.items()):
            yields.append({"L": L, "family": family,
                           "sites": f"{report.embedded_sites}/{report.total_sites}",
                           "edges": f"{report.embedded_edges}/{report.total_edges}"})
            out.write_json(f"embeddings/{family}_L{L}.json", embedding_to_json(emb))
        shared = _shared_logical(embedded)
        instances = [
            generate_instance(shared, seed=_seed_word(config.master_seed,
                                                      "instance", L, i))
            for i in range(config.instances_per_size)]
        out.write_jsonl(f"instances/L{L}.jsonl",
                        (instance_to_json(inst) for inst in instances))

        for family in sorted(embedded):
            results[family][L] = []
        for i, instance in enumerate(instances):
            raws = {}
            for family in sorted(embedded):
                _, emb, _ = embedded[family]
                problem = set_parameters(instance, emb, config.chain_strength)
                raws[family] = _protocol_for(config, instance, problem,
                                             family, L, i, registry)
            # both families ran: recount against the shared presumed optimum
            target = registry.best(instance.id)
            registry.clear_invalidated(instance.id)
            for family, raw in sorted(raws.items()):
                curve = raw.finalize(target, config.target_hits)
                results[family][L].append(select_optimal(curve))
                curve_rows[family].append(_curve_rows(instance.id, L, family, curve))
                sample_rows[family].extend(_raw_sample_rows(raw, family, L))

    findings = _emit_scaling_outputs(config, out, results, curve_rows,
                                     sample_rows, skips, yields)
    out.write_manifest(config, {"skips": skips, "findings": findings})
    return {"out_dir": config.out_dir, "skips": skips, "findings": findings}


def _emit_scaling_outputs(config, out, results, curve_rows, sample_rows,
                          skips, yields) -> list[dict]:
    for family, rows in sorted(curve_rows.items()):
        if rows:
            out.write_jsonl(f"curves/results_{family}.jsonl", rows)
    for family, rows in sorted(sample_rows.items()):
        if rows:
            out.write_jsonl(f"samples/energies_{family}.jsonl", rows)
    out.write_csv("summary/yields.csv", ["L", "family", "sites", "edges"],
                  [[y["L"], y["family"], y["sites"], y["edges"]] for y in yields])

    medians: dict[str, dict[int, float]] = {}
    for family, per_size in sorted(results.items()):
        rows = []
        medians[family] = {}
        for L, instance_results in sorted(per_size.items()):
            solved = [r for r in instance_results if r.solved]
            if solved:
                stats = aggregate(instance_results, L)
                medians[family][L] = stats.median
                rows.append([L, stats.n_instances, stats.n_unsolved,
                             _fmt(stats.p10), _fmt(stats.p25), _fmt(stats.median),
                             _fmt(stats.p75), _fmt(stats.p90)])
            else:
                rows.append([L, len(instance_results), len(instance_results),
                             "unsolved", "unsolved", "unsolved", "unsolved",
                             "unsolved"])
        if rows:
            out.write_csv(
                f"summary/scaling_{family}.csv",
                ["L", "n_instances", "n_unsolved", "p10", "p25", "median",
                 "p75", "p90"], rows)

    findings = []
    for family, by_size in sorted(medians.items()):
        sizes = sorted(by_size)
        monotone = all(by_size[a] <= by_size[b]
                       for a, b in zip(sizes, sizes[1:]))
        findings.append({"check": "median-tts-monotone-in-L", "family": family,
                         "medians": {str(L): by_size[L] for L in sizes},
                         "ok": monotone})
    shared_sizes = set.intersection(*(set(m) for m in medians.values())) \
        if len(medians) > 1 and all(medians.values()) else set()
    if shared_sizes and {"chimera", "pegasus"} <= set(medians):
        L = max(shared_sizes)
        ok = medians["pegasus"][L] <= medians["chimera"][L]
        findings.append({
            "check": "short-chain-median-tts-not-worse", "L": L,
            "pegasus_median": medians["pegasus"][L],
            "chimera_median": medians["chimera"][L], "ok": ok})
    out.write_json("summary/findings.json", findings)
    return findings


def cmd_isometry(config: ExperimentConfig, L: int, count: int, effort: int,
                 families: tuple[str, ...] | None = None) -> dict:
    """Run each instance under all 48 cube isometries at one fixed effort."""
    out = OutputTree(config.out_dir)
    graphs = _build_working_graphs(config, out)
    spec, embedded, skipped = _embed_for_size(config, graphs, L)
    if families:
        embedded = {f: v for f, v in embedded.items() if f in families}
    if not embedded:
        raise ConfigError(f"no family can embed L={L}: {skipped}")
    for family, (logical, emb, report) in sorted(embedded.items()):
        if report.site_yield < 1.0 or report.edge_yield < 1.0:
            raise GlassbenchError(
                f"NotFullCube: {family} yield {report.embedded_sites}/{report.total_sites} "
                f"sites -- the isometry study needs a defect-free embedding")

    isometries = enumerate_isometries()
    lattice = build_lattice(spec)
    registry = GroundTruthRegistry()
    iso_rows, ratio_rows = [], []
    for family, (logical, emb, _) in sorted(embedded.items()):
        for i in range(count):
            base = generate_instance(
                lattice, seed=_seed_word(config.master_seed, "iso-instance", L, i))
            raws = []
            for g_index, g in enumerate(isometries):
                moved = apply_isometry(base, g) if g_index else base
                problem = set_parameters(moved, emb, config.chain_strength)
                raw = _protocol_for(
                    config, moved, problem, family, L,
                    index=i * len(isometries) + g_index, registry=registry,
                    ladder=[effort], registry_key=base.id)
                raws.append(raw)
            target = registry.best(base.id)
            registry.clear_invalidated(base.id)
            per_iso = []
            for g_index, raw in enumerate(raws):
                curve = raw.finalize(target, config.target_hits)
                result = select_optimal(curve)
                per_iso.append(result)
                point = curve.points[0]
                iso_rows.append([base.id, family, g_index, effort,
                                 point.estimate.reads, point.estimate.hits,
                                 _fmt(None if not result.solved else result.tts_opt)])
            summary = isometry_consistency(per_iso, effort)
            ratio_rows.append([base.id, family, _fmt(summary.median),
                               _fmt(summary.best), _fmt(summary.worst),
                               _fmt(summary.ratio), summary.n_unsolved])

    out.write_csv("summary/isometry.csv",
                  ["instance_id", "family", "isometry_index", "effort",
                   "reads", "hits", "tts"], iso_rows)
    out.write_csv("summary/isometry_ratio.csv",
                  ["instance_id", "family", "median", "best", "worst",
                   "ratio", "n_unsolved"], ratio_rows)
    _emit_ratio_histogram(out, ratio_rows)
    out.write_manifest(config, {"isometry": {"L": L, "count": count,
                                             "effort": effort}})
    return {"out_dir": config.out_dir, "rows": len(iso_rows)}


def _emit_ratio_histogram(out: OutputTree, ratio_rows):
    """Histogram of worst/best ratios over fixed log-spaced bins (2^(i/2))."""
    by_family: dict[str, list[float]] = {}
    for row in ratio_rows:
        if row[5] != "unsolved":
            by_family.setdefault(row[1], []).append(float(row[5]))
    rows = []
    for family, ratios in sorted(by_family.items()):
        counts = [0] * (len(RATIO_BIN_EDGES) - 1)
        for r in ratios:
            for b in range(len(counts)):
                if RATIO_BIN_EDGES[b] <= r < RATIO_BIN_EDGES[b + 1]:
                    counts[b] += 1
                    break
            else:
                counts[-1] += 1  # beyond the last edge
        for b, count in enumerate(counts):
            rows.append([family, repr(RATIO_BIN_EDGES[b]),
                         repr(RATIO_BIN_EDGES[b + 1]), count])
    out.write_csv("summary/isometry_ratio_hist.csv",
                  ["family", "bin_low", "bin_high", "count"], rows)


def cmd_compare(path_a: str, path_b: str, out_path: str) -> int:
    """Instance-to-instance TTS ratio CSV from two results JSONL files."""
    results_a = _load_results(path_a)
    results_b = _load_results(path_b)
    rows = speedup_pairs(results_a, results_b)
    if not rows:
        raise NoOverlapError(f"{path_a} and {path_b} share no instance ids")
    lines = []
    for row in rows:
        ratio = row.ratio
        lines.append([row.instance_id, _fmt(row.tts_a), _fmt(row.tts_b),
                      _fmt(ratio)])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["instance_id", "tts_a", "tts_b", "ratio"])
    writer.writerows(lines)
    os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
    with open(out_path, "w") as fh:
        fh.write(buf.getvalue())
    return len(lines)


def _load_results(path: str) -> list[InstanceResult]:
    results = []
    with open(path) as fh:
        for line in fh:
            doc = json.loads(line)
            tts_opt = doc.get("tts_opt")
            results.append(InstanceResult(
                doc["instance_id"], bool(doc["solved"]), doc.get("t_opt"),
                math.inf if tts_opt is None else float(tts_opt)))
    return results


# --------------------------------------------------------------------------
# argparse front end
# --------------------------------------------------------------------------

def _parse_shape(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="glassbench",
        description="Benchmark harness for minor-embedded 3D spin glasses")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("topology", help="build a hardware graph")
    p.add_argument("--family", required=True, choices=("chimera", "pegasus"))
    p.add_argument("--shape", required=True, type=_parse_shape,
                   help="chimera: rows,cols,shore; pegasus: m")
    p.add_argument("--defect-seed", type=int, default=None)
    p.add_argument("--defect-qubits", type=int, default=0)
    p.add_argument("--defect-couplers", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("gen", help="generate random instances")
    p.add_argument("--L", required=True, type=int)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("embed", help="embed a cubic lattice into a graph")
    p.add_argument("--family", choices=("chimera", "pegasus"))
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--seed", type=int, default=0, help="yield-repair seed")
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate", help="validate an embedding file")
    p.add_argument("--emb", required=True)
    p.add_argument("--graph", required=True)

    p = sub.add_parser("solve", help="sample one instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--emb")
    p.add_argument("--graph")
    p.add_argument("--kind", default="sa-logical",
                   choices=("exact", "sa-logical", "sa-physical"))
    p.add_argument("--effort", type=int, default=64)
    p.add_argument("--reads", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chain-strength", type=float, default=2.0)
    p.add_argument("--out", help="write the sample set as JSONL")

    p = sub.add_parser("scaling", help="size-scaling study")
    p.add_argument("--config")
    p.add_argument("--sizes", type=_parse_shape)
    p.add_argument("--instances", type=int, dest="instances_per_size")
    p.add_argument("--seed", type=int, dest="master_seed")
    p.add_argument("--max-batches", type=int, dest="max_batches")
    p.add_argument("--out", dest="out_dir")

    p = sub.add_parser("compare", help="instance-to-instance TTS ratios")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("isometry", help="48-isometry consistency study")
    p.add_argument("--config")
    p.add_argument("--L", type=int, default=4)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--effort", type=int, default=128)
    p.add_argument("--family", choices=("chimera", "pegasus"))
    p.add_argument("--seed", type=int, dest="master_seed")
    p.add_argument("--out", dest="out_dir")

    sub.add_parser("verify", help="run the built-in invariant suite")

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, NoOverlapError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "topology":
        graph = build_graph(args.family, args.shape)
        if args.defect_qubits or args.defect_couplers:
            seed = args.defect_seed if args.defect_seed is not None else 0
            mask = sample_defect_mask(graph, args.defect_qubits,
                                      args.defect_couplers, seed)
            graph = apply_defects(graph, mask)
        with open(args.out, "w") as fh:
            json.dump(graph_to_json(graph), fh, indent=1, sort_keys=True)
            fh.write("\n")
        stats = graph_stats(graph)
        print(f"{args.family}{graph.shape}: {stats['n_qubits']} qubits, "
              f"{stats['n_couplers']} couplers, "
              f"max degree {max(stats['degree_histogram'])}, "
              f"bipartite={stats['bipartite']}")
        return 0

    if args.command == "gen":
        os.makedirs(args.out, exist_ok=True)
        lattice = build_lattice(LatticeSpec(args.L, args.L, args.L))
        for i in range(args.count):
            inst = generate_instance(
                lattice, seed=_seed_word(args.seed, "instance", args.L, i))
            path = os.path.join(args.out, f"{inst.id}.json")
            with open(path, "w") as fh:
                json.dump(instance_to_json(inst), fh, sort_keys=True)
                fh.write("\n")
        print(f"wrote {args.count} instances to {args.out}")
        return 0

    if args.command == "embed":
        with open(args.graph) as fh:
            graph = graph_from_json(json.load(fh))
        if args.family and args.family != graph.family:
            raise ConfigError(f"graph file is {graph.family}, not {args.family}")
        spec = LatticeSpec(args.L, args.L, args.L)
        ideal = build_graph(graph.family, graph.shape)
        template = embed_cubic(spec, ideal)
        logical, emb, report = maximize_yield(template, graph, seed=args.seed)
        with open(args.out, "w") as fh:
            json.dump(embedding_to_json(emb), fh, sort_keys=True)
            fh.write("\n")
        print(f"embedded {report.embedded_sites}/{report.total_sites} sites, "
              f"{report.embedded_edges}/{report.total_edges} edges")
        return 0

    if args.command == "validate":
        with open(args.graph) as fh:
            graph = graph_from_json(json.load(fh))
        with open(args.emb) as fh:
            emb = embedding_from_json(json.load(fh), graph)
        logical = _logical_from_embedding(emb)
        report = validate_embedding(emb, graph, logical)
        if report.ok:
            print(f"embedding valid: {emb.n_sites} chains, "
                  f"{len(emb.edge_map)} edges")
            return 0
        print(f"embedding INVALID: {report.first_failure} "
              f"({len(report.failures)} failures)")
        return 1

    if args.command == "solve":
        return _cmd_solve(args)

    if args.command == "scaling":
        config = load_config(args.config, sizes=args.sizes,
                             instances_per_size=args.instances_per_size,
                             master_seed=args.master_seed,
                             max_batches=args.max_batches,
                             out_dir=args.out_dir)
        summary = cmd_scaling(config)
        print(f"scaling study complete: outputs in {summary['out_dir']}, "
              f"{len(summary['skips'])} skips")
        for finding in summary["findings"]:
            status = "ok" if finding["ok"] else "FINDING"
            print(f"  [{status}] {finding['check']}")
        return 0

    if args.command == "compare":
        n = cmd_compare(args.a, args.b, args.out)
        print(f"wrote {n} comparison rows to {args.out}")
        return 0

    if args.command == "isometry":
        config = load_config(args.config, master_seed=args.master_seed,
                             out_dir=args.out_dir)
        families = (args.family,) if args.family else None
        summary = cmd_isometry(config, args.L, args.count, args.effort,
                               families)
        print(f"isometry study complete: {summary['rows']} rows in "
              f"{summary['out_dir']}")
        return 0

    if args.command == "verify":
        results = checks.run_all()
        for r in results:
            status = "PASS" if r.ok else "FAIL"
            print(f"[{status}] {r.name} ({r.seconds:.1f}s): {r.detail}")
        return 0 if all(r.ok for r in results) else 1

    raise ConfigError(f"unknown command {args.command}")


def _logical_from_embedding(emb) -> LogicalGraph:
    from .lattice import edge_axis
    edges = {e: edge_axis(*e) for e in emb.edge_map}
    return LogicalGraph(emb.spec, frozenset(emb.chains), edges)


def _cmd_solve(args) -> int:
    with open(args.instance) as fh:
        instance = instance_from_json(json.load(fh))
    problem = instance
    emb = None
    if args.kind == "sa-physical":
        if not args.emb or not args.graph:
            raise ConfigError("sa-physical needs --emb and --graph")
        with open(args.graph) as fh:
            graph = graph_from_json(json.load(fh))
        with open(args.emb) as fh:
            emb = embedding_from_json(json.load(fh), graph)
        problem = set_parameters(instance, emb, args.chain_strength)
    if args.kind == "exact":
        energy, assignment, count = solve_exact(problem)
        print(f"exact minimum {energy} with {count} optima")
        return 0
    config = SamplerConfig(kind=args.kind, effort=args.effort,
                           reads=args.reads, seed=args.seed)
    samples = sample_sa(problem, config)
    registry = GroundTruthRegistry()
    from .sampler import count_ground_hits
    hits, reads, broken = count_ground_hits(
        samples, emb if args.kind == "sa-physical" else None, registry)
    print(f"best energy {samples.best_energy} "
          f"(logical best {registry.best(instance.id)}), "
          f"{hits}/{reads} reads at best, broken fraction {broken:.4f}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(samples.to_jsonl())
    return 0


if __name__ == "__main__":
    sys.exit(main())
