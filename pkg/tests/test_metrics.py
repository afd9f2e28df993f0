import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glassbench.errors import DomainError, EmptyGroupError, WrongCountError
from glassbench.lattice import Instance, LatticeSpec, build_lattice
from glassbench.metrics import (
    EffortPoint,
    InstanceResult,
    SuccessEstimate,
    TTSCurve,
    aggregate,
    isometry_consistency,
    run_protocol,
    select_optimal,
    speedup_pairs,
    tts,
)
from glassbench.rng import stream
from glassbench.sampler import GroundTruthRegistry, SampleSet, SamplerConfig


def pair_instance():
    graph = build_lattice(LatticeSpec(2, 1, 1))
    return Instance(graph, {((0, 0, 0), (1, 0, 0)): 1}, seed=0, id="pair")


def bernoulli_stub(p, hit_energy=-1.0, miss_energy=1.0):
    """Sampler stub with known constant ground-state probability.

    Emits real configurations of the two-spin antiferromagnet: (+1,-1) is a
    ground state (energy -1), (+1,+1) an excited state (+1).
    """

    def sampler(problem, config):
        rng = stream(config.seed, "stub")
        hits = int(rng.binomial(config.reads, p))
        misses = config.reads - hits
        states, energies, mult = [], [], []
        if hits:
            states.append([1, -1])
            energies.append(hit_energy)
            mult.append(hits)
        if misses:
            states.append([1, 1])
            energies.append(miss_energy)
            mult.append(misses)
        return SampleSet(problem, tuple(sorted(problem.graph.sites)),
                         np.array(states, dtype=np.int8),
                         np.array(energies), np.array(mult, dtype=np.int64),
                         config)

    return sampler


class TestTTS:
    def test_unit_identity(self):
        for effort in (1, 2, 64, 256):
            assert tts(effort, 0.99) == pytest.approx(effort, rel=1e-12)

    def test_half_probability(self):
        assert tts(2, 0.5) == pytest.approx(13.28771238, abs=1e-6)

    def test_unsolved_and_clamp(self):
        assert math.isinf(tts(8, 0.0))
        perfect = tts(4, 1.0)
        assert 0 < perfect < 4

    def test_domain(self):
        with pytest.raises(DomainError):
            tts(2, 1.5)
        with pytest.raises(DomainError):
            tts(2, -0.1)
        with pytest.raises(ValueError):
            tts(0, 0.5)

    @given(st.floats(0.001, 0.995), st.floats(0.001, 0.995))
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_p(self, p1, p2):
        if p1 == p2:
            return
        lo, hi = sorted((p1, p2))
        assert tts(4, lo) > tts(4, hi)

    @given(st.integers(1, 512), st.integers(1, 512))
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_effort(self, e1, e2):
        if e1 == e2:
            return
        lo, hi = sorted((e1, e2))
        assert tts(lo, 0.3) < tts(hi, 0.3)


def make_curve(entries):
    points = []
    for effort, reads, hits in entries:
        est = SuccessEstimate(effort, reads, hits)
        points.append(EffortPoint(effort, est, tts(effort, est.p_hat), 1, True))
    return TTSCurve("k", tuple(points))


class TestSelectOptimal:
    def test_picks_minimum(self):
        curve = make_curve([(2, 100, 22), (4, 100, 93), (8, 100, 94)])
        values = {p.effort: p.tts for p in curve.points}
        result = select_optimal(curve)
        assert result.t_opt == min(values, key=values.get)
        assert result.tts_opt == min(values.values())
        assert all(result.tts_opt <= v for v in values.values())

    def test_tie_prefers_smaller_effort(self):
        est = SuccessEstimate(2, 100, 50)
        p1 = EffortPoint(2, est, 10.0, 1, True)
        p2 = EffortPoint(4, SuccessEstimate(4, 100, 50), 10.0, 1, True)
        result = select_optimal(TTSCurve("k", (p1, p2)))
        assert result.t_opt == 2

    def test_all_unsolved(self):
        points = tuple(
            EffortPoint(e, SuccessEstimate(e, 100, 0), math.inf, 1, False)
            for e in (2, 4))
        result = select_optimal(TTSCurve("k", points))
        assert not result.solved
        assert result.t_opt is None
        assert math.isinf(result.tts_opt)

    def test_single_entry(self):
        curve = make_curve([(8, 100, 40)])
        result = select_optimal(curve)
        assert result.t_opt == 8


class TestAggregate:
    def test_median_of_1_to_100(self):
        results = [InstanceResult(str(i), True, 2, float(i))
                   for i in range(1, 101)]
        stats = aggregate(results, group=5)
        assert stats.median == pytest.approx(50.5)
        assert stats.n_unsolved == 0

    def test_single_value(self):
        stats = aggregate([InstanceResult("a", True, 2, 7.0)], group=1)
        assert stats.p10 == stats.p25 == stats.median == stats.p75 == stats.p90 == 7.0

    def test_unsolved_excluded(self):
        results = [InstanceResult(str(i), True, 2, float(i + 1))
                   for i in range(97)]
        results += [InstanceResult(f"u{i}", False, None, math.inf)
                    for i in range(3)]
        stats = aggregate(results, group=8)
        assert stats.n_unsolved == 3
        assert stats.n_instances == 100
        assert math.isfinite(stats.p90)

    @given(st.lists(st.floats(0.1, 1e6), min_size=1, max_size=40))
    @settings(max_examples=50, deadline=None)
    def test_quantile_ordering(self, values):
        results = [InstanceResult(str(i), True, 2, v)
                   for i, v in enumerate(values)]
        stats = aggregate(results, group=0)
        assert stats.p10 <= stats.p25 <= stats.median <= stats.p75 <= stats.p90

    def test_empty_group(self):
        with pytest.raises(EmptyGroupError):
            aggregate([InstanceResult("a", False, None, math.inf)], group=2)


class TestProtocol:
    def test_constant_p_stub(self):
        inst = pair_instance()
        registry = GroundTruthRegistry()
        registry.record_exact(inst.id, -1.0)
        template = SamplerConfig(kind="sa-logical", seed=77)
        curve = run_protocol(inst, inst, template, [2, 4], batch_size=500,
                             target_hits=50, max_batches=10, registry=registry,
                             sampler=bernoulli_stub(0.5))
        for point in curve.points:
            assert point.batches == 1  # p=0.5 hits 50 in the first batch
            assert point.estimate.reads == 500
            assert 0.4 < point.estimate.p_hat < 0.6

    def test_stub_stopping_distribution(self):
        # p = 0.1, batch 500, target 50: P(one batch) = P(Bin(500,.1) >= 50)
        inst = pair_instance()
        one_batch = 0
        pooled_hits = pooled_reads = 0
        for trial in range(200):
            registry = GroundTruthRegistry()
            registry.record_exact(inst.id, -1.0)
            template = SamplerConfig(kind="sa-logical", seed=trial)
            curve = run_protocol(inst, inst, template, [2], batch_size=500,
                                 target_hits=50, max_batches=10,
                                 registry=registry, sampler=bernoulli_stub(0.1))
            point = curve.points[0]
            one_batch += point.batches == 1
            pooled_hits += point.estimate.hits
            pooled_reads += point.estimate.reads
        assert one_batch / 200 >= 0.45
        assert pooled_reads >= 10_000
        assert abs(pooled_hits / pooled_reads - 0.1) <= 0.01

    def test_never_solved_within_budget(self):
        inst = pair_instance()
        registry = GroundTruthRegistry()
        registry.record_exact(inst.id, -1.0)
        template = SamplerConfig(kind="sa-logical", seed=5)
        curve = run_protocol(inst, inst, template, [2], batch_size=100,
                             target_hits=10, max_batches=3, registry=registry,
                             sampler=bernoulli_stub(0.0))
        point = curve.points[0]
        assert point.estimate.hits == 0
        assert not point.target_reached
        assert point.batches == 3
        assert math.isinf(point.tts)

    def test_registry_improvement_recounts_earlier_efforts(self):
        # shallow efforts only ever see a local optimum (energy 0); effort 8
        # finds the true optimum -2, so earlier hit counts must recount to 0
        graph = build_lattice(LatticeSpec(3, 1, 1))
        edges = sorted(graph.edges)
        inst = Instance(graph, {e: 1 for e in edges}, seed=0, id="triple")
        local = [1, 1, -1]   # energy 0
        ground = [1, -1, 1]  # energy -2

        def sampler(problem, config):
            deep = config.effort >= 8
            states = np.array([ground, local] if deep else [local],
                              dtype=np.int8)
            energies = np.array([-2.0, 0.0] if deep else [0.0])
            mult = (np.array([10, config.reads - 10], dtype=np.int64)
                    if deep else np.array([config.reads], dtype=np.int64))
            return SampleSet(problem, tuple(sorted(graph.sites)),
                             states, energies, mult, config)

        registry = GroundTruthRegistry()
        template = SamplerConfig(kind="sa-logical", seed=1)
        curve = run_protocol(inst, inst, template, [2, 4, 8], batch_size=100,
                             target_hits=10, max_batches=2, registry=registry,
                             sampler=sampler)
        assert registry.best(inst.id) == -2.0
        assert inst.id not in registry.invalidated  # cleared after recount
        by_effort = {p.effort: p for p in curve.points}
        assert by_effort[2].estimate.hits == 0
        assert by_effort[4].estimate.hits == 0
        assert by_effort[8].estimate.hits == 10

    def test_deterministic(self):
        inst = pair_instance()
        curves = []
        for _ in range(2):
            registry = GroundTruthRegistry()
            registry.record_exact(inst.id, -1.0)
            template = SamplerConfig(kind="sa-logical", seed=9)
            curves.append(run_protocol(inst, inst, template, [2, 4],
                                       batch_size=200, target_hits=20,
                                       max_batches=4, registry=registry,
                                       sampler=bernoulli_stub(0.2)))
        assert curves[0] == curves[1]

    def test_bad_ladder(self):
        inst = pair_instance()
        template = SamplerConfig(seed=1)
        for ladder in ([], [4, 2], [2, 2], [0, 2]):
            with pytest.raises(ValueError):
                run_protocol(inst, inst, template, ladder)


class TestSpeedup:
    def test_identical_results(self):
        results = [InstanceResult(str(i), True, 4, 10.0 * (i + 1))
                   for i in range(5)]
        rows = speedup_pairs(results, results)
        assert len(rows) == 5
        assert all(r.ratio == 1.0 for r in rows)

    def test_unsolved_is_undefined(self):
        a = [InstanceResult("x", False, None, math.inf)]
        b = [InstanceResult("x", True, 2, 5.0)]
        rows = speedup_pairs(a, b)
        assert rows[0].ratio is None

    def test_800x(self):
        a = [InstanceResult("x", True, 2, 800.0)]
        b = [InstanceResult("x", True, 2, 1.0)]
        assert speedup_pairs(a, b)[0].ratio == pytest.approx(800.0)

    def test_only_common_ids(self):
        a = [InstanceResult("x", True, 2, 1.0), InstanceResult("y", True, 2, 2.0)]
        b = [InstanceResult("y", True, 2, 4.0), InstanceResult("z", True, 2, 8.0)]
        rows = speedup_pairs(a, b)
        assert [r.instance_id for r in rows] == ["y"]


class TestIsometryConsistency:
    def test_all_equal(self):
        results = [InstanceResult(f"i{k}", True, 128, 42.0) for k in range(48)]
        summary = isometry_consistency(results, 128)
        assert summary.ratio == pytest.approx(1.0)
        assert summary.median == 42.0
        assert summary.n_unsolved == 0

    def test_wrong_count(self):
        results = [InstanceResult(f"i{k}", True, 128, 1.0) for k in range(47)]
        with pytest.raises(WrongCountError):
            isometry_consistency(results, 128)

    def test_unsolved_makes_ratio_undefined(self):
        results = [InstanceResult(f"i{k}", True, 128, float(k + 1))
                   for k in range(47)]
        results.append(InstanceResult("i47", False, None, math.inf))
        summary = isometry_consistency(results, 128)
        assert summary.ratio is None
        assert summary.n_unsolved == 1
        assert summary.best == 1.0 and summary.worst == 47.0

    def test_effort_mismatch(self):
        results = [InstanceResult(f"i{k}", True, 64, 1.0) for k in range(48)]
        with pytest.raises(ValueError):
            isometry_consistency(results, 128)
