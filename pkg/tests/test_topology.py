import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glassbench.errors import CountExceededError, MaskMismatchError
from glassbench.topology import (
    DefectMask,
    apply_defects,
    build_chimera,
    build_pegasus,
    graph_from_json,
    graph_stats,
    graph_to_json,
    pegasus_internal_neighbors,
    sample_defect_mask,
)


def chimera_coupler_count(m, n, t):
    return m * n * t * t + t * (m * (n - 1) + n * (m - 1))


class TestChimera:
    def test_2000q_counts(self, chimera_16):
        assert chimera_16.n_qubits == 2048
        assert chimera_16.n_couplers == 6016

    def test_single_cell(self):
        g = build_chimera(1, 1, 4)
        assert g.n_qubits == 8
        assert g.n_couplers == 16
        assert graph_stats(g)["degree_histogram"] == {4: 8}

    @given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 5))
    @settings(max_examples=25, deadline=None)
    def test_count_formulas(self, m, n, t):
        g = build_chimera(m, n, t)
        assert g.n_qubits == 2 * m * n * t
        assert g.n_couplers == chimera_coupler_count(m, n, t)
        stats = graph_stats(g)
        assert sum(d * c for d, c in stats["degree_histogram"].items()) == 2 * g.n_couplers
        assert max(stats["degree_histogram"]) <= t + 2
        assert stats["bipartite"]

    def test_adjacency_symmetric_no_self_loops(self, chimera_44):
        for q in chimera_44.qubits:
            assert q not in chimera_44.neighbors(q)
            for nb in chimera_44.neighbors(q):
                assert q in chimera_44.neighbors(nb)

    def test_rejects_bad_dims(self):
        with pytest.raises(ValueError):
            build_chimera(0, 4, 4)
        with pytest.raises(ValueError):
            build_chimera(4, -1, 4)


class TestPegasus:
    def test_p16_counts(self, pegasus_16):
        assert pegasus_16.n_qubits == 5640
        assert pegasus_16.n_couplers == 40484

    def test_p16_degrees_and_parity(self, pegasus_16):
        stats = graph_stats(pegasus_16)
        assert max(stats["degree_histogram"]) == 15
        assert min(stats["degree_histogram"]) >= 1
        assert not stats["bipartite"]

    @pytest.mark.parametrize("m", [2, 3, 4, 8, 16])
    def test_node_count_formula(self, m):
        g = build_pegasus(m)
        assert g.n_qubits == 8 * (m - 1) * (3 * m - 1)
        assert max(len(g.neighbors(q)) for q in g.qubits) <= 15
        assert min(len(g.neighbors(q)) for q in g.qubits) >= 1

    def test_trim_matches_internal_degree(self):
        # every kept qubit has at least one internal coupler; trimmed count
        # is 8(m-1)
        m = 4
        g = build_pegasus(m)
        for q in g.qubits:
            nbs = [nb for nb in pegasus_internal_neighbors(m, q) if nb in g.qubits]
            assert nbs, f"{q} kept but has no internal couplers"
        assert 24 * m * (m - 1) - g.n_qubits == 8 * (m - 1)

    def test_smallest_size(self):
        g = build_pegasus(2)
        assert g.n_qubits > 0
        assert min(len(g.neighbors(q)) for q in g.qubits) >= 1

    def test_rejects_m1(self):
        with pytest.raises(ValueError):
            build_pegasus(1)


class TestDefects:
    def test_working_graph_counts(self, chimera_16, pegasus_16):
        mask = sample_defect_mask(chimera_16, 7, 0, seed=1)
        working = apply_defects(chimera_16, mask)
        assert working.n_qubits == 2041
        mask = sample_defect_mask(pegasus_16, 130, 0, seed=1)
        working = apply_defects(pegasus_16, mask)
        assert working.n_qubits == 5510

    def test_empty_mask_is_identity(self, chimera_44):
        working = apply_defects(chimera_44, DefectMask.empty())
        assert working.qubits == chimera_44.qubits
        assert working.couplers == chimera_44.couplers

    def test_incident_couplers_removed(self, chimera_44):
        q = sorted(chimera_44.qubits)[0]
        working = apply_defects(chimera_44, DefectMask(frozenset([q]), frozenset()))
        assert q not in working.qubits
        assert all(q not in c for c in working.couplers)
        assert working.n_couplers == chimera_44.n_couplers - len(chimera_44.neighbors(q))

    def test_idempotent_and_monotone(self, chimera_44):
        mask = sample_defect_mask(chimera_44, 5, 3, seed=9)
        w1 = apply_defects(chimera_44, mask)
        w2 = apply_defects(apply_defects(chimera_44, mask), DefectMask.empty())
        assert w1.qubits == w2.qubits and w1.couplers == w2.couplers
        assert w1.qubits <= chimera_44.qubits
        assert w1.couplers <= chimera_44.couplers

    def test_mask_mismatch(self, chimera_44):
        bogus = DefectMask(frozenset([(99, 99, 0, 0)]), frozenset())
        with pytest.raises(MaskMismatchError):
            apply_defects(chimera_44, bogus)

    def test_sampling_deterministic(self, chimera_44):
        m1 = sample_defect_mask(chimera_44, 6, 2, seed=5)
        m2 = sample_defect_mask(chimera_44, 6, 2, seed=5)
        assert m1.qubits == m2.qubits and m1.couplers == m2.couplers
        assert len(m1.qubits) == 6 and len(m1.couplers) == 2
        m3 = sample_defect_mask(chimera_44, 6, 2, seed=6)
        assert m3.qubits != m1.qubits or m3.couplers != m1.couplers

    def test_sampling_empty_and_overflow(self, chimera_44):
        empty = sample_defect_mask(chimera_44, 0, 0, seed=1)
        assert not empty.qubits and not empty.couplers
        with pytest.raises(CountExceededError):
            sample_defect_mask(chimera_44, chimera_44.n_qubits + 1, 0, seed=1)


class TestSerialization:
    @pytest.mark.parametrize("family,builder", [
        ("chimera", lambda: build_chimera(3, 4, 4)),
        ("pegasus", lambda: build_pegasus(3)),
    ])
    def test_round_trip(self, family, builder):
        graph = builder()
        mask = sample_defect_mask(graph, 4, 2, seed=13)
        working = apply_defects(graph, mask)
        doc = json.loads(json.dumps(graph_to_json(working)))
        loaded = graph_from_json(doc)
        assert loaded.family == working.family
        assert loaded.shape == working.shape
        assert loaded.qubits == working.qubits
        assert loaded.couplers == working.couplers

    def test_ideal_round_trip(self, chimera_44):
        loaded = graph_from_json(graph_to_json(chimera_44))
        assert loaded.qubits == chimera_44.qubits
        assert loaded.couplers == chimera_44.couplers
