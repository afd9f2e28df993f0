"""Open-boundary 3D lattices, random +/-1 spin-glass instances, and the
48-element cube isometry group.

Sites are integer triples (x, y, z); edges are axis-aligned unit steps
tagged 'x', 'y' or 'z'.  Energies are Sum_edges J_ij * s_i * s_j in units
of |J|, lower is better.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from typing import Mapping

from .errors import EmptyGraphError, IncompleteAssignmentError, NotFullCubeError
from .rng import stream

__all__ = [
    "LatticeSpec",
    "LogicalGraph",
    "Instance",
    "Isometry",
    "build_lattice",
    "generate_instance",
    "logical_energy",
    "enumerate_isometries",
    "apply_isometry",
    "instance_to_json",
    "instance_from_json",
]

Site = tuple[int, int, int]
Edge = tuple[Site, Site]

AXES = ("x", "y", "z")


@dataclass(frozen=True)
class LatticeSpec:
    """Side lengths of an open-boundary lattice."""

    L1: int
    L2: int
    L3: int

    def __post_init__(self):
        if min(self.L1, self.L2, self.L3) < 1:
            raise ValueError("lattice sides must be >= 1")

    @property
    def sides(self) -> tuple[int, int, int]:
        return (self.L1, self.L2, self.L3)

    @property
    def n_sites(self) -> int:
        return self.L1 * self.L2 * self.L3

    @property
    def n_edges(self) -> int:
        L1, L2, L3 = self.sides
        return L2 * L3 * (L1 - 1) + L1 * L3 * (L2 - 1) + L1 * L2 * (L3 - 1)

    def is_cube(self) -> bool:
        return self.L1 == self.L2 == self.L3


def edge_axis(a: Site, b: Site) -> str:
    """Axis of a unit-step edge; raises for non-neighbor site pairs."""
    diff = [bi - ai for ai, bi in zip(a, b)]
    nonzero = [i for i, d in enumerate(diff) if d != 0]
    if len(nonzero) != 1 or abs(diff[nonzero[0]]) != 1:
        raise ValueError(f"{a} and {b} are not lattice neighbors")
    return AXES[nonzero[0]]


def canon_edge(a: Site, b: Site) -> Edge:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class LogicalGraph:
    """Subgraph of a lattice: present sites plus axis-tagged edges."""

    spec: LatticeSpec
    sites: frozenset[Site]
    edges: dict  # canonical Edge -> axis tag

    def __post_init__(self):
        for (a, b), axis in self.edges.items():
            if a not in self.sites or b not in self.sites:
                raise ValueError(f"edge {a}-{b} references missing site")
            if edge_axis(a, b) != axis:
                raise ValueError(f"edge {a}-{b} tagged {axis!r}, expected {edge_axis(a, b)!r}")

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def is_full(self) -> bool:
        return (self.n_sites == self.spec.n_sites
                and self.n_edges == self.spec.n_edges)

    def restricted_to(self, sites: frozenset[Site]) -> "LogicalGraph":
        """Induced subgraph on the given site subset."""
        keep = self.sites & sites
        edges = {e: ax for e, ax in self.edges.items()
                 if e[0] in keep and e[1] in keep}
        return LogicalGraph(self.spec, keep, edges)

    def intersect(self, other: "LogicalGraph") -> "LogicalGraph":
        if self.spec != other.spec:
            raise ValueError("cannot intersect graphs of different specs")
        sites = self.sites & other.sites
        edges = {e: ax for e, ax in self.edges.items() if e in other.edges}
        return LogicalGraph(self.spec, sites, edges)


def build_lattice(spec: LatticeSpec) -> LogicalGraph:
    """Full open-boundary lattice: all sites, all unit-step edges."""
    L1, L2, L3 = spec.sides
    sites = frozenset(itertools.product(range(L1), range(L2), range(L3)))
    edges: dict[Edge, str] = {}
    for x, y, z in sorted(sites):
        if x + 1 < L1:
            edges[((x, y, z), (x + 1, y, z))] = "x"
        if y + 1 < L2:
            edges[((x, y, z), (x, y + 1, z))] = "y"
        if z + 1 < L3:
            edges[((x, y, z), (x, y, z + 1))] = "z"
    return LogicalGraph(spec, sites, edges)


@dataclass(frozen=True)
class Instance:
    """A logical spin-glass problem: +/-1 couplings on a logical graph."""

    graph: LogicalGraph
    couplings: dict  # canonical Edge -> -1 or +1
    seed: int
    id: str

    def __post_init__(self):
        if set(self.couplings) != set(self.graph.edges):
            raise ValueError("couplings must cover exactly the graph edges")
        bad = [j for j in self.couplings.values() if j not in (-1, 1)]
        if bad:
            raise ValueError(f"couplings must be +/-1, found {bad[0]}")

    @property
    def n_spins(self) -> int:
        return self.graph.n_sites


def _instance_id(spec: LatticeSpec, seed: int, couplings: Mapping[Edge, int]) -> str:
    payload = json.dumps(
        {
            "spec": list(spec.sides),
            "seed": seed,
            "J": [[list(a), list(b), j] for (a, b), j in sorted(couplings.items())],
        },
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def generate_instance(graph: LogicalGraph, seed: int) -> Instance:
    """Assign each edge an independent +/-1 coupling, deterministic per seed."""
    if graph.n_edges == 0:
        raise EmptyGraphError("instance generation needs at least one edge")
    rng = stream(seed, "instance-couplings")
    edges = sorted(graph.edges)
    draws = rng.integers(0, 2, size=len(edges))
    couplings = {e: int(2 * d - 1) for e, d in zip(edges, draws)}
    return Instance(graph, couplings, seed,
                    _instance_id(graph.spec, seed, couplings))


def logical_energy(instance: Instance, spins: Mapping[Site, int]) -> float:
    """Sum over edges of J_ij * s_i * s_j."""
    missing = instance.graph.sites - spins.keys()
    if missing:
        raise IncompleteAssignmentError(f"no spin for site {sorted(missing)[0]}")
    return float(sum(j * spins[a] * spins[b]
                     for (a, b), j in instance.couplings.items()))


# --------------------------------------------------------------------------
# Cube isometries: signed axis permutations acting on centered coordinates,
# realized on integer sites by  x -> L-1-x  for a flipped axis.
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Isometry:
    """g(v)_i = v[perm[i]] if signs[i] > 0 else L-1 - v[perm[i]]."""

    perm: tuple[int, int, int]
    signs: tuple[int, int, int]

    def __post_init__(self):
        if sorted(self.perm) != [0, 1, 2] or any(s not in (-1, 1) for s in self.signs):
            raise ValueError("invalid isometry")

    def apply_site(self, site: Site, L: int) -> Site:
        return tuple(site[p] if s > 0 else L - 1 - site[p]
                     for p, s in zip(self.perm, self.signs))

    def compose(self, other: "Isometry") -> "Isometry":
        """Isometry equal to applying ``other`` first, then ``self``."""
        perm = tuple(other.perm[p] for p in self.perm)
        signs = tuple(s * other.signs[p] for p, s in zip(self.perm, self.signs))
        return Isometry(perm, signs)

    def inverse(self) -> "Isometry":
        inv_perm = [0, 0, 0]
        inv_signs = [0, 0, 0]
        for i, p in enumerate(self.perm):
            inv_perm[p] = i
            inv_signs[p] = self.signs[i]
        return Isometry(tuple(inv_perm), tuple(inv_signs))

    @property
    def is_identity(self) -> bool:
        return self.perm == (0, 1, 2) and self.signs == (1, 1, 1)


def enumerate_isometries() -> list[Isometry]:
    """All 48 cube isometries, lexicographic by permutation then signs.

    Element 0 is the identity; the sign order puts +1 before -1, so the
    listing starts (identity), (flip z), (flip y), ...
    """
    out = []
    for perm in itertools.permutations((0, 1, 2)):
        for signs in itertools.product((1, -1), repeat=3):
            out.append(Isometry(perm, signs))
    return out


def apply_isometry(instance: Instance, g: Isometry) -> Instance:
    """Relabel an instance by a cube isometry, carrying couplings along.

    Only defined for instances on the full cubic lattice: isometries of a
    box with unequal sides are not closed under axis permutation, and the
    action on a defective subgraph is not defined here.
    """
    graph = instance.graph
    if not graph.spec.is_cube() or not graph.is_full():
        raise NotFullCubeError("isometries require a full cubic lattice")
    L = graph.spec.L1
    couplings = {}
    for (a, b), j in instance.couplings.items():
        couplings[canon_edge(g.apply_site(a, L), g.apply_site(b, L))] = j
    edges = {e: edge_axis(*e) for e in couplings}
    new_graph = LogicalGraph(graph.spec, graph.sites, edges)
    return Instance(new_graph, couplings, instance.seed,
                    _instance_id(graph.spec, instance.seed, couplings))


def instance_to_json(instance: Instance) -> dict:
    return {
        "spec": list(instance.graph.spec.sides),
        "sites": [list(s) for s in sorted(instance.graph.sites)],
        "edges": [[list(a), list(b), instance.graph.edges[(a, b)], j]
                  for (a, b), j in sorted(instance.couplings.items())],
        "seed": instance.seed,
        "id": instance.id,
    }


def instance_from_json(doc: dict) -> Instance:
    spec = LatticeSpec(*doc["spec"])
    sites = frozenset(tuple(s) for s in doc["sites"])
    edges = {}
    couplings = {}
    for a, b, axis, j in doc["edges"]:
        e = canon_edge(tuple(a), tuple(b))
        edges[e] = axis
        couplings[e] = int(j)
    graph = LogicalGraph(spec, sites, edges)
    inst = Instance(graph, couplings, int(doc["seed"]), doc["id"])
    return inst
