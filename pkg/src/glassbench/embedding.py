"""Minor embeddings of 3D lattices into Chimera and Pegasus graphs.

Both constructions share one chain geometry: x-couplings attach on one side
of the chain, y-couplings on the other, and every z-coupling is split in
half across two physical couplers, one touching each side.  With logical
couplings of magnitude 1 this gives an algebraic chain strength of 2: chain
couplers at -2 guarantee an unbroken ground state while keeping every
physical value inside the hardware range [-2, 1].

Chimera construction (shore-4 graphs, sides <= 8)
-------------------------------------------------
Site (x, y, z) with b = z // 4 and k = z % 4 maps to the 4-qubit chain

    { (2x, c, 0, k), (2x+1, c, 0, k), (r, 2y, 1, k), (r, 2y+1, 1, k) }

where r = 2x + b and c = 2y + b, held together by the vertical external
coupler, the horizontal external coupler, and the internal coupler of cell
(r, c).  x-edges use the vertical external coupler between rows 2x+1 and
2x+2; y-edges the horizontal external coupler between columns 2y+1 and
2y+2; z-edges use the two internal couplers joining consecutive chains with
opposite orientation.  The two values of b realize two chain geometries
that alternate along z.

Pegasus construction (2-qubit chains, sides <= m-1, depth <= 12)
----------------------------------------------------------------
Site (x, y, z) maps to one vertical and one horizontal qubit,

    V = (0, x + A, sigma, y)        H = (1, y + C, tau, x)

where (sigma, tau, A, C) = PEGASUS_LAYER_TABLE[z].  The table is the
lexicographically-first solution of the constraint system requiring, for
every layer, that V and H cross (the chain coupler exists) and avoid the
trimmed boundary tracks, and, for every consecutive layer pair, that the
two internal couplers (V_z, H_{z+1}) and (V_{z+1}, H_z) both exist.
x-edges ride the horizontal external couplers, y-edges the vertical ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    CapacityExceededError,
    IncompleteAssignmentError,
    RangeViolationError,
    WrongFamilyError,
)
from .lattice import (
    Edge,
    Instance,
    LatticeSpec,
    LogicalGraph,
    Site,
    build_lattice,
    canon_edge,
)
from .rng import stream
from .topology import Coupler, HardwareGraph, Qubit, _canon

__all__ = [
    "PEGASUS_LAYER_TABLE",
    "CHAIN_LENGTH",
    "Chain",
    "EmbeddingMap",
    "EmbeddedProblem",
    "YieldReport",
    "ValidationReport",
    "BrokenChainReport",
    "embed_cubic_chimera",
    "embed_cubic_pegasus",
    "embed_cubic",
    "maximize_yield",
    "validate_embedding",
    "set_parameters",
    "physical_energy",
    "unembed",
    "embedding_to_json",
    "embedding_from_json",
]

# (sigma, tau, A, C) per z-layer: vertical track, horizontal track, and the
# x/y tile shifts of the chain qubits.  Layer constraints (OFF_V/OFF_H are
# the track offsets from .topology):
#   chain coupler:   0 <= 12C + tau - OFF_V[sigma] < 12
#                    0 <= 12A + sigma - OFF_H[tau] < 12
#   trim safety:     A = 0 -> sigma >= 2,  A = 1 -> sigma <= 9  (same for C/tau)
#   z-step l -> l+1: 0 <= 12C' + tau' - OFF_V[sigma] < 12
#                    0 <= 12A  + sigma - OFF_H[tau'] < 12
#                    0 <= 12C  + tau  - OFF_V[sigma'] < 12
#                    0 <= 12A' + sigma' - OFF_H[tau] < 12
PEGASUS_LAYER_TABLE = (
    (0, 0, 1, 1),
    (1, 1, 1, 1),
    (2, 2, 1, 0),
    (3, 8, 1, 0),
    (8, 9, 1, 0),
    (9, 10, 1, 0),
    (4, 11, 1, 0),
    (10, 3, 0, 1),
    (11, 4, 0, 1),
    (5, 5, 0, 1),
    (6, 6, 0, 1),
    (7, 7, 0, 1),
)

CHAIN_LENGTH = {"chimera": 4, "pegasus": 2}

PEGASUS_MAX_DEPTH = len(PEGASUS_LAYER_TABLE)


@dataclass(frozen=True)
class Chain:
    """Physical qubits representing one lattice site, plus their couplers."""

    site: Site
    qubits: tuple[Qubit, ...]
    couplers: tuple[Coupler, ...]


@dataclass(frozen=True)
class EmbeddingMap:
    """Site -> chain and lattice-edge -> weighted physical couplers."""

    target_family: str
    target_shape: tuple[int, ...]
    spec: LatticeSpec
    chains: dict  # Site -> Chain
    edge_map: dict  # canonical Edge -> tuple of (Coupler, share)

    def used_qubits(self) -> frozenset[Qubit]:
        return frozenset(q for ch in self.chains.values() for q in ch.qubits)

    @property
    def n_sites(self) -> int:
        return len(self.chains)


@dataclass(frozen=True)
class YieldReport:
    embedded_sites: int
    total_sites: int
    embedded_edges: int
    total_edges: int
    dropped_sites: tuple[Site, ...]
    dropped_edges: tuple[Edge, ...]

    @property
    def site_yield(self) -> float:
        return self.embedded_sites / self.total_sites

    @property
    def edge_yield(self) -> float:
        return self.embedded_edges / self.total_edges if self.total_edges else 1.0


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failures: tuple[str, ...]

    @property
    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None


@dataclass(frozen=True)
class BrokenChainReport:
    broken_sites: tuple[Site, ...]
    n_chains: int

    @property
    def broken_fraction(self) -> float:
        return len(self.broken_sites) / self.n_chains if self.n_chains else 0.0


# --------------------------------------------------------------------------
# Canonical constructions
# --------------------------------------------------------------------------

def _chimera_chain(site: Site) -> Chain:
    x, y, z = site
    b, k = divmod(z, 4)
    r, c = 2 * x + b, 2 * y + b
    v1 = (2 * x, c, 0, k)
    v2 = (2 * x + 1, c, 0, k)
    h1 = (r, 2 * y, 1, k)
    h2 = (r, 2 * y + 1, 1, k)
    couplers = (_canon(v1, v2), _canon(h1, h2),
                _canon((r, c, 0, k), (r, c, 1, k)))
    return Chain(site, (v1, v2, h1, h2), couplers)


def _chimera_edge_couplers(a: Site, b: Site, axis: str) -> tuple[Coupler, ...]:
    x, y, z = a
    blk, k = divmod(z, 4)
    r, c = 2 * x + blk, 2 * y + blk
    if axis == "x":
        return (_canon((2 * x + 1, c, 0, k), (2 * x + 2, c, 0, k)),)
    if axis == "y":
        return (_canon((r, 2 * y + 1, 1, k), (r, 2 * y + 2, 1, k)),)
    if k < 3:  # same block: tracks k and k+1 meet in cell (r, c)
        return tuple(sorted((_canon((r, c, 0, k), (r, c, 1, k + 1)),
                             _canon((r, c, 1, k), (r, c, 0, k + 1)))))
    # block crossing (k = 3 -> 0): couplers sit in the two cells the chains
    # share with opposite orientation
    return tuple(sorted((_canon((r + 1, c, 0, 3), (r + 1, c, 1, 0)),
                         _canon((r, c + 1, 1, 3), (r, c + 1, 0, 0)))))


def embed_cubic_chimera(spec: LatticeSpec, graph: HardwareGraph) -> EmbeddingMap:
    """Canonical 4-qubit-chain embedding into a shore-4 Chimera graph.

    Targets the ideal layout of the graph's shape; use maximize_yield to
    adapt the result to a defective working graph.
    """
    if graph.family != "chimera":
        raise WrongFamilyError(f"expected chimera, got {graph.family}")
    rows, cols, shore = graph.shape
    if shore != 4:
        raise WrongFamilyError("chimera embedding requires shore 4")
    if max(spec.sides) > 8:
        raise CapacityExceededError(f"chimera chains support sides <= 8, got {spec.sides}")
    if rows < 2 * spec.L1 or cols < 2 * spec.L2:
        raise CapacityExceededError(
            f"{spec.sides} needs a {2 * spec.L1}x{2 * spec.L2}-cell graph, "
            f"got {rows}x{cols}")
    lattice = build_lattice(spec)
    chains = {s: _chimera_chain(s) for s in sorted(lattice.sites)}
    edge_map = {}
    for (a, b), axis in lattice.edges.items():
        couplers = _chimera_edge_couplers(a, b, axis)
        share = 1.0 / len(couplers)
        edge_map[(a, b)] = tuple((c, share) for c in couplers)
    return EmbeddingMap("chimera", graph.shape, spec, chains, edge_map)


def _pegasus_chain(site: Site) -> Chain:
    x, y, z = site
    sigma, tau, a, c = PEGASUS_LAYER_TABLE[z]
    v = (0, x + a, sigma, y)
    h = (1, y + c, tau, x)
    return Chain(site, (v, h), (_canon(v, h),))


def _pegasus_edge_couplers(a: Site, b: Site, axis: str) -> tuple[Coupler, ...]:
    va, ha = _pegasus_chain(a).qubits
    vb, hb = _pegasus_chain(b).qubits
    if axis == "x":
        return (_canon(ha, hb),)
    if axis == "y":
        return (_canon(va, vb),)
    return tuple(sorted((_canon(va, hb), _canon(vb, ha))))


def embed_cubic_pegasus(spec: LatticeSpec, graph: HardwareGraph) -> EmbeddingMap:
    """Canonical 2-qubit-chain embedding into a Pegasus graph."""
    if graph.family != "pegasus":
        raise WrongFamilyError(f"expected pegasus, got {graph.family}")
    m = graph.shape[0]
    if spec.L1 > m - 1 or spec.L2 > m - 1:
        raise CapacityExceededError(
            f"pegasus size {m} supports sides <= {m - 1}, got {spec.sides}")
    if spec.L3 > PEGASUS_MAX_DEPTH:
        raise CapacityExceededError(
            f"pegasus chains support depth <= {PEGASUS_MAX_DEPTH}, got L3={spec.L3}")
    lattice = build_lattice(spec)
    chains = {s: _pegasus_chain(s) for s in sorted(lattice.sites)}
    edge_map = {}
    for (a, b), axis in lattice.edges.items():
        couplers = _pegasus_edge_couplers(a, b, axis)
        share = 1.0 / len(couplers)
        edge_map[(a, b)] = tuple((c, share) for c in couplers)
    return EmbeddingMap("pegasus", graph.shape, spec, chains, edge_map)


def embed_cubic(spec: LatticeSpec, graph: HardwareGraph) -> EmbeddingMap:
    if graph.family == "chimera":
        return embed_cubic_chimera(spec, graph)
    if graph.family == "pegasus":
        return embed_cubic_pegasus(spec, graph)
    raise WrongFamilyError(graph.family)


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------

def _chain_connected(qubits: Sequence[Qubit], couplers: Iterable[Coupler]) -> bool:
    if not qubits:
        return False
    adj: dict[Qubit, list[Qubit]] = {q: [] for q in qubits}
    for a, b in couplers:
        if a in adj and b in adj:  # couplers leaving the chain are reported elsewhere
            adj[a].append(b)
            adj[b].append(a)
    seen = {qubits[0]}
    stack = [qubits[0]]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(qubits)


def validate_embedding(emb: EmbeddingMap, working: HardwareGraph,
                       logical: LogicalGraph) -> ValidationReport:
    """Check every minor-embedding invariant; violations are reported, not raised."""
    failures: list[str] = []
    want_len = CHAIN_LENGTH[emb.target_family]

    owner: dict[Qubit, Site] = {}
    for site in sorted(emb.chains):
        ch = emb.chains[site]
        if len(set(ch.qubits)) != len(ch.qubits):
            failures.append(f"chain {site}: repeated qubit")
        for q in ch.qubits:
            if q in owner:
                failures.append(f"chains {owner[q]} and {site} share qubit {q}")
            owner[q] = site
            if q not in working.qubits:
                failures.append(f"chain {site}: qubit {q} not in working graph")
        if len(ch.qubits) != want_len:
            failures.append(f"chain {site}: length {len(ch.qubits)}, expected {want_len}")
        for cpl in ch.couplers:
            if cpl not in working.couplers:
                failures.append(f"chain {site}: coupler {cpl} not in working graph")
            if cpl[0] not in ch.qubits or cpl[1] not in ch.qubits:
                failures.append(f"chain {site}: coupler {cpl} leaves the chain")
        if not _chain_connected(ch.qubits, ch.couplers):
            failures.append(f"chain {site}: not connected")

    for edge in sorted(emb.edge_map):
        a, b = edge
        mapped = emb.edge_map[edge]
        if a not in emb.chains or b not in emb.chains:
            failures.append(f"edge {edge}: endpoint without chain")
            continue
        qa = set(emb.chains[a].qubits)
        qb = set(emb.chains[b].qubits)
        axis = logical.edges.get(edge)
        want_n = 2 if axis == "z" else 1
        if axis is not None and len(mapped) != want_n:
            failures.append(f"edge {edge} ({axis}): {len(mapped)} couplers, expected {want_n}")
        total_share = 0.0
        for cpl, share in mapped:
            total_share += share
            if cpl not in working.couplers:
                failures.append(f"edge {edge}: coupler {cpl} not in working graph")
            p, q = cpl
            spans = (p in qa and q in qb) or (p in qb and q in qa)
            if not spans:
                failures.append(f"edge {edge}: coupler {cpl} does not join its chains")
        if abs(total_share - 1.0) > 1e-12:
            failures.append(f"edge {edge}: shares sum to {total_share}, expected 1")
        if axis == "z" and any(abs(share - 0.5) > 1e-12 for _, share in mapped):
            failures.append(f"edge {edge}: z-edge shares must be 1/2 each")

    for site in sorted(logical.sites):
        if site not in emb.chains:
            failures.append(f"logical site {site} has no chain")
    for edge in sorted(logical.edges):
        if edge not in emb.edge_map:
            failures.append(f"logical edge {edge} is not mapped")

    return ValidationReport(not failures, tuple(failures))


# --------------------------------------------------------------------------
# Yield maximization on defective working graphs
# --------------------------------------------------------------------------

def _candidate_chains(site: Site, family: str, working: HardwareGraph) -> list[Chain]:
    """Bounded set of alive chain realizations for one site, canonical first.

    Chimera: the four track substitutions k' of the canonical cell pattern.
    Pegasus: any alive vertical qubit (0, x + a, k, y), paired with an alive
    crossing horizontal qubit (1, y or y+1, k', x).
    """
    x, y, z = site
    out: list[Chain] = []
    if family == "chimera":
        b = z // 4
        r, c = 2 * x + b, 2 * y + b
        order = [z % 4] + [k for k in range(4) if k != z % 4]
        for k in order:
            v1 = (2 * x, c, 0, k)
            v2 = (2 * x + 1, c, 0, k)
            h1 = (r, 2 * y, 1, k)
            h2 = (r, 2 * y + 1, 1, k)
            qubits = (v1, v2, h1, h2)
            if any(q not in working.qubits for q in qubits):
                continue
            couplers = tuple(c_ for c_ in (_canon(v1, v2), _canon(h1, h2),
                                           _canon((r, c, 0, k), (r, c, 1, k)))
                             if c_ in working.couplers)
            if _chain_connected(qubits, couplers):
                out.append(Chain(site, qubits, couplers))
    else:
        canonical = _pegasus_chain(site)
        seen = set()
        cands = []
        for a in (0, 1):
            for k in range(12):
                v = (0, x + a, k, y)
                if v not in working.qubits:
                    continue
                for h in sorted(working.neighbors(v)):
                    if h[0] != 1 or h[3] != x or h[1] - y not in (0, 1):
                        continue
                    pair = (v, h)
                    if pair not in seen:
                        seen.add(pair)
                        cands.append(Chain(site, pair, (_canon(v, h),)))
        cands.sort(key=lambda ch: ch.qubits)
        if canonical.qubits in [ch.qubits for ch in cands]:
            out.append(Chain(site, canonical.qubits, canonical.couplers))
            cands = [ch for ch in cands if ch.qubits != canonical.qubits]
        out.extend(cands)
    return out


def _couplers_between(ca: Chain, cb: Chain, working: HardwareGraph) -> list[Coupler]:
    qa, qb = set(ca.qubits), set(cb.qubits)
    found = set()
    for p in ca.qubits:
        for q in working.neighbors(p):
            if q in qb:
                found.add(_canon(p, q))
    return sorted(found)


def _realize_edge(edge: Edge, axis: str, ca: Chain, cb: Chain,
                  working: HardwareGraph,
                  template_couplers: tuple[Coupler, ...]) -> tuple | None:
    """Weighted coupler list for an edge, or None if it cannot be realized.

    Prefers the template couplers when alive so that a defect-free working
    graph reproduces the canonical embedding exactly.
    """
    avail = _couplers_between(ca, cb, working)
    need = 2 if axis == "z" else 1
    if len(avail) < need:
        return None
    preferred = [c for c in template_couplers if c in avail]
    chosen = preferred + [c for c in avail if c not in preferred]
    chosen = chosen[:need]
    share = 1.0 / need
    return tuple((c, share) for c in sorted(chosen))


def maximize_yield(template: EmbeddingMap, working: HardwareGraph,
                   seed: int = 0, passes: int = 20
                   ) -> tuple[LogicalGraph, EmbeddingMap, YieldReport]:
    """Restrict and locally repair a template embedding to a working graph.

    Greedy assignment in seeded random order over per-site candidate chains,
    followed by ``passes`` improvement sweeps accepting changes that
    lexicographically improve (embedded sites, embedded edges).  Worst case
    the logical graph shrinks; the result always validates against the
    working graph.
    """
    if (working.family, working.shape) != (template.target_family, template.target_shape):
        raise WrongFamilyError("template and working graph shapes differ")
    lattice = build_lattice(template.spec)
    sites = sorted(lattice.sites)
    site_edges: dict[Site, list[Edge]] = {s: [] for s in sites}
    for e in lattice.edges:
        site_edges[e[0]].append(e)
        site_edges[e[1]].append(e)

    cand_cache: dict[Site, list[Chain]] = {}

    def candidates(s: Site) -> list[Chain]:
        if s not in cand_cache:
            cand_cache[s] = _candidate_chains(s, template.target_family, working)
        return cand_cache[s]

    def chain_alive(ch: Chain) -> bool:
        return (all(q in working.qubits for q in ch.qubits)
                and all(c in working.couplers for c in ch.couplers))

    assigned: dict[Site, Chain | None] = {s: None for s in sites}
    used: set[Qubit] = set()

    def edge_ok(e: Edge) -> bool:
        a, b = e
        ca, cb = assigned[a], assigned[b]
        if ca is None or cb is None:
            return False
        return _realize_edge(e, lattice.edges[e], ca, cb, working,
                             tuple(c for c, _ in template.edge_map[e])) is not None

    def local_edges(s: Site) -> int:
        return sum(1 for e in site_edges[s] if edge_ok(e))

    rng = stream(seed, "yield-order")
    order = [sites[i] for i in rng.permutation(len(sites))]
    for s in order:
        # canonical chain first, without enumerating the candidate set
        canonical = template.chains[s]
        if chain_alive(canonical) and not any(q in used for q in canonical.qubits):
            assigned[s] = canonical
            used.update(canonical.qubits)
            continue
        for cand in candidates(s):
            if any(q in used for q in cand.qubits):
                continue
            assigned[s] = cand
            used.update(cand.qubits)
            break

    for p in range(passes):
        rng_p = stream(seed, "yield-pass", p)
        order = [sites[i] for i in rng_p.permutation(len(sites))]
        improved = False
        for s in order:
            current = assigned[s]
            cur_score = (0, 0) if current is None else (1, local_edges(s))
            if current is not None and cur_score[1] == len(site_edges[s]):
                continue  # every incident edge realized; nothing to gain
            own = set(current.qubits) if current else set()
            best_cand, best_score = None, cur_score
            for cand in candidates(s):
                if current is not None and cand.qubits == current.qubits:
                    continue
                if any(q in used and q not in own for q in cand.qubits):
                    continue
                assigned[s] = cand
                score = (1, local_edges(s))
                assigned[s] = current
                if score > best_score:
                    best_cand, best_score = cand, score
            if best_cand is not None:
                used -= own
                used.update(best_cand.qubits)
                assigned[s] = best_cand
                improved = True
        if not improved:
            break

    chains = {s: ch for s, ch in assigned.items() if ch is not None}
    edge_map = {}
    for e, axis in lattice.edges.items():
        a, b = e
        if a not in chains or b not in chains:
            continue
        realized = _realize_edge(e, axis, chains[a], chains[b], working,
                                 tuple(c for c, _ in template.edge_map[e]))
        if realized is not None:
            edge_map[e] = realized
    logical = LogicalGraph(template.spec, frozenset(chains),
                           {e: lattice.edges[e] for e in edge_map})
    emb = EmbeddingMap(template.target_family, template.target_shape,
                       template.spec, chains, edge_map)
    report = YieldReport(
        embedded_sites=len(chains), total_sites=len(sites),
        embedded_edges=len(edge_map), total_edges=lattice.n_edges,
        dropped_sites=tuple(s for s in sites if s not in chains),
        dropped_edges=tuple(e for e in sorted(lattice.edges) if e not in edge_map),
    )
    return logical, emb, report


# --------------------------------------------------------------------------
# Physical problems
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddedProblem:
    """Physical Ising problem: coupler -> value map over the used qubits.

    Chain couplers sit at -chain_strength; couplers that exist in hardware
    but are not part of any chain or mapped edge are absent from the map
    (semantically zero).  ``offset`` is the constant separating physical
    from logical energies on unbroken states.
    """

    instance: Instance
    chains: dict  # Site -> Chain, restricted to the instance's sites
    values: dict  # Coupler -> float
    chain_strength: float
    offset: float
    target_family: str

    @property
    def variables(self) -> tuple[Qubit, ...]:
        return tuple(sorted({q for ch in self.chains.values() for q in ch.qubits}))

    @property
    def key(self) -> str:
        return f"{self.instance.id}:{self.target_family}"


def set_parameters(instance: Instance, emb: EmbeddingMap,
                   chain_strength: float = 2.0) -> EmbeddedProblem:
    """Physical coupling values for an instance under an embedding.

    Chain couplers get -chain_strength; x/y edge couplers carry the logical
    J; the two couplers of a z-edge carry J/2 each.  Raises RangeViolation
    if any value leaves [-2, 1].
    """
    if chain_strength <= 0:
        raise RangeViolationError("chain strength must be positive")
    graph = instance.graph
    missing_sites = graph.sites - set(emb.chains)
    if missing_sites:
        raise ValueError(f"embedding lacks chain for site {sorted(missing_sites)[0]}")
    missing_edges = set(graph.edges) - set(emb.edge_map)
    if missing_edges:
        raise ValueError(f"embedding lacks edge {sorted(missing_edges)[0]}")

    values: dict[Coupler, float] = {}
    n_chain_couplers = 0
    chains = {}
    for site in sorted(graph.sites):
        ch = emb.chains[site]
        chains[site] = ch
        for cpl in ch.couplers:
            values[cpl] = -chain_strength
            n_chain_couplers += 1
    for edge in sorted(graph.edges):
        j = instance.couplings[edge]
        for cpl, share in emb.edge_map[edge]:
            if cpl in values:
                raise ValueError(f"coupler {cpl} assigned twice")
            values[cpl] = j * share

    out_of_range = [(c, v) for c, v in values.items() if not -2.0 <= v <= 1.0]
    if out_of_range:
        c, v = out_of_range[0]
        raise RangeViolationError(f"coupler {c} value {v} outside [-2, 1]")
    return EmbeddedProblem(
        instance=instance,
        chains=chains,
        values=values,
        chain_strength=chain_strength,
        offset=-chain_strength * n_chain_couplers,
        target_family=emb.target_family,
    )


def physical_energy(problem: EmbeddedProblem, state: Mapping[Qubit, int]) -> float:
    """Sum over mapped couplers of value * s_i * s_j."""
    missing = [q for q in problem.variables if q not in state]
    if missing:
        raise IncompleteAssignmentError(f"no spin for qubit {missing[0]}")
    return float(sum(v * state[a] * state[b]
                     for (a, b), v in problem.values.items()))


def unembed(state: Mapping[Qubit, int], emb: EmbeddingMap | EmbeddedProblem,
            tie_seed: int) -> tuple[dict, BrokenChainReport]:
    """Majority-vote chain values; exact ties broken by the seeded stream.

    Tie draws are consumed in sorted-site order, so the result is
    deterministic for a given (state, tie_seed).
    """
    chains = emb.chains
    rng = stream(tie_seed, "unembed-tie")
    out: dict[Site, int] = {}
    broken: list[Site] = []
    for site in sorted(chains):
        ch = chains[site]
        try:
            votes = [state[q] for q in ch.qubits]
        except KeyError as exc:
            raise IncompleteAssignmentError(f"no spin for qubit {exc.args[0]}") from exc
        total = sum(votes)
        if abs(total) == len(votes):
            out[site] = votes[0]
            continue
        broken.append(site)
        if total > 0:
            out[site] = 1
        elif total < 0:
            out[site] = -1
        else:
            out[site] = 1 if rng.integers(0, 2) else -1
    return out, BrokenChainReport(tuple(broken), len(chains))


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

def _site_key(site: Site) -> str:
    return ",".join(str(v) for v in site)


def embedding_to_json(emb: EmbeddingMap) -> dict:
    return {
        "target": {"family": emb.target_family, "shape": list(emb.target_shape)},
        "spec": list(emb.spec.sides),
        "chains": {_site_key(s): [list(q) for q in emb.chains[s].qubits]
                   for s in sorted(emb.chains)},
        "edges": [[list(a), list(b),
                   [[[list(c[0]), list(c[1])], share]
                    for (c, share) in emb.edge_map[(a, b)]]]
                  for (a, b) in sorted(emb.edge_map)],
    }


def embedding_from_json(doc: dict, graph: HardwareGraph) -> EmbeddingMap:
    """Rebuild an embedding; chain couplers are re-derived from the graph."""
    spec = LatticeSpec(*doc["spec"])
    chains = {}
    for key, qubits in doc["chains"].items():
        site = tuple(int(v) for v in key.split(","))
        qs = tuple(tuple(q) for q in qubits)
        induced = []
        for i, a in enumerate(qs):
            for b in qs[i + 1:]:
                if graph.has_coupler(a, b):
                    induced.append(_canon(a, b))
        chains[site] = Chain(site, qs, tuple(sorted(induced)))
    edge_map = {}
    for a, b, weighted in doc["edges"]:
        e = canon_edge(tuple(a), tuple(b))
        edge_map[e] = tuple(
            (_canon(tuple(cpl[0]), tuple(cpl[1])), float(share))
            for cpl, share in weighted)
    return EmbeddingMap(doc["target"]["family"], tuple(doc["target"]["shape"]),
                        spec, chains, edge_map)
