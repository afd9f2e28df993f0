"""Chimera and Pegasus qubit-connectivity graphs.

Coordinates
-----------
Chimera qubits are labelled ``(row, col, u, k)`` where ``(row, col)`` indexes
the unit cell, ``u`` is the shore (0 = vertical, 1 = horizontal) and
``k < shore_size`` is the index within the shore.  Cells are complete
bipartite K_{t,t} blocks; external couplers join same-``(u, k)`` qubits in
vertically adjacent cells (vertical shore) or horizontally adjacent cells
(horizontal shore).

Pegasus qubits are labelled ``(u, w, k, z)`` with orientation ``u``
(0 = vertical, 1 = horizontal), perpendicular tile offset ``w < m``, track
``k < 12`` and parallel tile offset ``z < m - 1``.  Geometrically, a vertical
qubit is a unit-length segment at x = 12w + k spanning
y in [12z + OFF_V[k], 12z + OFF_V[k] + 12), and a horizontal qubit the
transpose with OFF_H.  Couplers:

* external -- consecutive z, same (u, w, k);
* odd      -- paired tracks 2j and 2j+1, same (u, w, z);
* internal -- a vertical and a horizontal qubit whose segments cross.

Boundary qubits with no internal couplers (tracks 0,1 at w = 0 and tracks
10,11 at w = m-1, per orientation) are trimmed from the node set, which
leaves 8(m-1)(3m-1) qubits: 5640 for m = 16.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import CountExceededError, MaskMismatchError
from .rng import stream

__all__ = [
    "OFF_V",
    "OFF_H",
    "HardwareGraph",
    "DefectMask",
    "build_chimera",
    "build_pegasus",
    "apply_defects",
    "sample_defect_mask",
    "graph_stats",
    "graph_to_json",
    "graph_from_json",
]

Qubit = tuple[int, int, int, int]
Coupler = tuple[Qubit, Qubit]

# Per-track offsets of the Pegasus qubit segments.  OFF_V[k] shifts the y
# extent of vertical track k; OFF_H[k] the x extent of horizontal track k.
OFF_V = (2, 2, 2, 2, 10, 10, 10, 10, 6, 6, 6, 6)
OFF_H = (6, 6, 6, 6, 2, 2, 2, 2, 10, 10, 10, 10)


def _canon(a: Qubit, b: Qubit) -> Coupler:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class DefectMask:
    """Qubits and couplers to remove from an ideal graph."""

    qubits: frozenset[Qubit]
    couplers: frozenset[Coupler]
    provenance: str = ""

    @staticmethod
    def empty() -> "DefectMask":
        return DefectMask(frozenset(), frozenset())


@dataclass(frozen=True)
class HardwareGraph:
    """Immutable qubit-connectivity graph (ideal or working).

    ``defects`` records the mask that was applied to the ideal graph of
    (family, shape); it is the only thing serialized besides the shape,
    ideal edges being regenerated on load.
    """

    family: str
    shape: tuple[int, ...]
    qubits: frozenset[Qubit]
    couplers: frozenset[Coupler]
    adjacency: dict = field(compare=False, repr=False)
    defects: DefectMask | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.family not in ("chimera", "pegasus"):
            raise ValueError(f"unknown family {self.family!r}")

    def has_coupler(self, a: Qubit, b: Qubit) -> bool:
        return _canon(a, b) in self.couplers

    def neighbors(self, q: Qubit) -> frozenset[Qubit]:
        return self.adjacency.get(q, frozenset())

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    @property
    def n_couplers(self) -> int:
        return len(self.couplers)


def _assemble(family: str, shape: tuple[int, ...], qubits: Iterable[Qubit],
              couplers: Iterable[Coupler],
              defects: DefectMask | None = None) -> HardwareGraph:
    qset = frozenset(qubits)
    cset = frozenset(_canon(a, b) for a, b in couplers)
    adj: dict[Qubit, set[Qubit]] = {q: set() for q in qset}
    for a, b in cset:
        if a == b:
            raise ValueError(f"self-loop at {a}")
        if a not in qset or b not in qset:
            raise ValueError(f"coupler {a}-{b} references missing qubit")
        adj[a].add(b)
        adj[b].add(a)
    frozen_adj = {q: frozenset(n) for q, n in adj.items()}
    return HardwareGraph(family, shape, qset, cset, frozen_adj, defects)


def build_chimera(rows: int, cols: int, shore: int) -> HardwareGraph:
    """Ideal Chimera graph of rows x cols cells with K_{shore,shore} cells."""
    if rows < 1 or cols < 1 or shore < 1:
        raise ValueError("chimera dimensions must be positive")
    qubits = [(r, c, u, k)
              for r in range(rows) for c in range(cols)
              for u in (0, 1) for k in range(shore)]
    couplers: list[Coupler] = []
    for r in range(rows):
        for c in range(cols):
            for kv in range(shore):
                for kh in range(shore):
                    couplers.append(((r, c, 0, kv), (r, c, 1, kh)))
            for k in range(shore):
                if r + 1 < rows:
                    couplers.append(((r, c, 0, k), (r + 1, c, 0, k)))
                if c + 1 < cols:
                    couplers.append(((r, c, 1, k), (r, c + 1, 1, k)))
    return _assemble("chimera", (rows, cols, shore), qubits, couplers)


def pegasus_internal_neighbors(m: int, q: Qubit) -> list[Qubit]:
    """Internal couplers of a (possibly trimmed) Pegasus qubit, by geometry.

    For a vertical qubit, every integer y in its span names a horizontal
    track (w_h, k_h); the crossing then fixes z_h = (x - OFF_H[k_h]) // 12.
    Neighbors outside tile bounds are dropped.
    """
    u, w, k, z = q
    out = []
    if u == 0:
        x = 12 * w + k
        y0 = 12 * z + OFF_V[k]
        for y in range(y0, y0 + 12):
            wh, kh = divmod(y, 12)
            if not 0 <= wh < m:
                continue
            zh = (x - OFF_H[kh]) // 12
            if 0 <= zh < m - 1:
                out.append((1, wh, kh, zh))
    else:
        y = 12 * w + k
        x0 = 12 * z + OFF_H[k]
        for x in range(x0, x0 + 12):
            wv, kv = divmod(x, 12)
            if not 0 <= wv < m:
                continue
            zv = (y - OFF_V[kv]) // 12
            if 0 <= zv < m - 1:
                out.append((0, wv, kv, zv))
    return out


def pegasus_qubit_exists(m: int, q: Qubit) -> bool:
    """Is q inside bounds and not trimmed (trim = no internal couplers)?"""
    u, w, k, z = q
    if u not in (0, 1) or not 0 <= w < m or not 0 <= k < 12 or not 0 <= z < m - 1:
        return False
    if w == 0 and k < 2:
        return False
    if w == m - 1 and k > 9:
        return False
    return True


def build_pegasus(m: int) -> HardwareGraph:
    """Ideal Pegasus graph of size m (m >= 2), boundary-trimmed."""
    if m < 2:
        raise ValueError("pegasus size must be >= 2")
    qubits = [(u, w, k, z)
              for u in (0, 1) for w in range(m)
              for k in range(12) for z in range(m - 1)
              if pegasus_qubit_exists(m, (u, w, k, z))]
    qset = set(qubits)
    couplers: list[Coupler] = []
    for q in qubits:
        u, w, k, z = q
        if (u, w, k, z + 1) in qset:
            couplers.append((q, (u, w, k, z + 1)))
        if k % 2 == 0 and (u, w, k + 1, z) in qset:
            couplers.append((q, (u, w, k + 1, z)))
        if u == 0:
            for nb in pegasus_internal_neighbors(m, q):
                if nb in qset:
                    couplers.append((q, nb))
    return _assemble("pegasus", (m,), qubits, couplers)


def build_graph(family: str, shape: Iterable[int]) -> HardwareGraph:
    """Dispatch on family name; shape is (rows, cols, shore) or (m,)."""
    shape = tuple(shape)
    if family == "chimera":
        return build_chimera(*shape)
    if family == "pegasus":
        return build_pegasus(*shape)
    raise ValueError(f"unknown family {family!r}")


def apply_defects(graph: HardwareGraph, mask: DefectMask) -> HardwareGraph:
    """Working graph: remove masked qubits (with incident couplers) and couplers."""
    extra_q = mask.qubits - graph.qubits
    if extra_q:
        raise MaskMismatchError(f"mask removes absent qubits, e.g. {next(iter(extra_q))}")
    extra_c = mask.couplers - graph.couplers
    if extra_c:
        raise MaskMismatchError(f"mask removes absent couplers, e.g. {next(iter(extra_c))}")
    qubits = graph.qubits - mask.qubits
    couplers = [c for c in graph.couplers
                if c not in mask.couplers
                and c[0] not in mask.qubits and c[1] not in mask.qubits]
    merged = mask
    if graph.defects is not None:
        merged = DefectMask(graph.defects.qubits | mask.qubits,
                            graph.defects.couplers | mask.couplers,
                            provenance=(graph.defects.provenance + "+" + mask.provenance).strip("+"))
    return _assemble(graph.family, graph.shape, qubits, couplers, merged)


def sample_defect_mask(graph: HardwareGraph, n_qubits: int, n_couplers: int,
                       seed: int) -> DefectMask:
    """Uniform without-replacement defect mask, deterministic per seed.

    Couplers incident to a sampled defective qubit are implicitly dead and
    are not drawn again; the ``n_couplers`` draws come from the survivors.
    """
    if n_qubits < 0 or n_couplers < 0:
        raise ValueError("defect counts must be non-negative")
    if n_qubits > graph.n_qubits:
        raise CountExceededError(f"{n_qubits} > {graph.n_qubits} qubits")
    rng = stream(seed, "defect-mask")
    all_q = sorted(graph.qubits)
    picked_q = [all_q[i] for i in rng.choice(len(all_q), size=n_qubits, replace=False)] \
        if n_qubits else []
    dead = set(picked_q)
    alive_c = sorted(c for c in graph.couplers
                     if c[0] not in dead and c[1] not in dead)
    if n_couplers > len(alive_c):
        raise CountExceededError(f"{n_couplers} > {len(alive_c)} remaining couplers")
    picked_c = [alive_c[i] for i in rng.choice(len(alive_c), size=n_couplers, replace=False)] \
        if n_couplers else []
    return DefectMask(frozenset(picked_q), frozenset(picked_c),
                      provenance=f"seed={seed}")


def is_bipartite(graph: HardwareGraph) -> bool:
    color: dict[Qubit, int] = {}
    for start in graph.qubits:
        if start in color:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            q = stack.pop()
            for nb in graph.neighbors(q):
                if nb not in color:
                    color[nb] = 1 - color[q]
                    stack.append(nb)
                elif color[nb] == color[q]:
                    return False
    return True


def graph_stats(graph: HardwareGraph) -> dict:
    """Counts, degree histogram and bipartiteness of a graph."""
    degrees = Counter(len(graph.neighbors(q)) for q in graph.qubits)
    return {
        "n_qubits": graph.n_qubits,
        "n_couplers": graph.n_couplers,
        "degree_histogram": dict(sorted(degrees.items())),
        "bipartite": is_bipartite(graph),
    }


def graph_to_json(graph: HardwareGraph) -> dict:
    """Canonical JSON document; ideal edges are regenerated, never stored."""
    defects = graph.defects or DefectMask.empty()
    if graph.family == "chimera":
        shape = {"rows": graph.shape[0], "cols": graph.shape[1], "shore": graph.shape[2]}
    else:
        shape = {"size": graph.shape[0]}
    return {
        "family": graph.family,
        "shape": shape,
        "defects": {
            "qubits": [list(q) for q in sorted(defects.qubits)],
            "couplers": [[list(a), list(b)] for a, b in sorted(defects.couplers)],
        },
    }


def graph_from_json(doc: dict) -> HardwareGraph:
    family = doc["family"]
    shape = doc["shape"]
    if family == "chimera":
        ideal = build_chimera(shape["rows"], shape["cols"], shape["shore"])
    elif family == "pegasus":
        ideal = build_pegasus(shape["size"])
    else:
        raise ValueError(f"unknown family {family!r}")
    d = doc.get("defects", {})
    mask = DefectMask(
        frozenset(tuple(q) for q in d.get("qubits", [])),
        frozenset(_canon(tuple(a), tuple(b)) for a, b in d.get("couplers", [])),
        provenance="file",
    )
    if not mask.qubits and not mask.couplers:
        return ideal
    return apply_defects(ideal, mask)
