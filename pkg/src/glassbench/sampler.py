"""Classical samplers and ground-truth bookkeeping.

``solve_exact`` enumerates every state of a small problem and is the oracle
against which everything else is checked.  ``sample_sa`` is the
simulated-annealing stand-in for an annealing processor: effort is measured
in Metropolis sweeps per read, with a geometric inverse-temperature ramp.
``GroundTruthRegistry`` tracks the best known (presumed ground-state) energy
per instance; hit counting compares logical energies after unembedding, so
degenerate ground states all count.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from . import _kernels
from .embedding import BrokenChainReport, EmbeddedProblem, EmbeddingMap
from .errors import ConfigError, TooLargeError
from .lattice import Instance
from .rng import spawn_seeds, stream

__all__ = [
    "ENUMERATION_CAP",
    "SamplerConfig",
    "SampleSet",
    "GroundTruthRegistry",
    "solve_exact",
    "sample_sa",
    "count_ground_hits",
    "beta_schedule",
]

ENUMERATION_CAP = 26

KINDS = ("exact", "sa-physical", "sa-logical")


@dataclass(frozen=True)
class SamplerConfig:
    """Sampler parameters; ``effort`` is sweeps per anneal, ``reads`` anneals."""

    kind: str = "sa-logical"
    effort: int = 64
    reads: int = 500
    seed: int = 0
    beta_min: float = 0.1
    beta_max: float = 10.0
    beta_interp: str = "geometric"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.effort < 1:
            raise ConfigError("effort must be >= 1")
        if self.reads < 1:
            raise ConfigError("reads must be >= 1")
        if not 0 < self.beta_min < self.beta_max:
            raise ConfigError("need 0 < beta_min < beta_max")
        if self.beta_interp != "geometric":
            raise ConfigError("only geometric beta interpolation is supported")

    def with_overrides(self, **kwargs) -> "SamplerConfig":
        return replace(self, **kwargs)


def beta_schedule(config: SamplerConfig) -> np.ndarray:
    """Per-sweep inverse temperatures, geometric from beta_min to beta_max.

    A single-sweep schedule runs at beta_max (the cold end).
    """
    n = config.effort
    if n == 1:
        return np.array([config.beta_max])
    ratio = config.beta_max / config.beta_min
    return config.beta_min * ratio ** (np.arange(n) / (n - 1))


def _problem_arrays(problem):
    """(variables, indptr, indices, weights) CSR form of an Ising problem."""
    if isinstance(problem, Instance):
        variables = sorted(problem.graph.sites)
        pairs = [(a, b, float(j)) for (a, b), j in sorted(problem.couplings.items())]
    elif isinstance(problem, EmbeddedProblem):
        variables = list(problem.variables)
        pairs = [(a, b, float(v)) for (a, b), v in sorted(problem.values.items())]
    else:
        raise TypeError(f"cannot sample {type(problem).__name__}")
    index = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    deg = np.zeros(n + 1, dtype=np.int64)
    for a, b, _ in pairs:
        deg[index[a] + 1] += 1
        deg[index[b] + 1] += 1
    indptr = np.cumsum(deg)
    indices = np.zeros(indptr[-1], dtype=np.int64)
    weights = np.zeros(indptr[-1], dtype=np.float64)
    cursor = indptr[:-1].copy()
    for a, b, w in pairs:
        ia, ib = index[a], index[b]
        indices[cursor[ia]] = ib
        weights[cursor[ia]] = w
        cursor[ia] += 1
        indices[cursor[ib]] = ia
        weights[cursor[ib]] = w
        cursor[ib] += 1
    return variables, indptr, indices, weights


def problem_key(problem) -> str:
    if isinstance(problem, Instance):
        return problem.id
    return problem.key


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Sampling result: distinct configurations with multiplicities.

    Rows are sorted by (energy, configuration bytes); multiplicities sum to
    ``config.reads``.  ``states`` is an int8 array of shape (rows, n) over
    ``variables``.
    """

    problem: object
    variables: tuple
    states: np.ndarray = field(repr=False)
    energies: np.ndarray = field(repr=False)
    multiplicities: np.ndarray = field(repr=False)
    config: SamplerConfig

    @property
    def n_rows(self) -> int:
        return len(self.energies)

    @property
    def reads(self) -> int:
        return int(self.multiplicities.sum())

    @property
    def best_energy(self) -> float:
        return float(self.energies[0])

    def row_assignment(self, row: int) -> dict:
        return {v: int(s) for v, s in zip(self.variables, self.states[row])}

    def content_hash(self) -> str:
        import hashlib
        h = hashlib.sha256()
        h.update(self.states.tobytes())
        h.update(self.energies.tobytes())
        h.update(self.multiplicities.tobytes())
        return h.hexdigest()

    def to_jsonl(self) -> str:
        lines = []
        for i in range(self.n_rows):
            lines.append(json.dumps({
                "problem": problem_key(self.problem),
                "energy": float(self.energies[i]),
                "multiplicity": int(self.multiplicities[i]),
                "state": [int(s) for s in self.states[i]],
            }, separators=(",", ":")))
        return "\n".join(lines) + "\n"


def _canonical_rows(states: np.ndarray, energies: np.ndarray):
    """Sort reads by (energy, state bytes) and merge duplicates."""
    order = sorted(range(len(energies)),
                   key=lambda i: (energies[i], states[i].tobytes()))
    out_states, out_energies, out_mult = [], [], []
    for i in order:
        if out_states and energies[i] == out_energies[-1] \
                and np.array_equal(states[i], out_states[-1]):
            out_mult[-1] += 1
        else:
            out_states.append(states[i])
            out_energies.append(energies[i])
            out_mult.append(1)
    return (np.array(out_states, dtype=np.int8),
            np.array(out_energies, dtype=np.float64),
            np.array(out_mult, dtype=np.int64))


def sample_sa(problem, config: SamplerConfig) -> SampleSet:
    """Simulated annealing: ``reads`` independent anneals of ``effort`` sweeps.

    Each read starts from a random +/-1 state and performs single-spin
    Metropolis updates over all variables in a fresh random order per sweep,
    with inverse temperature following ``beta_schedule``.  Read r draws its
    randomness from the stream word (config.seed, "sa-read")[r], so the
    result is bit-reproducible.
    """
    variables, indptr, indices, weights = _problem_arrays(problem)
    betas = beta_schedule(config)
    seeds = spawn_seeds(config.reads, config.seed, "sa-read")
    states, energies = _kernels.sa_batch(indptr, indices, weights, betas, seeds)
    states, energies, mult = _canonical_rows(states, energies)
    return SampleSet(problem, tuple(variables), states, energies, mult, config)


def solve_exact(problem) -> tuple[float, dict, int]:
    """Exact global minimum by exhaustive enumeration over 2^n states.

    Returns (minimum energy, one optimal assignment, number of optima).
    """
    variables, indptr, indices, weights = _problem_arrays(problem)
    n = len(variables)
    if n > ENUMERATION_CAP:
        raise TooLargeError(f"{n} variables exceeds the cap of {ENUMERATION_CAP}")
    best, count, gray = _kernels.exhaustive_min(indptr, indices, weights, n)
    assignment = {v: (-1 if (int(gray) >> i) & 1 else 1)
                  for i, v in enumerate(variables)}
    return float(best), assignment, int(count)


# --------------------------------------------------------------------------
# Ground-truth registry
# --------------------------------------------------------------------------

@dataclass
class RegistryEntry:
    energy: float
    provenance: str  # "exact" | "best-seen"
    witness: dict | None = None


class GroundTruthRegistry:
    """Best known logical energy per instance; updates are monotone.

    When an observation beats an existing entry the instance key is added to
    ``invalidated`` so callers know earlier hit counts are stale; they clear
    the flag after recounting.
    """

    def __init__(self, path: str | None = None):
        self.path = path
        self.entries: dict[str, RegistryEntry] = {}
        self.invalidated: set[str] = set()
        if path and os.path.exists(path):
            self._load()

    def best(self, key: str) -> float | None:
        entry = self.entries.get(key)
        return entry.energy if entry else None

    def record_exact(self, key: str, energy: float, witness: dict | None = None):
        existing = self.entries.get(key)
        if existing and existing.energy < energy:
            raise ValueError(
                f"{key}: exact energy {energy} above recorded best {existing.energy}")
        self.entries[key] = RegistryEntry(float(energy), "exact", witness)
        self._save()

    def observe(self, key: str, energy: float, witness: dict | None = None) -> bool:
        """Record a sampled energy; returns True when it improves the entry."""
        energy = float(energy)
        existing = self.entries.get(key)
        if existing is None:
            self.entries[key] = RegistryEntry(energy, "best-seen", witness)
            self._save()
            return False
        if energy < existing.energy:
            if existing.provenance == "exact":
                raise ValueError(f"{key}: sample energy {energy} below exact "
                                 f"minimum {existing.energy}")
            self.entries[key] = RegistryEntry(energy, "best-seen", witness)
            self.invalidated.add(key)
            self._save()
            return True
        return False

    def clear_invalidated(self, key: str):
        self.invalidated.discard(key)

    def _save(self):
        if not self.path:
            return
        doc = {k: {"energy": e.energy, "provenance": e.provenance,
                   "witness": ([[list(v), s] for v, s in sorted(e.witness.items())]
                               if e.witness else None)}
               for k, e in sorted(self.entries.items())}
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(self.path) or ".",
                                   suffix=".registry")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(doc, fh, indent=1, sort_keys=True)
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _load(self):
        with open(self.path) as fh:
            doc = json.load(fh)
        for k, e in doc.items():
            witness = None
            if e.get("witness"):
                witness = {tuple(v): int(s) for v, s in e["witness"]}
            self.entries[k] = RegistryEntry(float(e["energy"]), e["provenance"], witness)


# --------------------------------------------------------------------------
# Hit counting
# --------------------------------------------------------------------------

def _logical_row_energies(samples: SampleSet) -> tuple[np.ndarray, float]:
    """Per-row logical energy after chain unembedding; also broken fraction.

    Physical rows are unembedded by majority vote per chain; an exact tie in
    row r draws from stream (config.seed, "unembed-tie", r).  Multiplicities
    weight the broken-chain fraction.
    """
    problem = samples.problem
    if isinstance(problem, Instance):
        index = {v: i for i, v in enumerate(samples.variables)}
        edges = sorted(problem.couplings.items())
        ia = np.array([index[a] for (a, _), _ in edges], dtype=np.int64)
        ib = np.array([index[b] for (_, b), _ in edges], dtype=np.int64)
        jw = np.array([j for _, j in edges], dtype=np.float64)
        s = samples.states.astype(np.float64)
        return (s[:, ia] * s[:, ib]) @ jw, 0.0

    instance = problem.instance
    index = {v: i for i, v in enumerate(samples.variables)}
    sites = sorted(problem.chains)
    chain_idx = np.array([[index[q] for q in problem.chains[s].qubits]
                          for s in sites], dtype=np.int64)
    votes = samples.states[:, chain_idx].astype(np.int64).sum(axis=2)
    logical = np.sign(votes).astype(np.int64)
    ties = logical == 0
    for r in np.flatnonzero(ties.any(axis=1)):
        rng = stream(samples.config.seed, "unembed-tie", int(r))
        cols = np.flatnonzero(ties[r])
        draws = rng.integers(0, 2, size=len(cols)) * 2 - 1
        logical[r, cols] = draws
    chain_len = chain_idx.shape[1]
    broken_rows = (np.abs(votes) != chain_len).sum(axis=1)
    weights = samples.multiplicities / samples.multiplicities.sum()
    broken_fraction = float((broken_rows / len(sites)) @ weights)

    site_index = {s: i for i, s in enumerate(sites)}
    edges = sorted(instance.couplings.items())
    ia = np.array([site_index[a] for (a, _), _ in edges], dtype=np.int64)
    ib = np.array([site_index[b] for (_, b), _ in edges], dtype=np.int64)
    jw = np.array([j for _, j in edges], dtype=np.float64)
    sf = logical.astype(np.float64)
    return (sf[:, ia] * sf[:, ib]) @ jw, broken_fraction


def count_ground_hits(samples: SampleSet, emb: EmbeddingMap | None,
                      registry: GroundTruthRegistry,
                      registry_key: str | None = None) -> tuple[int, int, float]:
    """Hits = reads whose logical energy equals the registry's best known.

    Creates a best-seen entry on first contact; a sample below the entry
    updates the registry and flags the key for recounting.  Returns
    (hits, reads, broken chain fraction).
    """
    problem = samples.problem
    if isinstance(problem, Instance):
        instance = problem
        if emb is not None:
            raise ValueError("logical samples take no embedding")
    else:
        instance = problem.instance
    key = registry_key or instance.id

    logical_energies, broken_fraction = _logical_row_energies(samples)
    row_best = int(np.argmin(logical_energies))
    best_energy = float(logical_energies[row_best])

    if registry.best(key) is None:
        witness = None
        if isinstance(problem, Instance):
            witness = samples.row_assignment(row_best)
        registry.observe(key, best_energy, witness)
    elif best_energy < registry.best(key):
        registry.observe(key, best_energy)

    target = registry.best(key)
    hits = int(samples.multiplicities[logical_energies == target].sum())
    return hits, samples.reads, broken_fraction
