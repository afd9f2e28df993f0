"""Success-probability estimation, time-to-solution, and aggregation.

Time to solution is the expected effort to reach the ground state at 99%
confidence:

    TTS(e) = e * log(0.01) / log(1 - p(e))

with natural logarithms (the base cancels in the ratio).  p = 0 maps to an
infinite (unsolved) TTS; p is clamped to 1 - 1e-12 so a perfect estimate
yields a tiny positive value instead of a division by zero.

``run_protocol`` reproduces the batch protocol: at each effort of a
geometric ladder, draw batches of ``batch_size`` reads until the presumed
ground state has been found ``target_hits`` times (or ``max_batches`` is
exhausted), pooling all reads at that effort into the estimate.  The
presumed ground state is the registry's best known energy; if it improves
mid-protocol, hit counts at all efforts are recomputed from the retained
per-read energies before the curve is emitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, EmptyGroupError, WrongCountError
from .rng import spawn_seeds
from .sampler import (
    GroundTruthRegistry,
    SamplerConfig,
    SampleSet,
    _logical_row_energies,
    problem_key,
    sample_sa,
)

__all__ = [
    "UNSOLVED",
    "SuccessEstimate",
    "EffortPoint",
    "TTSCurve",
    "InstanceResult",
    "AggregateStats",
    "SpeedupRow",
    "IsometrySummary",
    "tts",
    "run_protocol",
    "run_protocol_raw",
    "ProtocolRaw",
    "select_optimal",
    "aggregate",
    "speedup_pairs",
    "isometry_consistency",
]

UNSOLVED = math.inf

_LOG_FAIL = math.log(0.01)
_P_CLAMP = 1.0 - 1e-12


def tts(effort: float, p: float) -> float:
    """Expected effort to hit the ground state with 99% confidence."""
    if effort <= 0:
        raise ValueError("effort must be positive")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"success probability {p} outside [0, 1]")
    if p == 0.0:
        return UNSOLVED
    p = min(p, _P_CLAMP)
    return effort * _LOG_FAIL / math.log1p(-p)


@dataclass(frozen=True)
class SuccessEstimate:
    effort: int
    reads: int
    hits: int

    def __post_init__(self):
        if self.hits > self.reads:
            raise ValueError("hits cannot exceed reads")

    @property
    def p_hat(self) -> float:
        return self.hits / self.reads


@dataclass(frozen=True)
class EffortPoint:
    effort: int
    estimate: SuccessEstimate
    tts: float  # math.inf when unsolved
    batches: int
    target_reached: bool

    @property
    def solved(self) -> bool:
        return math.isfinite(self.tts)


@dataclass(frozen=True)
class TTSCurve:
    key: str
    points: tuple

    def __post_init__(self):
        efforts = [p.effort for p in self.points]
        if efforts != sorted(set(efforts)):
            raise ValueError("efforts must be strictly increasing")


@dataclass(frozen=True)
class InstanceResult:
    key: str
    solved: bool
    t_opt: int | None
    tts_opt: float

    def as_row(self) -> dict:
        return {"instance_id": self.key, "solved": self.solved,
                "t_opt": self.t_opt, "tts_opt": self.tts_opt}


@dataclass
class ProtocolRaw:
    """Per-effort read energies retained for recounting hits.

    Hit counts depend on the registry's best known energy, which may keep
    improving after this problem ran (another batch, another embedding of
    the same instance); the raw energies let callers recount before the
    curve is finalized.
    """

    key: str
    per_effort: list  # (effort, energy_chunks, mult_chunks, batches)

    def finalize(self, target: float, target_hits: int) -> TTSCurve:
        points = []
        for effort, energy_chunks, mult_chunks, batches in self.per_effort:
            hits = sum(int(m[e == target].sum())
                       for e, m in zip(energy_chunks, mult_chunks))
            reads = sum(int(m.sum()) for m in mult_chunks)
            estimate = SuccessEstimate(effort, reads, hits)
            points.append(EffortPoint(effort, estimate,
                                      tts(effort, estimate.p_hat),
                                      batches, hits >= target_hits))
        return TTSCurve(self.key, tuple(points))


def run_protocol_raw(instance, problem, template: SamplerConfig,
                     ladder: Sequence[int], batch_size: int = 500,
                     target_hits: int = 50, max_batches: int = 10,
                     registry: GroundTruthRegistry | None = None,
                     sampler: Callable[[object, SamplerConfig], SampleSet] | None = None,
                     registry_key: str | None = None
                     ) -> tuple[ProtocolRaw, GroundTruthRegistry]:
    """Batch phase of the protocol; see ``run_protocol``.

    Stopping decisions use the registry's best energy as of each batch;
    retained energies allow exact recounts later.
    """
    ladder = list(ladder)
    if not ladder or ladder != sorted(set(ladder)) or ladder[0] < 1:
        raise ValueError("effort ladder must be non-empty, positive, strictly increasing")
    if registry is None:
        registry = GroundTruthRegistry()
    if sampler is None:
        sampler = sample_sa
    key = registry_key or instance.id

    per_effort: list[tuple[int, list, list, int]] = []
    for effort in ladder:
        energy_chunks: list[np.ndarray] = []
        mult_chunks: list[np.ndarray] = []
        batches = 0
        while batches < max_batches:
            seed = int(spawn_seeds(1, template.seed, "protocol-batch",
                                   effort, batches)[0])
            config = template.with_overrides(effort=effort, reads=batch_size,
                                             seed=seed)
            samples = sampler(problem, config)
            energies, _ = _logical_row_energies(samples)
            energy_chunks.append(energies)
            mult_chunks.append(samples.multiplicities)
            batches += 1
            best_row = float(energies.min())
            if registry.best(key) is None or best_row < registry.best(key):
                registry.observe(key, best_row)
            target = registry.best(key)
            hits_so_far = sum(
                int(m[e == target].sum())
                for e, m in zip(energy_chunks, mult_chunks))
            if hits_so_far >= target_hits:
                break
        per_effort.append((effort, energy_chunks, mult_chunks, batches))
    return ProtocolRaw(key, per_effort), registry


def run_protocol(instance, problem, template: SamplerConfig,
                 ladder: Sequence[int], batch_size: int = 500,
                 target_hits: int = 50, max_batches: int = 10,
                 registry: GroundTruthRegistry | None = None,
                 sampler: Callable[[object, SamplerConfig], SampleSet] | None = None,
                 registry_key: str | None = None) -> TTSCurve:
    """Estimate p and TTS at every effort of the ladder for one problem.

    Batch b at effort e runs with seed word (template.seed,
    "protocol-batch", e, b), so the whole protocol is deterministic.  The
    sampler is injectable for testing; it defaults to ``sample_sa``.  Hit
    counts in the returned curve are recomputed against the registry's
    final best energy before the curve is emitted.
    """
    key = registry_key or instance.id
    raw, registry = run_protocol_raw(
        instance, problem, template, ladder, batch_size=batch_size,
        target_hits=target_hits, max_batches=max_batches, registry=registry,
        sampler=sampler, registry_key=registry_key)
    curve = raw.finalize(registry.best(key), target_hits)
    registry.clear_invalidated(key)
    return curve


def select_optimal(curve: TTSCurve) -> InstanceResult:
    """Effort minimizing TTS; ties go to the smaller effort."""
    if not curve.points:
        raise ValueError("empty curve")
    best = None
    for point in curve.points:
        if point.solved and (best is None or point.tts < best.tts):
            best = point
    if best is None:
        return InstanceResult(curve.key, False, None, UNSOLVED)
    return InstanceResult(curve.key, True, best.effort, best.tts)


@dataclass(frozen=True)
class AggregateStats:
    group: object
    n_instances: int
    n_unsolved: int
    p10: float
    p25: float
    median: float
    p75: float
    p90: float


def aggregate(results: Sequence[InstanceResult], group) -> AggregateStats:
    """Median and 10/25/75/90 percentiles of TTS over solved instances.

    Quantiles use linear interpolation between order statistics; unsolved
    instances are excluded and reported as a count.
    """
    values = [r.tts_opt for r in results if r.solved]
    if not values:
        raise EmptyGroupError(f"group {group!r} has no solved instances")
    p10, p25, p50, p75, p90 = np.percentile(values, [10, 25, 50, 75, 90],
                                            method="linear")
    return AggregateStats(group, len(results), len(results) - len(values),
                          float(p10), float(p25), float(p50), float(p75), float(p90))


@dataclass(frozen=True)
class SpeedupRow:
    instance_id: str
    tts_a: float
    tts_b: float

    @property
    def ratio(self) -> float | None:
        if math.isfinite(self.tts_a) and math.isfinite(self.tts_b):
            return self.tts_a / self.tts_b
        return None


def speedup_pairs(results_a: Sequence[InstanceResult],
                  results_b: Sequence[InstanceResult]) -> list[SpeedupRow]:
    """Per-instance TTS ratios over the ids common to both result sets."""
    by_a = {r.key: r for r in results_a}
    by_b = {r.key: r for r in results_b}
    rows = []
    for key in sorted(by_a.keys() & by_b.keys()):
        rows.append(SpeedupRow(key, by_a[key].tts_opt, by_b[key].tts_opt))
    return rows


@dataclass(frozen=True)
class IsometrySummary:
    effort: int
    median: float | None
    best: float | None
    worst: float | None
    ratio: float | None  # worst / best; None when any isometry is unsolved
    n_unsolved: int


def isometry_consistency(results: Sequence[InstanceResult],
                         effort: int) -> IsometrySummary:
    """Best/worst/median TTS over the 48 isometry runs of one instance."""
    if len(results) != 48:
        raise WrongCountError(f"need 48 isometry results, got {len(results)}")
    for r in results:
        if r.solved and r.t_opt != effort:
            raise ValueError(f"result {r.key} ran at effort {r.t_opt}, not {effort}")
    solved = [r.tts_opt for r in results if r.solved]
    n_unsolved = len(results) - len(solved)
    if not solved:
        return IsometrySummary(effort, None, None, None, None, n_unsolved)
    best, worst = min(solved), max(solved)
    ratio = worst / best if n_unsolved == 0 else None
    return IsometrySummary(effort, float(np.median(solved)), best, worst,
                           ratio, n_unsolved)
