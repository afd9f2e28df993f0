"""JIT-compiled inner loops: Metropolis sweeps and exhaustive enumeration.

Randomness inside the kernels comes from SplitMix64, a published 64-bit
generator with pure integer state, so results are bit-identical across
platforms.  Each simulated-annealing read receives its own 64-bit seed word
(derived in ``rng``); the kernel uses the stream for the initial state, one
Fisher-Yates shuffle per sweep, and one uniform per Metropolis proposal, in
that fixed order.

Problems arrive as CSR adjacency: ``indptr``/``indices``/``weights`` with
every edge stored in both directions, plus an edge list for full-energy
evaluation.
"""

from __future__ import annotations

import math

import numba
import numpy as np

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)


@numba.njit(numba.uint64(numba.uint64), cache=True, inline="always")
def _splitmix64(state):
    z = state
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@numba.njit(cache=True)
def _uniform01(word):
    # 53-bit mantissa from the top bits
    return (word >> U64(11)) * (1.0 / 9007199254740992.0)


@numba.njit(cache=True)
def _bounded(word, n):
    # multiply-shift bounded draw; bias is negligible for n << 2^32
    return int(((word >> U64(32)) * U64(n)) >> U64(32))


@numba.njit(cache=True)
def sa_read(indptr, indices, weights, betas, seed, state):
    """One anneal: random +/-1 start, len(betas) Metropolis sweeps.

    Each sweep visits every variable once in a freshly shuffled order.
    Returns the final energy; ``state`` is filled in place.
    """
    n = state.shape[0]
    s = U64(seed)
    for i in range(n):
        s += _GOLDEN
        state[i] = 1 if _splitmix64(s) >> U64(63) else -1
    order = np.empty(n, dtype=np.int64)
    for sweep in range(betas.shape[0]):
        beta = betas[sweep]
        for i in range(n):
            order[i] = i
        for i in range(n - 1, 0, -1):
            s += _GOLDEN
            j = _bounded(_splitmix64(s), i + 1)
            tmp = order[i]
            order[i] = order[j]
            order[j] = tmp
        for idx in range(n):
            v = order[idx]
            h = 0.0
            for e in range(indptr[v], indptr[v + 1]):
                h += weights[e] * state[indices[e]]
            delta = -2.0 * state[v] * h
            s += _GOLDEN
            if delta <= 0.0 or _uniform01(_splitmix64(s)) < math.exp(-beta * delta):
                state[v] = -state[v]
    energy = 0.0
    for v in range(n):
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u > v:
                energy += weights[e] * state[v] * state[u]
    return energy


@numba.njit(cache=True)
def sa_batch(indptr, indices, weights, betas, seeds):
    """Run one independent read per seed word; returns (states, energies)."""
    n = indptr.shape[0] - 1
    reads = seeds.shape[0]
    states = np.empty((reads, n), dtype=np.int8)
    energies = np.empty(reads, dtype=np.float64)
    for r in range(reads):
        energies[r] = sa_read(indptr, indices, weights, betas, seeds[r], states[r])
    return states, energies


@numba.njit(cache=True)
def exhaustive_min(indptr, indices, weights, n):
    """Exact minimum over all 2^n states via a Gray-code walk.

    Returns (min_energy, optimum_count, gray_code_of_one_optimum); spin i of
    code g is -1 when bit i is set, +1 otherwise.  Energies are sums of
    half-integer couplings, so float equality is exact.
    """
    state = np.ones(n, dtype=np.int8)
    energy = 0.0
    for v in range(n):
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if u > v:
                energy += weights[e] * state[v] * state[u]
    best = energy
    count = 1
    best_gray = U64(0)
    total = U64(1) << U64(n)
    t = U64(1)
    while t < total:
        b = 0
        tt = t
        while tt & U64(1) == U64(0):
            tt >>= U64(1)
            b += 1
        h = 0.0
        for e in range(indptr[b], indptr[b + 1]):
            h += weights[e] * state[indices[e]]
        energy += -2.0 * state[b] * h
        state[b] = -state[b]
        if energy < best:
            best = energy
            count = 1
            best_gray = t ^ (t >> U64(1))
        elif energy == best:
            count += 1
        t += U64(1)
    return best, count, best_gray
