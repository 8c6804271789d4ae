"""Continuous-time collision measure, the voter model, and coalescing walks.

The collision measure of two continuous-time trajectories is the Lebesgue
measure of the set of times at which they occupy the same vertex, computed
exactly by intersecting their holding segments.

The voter model here rings each vertex at rate 1; on a ring the vertex
adopts the opinion of a neighbor chosen with probability proportional to
edge conductance.  Under these dynamics the opinion lineage of any vertex is
a rate-1 jump-kernel walk run backwards in time, which makes single-site
marginals equal to hitting probabilities of that walk, coalescing walks the
dual of the full process, and the stationary-measure-weighted opinion
average a martingale.  On a finite connected network the process absorbs at
consensus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import TAG_CTCOLLIDE, TAG_VOTER, chunk_sizes, run_chunked
from .errors import HorizonMismatchError
from .walk_engine import (
    JumpTrajectory,
    _as_rng,
    _sampling_tables,
    sample_step,
    substream_rng,
    walk_continuous,
)


# ---------------------------------------------------------------------------
# Collision measure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CollisionMeasure:
    """Total occupation-time overlap and the merged equality intervals."""

    total: float
    intervals: tuple  # of (start, end), disjoint and sorted
    t_max: float


def collision_measure(jump_x: JumpTrajectory, jump_y: JumpTrajectory):
    """Lebesgue measure of {t <= t_max : X_t = Y_t}, by segment intersection."""
    if jump_x.t_max != jump_y.t_max:
        raise HorizonMismatchError(
            f"trajectories cover [0, {jump_x.t_max}] and [0, {jump_y.t_max}]"
        )
    xv, xt, xe = jump_x.vertices, jump_x.entry_times, jump_x.exit_times()
    yv, yt, ye = jump_y.vertices, jump_y.entry_times, jump_y.exit_times()
    intervals = []
    i = j = 0
    while i < len(xv) and j < len(yv):
        lo = max(xt[i], yt[j])
        hi = min(xe[i], ye[j])
        if hi > lo and xv[i] == yv[j]:
            if intervals and intervals[-1][1] == lo:
                intervals[-1] = (intervals[-1][0], float(hi))
            else:
                intervals.append((float(lo), float(hi)))
        if xe[i] <= ye[j]:
            i += 1
        else:
            j += 1
    total = float(sum(e - s for s, e in intervals))
    return CollisionMeasure(total=total, intervals=tuple(intervals), t_max=jump_x.t_max)


def discretization_integral(jump_x, jump_y, grid):
    """Average over offsets s in [0, 1) of #{n : X_{n+s} = Y_{n+s}, n+s <= t_max}.

    This left-endpoint Riemann sum converges to the exact collision measure
    as ``grid`` grows; the error is at most one grid cell per discontinuity
    of the per-offset count.
    """
    if grid < 1:
        raise ValueError("grid must be at least 1")
    if jump_x.t_max != jump_y.t_max:
        raise HorizonMismatchError(
            f"trajectories cover [0, {jump_x.t_max}] and [0, {jump_y.t_max}]"
        )
    t_max = jump_x.t_max
    offsets = np.arange(grid) / grid
    n = np.arange(int(np.floor(t_max)) + 2)
    q = offsets[:, None] + n[None, :]
    q = q[q <= t_max]
    eq = jump_x.vertex_at(q) == jump_y.vertex_at(q)
    return float(eq.sum()) / grid


# ---------------------------------------------------------------------------
# Voter model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VoterConfiguration:
    """Opinion in {0, 1} for every vertex, at a point in time."""

    opinions: np.ndarray
    time: float


def _initial_opinions(net, initial):
    ops = initial.opinions if isinstance(initial, VoterConfiguration) else initial
    ops = np.asarray(ops, dtype=np.int8)
    if ops.shape != (net.vertex_count,):
        raise ValueError("initial opinions must cover every vertex")
    if not np.isin(ops, (0, 1)).all():
        raise ValueError("opinions must be 0 or 1")
    return ops


def voter_simulate(net, initial, t_max, seed):
    """Run one voter trajectory until consensus or ``t_max``.

    Returns (final configuration, consensus time or None).  The consensus
    time is 0.0 when the initial configuration is already constant.
    """
    ops = _initial_opinions(net, initial).copy()
    V = net.vertex_count
    ones = int(ops.sum())
    if ones in (0, V):
        return VoterConfiguration(ops, 0.0), 0.0
    rng = _as_rng(seed)
    t = 0.0
    while True:
        t += rng.exponential(1.0 / V)
        if t > t_max:
            return VoterConfiguration(ops, float(t_max)), None
        u = int(rng.integers(V))
        v = sample_step(net, u, rng)
        ones += int(ops[v]) - int(ops[u])
        ops[u] = ops[v]
        if ones in (0, V):
            return VoterConfiguration(ops, float(t)), float(t)


def _voter_batch(net, initial, t_max, size, rng):
    V = net.vertex_count
    nbr, cum = _sampling_tables(net)
    opinions = np.tile(initial, (size, 1))
    ones = opinions.sum(axis=1, dtype=np.int64)
    t = np.zeros(size)
    cons_val = np.full(size, -1, dtype=np.int8)
    cons_time = np.full(size, np.nan)
    settled = (ones == 0) | (ones == V)
    cons_val[settled] = (ones[settled] > 0).astype(np.int8)
    cons_time[settled] = 0.0
    active = np.flatnonzero(~settled)
    while active.size:
        k = active
        dt = rng.exponential(1.0 / V, k.size)
        u = rng.integers(0, V, k.size)
        r = rng.random(k.size)
        t[k] += dt
        alive = t[k] <= t_max
        k, u, r = k[alive], u[alive], r[alive]
        if k.size == 0:
            break
        idx = (cum[u] <= r[:, None]).sum(axis=1)
        v = nbr[u, idx]
        old = opinions[k, u]
        new = opinions[k, v]
        ones[k] += new.astype(np.int64) - old.astype(np.int64)
        opinions[k, u] = new
        done = (ones[k] == 0) | (ones[k] == V)
        if done.any():
            d = k[done]
            cons_val[d] = (ones[d] > 0).astype(np.int8)
            cons_time[d] = t[d]
        active = k[~done]
    return opinions, cons_val, cons_time


def _voter_chunk(payload):
    net, initial, t_max, seed, chunk_index, size = payload
    rng = substream_rng(seed, TAG_VOTER, chunk_index)
    return _voter_batch(net, initial, t_max, size, rng)


@dataclass(frozen=True)
class VoterEnsembleResult:
    """Replica-level voter outcomes; consensus_value is -1 when not reached."""

    final_opinions: np.ndarray  # (replicas, V) configuration at min(consensus, t_max)
    consensus_value: np.ndarray  # (replicas,) in {-1, 0, 1}
    consensus_time: np.ndarray  # (replicas,) NaN when consensus was not reached
    t_max: float
    seed: int

    @property
    def replicas(self):
        return self.final_opinions.shape[0]

    def consensus_fraction(self):
        return float((self.consensus_value >= 0).mean())


def voter_ensemble(net, initial, t_max, replicas, seed, workers=1):
    """Replicated voter runs with worker-count-independent results."""
    ops = _initial_opinions(net, initial)
    sizes = chunk_sizes(replicas)
    payloads = [
        (net, ops, float(t_max), int(seed), i, size) for i, size in enumerate(sizes)
    ]
    pieces = run_chunked(_voter_chunk, payloads, workers=workers)
    return VoterEnsembleResult(
        final_opinions=np.concatenate([p[0] for p in pieces]),
        consensus_value=np.concatenate([p[1] for p in pieces]),
        consensus_time=np.concatenate([p[2] for p in pieces]),
        t_max=float(t_max),
        seed=int(seed),
    )


def dual_walker_positions(net, start, t, replicas, seed):
    """Positions at time ``t`` of rate-1 jump-kernel walks from ``start``.

    This is the opinion-lineage walk of the voter model: the chance that a
    vertex holds opinion 1 at time t equals the chance that this walk sits on
    an initially-1 vertex at time t.  Jump counts are Poisson(t).
    """
    rng = _as_rng(seed)
    nbr, cum = _sampling_tables(net)
    jumps = rng.poisson(t, replicas)
    pos = np.full(replicas, start, dtype=np.int64)
    for step in range(int(jumps.max(initial=0))):
        act = np.flatnonzero(jumps > step)
        r = rng.random(act.size)
        idx = (cum[pos[act]] <= r[:, None]).sum(axis=1)
        pos[act] = nbr[pos[act], idx]
    return pos


# ---------------------------------------------------------------------------
# Coalescing walks
# ---------------------------------------------------------------------------


class _WalkerUnionFind:
    """Union-find over walker ids; the minimal id is always the root."""

    __slots__ = ("parent",)

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return ra


@dataclass(frozen=True)
class CoalescingResult:
    """Partition of walkers into coalesced groups and their positions at t_max."""

    partition: tuple  # of tuples of walker ids, each sorted, ordered by minimum
    positions: tuple  # per-walker vertex at t_max
    t_max: float


def coalescing_walks(net, starts, t_max, seed):
    """Rate-1 jump-kernel walks that merge permanently upon meeting.

    Walkers sharing a start coalesce at time 0.  Merged walkers move as one
    cluster (carried by the minimal walker id) at rate 1.
    """
    starts = [int(s) for s in starts]
    k = len(starts)
    if k == 0:
        raise ValueError("at least one walker is required")
    uf = _WalkerUnionFind(k)
    occupied = {}
    for i, s in enumerate(starts):
        if s in occupied:
            uf.union(occupied[s], i)
        else:
            occupied[s] = i
    positions = {uf.find(i): starts[i] for i in range(k)}
    roots = sorted(positions)
    rng = _as_rng(seed)
    t = 0.0
    while True:
        m = len(roots)
        t += rng.exponential(1.0 / m)
        if t > t_max:
            break
        root = roots[int(rng.integers(m))]
        old = positions[root]
        v = sample_step(net, old, rng)
        if v == old:
            continue
        del occupied[old]
        if v in occupied:
            other = occupied[v]
            keep = uf.union(root, other)
            drop = other if keep == root else root
            positions.pop(drop)
            positions[keep] = v
            occupied[v] = keep
            roots = sorted(positions)
        else:
            occupied[v] = root
            positions[root] = v
    groups = {}
    for i in range(k):
        groups.setdefault(uf.find(i), []).append(i)
    partition = tuple(tuple(groups[r]) for r in sorted(groups))
    pos = tuple(positions[uf.find(i)] for i in range(k))
    return CoalescingResult(partition=partition, positions=pos, t_max=float(t_max))


# ---------------------------------------------------------------------------
# Replicated continuous-time collision experiments
# ---------------------------------------------------------------------------


def _ct_chunk(payload):
    net, start, t_max, grid, seed, chunk_index, size = payload
    rng = substream_rng(seed, TAG_CTCOLLIDE, chunk_index)
    rows = np.empty((size, 2))
    for i in range(size):
        jx = walk_continuous(net, start, t_max, rng)
        jy = walk_continuous(net, start, t_max, rng)
        rows[i, 0] = collision_measure(jx, jy).total
        rows[i, 1] = discretization_integral(jx, jy, grid)
    return rows


def continuous_collision_ensemble(net, start, t_max, grid, replicas, seed, workers=1):
    """Per-replica (exact measure, grid integral) for pairs of rate-c walks."""
    sizes = chunk_sizes(replicas)
    payloads = [
        (net, int(start), float(t_max), int(grid), int(seed), i, size)
        for i, size in enumerate(sizes)
    ]
    pieces = run_chunked(_ct_chunk, payloads, workers=workers)
    return np.concatenate(pieces)
