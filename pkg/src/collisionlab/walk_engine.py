"""Trajectory sampling for discrete- and continuous-time walks.

All sampling is reproducible: randomness flows from a :class:`SeedSpec`,
and independent streams are derived by hashing a path of integers into the
seed sequence, so replicas can run in any order (or in parallel) without
sharing generator state.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .graph_core import Network


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus a derived stream identifier."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit nonnegative integer")
        if not 0 <= self.stream_id < 2**64:
            raise ValueError("stream_id must be a 64-bit nonnegative integer")

    def generator(self):
        return np.random.default_rng(
            np.random.SeedSequence((self.master_seed, self.stream_id))
        )

    def stream(self, *path):
        """Derive an independent child stream from a path of integers."""
        mix = np.random.SeedSequence(
            (self.master_seed, self.stream_id) + tuple(int(p) for p in path)
        )
        child = int(mix.generate_state(1, np.uint64)[0])
        return SeedSpec(self.master_seed, child)


def _as_seed(seed):
    return seed if isinstance(seed, SeedSpec) else SeedSpec(int(seed))


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return _as_seed(seed).generator()


def substream_rng(master_seed, *path):
    """Generator for a (master seed, path) stream; used by replica chunking."""
    return np.random.default_rng(
        np.random.SeedSequence((int(master_seed),) + tuple(int(p) for p in path))
    )


@dataclass(frozen=True)
class Trajectory:
    """Discrete-time path X_0..X_T as a vertex array."""

    steps: np.ndarray

    @property
    def start(self):
        return int(self.steps[0])

    @property
    def horizon(self):
        return len(self.steps) - 1

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class JumpTrajectory:
    """Continuous-time path as contiguous holding segments on [0, t_max].

    ``vertices[i]`` is occupied on [``entry_times[i]``, ``entry_times[i+1]``),
    the final segment ending at ``t_max``.  ``entry_times[0]`` is 0.
    """

    vertices: np.ndarray
    entry_times: np.ndarray
    t_max: float

    @property
    def start(self):
        return int(self.vertices[0])

    def exit_times(self):
        return np.append(self.entry_times[1:], self.t_max)

    def segments(self):
        exits = self.exit_times()
        for v, s, e in zip(self.vertices, self.entry_times, exits):
            yield int(v), float(s), float(e)

    def vertex_at(self, t):
        """Occupied vertex at time t (arrays accepted); t must lie in [0, t_max]."""
        i = np.searchsorted(self.entry_times, t, side="right") - 1
        return self.vertices[i]

    def restrict(self, t0, t1):
        """Sub-trajectory on [t0, t1], re-based to start at time 0."""
        if not 0.0 <= t0 < t1 <= self.t_max:
            raise ValueError("window must satisfy 0 <= t0 < t1 <= t_max")
        lo = int(np.searchsorted(self.entry_times, t0, side="right") - 1)
        hi = int(np.searchsorted(self.entry_times, t1, side="left"))
        verts = self.vertices[lo:hi].copy()
        times = self.entry_times[lo:hi] - t0
        times[0] = 0.0
        return JumpTrajectory(verts, times, t_max=t1 - t0)


def _sampling_tables(net: Network):
    """Padded (neighbors, cumulative) tables for one-step sampling, cached.

    Each row's final real cumulative entry is pinned to 1.0 so a uniform draw
    in [0, 1) always selects a real neighbor; padding is never selected.
    Isolated vertices (single-vertex networks) self-loop.
    """
    if net._tables is None:
        offsets, targets, weights = net.adjacency_csr()
        n = net.vertex_count
        degs = np.diff(offsets)
        width = max(int(degs.max()) if n else 1, 1)
        nbr = np.zeros((n, width), dtype=np.int64)
        cum = np.ones((n, width))
        for u in range(n):
            lo, hi = offsets[u], offsets[u + 1]
            d = hi - lo
            if d == 0:
                nbr[u, :] = u
                continue
            c = np.cumsum(weights[lo:hi])
            c /= c[-1]
            c[-1] = 1.0
            nbr[u, :d] = targets[lo:hi]
            nbr[u, d:] = targets[hi - 1]
            cum[u, :d] = c
        net._tables = (nbr, cum)
    return net._tables


def sample_step(net, u, rng):
    """One transition of the conductance-weighted walk from ``u``."""
    nbr, cum = _sampling_tables(net)
    idx = int(np.searchsorted(cum[u], rng.random(), side="right"))
    return int(nbr[u, idx])


class NetworkStepper:
    """Batched pair-walk stepper over a network's aggregated adjacency."""

    def __init__(self, net: Network, start=0):
        self.nbr, self.cum = _sampling_tables(net)
        self.start = int(start)
        self.vertex_count = net.vertex_count

    def new_state(self, m):
        return np.full(m, self.start, dtype=np.int64)

    def advance(self, state, rng):
        r = rng.random(state.shape[0])
        idx = (self.cum[state] <= r[:, None]).sum(axis=1)
        state[:] = self.nbr[state, idx]

    def same(self, a, b):
        return a == b


def walk_discrete(net, start, T, seed):
    """Sample X_0..X_T for the conductance-weighted walk from ``start``.

    ``seed`` may be a :class:`SeedSpec`, a bare integer, or a numpy Generator.
    """
    if T < 0:
        raise ValueError("T must be nonnegative")
    rng = _as_rng(seed)
    out = np.empty(T + 1, dtype=np.int64)
    out[0] = start
    u = int(start)
    for n in range(1, T + 1):
        u = sample_step(net, u, rng)
        out[n] = u
    return Trajectory(out)


def walk_continuous(net, start, t_max, seed):
    """Sample the continuous-time walk that crosses each edge e at rate c(e).

    The holding time at ``u`` is Exponential(c(u)) and the jump target is
    drawn from the one-step kernel; a jump across a self-loop does not change
    the vertex, so it simply extends the current segment (the visible law is
    unchanged by memorylessness).
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    rng = _as_rng(seed)
    rates = net.vertex_conductance
    verts = [int(start)]
    times = [0.0]
    t = 0.0
    u = int(start)
    while True:
        rate = rates[u]
        if rate == 0.0:
            break
        t += rng.exponential(1.0 / rate)
        if t >= t_max:
            break
        v = sample_step(net, u, rng)
        if v != u:
            verts.append(v)
            times.append(t)
            u = v
    return JumpTrajectory(
        np.array(verts, dtype=np.int64), np.array(times), t_max=float(t_max)
    )


def walk_pair(net, start_x, start_y, T, seed, replica=0):
    """Two independent discrete walks from derived substreams of ``seed``."""
    base = _as_seed(seed)
    tx = walk_discrete(net, start_x, T, base.stream(replica, 0))
    ty = walk_discrete(net, start_y, T, base.stream(replica, 1))
    return tx, ty


def write_trajectory_csv(path, items):
    """Write trajectories as rows replica,walker,step_or_entry_time,vertex.

    ``items`` yields (replica, walker, trajectory) with either trajectory type.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["replica", "walker", "step_or_entry_time", "vertex"])
        for replica, walker, traj in items:
            if isinstance(traj, Trajectory):
                for n, v in enumerate(traj.steps):
                    writer.writerow([replica, walker, n, int(v)])
            else:
                for v, entry, _ in traj.segments():
                    writer.writerow([replica, walker, repr(entry), v])
