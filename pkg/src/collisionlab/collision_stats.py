"""Collision statistics for two independent walks.

Exact finite-horizon quantities are computed on the product chain over
ordered vertex pairs with the diagonal as taboo set:

* ``q0(v, m)``   -- both walks start at v and avoid each other at every step
  1..m (the empty window m = 0 has probability 1 by convention);
* ``qlast(u, v, n, N)`` = p_n(u, v)^2 * q0(v, N - n) -- the last meeting in
  the window [0, N] happens at time n at vertex v;
* summing qlast over all (n, v) partitions the sample space, so the total is
  exactly 1 for every start u and horizon N.

Monte Carlo collision counting runs replicas in fixed chunks with per-chunk
seed streams, so the per-replica counts are independent of the worker count.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._parallel import TAG_GROWTH, chunk_sizes, run_chunked
from .errors import LengthMismatchError, ResourceLimitError
from .graph_core import Network, is_bipartite
from .walk_engine import NetworkStepper, Trajectory, substream_rng

# Largest |V|^2 for exact pair-chain computations.
PAIR_STATE_CAP = 250_000

# Batch the per-start pair-chain iteration only while V^3 stays small.
_BATCH_VERTEX_LIMIT = 100


@dataclass(frozen=True)
class CollisionReport:
    """Meeting times of two equal-length discrete trajectories."""

    collision_times: np.ndarray  # sorted times n >= 1 with X_n = Y_n
    collision_count: int
    includes_time_zero: bool


def count_collisions(trajectory_x, trajectory_y):
    """Exact pointwise comparison of two trajectories of equal length."""
    x = trajectory_x.steps if isinstance(trajectory_x, Trajectory) else np.asarray(trajectory_x)
    y = trajectory_y.steps if isinstance(trajectory_y, Trajectory) else np.asarray(trajectory_y)
    if len(x) != len(y):
        raise LengthMismatchError(
            f"trajectories have lengths {len(x)} and {len(y)}; they must match"
        )
    equal = x == y
    times = np.flatnonzero(equal)
    times = times[times >= 1]
    return CollisionReport(
        collision_times=times,
        collision_count=int(times.size),
        includes_time_zero=bool(equal[0]),
    )


def _check_pair_cap(net, cap):
    states = net.vertex_count**2
    if states > cap:
        raise ResourceLimitError(
            f"pair chain needs {states} states but the cap is {cap}"
        )


def q0_profile(net, v, N, cap=PAIR_STATE_CAP):
    """Array q0(v, m) for m = 0..N via taboo iteration of the pair chain."""
    _check_pair_cap(net, cap)
    P = net.one_step_matrix()
    n = net.vertex_count
    W = np.zeros((n, n))
    W[v, v] = 1.0
    out = np.empty(N + 1)
    out[0] = 1.0
    for m in range(1, N + 1):
        W = P.T @ W @ P
        np.fill_diagonal(W, 0.0)
        out[m] = W.sum()
    return out


def q0_profile_all(net, N, cap=PAIR_STATE_CAP):
    """Matrix of q0(v, m) with shape (N + 1, V), all starts at once."""
    _check_pair_cap(net, cap)
    P = net.one_step_matrix()
    n = net.vertex_count
    out = np.empty((N + 1, n))
    out[0] = 1.0
    if n <= _BATCH_VERTEX_LIMIT:
        W = np.zeros((n, n, n))
        idx = np.arange(n)
        W[idx, idx, idx] = 1.0
        for m in range(1, N + 1):
            W = np.matmul(np.matmul(P.T, W), P)
            W[:, idx, idx] = 0.0
            out[m] = W.sum(axis=(1, 2))
    else:
        for v in range(n):
            out[:, v] = q0_profile(net, v, N, cap=cap)
    return out


def q0_exact(net, v, m, cap=PAIR_STATE_CAP):
    """Probability two independent walks from v never meet at steps 1..m."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return float(q0_profile(net, v, m, cap=cap)[m])


def qlast_horizon(net, u, v, n, N, cap=PAIR_STATE_CAP):
    """Probability the last meeting in [0, N] is at time n at vertex v.

    Both walks start at u; the value is p_n(u, v)^2 * q0(v, N - n).
    """
    if not 0 <= n <= N:
        raise ValueError("need 0 <= n <= N")
    _check_pair_cap(net, cap)
    P = net.one_step_matrix()
    pn = np.linalg.matrix_power(P, n)[u, v]
    return float(pn * pn * q0_profile(net, v, N - n, cap=cap)[N - n])


def last_collision_identity_all(net, N, cap=PAIR_STATE_CAP):
    """Vector over starts u of sum_{n<=N} sum_v p_n(u,v)^2 q0(v, N-n).

    Decomposing by the time and place of the last meeting partitions the
    pair-path space, so every entry equals 1 up to floating-point error.
    """
    _check_pair_cap(net, cap)
    prof = q0_profile_all(net, N, cap=cap)
    P = net.one_step_matrix()
    n_v = net.vertex_count
    total = np.zeros(n_v)
    Pn = np.eye(n_v)
    for n in range(N + 1):
        total += (Pn * Pn) @ prof[N - n]
        if n < N:
            Pn = Pn @ P
    return total


def last_collision_identity(net, u, N, cap=PAIR_STATE_CAP):
    """The last-collision partition total for a single start vertex."""
    _check_pair_cap(net, cap)
    prof = q0_profile_all(net, N, cap=cap)
    P = net.one_step_matrix()
    row = np.zeros(net.vertex_count)
    row[u] = 1.0
    total = 0.0
    for n in range(N + 1):
        total += float((row * row) @ prof[N - n])
        if n < N:
            row = row @ P
    return total


@dataclass(frozen=True)
class HorizonEstimates:
    """Exact taboo probabilities over a finite window for one start vertex.

    ``q0[m, v]`` is q0(v, m); ``qlast[n, v]`` is the last-meeting probability
    at (n, v) for walks from ``start``; their grand total is ``identity_total``.
    """

    start: int
    horizon: int
    q0: np.ndarray
    qlast: np.ndarray
    identity_total: float


def horizon_estimates(net, u, N, cap=PAIR_STATE_CAP):
    """Bundle q0 profiles and the last-meeting table for walks from ``u``."""
    prof = q0_profile_all(net, N, cap=cap)
    P = net.one_step_matrix()
    n_v = net.vertex_count
    qlast = np.empty((N + 1, n_v))
    row = np.zeros(n_v)
    row[u] = 1.0
    for n in range(N + 1):
        qlast[n] = (row * row) * prof[N - n]
        if n < N:
            row = row @ P
    return HorizonEstimates(
        start=int(u),
        horizon=int(N),
        q0=prof,
        qlast=qlast,
        identity_total=float(qlast.sum()),
    )


# ---------------------------------------------------------------------------
# Monte Carlo collision growth
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthStatistics:
    horizon: int
    mean: float
    median: float
    q10: float
    q90: float
    replicas: int
    seed: int


@dataclass(frozen=True)
class GrowthResult:
    """Per-horizon collision-count statistics plus the retained raw counts."""

    horizons: tuple
    counts: np.ndarray  # shape (len(horizons), replicas)
    stats: tuple
    seed: int

    def stderr(self, i):
        """Monte Carlo standard error of the mean at horizon index i."""
        row = self.counts[i]
        return float(row.std(ddof=1) / np.sqrt(row.size))


def _growth_chunk(payload):
    stepper_x, stepper_y, horizons, seed, chunk_index, size = payload
    rng = substream_rng(seed, TAG_GROWTH, chunk_index)
    sx = stepper_x.new_state(size)
    sy = stepper_y.new_state(size)
    counters = np.zeros(size, dtype=np.int64)
    marks = {}
    for i, h in enumerate(horizons):
        marks.setdefault(h, []).append(i)
    out = np.zeros((len(horizons), size), dtype=np.int64)
    for n in range(1, max(horizons) + 1):
        stepper_x.advance(sx, rng)
        stepper_y.advance(sy, rng)
        counters += stepper_x.same(sx, sy)
        for i in marks.get(n, ()):
            out[i] = counters
    return out


def _resolve_steppers(graph, start):
    if isinstance(graph, Network):
        if start is None:
            raise ValueError("start vertex is required for an explicit network")
        if isinstance(start, tuple):
            sx, sy = start
            return NetworkStepper(graph, sx), NetworkStepper(graph, sy)
        return NetworkStepper(graph, start), NetworkStepper(graph, start)
    if hasattr(graph, "advance") and hasattr(graph, "new_state"):
        if start is not None:
            raise ValueError(
                "lattice walkers always start both walks at the center; "
                "materialize the network to use another start"
            )
        return graph, graph
    raise TypeError(f"cannot run pair walks on {type(graph).__name__}")


def collision_growth(
    graph,
    start,
    horizons,
    replicas,
    seed,
    certificate=None,
    workers=1,
):
    """Monte Carlo statistics of the collision count at each horizon.

    ``graph`` is either an explicit :class:`Network` (with ``start``) or a
    lattice coordinate walker.  ``start`` may be a single vertex (both walks
    begin there) or a pair of vertices; counts at each horizon come from one
    continued run.  When a truncation certificate applies (passed explicitly
    or carried by the walker), horizons beyond the certified range raise.
    """
    horizons = sorted(int(h) for h in horizons)
    if not horizons or horizons[0] < 0:
        raise ValueError("horizons must be nonnegative")
    if certificate is None:
        certificate = getattr(graph, "certificate", None)
    if certificate is not None:
        for T in horizons:
            certificate.require(T)
    stepper_x, stepper_y = _resolve_steppers(graph, start)
    sizes = chunk_sizes(replicas)
    payloads = [
        (stepper_x, stepper_y, tuple(horizons), int(seed), i, size)
        for i, size in enumerate(sizes)
    ]
    pieces = run_chunked(_growth_chunk, payloads, workers=workers)
    counts = np.concatenate(pieces, axis=1)
    stats = tuple(
        GrowthStatistics(
            horizon=h,
            mean=float(counts[i].mean()),
            median=float(np.median(counts[i])),
            q10=float(np.quantile(counts[i], 0.10)),
            q90=float(np.quantile(counts[i], 0.90)),
            replicas=int(replicas),
            seed=int(seed),
        )
        for i, h in enumerate(horizons)
    )
    return GrowthResult(
        horizons=tuple(horizons), counts=counts, stats=stats, seed=int(seed)
    )


# ---------------------------------------------------------------------------
# Parity
# ---------------------------------------------------------------------------


class ParityFeasibility(Enum):
    FEASIBLE = "feasible"
    ALWAYS_INFEASIBLE = "always_infeasible"


def parity_feasibility(net, u, v):
    """Whether two walks from u and v can ever occupy the same vertex.

    On a bipartite graph the color difference of the two walkers is conserved,
    so starts in different classes can never meet; every other case is
    feasible.
    """
    bip, colors = is_bipartite(net)
    if bip and colors[u] != colors[v]:
        return ParityFeasibility.ALWAYS_INFEASIBLE
    return ParityFeasibility.FEASIBLE
