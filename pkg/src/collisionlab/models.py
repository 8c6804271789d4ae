"""Graph model generators: lattice truncations, percolation clusters, spanning trees.

The lattice families (line segment, square box, comb) come in two forms:

* explicit truncations (:func:`gen_path_segment`, :func:`gen_grid_box`,
  :func:`gen_comb`) that materialize a :class:`~collisionlab.graph_core.Network`
  together with a :class:`TruncationCertificate`, and
* coordinate walkers (:class:`PathLattice`, :class:`GridLattice`,
  :class:`CombLattice`) that sample the same walk law without materializing
  the graph, which is what makes long-horizon experiments affordable.

A truncation with safety radius ``R`` reproduces the infinite lattice's walk
law exactly for any horizon ``T <= R - 1`` started from the designated center:
every vertex the walk can touch before the final step has the same incident
edge set as in the infinite graph.  The certificate records this horizon and
experiment runners refuse horizons beyond it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CertificateViolationError, ResourceLimitError
from .graph_core import Network, build_network

# Largest vertex count a generator will materialize explicitly.
MATERIALIZE_CAP = 5_000_000

CRITICAL_BOND_P = 0.5  # classical critical density for square-lattice bond percolation


@dataclass(frozen=True)
class RootLaw:
    """Probability law for the root vertex of a network."""

    kind: str  # "uniform" | "conductance_biased" | "fixed"
    probabilities: np.ndarray
    fixed_vertex: Optional[int] = None

    def sample(self, rng, size=None):
        n = len(self.probabilities)
        return rng.choice(n, size=size, p=self.probabilities)

    def prob(self, v):
        return float(self.probabilities[v])


def apply_root_law(net, kind, vertex=None):
    """Build a root law of the given kind over ``net``'s vertices.

    ``uniform`` puts mass 1/|V| everywhere, ``conductance_biased`` weights each
    vertex by c(v), and ``fixed`` concentrates on ``vertex``.
    """
    n = net.vertex_count
    if kind == "uniform":
        return RootLaw("uniform", np.full(n, 1.0 / n))
    if kind == "conductance_biased":
        total = net.vertex_conductance.sum()
        if total == 0.0:  # single isolated vertex
            return RootLaw("conductance_biased", np.ones(n))
        return RootLaw("conductance_biased", net.vertex_conductance / total)
    if kind == "fixed":
        if vertex is None or not (0 <= vertex < n):
            raise ValueError("fixed root law needs a valid vertex")
        p = np.zeros(n)
        p[vertex] = 1.0
        return RootLaw("fixed", p, fixed_vertex=int(vertex))
    raise ValueError(f"unknown root law kind {kind!r}")


@dataclass(frozen=True)
class TruncationCertificate:
    """Guarantee that a truncation is walk-exact up to a horizon.

    ``horizon`` is the largest step count T for which the law of
    (X_0, ..., X_T) from ``start_vertex`` matches the infinite model.
    """

    horizon: int
    safety_radius: int
    start_vertex: int

    def require(self, T):
        if T > self.horizon:
            raise CertificateViolationError(
                f"horizon {T} exceeds the certified horizon {self.horizon} "
                f"(safety radius {self.safety_radius})"
            )


@dataclass(frozen=True)
class RootedModel:
    """A generated network with its designated start vertex and metadata."""

    network: Network
    start: Optional[int] = None
    certificate: Optional[TruncationCertificate] = None
    root_law: Optional[RootLaw] = None
    coords: Optional[tuple] = None  # per-vertex labels, for debugging/tests


# ---------------------------------------------------------------------------
# Explicit lattice truncations
# ---------------------------------------------------------------------------


def gen_path_segment(R):
    """Line segment {-R..R} with unit conductances, centered at 0."""
    if R < 1:
        raise ValueError("R must be at least 1")
    n = 2 * R + 1
    edges = [(i, i + 1, 1.0) for i in range(n - 1)]
    cert = TruncationCertificate(horizon=R - 1, safety_radius=R, start_vertex=R)
    coords = tuple(range(-R, R + 1))
    return RootedModel(build_network(n, edges), start=R, certificate=cert, coords=coords)


def gen_grid_box(R, cap=MATERIALIZE_CAP):
    """(2R+1) x (2R+1) box of the square lattice with unit nearest-neighbor edges."""
    if R < 1:
        raise ValueError("R must be at least 1")
    side = 2 * R + 1
    n = side * side
    if n > cap:
        raise ResourceLimitError(f"grid box would have {n} vertices; cap is {cap}")
    idx = lambda x, y: (x + R) * side + (y + R)
    edges = []
    for x in range(-R, R + 1):
        for y in range(-R, R + 1):
            if x < R:
                edges.append((idx(x, y), idx(x + 1, y), 1.0))
            if y < R:
                edges.append((idx(x, y), idx(x, y + 1), 1.0))
    cert = TruncationCertificate(horizon=R - 1, safety_radius=R, start_vertex=idx(0, 0))
    coords = tuple((x, y) for x in range(-R, R + 1) for y in range(-R, R + 1))
    return RootedModel(
        build_network(n, edges), start=idx(0, 0), certificate=cert, coords=coords
    )


def gen_comb(R, cap=MATERIALIZE_CAP):
    """Comb truncation: spine {-R..R} x {0} with a tooth {x} x {1..R} at every spine vertex.

    Tooth height equals spine radius so a single parameter certifies the
    horizon; the origin (0, 0) is the designated start.
    """
    if R < 1:
        raise ValueError("R must be at least 1")
    cols = 2 * R + 1
    height = R + 1
    n = cols * height
    if n > cap:
        raise ResourceLimitError(f"comb would have {n} vertices; cap is {cap}")
    idx = lambda x, y: (x + R) * height + y
    edges = []
    for x in range(-R, R + 1):
        if x < R:
            edges.append((idx(x, 0), idx(x + 1, 0), 1.0))
        for y in range(R):
            edges.append((idx(x, y), idx(x, y + 1), 1.0))
    cert = TruncationCertificate(horizon=R - 1, safety_radius=R, start_vertex=idx(0, 0))
    coords = tuple((x, y) for x in range(-R, R + 1) for y in range(height))
    return RootedModel(
        build_network(n, edges), start=idx(0, 0), certificate=cert, coords=coords
    )


def gen_torus(side):
    """side x side square torus with unit conductances (wrap-around grid)."""
    if side < 2:
        raise ValueError("side must be at least 2")
    idx = lambda x, y: x * side + y
    edges = []
    for x in range(side):
        for y in range(side):
            edges.append((idx(x, y), idx((x + 1) % side, y), 1.0))
            edges.append((idx(x, y), idx(x, (y + 1) % side), 1.0))
    coords = tuple((x, y) for x in range(side) for y in range(side))
    return RootedModel(build_network(side * side, edges), start=0, coords=coords)


# ---------------------------------------------------------------------------
# Percolation
# ---------------------------------------------------------------------------


class _UnionFind:
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
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def gen_percolation_cluster(n, p=CRITICAL_BOND_P, seed=0):
    """Largest open cluster of bond percolation on the (n+1) x (n+1) box.

    Each nearest-neighbor bond of the box is retained independently with
    probability ``p``.  The largest cluster (ties broken by smallest minimal
    vertex index) is returned re-indexed densely, with a uniform root law.
    Deterministic given ``seed``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    side = n + 1
    sites = side * side
    idx = lambda x, y: x * side + y
    bonds = []
    for x in range(side):
        for y in range(side):
            if x < n:
                bonds.append((idx(x, y), idx(x + 1, y)))
            if y < n:
                bonds.append((idx(x, y), idx(x, y + 1)))
    rng = np.random.default_rng(seed)
    keep = rng.random(len(bonds)) < p

    uf = _UnionFind(sites)
    for (a, b), k in zip(bonds, keep):
        if k:
            uf.union(a, b)
    roots = np.fromiter((uf.find(s) for s in range(sites)), dtype=np.int64, count=sites)
    sizes = np.bincount(roots, minlength=sites)
    best_root = int(np.flatnonzero(sizes == sizes.max())[0])
    # roots are minimal members of their components, so the first maximal root
    # is also the tie-break by smallest minimal vertex index
    members = np.flatnonzero(roots == best_root)
    relabel = {int(s): i for i, s in enumerate(members)}
    edges = [
        (relabel[a], relabel[b], 1.0)
        for (a, b), k in zip(bonds, keep)
        if k and a in relabel and b in relabel
    ]
    net = build_network(len(members), edges)
    coords = tuple((int(s) // side, int(s) % side) for s in members)
    return RootedModel(
        net,
        start=0,
        root_law=apply_root_law(net, "uniform"),
        coords=coords,
    )


# ---------------------------------------------------------------------------
# Uniform spanning trees (loop-erased random walk sampling)
# ---------------------------------------------------------------------------


def gen_wilson_ust(base, seed=0):
    """Uniformly random spanning tree of ``base`` via loop-erased random walks.

    With non-unit conductances the tree is weighted-uniform (probability
    proportional to the product of its edge conductances).  The sweep is
    rooted at vertex 0; the resulting law does not depend on that choice.
    Deterministic given ``seed``.
    """
    n = base.vertex_count
    if n == 1:
        return Network(1, [])
    # incident edge instances per vertex (self-loops listed once; walking one
    # returns to the same vertex and is immediately loop-erased)
    inc = [[] for _ in range(n)]
    for a, b, w in base.edges:
        inc[a].append((b, w))
        if b != a:
            inc[b].append((a, w))
    cum = []
    targets = []
    for u in range(n):
        ws = np.array([w for _, w in inc[u]])
        c = np.cumsum(ws)
        c /= c[-1]
        c[-1] = 1.0
        cum.append(c)
        targets.append([v for v, _ in inc[u]])

    rng = np.random.default_rng(seed)
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    next_hop = [None] * n  # (target, weight) chosen on the last visit
    for start in range(1, n):
        if in_tree[start]:
            continue
        u = start
        while not in_tree[u]:
            i = int(np.searchsorted(cum[u], rng.random(), side="right"))
            v = targets[u][i]
            next_hop[u] = (v, inc[u][i][1])
            u = v
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            u = next_hop[u][0]
    # every vertex except the sweep root ends in the tree, and its last
    # recorded hop is its parent on the loop-erased path that committed it
    edges = [(u, hop[0], hop[1]) for u, hop in enumerate(next_hop) if u != 0]
    return build_network(n, edges)


# ---------------------------------------------------------------------------
# Coordinate walkers for the lattice families
# ---------------------------------------------------------------------------


class PathLattice:
    """Walk on the integer line, exact for horizons up to radius - 1."""

    def __init__(self, radius):
        if radius < 1:
            raise ValueError("radius must be at least 1")
        self.radius = int(radius)
        self.certificate = TruncationCertificate(
            horizon=self.radius - 1, safety_radius=self.radius, start_vertex=self.radius
        )

    def new_state(self, m):
        return np.zeros(m, dtype=np.int64)

    def advance(self, state, rng):
        r = rng.random(state.shape[0])
        state += np.where(r < 0.5, -1, 1)

    def same(self, a, b):
        return a == b

    def materialize(self):
        return gen_path_segment(self.radius)


class GridLattice:
    """Walk on the square lattice, exact for horizons up to radius - 1."""

    def __init__(self, radius):
        if radius < 1:
            raise ValueError("radius must be at least 1")
        self.radius = int(radius)
        side = 2 * self.radius + 1
        center = self.radius * side + self.radius
        self.certificate = TruncationCertificate(
            horizon=self.radius - 1, safety_radius=self.radius, start_vertex=center
        )

    def new_state(self, m):
        return np.zeros((m, 2), dtype=np.int64)

    def advance(self, state, rng):
        r = rng.random(state.shape[0])
        state[r < 0.25, 0] -= 1
        state[(r >= 0.25) & (r < 0.5), 0] += 1
        state[(r >= 0.5) & (r < 0.75), 1] -= 1
        state[r >= 0.75, 1] += 1

    def same(self, a, b):
        return (a == b).all(axis=1)

    def materialize(self):
        return gen_grid_box(self.radius)


class CombLattice:
    """Walk on the comb (spine with upward teeth), exact up to radius - 1.

    State columns are (spine coordinate, tooth height); height 0 is the spine.
    Within the certified horizon the walk cannot reach tooth tips or spine
    ends, so the unbounded coordinate rules below realize the truncation's law
    exactly.
    """

    def __init__(self, radius):
        if radius < 1:
            raise ValueError("radius must be at least 1")
        self.radius = int(radius)
        origin = self.radius * (self.radius + 1)
        self.certificate = TruncationCertificate(
            horizon=self.radius - 1, safety_radius=self.radius, start_vertex=origin
        )

    def new_state(self, m):
        return np.zeros((m, 2), dtype=np.int64)

    def advance(self, state, rng):
        r = rng.random(state.shape[0])
        spine = state[:, 1] == 0
        state[spine & (r < 1 / 3), 0] -= 1
        state[spine & (r >= 1 / 3) & (r < 2 / 3), 0] += 1
        state[spine & (r >= 2 / 3), 1] = 1
        tooth = ~spine
        state[tooth & (r < 0.5), 1] -= 1
        state[tooth & (r >= 0.5), 1] += 1

    def same(self, a, b):
        return (a == b).all(axis=1)

    def materialize(self):
        return gen_comb(self.radius)


LATTICE_WALKERS = {
    "path": PathLattice,
    "grid": GridLattice,
    "comb": CombLattice,
}
