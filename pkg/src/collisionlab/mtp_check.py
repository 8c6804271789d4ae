"""Mass-transport bookkeeping and reversibility checks on rooted networks.

A mass transport assigns a nonnegative amount of mass sent from ``u`` to
``v`` on a given network.  For a random rooted network, "expected mass out"
is E[sum_v f(G, rho, v)] and "expected mass in" is E[sum_u f(G, u, rho)];
the uniform root law equates the two for every transport on a fixed finite
graph, while the conductance-biased root law instead makes the joint law of
(root, walk position) exchangeable.  Both certifications, and the exact
kernel identities connecting them, live here.

Transports are evaluated on labeled graphs (no isomorphism handling).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .collision_stats import q0_profile_all
from .errors import TransportCapExceededError
from .graph_core import Network

TRANSPORT_VALUE_CAP = 1e12


@dataclass(frozen=True)
class MassTransport:
    """Nonnegative mass f(G, u, v) sent from u to v, as a matrix builder."""

    name: str
    builder: Callable[[Network], np.ndarray]
    value_cap: float = TRANSPORT_VALUE_CAP

    def matrix(self, net):
        F = np.asarray(self.builder(net), dtype=float)
        if F.shape != (net.vertex_count, net.vertex_count):
            raise ValueError(f"transport {self.name} produced a matrix of shape {F.shape}")
        if (F < 0).any():
            raise ValueError(f"transport {self.name} produced negative mass")
        if (F > self.value_cap).any():
            raise TransportCapExceededError(
                f"transport {self.name} exceeds the value cap {self.value_cap:g}"
            )
        return F

    def value(self, net, u, v):
        return float(self.matrix(net)[u, v])


def adjacency_transport():
    """f(u, v) = 1 when some edge joins u and v."""

    def build(net):
        n = net.vertex_count
        F = np.zeros((n, n))
        for a, b, _ in net.edges:
            F[a, b] = 1.0
            F[b, a] = 1.0
        return F

    return MassTransport("adjacency", build)


def leaf_adjacency_transport():
    """f(u, v) = 1 when u has a single incident edge and it reaches v."""

    def build(net):
        base = adjacency_transport().builder(net)
        return base * (net.degrees == 1)[:, None]

    return MassTransport("leaf_adjacency", build)


def qlast_transport(n, N):
    """f(u, v) = c(u) * P(last meeting of two walks from u in [0, N] is at (n, v))."""

    def build(net):
        P = net.one_step_matrix()
        Pn = np.linalg.matrix_power(P, n)
        prof = q0_profile_all(net, N)[N - n]
        return net.vertex_conductance[:, None] * (Pn * Pn) * prof[None, :]

    return MassTransport(f"qlast:{n}:{N}", build)


def random_transport(seed, max_value=10.0):
    """Seeded nonnegative transport supported on pairs within graph distance 2."""

    def build(net):
        rng = np.random.default_rng(np.random.SeedSequence((0xF00D, int(seed))))
        A = adjacency_transport().builder(net) > 0
        reach = np.eye(net.vertex_count, dtype=bool) | A | (A @ A)
        values = rng.uniform(0.0, max_value, size=A.shape)
        return np.where(reach, values, 0.0)

    return MassTransport(f"random:{seed}", build)


def transport_by_name(name):
    """Resolve a CLI transport spec: adjacency | leaf_adjacency | qlast:<n>:<N>."""
    if name == "adjacency":
        return adjacency_transport()
    if name == "leaf_adjacency":
        return leaf_adjacency_transport()
    if name.startswith("qlast:"):
        parts = name.split(":")
        if len(parts) != 3:
            raise ValueError("qlast transport spec must look like qlast:<n>:<N>")
        n, N = int(parts[1]), int(parts[2])
        return qlast_transport(n, N)
    raise ValueError(f"unknown transport {name!r}")


@dataclass(frozen=True)
class RootedDistribution:
    """Finite mixture of (network, root law) pairs with positive weights."""

    support: tuple  # of (Network, RootLaw, weight)

    def __post_init__(self):
        weights = [w for _, _, w in self.support]
        if not weights or min(weights) <= 0:
            raise ValueError("support weights must be positive")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError("support weights must sum to 1")

    @classmethod
    def single(cls, net, root_law):
        return cls(((net, root_law, 1.0),))


def expected_mass(dist, transport, direction):
    """Exact E[sum_v f(G, rho, v)] ("out") or E[sum_u f(G, u, rho)] ("in")."""
    if direction not in ("out", "in"):
        raise ValueError("direction must be 'out' or 'in'")
    total = 0.0
    for net, law, weight in dist.support:
        F = transport.matrix(net)
        p = law.probabilities
        if direction == "out":
            total += weight * float(p @ F.sum(axis=1))
        else:
            total += weight * float(p @ F.sum(axis=0))
    return total


class MtpVerdict(Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class MtpCheck:
    verdict: MtpVerdict
    mass_out: float
    mass_in: float
    tolerance: float


def check_mtp(dist, transport, tolerance=1e-9):
    """Compare expected mass out and in; a transport cap hit is indeterminate."""
    try:
        out = expected_mass(dist, transport, "out")
        into = expected_mass(dist, transport, "in")
    except TransportCapExceededError:
        return MtpCheck(MtpVerdict.INDETERMINATE, float("nan"), float("nan"), tolerance)
    verdict = MtpVerdict.HOLDS if abs(out - into) <= tolerance else MtpVerdict.VIOLATED
    return MtpCheck(verdict, out, into, tolerance)


def check_detailed_balance_n(net, n):
    """Max over (u, v) of |c(u) p_n(u, v) - c(v) p_n(v, u)|."""
    P = np.linalg.matrix_power(net.one_step_matrix(), n)
    flow = net.vertex_conductance[:, None] * P
    return float(np.abs(flow - flow.T).max())


def received_mass_identity_all(net, N):
    """Both sides of sum_u c(u) p_n(u, v)^2 = c(v) p_{2n}(v, v) for all v, n.

    Returns (lhs, rhs) arrays of shape (N + 1, V); the two agree because the
    conductance-weighted kernel is symmetric in its endpoints.
    """
    P = net.one_step_matrix()
    c = net.vertex_conductance
    n_v = net.vertex_count
    lhs = np.empty((N + 1, n_v))
    rhs = np.empty((N + 1, n_v))
    Pn = np.eye(n_v)
    for n in range(N + 1):
        lhs[n] = c @ (Pn * Pn)
        rhs[n] = c * np.einsum("uv,vu->u", Pn, Pn)
        if n < N:
            Pn = Pn @ P
    return lhs, rhs


def received_mass_identity(net, v, N):
    """Single-vertex view of :func:`received_mass_identity_all`."""
    lhs, rhs = received_mass_identity_all(net, N)
    return lhs[:, v], rhs[:, v]


def check_reversibility_labeled(net, root_law, n):
    """Max asymmetry of the joint law P(root = a, X_n = b) on a labeled graph.

    The conductance-biased root law makes the joint law exchangeable in
    (a, b); the uniform root law generally does not on irregular graphs.
    """
    P = np.linalg.matrix_power(net.one_step_matrix(), n)
    joint = root_law.probabilities[:, None] * P
    return float(np.abs(joint - joint.T).max())
