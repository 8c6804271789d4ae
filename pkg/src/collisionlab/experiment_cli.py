"""Reproducible experiment runner and command-line interface.

An experiment is described by a single JSON config document; command-line
flags override config fields, and the environment variable
``COLLISIONLAB_SEED`` overrides the config's master seed (explicit ``--seed``
beats both).  The master seed defaults to a fixed constant so that bare
invocations are reproducible.

Results are wrapped in a :class:`ResultEnvelope` whose deterministic body
(version, canonical config echo, payload) is byte-identical across runs and
across worker counts; wall-clock time and the worker count live in the
envelope's ``meta`` section, outside the deterministic body.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import __version__
from .collision_stats import (
    PAIR_STATE_CAP,
    collision_growth,
    last_collision_identity,
)
from .errors import (
    CertificateViolationError,
    CollisionLabError,
    ConfigError,
    ResourceLimitError,
)
from .graph_core import DENSE_VERTEX_CAP, network_from_json
from .interacting import continuous_collision_ensemble, voter_ensemble
from .models import (
    LATTICE_WALKERS,
    RootedModel,
    apply_root_law,
    gen_percolation_cluster,
    gen_torus,
    gen_wilson_ust,
)
from .mtp_check import RootedDistribution, check_mtp, transport_by_name
from .walk_engine import SeedSpec, walk_pair, write_trajectory_csv

DEFAULT_MASTER_SEED = 1729
SEED_ENV_VAR = "COLLISIONLAB_SEED"

EXPERIMENT_KINDS = ("gen", "collide", "identity", "mtp", "voter", "ctcollide")

# fields that control execution only and are excluded from the deterministic echo
_EXECUTION_FIELDS = ("output", "envelope_path", "workers", "dump_trajectories", "dump_limit")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    model: Optional[dict] = None
    network_file: Optional[str] = None
    start: Optional[int] = None
    horizons: Optional[tuple] = None
    replicas: int = 1000
    n_steps: Optional[int] = None
    t_max: Optional[float] = None
    grid: int = 128
    transport: Optional[str] = None
    root_law: str = "uniform"
    initial: Optional[str] = None
    tolerance: float = 1e-9
    master_seed: int = DEFAULT_MASTER_SEED
    output: Optional[str] = None
    envelope_path: Optional[str] = None
    workers: int = 1
    dump_trajectories: Optional[str] = None
    dump_limit: int = 4

    def canonical(self):
        """Deterministic config echo: execution fields and unset fields dropped."""
        out = {}
        for f in fields(self):
            if f.name in _EXECUTION_FIELDS:
                continue
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out


def config_from_dict(doc):
    """Build a config from a plain dict, rejecting unknown fields."""
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    doc = dict(doc)
    if "horizons" in doc and doc["horizons"] is not None:
        doc["horizons"] = tuple(int(h) for h in doc["horizons"])
    if "kind" not in doc:
        raise ConfigError("kind: missing experiment kind")
    return ExperimentConfig(**doc)


@dataclass(frozen=True)
class ResultEnvelope:
    """Experiment result with a deterministic body and run metadata."""

    version: str
    config: dict
    payload: dict
    meta: dict

    def deterministic_dict(self):
        return {"version": self.version, "config": self.config, "payload": self.payload}

    def deterministic_bytes(self):
        doc = json.dumps(
            self.deterministic_dict(), sort_keys=True, separators=(",", ":"),
            allow_nan=False,
        )
        return (doc + "\n").encode("utf-8")

    def to_json(self):
        doc = dict(self.deterministic_dict())
        doc["meta"] = self.meta
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Model resolution
# ---------------------------------------------------------------------------


@dataclass
class ResolvedGraph:
    name: str
    walker: object = None  # lattice coordinate walker, when available
    _model: Optional[RootedModel] = None
    _materialize: object = None

    def model(self):
        if self._model is None:
            self._model = self._materialize()
        return self._model

    @property
    def certificate(self):
        if self.walker is not None:
            return self.walker.certificate
        return self.model().certificate


def _model_params(spec, *names):
    missing = [n for n in names if n not in spec]
    if missing:
        raise ConfigError(f"model.{missing[0]}: required for model {spec.get('name')!r}")
    return [spec[n] for n in names]


def resolve_graph(config):
    """Turn the config's model spec or network file into a runnable graph."""
    if config.model is not None:
        spec = config.model
        name = spec.get("name")
        if name in LATTICE_WALKERS:
            (R,) = _model_params(spec, "R")
            walker = LATTICE_WALKERS[name](int(R))
            return ResolvedGraph(name=name, walker=walker, _materialize=walker.materialize)
        if name == "percolation":
            (n,) = _model_params(spec, "n")
            p = float(spec.get("p", 0.5))
            seed = int(spec.get("seed", config.master_seed))
            return ResolvedGraph(
                name=name,
                _materialize=lambda: gen_percolation_cluster(int(n), p, seed),
            )
        if name == "torus":
            (side,) = _model_params(spec, "side")
            return ResolvedGraph(name=name, _materialize=lambda: gen_torus(int(side)))
        if name == "ust_torus":
            (side,) = _model_params(spec, "side")
            seed = int(spec.get("seed", config.master_seed))

            def build():
                tree = gen_wilson_ust(gen_torus(int(side)).network, seed)
                return RootedModel(tree, start=0)

            return ResolvedGraph(name=name, _materialize=build)
        raise ConfigError(f"model.name: unknown model {name!r}")
    if config.network_file is not None:
        def load():
            with open(config.network_file) as fh:
                return RootedModel(network_from_json(json.load(fh)), start=0)

        return ResolvedGraph(name="network", _materialize=load)
    raise ConfigError("model: an experiment needs a model or a network file")


def _effective_start(config, model):
    if config.start is not None:
        return int(config.start)
    return model.start if model.start is not None else 0


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    field: str
    message: str
    category: str  # "config" | "certificate" | "resource"

    def __str__(self):
        return f"{self.field}: {self.message}"


def _lattice_vertex_count(name, R):
    side = 2 * R + 1
    return {"path": side, "grid": side * side, "comb": side * (R + 1)}[name]


def _violations(config):
    out = []
    if config.kind not in EXPERIMENT_KINDS:
        out.append(Violation("kind", f"unknown experiment kind {config.kind!r}", "config"))
        return out
    if not 0 <= config.master_seed < 2**64:
        out.append(Violation("master_seed", "must be a 64-bit nonnegative integer", "config"))
    if config.workers < 1:
        out.append(Violation("workers", "must be at least 1", "config"))

    needs_graph = True
    if config.model is None and config.network_file is None and needs_graph:
        out.append(Violation("model", "a model or network file is required", "config"))
        return out
    if config.model is not None:
        name = config.model.get("name")
        if name in LATTICE_WALKERS:
            R = config.model.get("R")
            if R is None or int(R) < 1:
                out.append(Violation("model.R", "radius must be an integer >= 1", "config"))
                return out
        elif name == "percolation":
            n = config.model.get("n")
            if n is None or int(n) < 1:
                out.append(Violation("model.n", "box size must be an integer >= 1", "config"))
            p = float(config.model.get("p", 0.5))
            if not 0.0 <= p <= 1.0:
                out.append(Violation("model.p", "bond density must lie in [0, 1]", "config"))
        elif name in ("torus", "ust_torus"):
            side = config.model.get("side")
            if side is None or int(side) < 2:
                out.append(Violation("model.side", "side must be an integer >= 2", "config"))
        else:
            out.append(Violation("model.name", f"unknown model {name!r}", "config"))
            return out

    if config.kind in ("collide", "voter", "ctcollide"):
        if config.replicas < 1:
            out.append(Violation("replicas", f"must be at least 1 (got {config.replicas})", "config"))

    if config.kind == "collide":
        if not config.horizons:
            out.append(Violation("horizons", "at least one horizon is required", "config"))
        else:
            if any(h < 0 for h in config.horizons):
                out.append(Violation("horizons", "horizons must be nonnegative", "config"))
            cert_horizon = _certified_horizon(config)
            if cert_horizon is not None:
                for i, h in enumerate(config.horizons):
                    if h > cert_horizon:
                        out.append(
                            Violation(
                                f"horizons[{i}]",
                                f"horizon {h} exceeds the certified horizon {cert_horizon}",
                                "certificate",
                            )
                        )

    if config.kind == "identity":
        if config.n_steps is None or config.n_steps < 0:
            out.append(Violation("n_steps", "window N must be a nonnegative integer", "config"))
        v = _known_vertex_count(config)
        if v is not None:
            if v > DENSE_VERTEX_CAP:
                out.append(
                    Violation(
                        "model",
                        f"{v} vertices exceed the dense kernel cap {DENSE_VERTEX_CAP}",
                        "resource",
                    )
                )
            elif v * v > PAIR_STATE_CAP:
                out.append(
                    Violation(
                        "model",
                        f"{v}^2 pair states exceed the pair-chain cap {PAIR_STATE_CAP}",
                        "resource",
                    )
                )

    if config.kind == "mtp":
        if config.transport is None:
            out.append(Violation("transport", "a transport name is required", "config"))
        else:
            try:
                transport_by_name(config.transport)
            except ValueError as exc:
                out.append(Violation("transport", str(exc), "config"))
        if config.root_law not in ("uniform", "biased", "conductance_biased"):
            out.append(Violation("root_law", f"unknown root law {config.root_law!r}", "config"))
        v = _known_vertex_count(config)
        if v is not None and v > DENSE_VERTEX_CAP:
            out.append(
                Violation(
                    "model",
                    f"{v} vertices exceed the dense kernel cap {DENSE_VERTEX_CAP}",
                    "resource",
                )
            )

    if config.kind in ("voter", "ctcollide"):
        if config.t_max is not None and config.t_max <= 0:
            out.append(Violation("t_max", "must be positive", "config"))
    if config.kind == "ctcollide":
        if config.grid < 1:
            out.append(Violation("grid", "must be at least 1", "config"))
    return out


def _certified_horizon(config):
    if config.start is not None:
        return None  # explicit start: a finite-network run, not a truncation
    if config.model is not None and config.model.get("name") in LATTICE_WALKERS:
        return int(config.model["R"]) - 1
    return None


def _known_vertex_count(config):
    if config.model is not None:
        name = config.model.get("name")
        if name in LATTICE_WALKERS:
            return _lattice_vertex_count(name, int(config.model["R"]))
        if name == "torus":
            return int(config.model["side"]) ** 2
    return None


def validate(config):
    """All certificate and cap checks, without running; returns message strings."""
    return [str(v) for v in _violations(config)]


def _raise_violations(config):
    problems = _violations(config)
    if not problems:
        return
    first = problems[0]
    message = "; ".join(str(p) for p in problems)
    if first.category == "certificate":
        raise CertificateViolationError(message)
    if first.category == "resource":
        raise ResourceLimitError(message)
    raise ConfigError(message)


# ---------------------------------------------------------------------------
# Experiment payloads
# ---------------------------------------------------------------------------


def _sha256_array(arr):
    return hashlib.sha256(np.ascontiguousarray(arr).tobytes()).hexdigest()


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _run_gen(config, resolved):
    model = resolved.model()
    net = model.network
    sidecar = {
        "model": config.model or {"name": "network"},
        "start": model.start,
        "root_law": model.root_law.kind if model.root_law else None,
        "certificate": (
            {
                "horizon": model.certificate.horizon,
                "safety_radius": model.certificate.safety_radius,
                "start_vertex": model.certificate.start_vertex,
            }
            if model.certificate
            else None
        ),
    }
    payload = {
        "network": net.to_json_dict(),
        "sidecar": sidecar,
    }
    return payload, None


def _run_collide(config, resolved):
    if resolved.walker is not None and config.start is None:
        graph, start = resolved.walker, None
    else:
        # an explicit start materializes the graph (caps apply) and makes this
        # a finite-network experiment; the center-based certificate no longer
        # constrains the horizon
        model = resolved.model()
        graph, start = model.network, _effective_start(config, model)
    result = collision_growth(
        graph,
        start,
        config.horizons,
        config.replicas,
        config.master_seed,
        workers=config.workers,
    )
    rows = [
        [s.horizon, s.mean, s.median, s.q10, s.q90, s.replicas, s.seed]
        for s in result.stats
    ]
    csv_text = _csv_text(
        ["horizon", "mean", "median", "q10", "q90", "replicas", "seed"], rows
    )
    payload = {
        "stats": [
            {
                "horizon": s.horizon,
                "mean": s.mean,
                "median": s.median,
                "q10": s.q10,
                "q90": s.q90,
                "replicas": s.replicas,
                "seed": s.seed,
            }
            for s in result.stats
        ],
        "counts_sha256": _sha256_array(result.counts.astype("<i8")),
    }
    if config.dump_trajectories:
        _dump_sample_trajectories(config, resolved)
    return payload, csv_text


def _dump_sample_trajectories(config, resolved):
    model = resolved.model()
    net, start = model.network, _effective_start(config, model)
    T = max(config.horizons)
    seed = SeedSpec(config.master_seed)
    items = []
    for replica in range(min(config.dump_limit, config.replicas)):
        tx, ty = walk_pair(net, start, start, T, seed, replica=replica)
        items.append((replica, 0, tx))
        items.append((replica, 1, ty))
    write_trajectory_csv(config.dump_trajectories, items)


def _run_identity(config, resolved):
    model = resolved.model()
    net = model.network
    u = _effective_start(config, model)
    total = last_collision_identity(net, u, int(config.n_steps))
    return {"u": u, "N": int(config.n_steps), "total": total}, None


def _run_mtp(config, resolved):
    model = resolved.model()
    net = model.network
    kind = "conductance_biased" if config.root_law == "biased" else config.root_law
    law = apply_root_law(net, kind)
    transport = transport_by_name(config.transport)
    result = check_mtp(
        RootedDistribution.single(net, law), transport, tolerance=config.tolerance
    )
    return {
        "out": result.mass_out,
        "in": result.mass_in,
        "verdict": result.verdict.value,
    }, None


def _parse_initial(spec, net, start):
    V = net.vertex_count
    ops = np.zeros(V, dtype=np.int8)
    if spec is None:
        spec = f"single:{start}"
    if spec == "zeros":
        return ops
    if spec == "ones":
        return ops + 1
    if spec.startswith("single:"):
        v = int(spec.split(":", 1)[1])
        if not 0 <= v < V:
            raise ConfigError(f"initial: vertex {v} out of range")
        ops[v] = 1
        return ops
    if spec.startswith("vertices:"):
        for tok in spec.split(":", 1)[1].split(","):
            v = int(tok)
            if not 0 <= v < V:
                raise ConfigError(f"initial: vertex {v} out of range")
            ops[v] = 1
        return ops
    raise ConfigError(f"initial: cannot parse {spec!r}")


def _run_voter(config, resolved):
    model = resolved.model()
    net = model.network
    start = _effective_start(config, model)
    t_max = config.t_max if config.t_max is not None else 50.0 * net.vertex_count**2
    initial = _parse_initial(config.initial, net, start)
    ens = voter_ensemble(
        net, initial, t_max, config.replicas, config.master_seed, workers=config.workers
    )
    rows = []
    for i in range(ens.replicas):
        val = int(ens.consensus_value[i])
        reached = val >= 0
        rows.append(
            [
                i,
                val if reached else "",
                repr(float(ens.consensus_time[i])) if reached else "",
            ]
        )
    csv_text = _csv_text(["replica", "consensus_value", "consensus_time"], rows)
    reached = ens.consensus_value >= 0
    payload = {
        "replicas": int(ens.replicas),
        "t_max": float(t_max),
        "consensus_fraction": float(reached.mean()),
        "consensus_ones_fraction": float((ens.consensus_value == 1).mean()),
        "mean_consensus_time": (
            float(ens.consensus_time[reached].mean()) if reached.any() else None
        ),
        "rows_sha256": _sha256_array(
            np.column_stack(
                [ens.consensus_value.astype("<i8"), ens.consensus_time.astype("<f8")]
            )
        ),
    }
    return payload, csv_text


def _run_ctcollide(config, resolved):
    model = resolved.model()
    net = model.network
    start = _effective_start(config, model)
    t_max = config.t_max if config.t_max is not None else 5.0
    table = continuous_collision_ensemble(
        net,
        start,
        t_max,
        config.grid,
        config.replicas,
        config.master_seed,
        workers=config.workers,
    )
    rows = [
        [i, t_max, repr(float(m)), repr(float(g))]
        for i, (m, g) in enumerate(table)
    ]
    csv_text = _csv_text(
        ["replica", "T_max", "measure", "integral_grid_estimate"], rows
    )
    payload = {
        "replicas": int(table.shape[0]),
        "t_max": float(t_max),
        "grid": int(config.grid),
        "mean_measure": float(table[:, 0].mean()),
        "mean_integral": float(table[:, 1].mean()),
        "rows_sha256": _sha256_array(table.astype("<f8")),
    }
    return payload, csv_text


_RUNNERS = {
    "gen": _run_gen,
    "collide": _run_collide,
    "identity": _run_identity,
    "mtp": _run_mtp,
    "voter": _run_voter,
    "ctcollide": _run_ctcollide,
}


def run(config):
    """Validate, dispatch, and wrap the named experiment in an envelope."""
    _raise_violations(config)
    resolved = resolve_graph(config)
    t0 = time.perf_counter()
    payload, csv_text = _RUNNERS[config.kind](config, resolved)
    wall = time.perf_counter() - t0
    envelope = ResultEnvelope(
        version=__version__,
        config=config.canonical(),
        payload=payload,
        meta={"wall_clock_s": wall, "workers": config.workers},
    )
    _write_outputs(config, envelope, csv_text)
    return envelope


def _write_outputs(config, envelope, csv_text):
    if config.output:
        if config.kind == "gen":
            with open(config.output, "w", newline="\n") as fh:
                fh.write(json.dumps(envelope.payload["network"]) + "\n")
            sidecar_path = _sidecar_path(config.output)
            with open(sidecar_path, "w", newline="\n") as fh:
                fh.write(json.dumps(envelope.payload["sidecar"], indent=2) + "\n")
        elif csv_text is not None:
            with open(config.output, "w", newline="\n") as fh:
                fh.write(csv_text)
        else:
            with open(config.output, "w", newline="\n") as fh:
                fh.write(json.dumps(envelope.payload, sort_keys=True, indent=2) + "\n")
    if config.envelope_path:
        with open(config.envelope_path, "w", newline="\n") as fh:
            fh.write(envelope.to_json())


def _sidecar_path(output):
    root, ext = os.path.splitext(output)
    return f"{root}.sidecar{ext or '.json'}"


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--config", help="JSON config document; flags override its fields")
    sub.add_argument("--seed", type=int, default=None, help="master seed")
    sub.add_argument("--model", default=None, help="model name (path, grid, comb, percolation, torus, ust_torus)")
    sub.add_argument(
        "--model-param",
        action="append",
        default=None,
        metavar="K=V",
        help="model parameter, repeatable (e.g. --model-param R=101)",
    )
    sub.add_argument("--network", default=None, help="network JSON file instead of a model")
    sub.add_argument("--start", type=int, default=None, help="start/root vertex")
    sub.add_argument("--output", default=None, help="primary output file (CSV or JSON)")
    sub.add_argument("--envelope", default=None, help="write the result envelope here")
    sub.add_argument("--workers", type=int, default=None, help="parallel worker count")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="collisionlab",
        description="Collision experiments for random walks on finite conductance networks",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen", help="materialize a model as network JSON plus sidecar")
    _add_common(p)

    p = subs.add_parser("collide", help="Monte Carlo collision-count growth")
    _add_common(p)
    p.add_argument("--horizons", default=None, help="comma-separated horizons")
    p.add_argument("--replicas", type=int, default=None)
    p.add_argument("--dump-trajectories", default=None, help="also write sample trajectories CSV")
    p.add_argument("--dump-limit", type=int, default=None, help="replicas to dump")

    p = subs.add_parser("identity", help="exact last-collision partition total")
    _add_common(p)
    p.add_argument("--N", dest="n_steps", type=int, default=None, help="window length")

    p = subs.add_parser("mtp", help="mass-transport principle check")
    _add_common(p)
    p.add_argument("--transport", default=None, help="adjacency | leaf_adjacency | qlast:<n>:<N>")
    p.add_argument("--root-law", dest="root_law", default=None, help="uniform | biased")
    p.add_argument("--tolerance", type=float, default=None)

    p = subs.add_parser("voter", help="voter-model consensus runs")
    _add_common(p)
    p.add_argument("--replicas", type=int, default=None)
    p.add_argument("--t-max", dest="t_max", type=float, default=None)
    p.add_argument("--initial", default=None, help="zeros | ones | single:<v> | vertices:<v,..>")

    p = subs.add_parser("ctcollide", help="continuous-time collision measure runs")
    _add_common(p)
    p.add_argument("--replicas", type=int, default=None)
    p.add_argument("--t-max", dest="t_max", type=float, default=None)
    p.add_argument("--grid", type=int, default=None, help="offsets for the discretization integral")

    p = subs.add_parser("validate", help="check a config without running it")
    _add_common(p)
    p.add_argument("--kind", default=None, help="experiment kind when not in the config file")
    p.add_argument("--horizons", default=None)
    p.add_argument("--replicas", type=int, default=None)
    p.add_argument("--N", dest="n_steps", type=int, default=None)
    p.add_argument("--t-max", dest="t_max", type=float, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--transport", default=None)
    p.add_argument("--root-law", dest="root_law", default=None)
    p.add_argument("--initial", default=None)
    return parser


def _parse_model_flags(name, params):
    spec = {"name": name}
    for item in params or []:
        if "=" not in item:
            raise ConfigError(f"model-param: expected K=V, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = int(raw)
        except ValueError:
            try:
                value = float(raw)
            except ValueError:
                value = raw
        spec[key] = value
    return spec


def config_from_args(args):
    """Merge defaults, config file, environment seed, and flags (in that order)."""
    doc = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            doc.update(json.load(fh))

    kind = args.command if args.command != "validate" else (
        getattr(args, "kind", None) or doc.get("kind")
    )
    if kind is None:
        raise ConfigError("kind: missing experiment kind (use --kind or the config file)")
    doc["kind"] = kind

    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            doc["master_seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(f"master_seed: {SEED_ENV_VAR} must be an integer")

    if getattr(args, "seed", None) is not None:
        doc["master_seed"] = args.seed
    if getattr(args, "model", None) is not None:
        doc["model"] = _parse_model_flags(args.model, getattr(args, "model_param", None))
    elif getattr(args, "model_param", None):
        base = dict(doc.get("model") or {})
        if "name" not in base:
            raise ConfigError("model: --model-param needs --model or a model in the config")
        doc["model"] = {**base, **_parse_model_flags(base["name"], args.model_param)}
    if getattr(args, "network", None) is not None:
        doc["network_file"] = args.network

    direct = (
        "start", "replicas", "n_steps", "t_max", "grid", "transport",
        "root_law", "initial", "tolerance", "output", "workers",
        "dump_trajectories", "dump_limit",
    )
    for name in direct:
        value = getattr(args, name, None)
        if value is not None:
            doc[name] = value
    if getattr(args, "envelope", None) is not None:
        doc["envelope_path"] = args.envelope
    if getattr(args, "horizons", None) is not None:
        doc["horizons"] = [int(tok) for tok in str(args.horizons).split(",") if tok]
    return config_from_dict(doc)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        if args.command == "validate":
            problems = validate(config)
            print(json.dumps(problems, indent=2))
            return 0 if not problems else 2
        envelope = run(config)
        if not config.envelope_path:
            sys.stdout.write(envelope.to_json())
        return 0
    except CollisionLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
