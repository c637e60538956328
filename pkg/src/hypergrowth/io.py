"""File formats: edge lists, coordinate files, provenance records.

Edge lists are whitespace-separated label pairs, `#` starts a comment line.
Coordinate files carry one node per line (label, rank, radius, angle) with
floats printed to 17 significant digits so write -> read is bit-exact, plus
a JSON header comment recording the model parameters and provenance.
"""

from __future__ import annotations

import json
import math
import warnings

import numpy as np

from .core import ModelParams
from .embed import Embedding
from .graph import AdjacencySnapshot

__all__ = [
    "read_edge_list",
    "write_edge_list",
    "read_coordinates",
    "write_coordinates",
    "write_provenance",
]

_TWO_PI = 2.0 * math.pi


def _natural_labels(labels):
    """Convert labels to ints when every label is a decimal string, so that
    tie-breaking by label matches in-memory integer ids."""
    if all(isinstance(l, str) and l.isdigit() for l in labels):
        return [int(l) for l in labels]
    return list(labels)


def read_edge_list(path) -> AdjacencySnapshot:
    """Parse an edge list; duplicate edges and self-loops are dropped with a
    counted warning, malformed lines raise with their line number."""
    raw_edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.strip()
            if not body or body.startswith("#"):
                continue
            tokens = body.split()
            if len(tokens) != 2:
                raise ValueError(
                    f"{path}: line {lineno}: expected two node labels, got {len(tokens)}"
                )
            raw_edges.append((tokens[0], tokens[1]))
    if not raw_edges:
        raise ValueError(f"{path}: no edges found")
    raw_labels = sorted(set(l for e in raw_edges for l in e))
    converted = _natural_labels(raw_labels)
    order = sorted(range(len(converted)), key=lambda k: converted[k])
    node_ids = tuple(converted[k] for k in order)
    index = {raw_labels[k]: pos for pos, k in enumerate(order)}
    n_self = 0
    n_dup = 0
    seen = set()
    edges = []
    for a, b in raw_edges:
        u, v = index[a], index[b]
        if u == v:
            n_self += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            n_dup += 1
            continue
        seen.add(key)
        edges.append(key)
    if n_self or n_dup:
        warnings.warn(
            f"{path}: dropped {n_dup} duplicate edge(s) and {n_self} self-loop(s)",
            stacklevel=2,
        )
    return AdjacencySnapshot.from_edges(edges, node_ids=node_ids)


def write_edge_list(net: AdjacencySnapshot, path):
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in net.edge_array():
            fh.write(f"{net.node_ids[int(u)]} {net.node_ids[int(v)]}\n")


def write_coordinates(embedding: Embedding, path):
    """One line per node: label rank radius angle (17 significant digits)."""
    header = {
        "format": "hypergrowth-coordinates",
        "params": {
            "m": embedding.params.m,
            "L": embedding.params.L,
            "gamma": embedding.params.gamma,
            "T": embedding.params.T,
            "zeta": embedding.params.zeta,
            "t": embedding.params.t,
        },
        "provenance": embedding.provenance,
    }
    ranks = embedding.ranks()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + json.dumps(header, sort_keys=True, default=_json_fallback) + "\n")
        fh.write("# label rank radius angle\n")
        for idx, label in enumerate(embedding.node_ids):
            fh.write(
                f"{label} {int(ranks[idx])} "
                f"{embedding.radii[idx]:.17g} {embedding.angles[idx]:.17g}\n"
            )


def _json_fallback(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def read_coordinates(path, net: AdjacencySnapshot | None = None, params: ModelParams | None = None) -> Embedding:
    """Read a coordinate file back into an Embedding.

    Model parameters come from the JSON header (or the `params` argument).
    Rank collisions, angles outside [0, 2*pi), and label mismatches against
    a companion snapshot are errors.
    """
    header = None
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.strip()
            if not body:
                continue
            if body.startswith("#"):
                rest = body[1:].strip()
                if header is None and rest.startswith("{"):
                    header = json.loads(rest)
                continue
            tokens = body.split()
            if len(tokens) != 4:
                raise ValueError(f"{path}: line {lineno}: expected 'label rank radius angle'")
            label, rank_s, r_s, th_s = tokens
            rows.append((label, int(rank_s), float(r_s), float(th_s), lineno))
    if not rows:
        raise ValueError(f"{path}: no coordinate rows")
    t = len(rows)
    seen_ranks = set()
    for label, rank, r, th, lineno in rows:
        if rank in seen_ranks:
            raise ValueError(f"{path}: line {lineno}: duplicate rank {rank}")
        seen_ranks.add(rank)
        if not 1 <= rank <= t:
            raise ValueError(f"{path}: line {lineno}: rank {rank} outside 1..{t}")
        if not 0.0 <= th < _TWO_PI:
            raise ValueError(f"{path}: line {lineno}: angle {th} outside [0, 2*pi)")
        if r < 0:
            raise ValueError(f"{path}: line {lineno}: negative radius {r}")

    labels = _natural_labels([row[0] for row in rows])
    if net is not None:
        if len(labels) != net.t:
            raise ValueError(
                f"{path}: {len(labels)} nodes but companion edge list has {net.t}"
            )
        want = set(net.node_ids)
        got = set(labels)
        if want != got:
            raise ValueError(f"{path}: node labels do not match the companion edge list")
        pos = {lab: k for k, lab in enumerate(net.node_ids)}
        node_ids = net.node_ids
    else:
        pos = {lab: k for k, lab in enumerate(labels)}
        node_ids = tuple(labels)

    if params is None:
        if header is None or "params" not in header:
            raise ValueError(f"{path}: no parameter header; pass params explicitly")
        hp = header["params"]
        params = ModelParams(
            m=hp["m"], L=hp["L"], gamma=hp["gamma"], T=hp["T"], zeta=hp["zeta"], t=t
        )
    radii = np.empty(t)
    angles = np.empty(t)
    order = np.empty(t, dtype=np.int64)
    for (label, rank, r, th, _), lab in zip(rows, labels):
        idx = pos[lab]
        radii[idx] = r
        angles[idx] = th
        order[rank - 1] = idx
    provenance = dict(header.get("provenance", {})) if header else {}
    return Embedding(
        node_ids=node_ids,
        order=order,
        radii=radii,
        angles=angles,
        params=params,
        provenance=provenance,
    )


def write_provenance(path, record: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True, default=_json_fallback)
        fh.write("\n")
