"""Mobility trace ingestion and per-node feature / entropy tables."""
from __future__ import annotations

import csv
from collections import defaultdict

import numpy as np

from .entropy import (
    FeatureWindow,
    KinematicSample,
    NeighborFeature,
    mobility_feature,
    node_entropy,
    route_stability_log,
    route_stability_product,
    speed_feature,
)

TRACE_HEADER = ("node_id", "t_s", "x_m", "y_m", "vx_mps", "vy_mps")
ENTROPY_CSV_HEADER = ("node_id", "neighbor_id", "a_mn", "p_k", "node_entropy")
ROUTE_CSV_HEADER = ("route_id", "nodes", "hops", "rs1", "rs2")


def node_key(raw: str):
    try:
        return int(raw)
    except ValueError:
        return raw


def read_trace(path) -> dict:
    """Load a trace CSV into ``{node_id: [KinematicSample, ...]}`` sorted by time."""
    series = defaultdict(list)
    with open(path, newline="") as fh:
        reader = csv.DictReader(row for row in fh if not row.startswith("#"))
        missing = [c for c in TRACE_HEADER if c not in (reader.fieldnames or ())]
        if missing:
            raise ValueError(f"trace is missing column(s): {', '.join(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                sample = KinematicSample(
                    (float(row["x_m"]), float(row["y_m"])),
                    (float(row["vx_mps"]), float(row["vy_mps"])),
                    float(row["t_s"]),
                )
            except ValueError as exc:
                raise ValueError(f"trace line {lineno}: {exc}") from None
            series[row["node_id"].strip()].append(sample)
    if not series:
        raise ValueError("trace contains no samples")
    keys = [node_key(k) for k in series]
    if not all(isinstance(k, int) for k in keys):
        keys = list(series)
    out = {}
    for key, raw in sorted(zip(keys, series), key=lambda kv: kv[0]):
        samples = sorted(series[raw], key=lambda s: s.timestamp)
        times = [s.timestamp for s in samples]
        if len(set(times)) != len(times):
            raise ValueError(f"node {raw}: duplicate timestamps")
        out[key] = samples
    return out


def _intervals(samples, horizon):
    n = len(samples)
    if horizon is not None:
        return (float(horizon),) * n
    if n == 1:
        raise ValueError("a prediction horizon is required for single-sample traces")
    t = np.array([s.timestamp for s in samples])
    dt = np.diff(t)
    return tuple(np.append(dt, dt[-1]))


def neighbor_features(trace: dict, radio_range: float, feature: str = "mobility",
                      horizon: float | None = None) -> dict:
    """Feature values towards every neighbour in range at the first sample."""
    if feature not in ("mobility", "speed"):
        raise ValueError(f"unknown feature {feature!r}")
    if not radio_range > 0:
        raise ValueError("radio_range must be positive")
    out = {}
    for m, series_m in trace.items():
        feats = []
        start_m = np.array(series_m[0].position)
        for n, series_n in trace.items():
            if n == m:
                continue
            gap = np.hypot(*(start_m - np.array(series_n[0].position)))
            if gap > radio_range:
                continue
            if feature == "speed":
                a = speed_feature(series_m, series_n)
            else:
                window = FeatureWindow(_intervals(series_m, horizon), radio_range)
                a = mobility_feature(series_m, series_n, window)
            feats.append(NeighborFeature(n, a))
        out[m] = feats
    return out


def node_entropies(features: dict) -> dict:
    """Node entropy per node; None when undefined (no neighbours or all-zero features)."""
    out = {}
    for node, feats in features.items():
        if not feats or sum(f.a_mn for f in feats) <= 0:
            out[node] = None
        else:
            out[node] = node_entropy(feats)
    return out


def entropy_rows(features: dict, entropies: dict):
    for node, feats in features.items():
        total = sum(f.a_mn for f in feats)
        h = entropies[node]
        for f in feats:
            p = f.a_mn / total if total > 0 else None
            yield (node, f.neighbor_id, f.a_mn, p, h)


def route_rows(entropies: dict, routes):
    """Route stability over the forwarding nodes of each route (destination excluded)."""
    for index, route in enumerate(routes):
        route = list(route)
        if len(route) < 2:
            raise ValueError(f"route {index} needs at least two nodes")
        unknown = [n for n in route if n not in entropies]
        if unknown:
            raise ValueError(f"route {index} uses unknown node(s): {unknown}")
        hops = route[:-1]
        h = [entropies[n] for n in hops]
        label = "-".join(str(n) for n in route)
        if any(v is None for v in h):
            yield (index, label, len(hops), None, None)
        else:
            yield (index, label, len(hops), route_stability_product(h), route_stability_log(h))
