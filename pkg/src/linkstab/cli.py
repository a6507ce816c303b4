"""Command-line driver: one experiment per invocation, written as CSV."""
from __future__ import annotations

import argparse
import io
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .channel import PRESETS
from .config import (
    KINDS,
    ConfigError,
    ExperimentConfig,
    read_mapping,
    resolve_config,
    trace_digest,
)
from .csvout import write_csv
from .montecarlo import (
    NODE_COMPARE_CSV_HEADER,
    SWEEP_CSV_HEADER,
    SweepScenario,
    compare_node_configs,
    run_prr_sweep,
)
from .region import region_bounds, region_coefficient
from .routing import RELAY_CSV_HEADER, RelayExperiment, RetransmissionPolicy, run_relay_sweep
from .traces import (
    ENTROPY_CSV_HEADER,
    ROUTE_CSV_HEADER,
    entropy_rows,
    neighbor_features,
    node_entropies,
    node_key,
    read_trace,
    route_rows,
)

REGION_CSV_HEADER = ("upper", "lower", "d_begin_m", "d_end_m", "coefficient")


def _sweep(cfg: ExperimentConfig, nodes: int) -> SweepScenario:
    p = cfg.params
    return SweepScenario(cfg.deployment, p["distances"], p["sims"], nodes, cfg.seed,
                         p["confidence_level"])


def _trace_entropies(p):
    trace = read_trace(p["trace"])
    feats = neighbor_features(trace, p["radio_range_m"], p["feature"], p["horizon_s"])
    return trace, feats, node_entropies(feats)


def execute(cfg: ExperimentConfig, workers: int = 1):
    """Run the experiment and return ``(header, rows)``."""
    p = cfg.params
    if cfg.kind == "prr-sweep":
        return SWEEP_CSV_HEADER, list(run_prr_sweep(_sweep(cfg, p["nodes"]), workers).csv_rows())
    if cfg.kind == "node-compare":
        cmp = compare_node_configs(_sweep(cfg, 1), _sweep(cfg, p["nodes"]), workers)
        return NODE_COMPARE_CSV_HEADER, list(cmp.csv_rows())
    if cfg.kind == "region":
        b = region_bounds(cfg.deployment, p["upper"], p["lower"], p["d_max"], p["tol"])
        return REGION_CSV_HEADER, [(b.upper, b.lower, b.d_begin, b.d_end, region_coefficient(b))]
    if cfg.kind == "relay-sweep":
        exp = RelayExperiment(cfg.deployment, p["l_sd"], p["relay_distances"],
                              RetransmissionPolicy(p["max_retx"], p["fail_value"]), p["sims"],
                              cfg.seed, p["confidence_level"])
        return RELAY_CSV_HEADER, list(run_relay_sweep(exp, workers).csv_rows())
    if cfg.kind == "entropy":
        _, feats, ents = _trace_entropies(p)
        return ENTROPY_CSV_HEADER, list(entropy_rows(feats, ents))
    if cfg.kind == "route-stability":
        trace, _, ents = _trace_entropies(p)
        as_int = all(isinstance(k, int) for k in trace)
        routes = [[node_key(str(n)) if as_int else str(n) for n in r] for r in p["routes"]]
        return ROUTE_CSV_HEADER, list(route_rows(ents, routes))
    raise ConfigError("kind", f"unknown experiment kind {cfg.kind!r}")


def metadata(cfg: ExperimentConfig) -> dict:
    meta = {"linkstab": __version__, "kind": cfg.kind, "seed": cfg.seed,
            "config_sha256": cfg.digest()}
    if "trace" in cfg.params:
        meta["trace_sha256"] = trace_digest(cfg.params["trace"])
    return meta


def render(cfg: ExperimentConfig, workers: int = 1) -> str:
    header, rows = execute(cfg, workers)
    buf = io.StringIO()
    write_csv(buf, header, rows, metadata(cfg))
    return buf.getvalue()


def _write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linkstab",
        description="Reproduce link-quality, routing-metric and entropy experiments as CSV.")
    parser.add_argument("kind", nargs="?", choices=KINDS,
                        help="experiment to run (overrides 'kind' in the config file)")
    parser.add_argument("--config", type=Path, help="YAML/JSON experiment configuration")
    parser.add_argument("--seed", type=int, help="master seed (overrides the config file)")
    parser.add_argument("--out", type=Path, help="output CSV path (default: stdout)")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="deployment preset")
    parser.add_argument("--workers", type=int, default=1, help="worker threads for sweeps")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        data, base_dir = {}, Path(".")
        if args.config is not None:
            data = read_mapping(args.config)
            base_dir = args.config.parent
        cfg = resolve_config(data, kind=args.kind, seed=args.seed,
                             out=str(args.out) if args.out else None,
                             preset_name=args.preset, base_dir=base_dir)
        if args.workers < 1:
            raise ConfigError("workers", "must be at least 1")
        text = render(cfg, args.workers)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"linkstab: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        try:
            _write_atomic(Path(cfg.out), text)
        except OSError as exc:
            print(f"linkstab: error: out: cannot write {cfg.out}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
