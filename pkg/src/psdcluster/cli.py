"""Command-line front end: clustering runs, the synthetic benchmark,
guarantee checks, eigengap estimation, and motion-capture conversion.

Exit codes: 0 on success, 2 for parameter or validation problems, 1 for I/O
problems. For a fixed input, configuration, and seed every output file is
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict
from itertools import product
from pathlib import Path

import numpy as np

from . import __version__
from .distances import distance_matrix
from .generators import benchmark_models, make_benchmark_dataset, make_model, normalize_model
from .km import cluster_from_distances as km_from_distances
from .metrics import clustering_error, confusion_entropy
from .nnpc import (
    build_adjacency,
    cluster_from_distances as nnpc_from_distances,
    estimate_cluster_count,
    nearest_neighbor_sets,
    normalized_laplacian,
)
from .numerics import RngStream, eig_symmetric
from .spectra import WINDOW_KINDS, estimate_dataset_psds, make_window, next_pow2
from .theory import check_condition

PRESETS = {"arma3": benchmark_models}

DEFAULT_NEIGHBORS = 10
DEFAULT_WINDOW_STD = 50.0
DEFAULT_GRID_FACTOR = 4
DEFAULT_N_PER_MODEL = 25
DEFAULT_TRIALS = 200

_CONFIG_KEYS = {
    "models",
    "preset",
    "M_list",
    "sigma2_list",
    "trials",
    "n_per_model",
    "q",
    "window",
    "grid_factor",
    "seed",
}


# ---------------------------------------------------------------------------
# input handling


def _read_observation_csv(path, with_truth: bool, pad_zeros: bool, subtract_mean: bool):
    """Load observations (one per row); optionally a leading truth-label column.

    Returns (observations, truth) with truth None unless requested. Ragged
    rows are zero-padded to the longest row when pad_zeros is set and are an
    error otherwise. Mean subtraction happens before padding.
    """
    rows: list[np.ndarray] = []
    truth_cells: list[str] = []
    with open(path, newline="", encoding="utf-8") as handle:
        for line_no, record in enumerate(csv.reader(handle), start=1):
            record = [cell.strip() for cell in record if cell.strip() != ""]
            if not record:
                continue
            if with_truth:
                truth_cells.append(record[0])
                record = record[1:]
            try:
                values = np.array([float(cell) for cell in record])
            except ValueError as exc:
                raise ValueError(f"{path}: line {line_no}: non-numeric sample value") from exc
            if values.size < 2:
                raise ValueError(f"{path}: line {line_no}: observations need at least 2 samples")
            if not np.all(np.isfinite(values)):
                raise ValueError(f"{path}: line {line_no}: samples must be finite")
            rows.append(values)
    if not rows:
        raise ValueError(f"{path}: no observations found")
    if subtract_mean:
        rows = [row - row.mean() for row in rows]
    lengths = {row.size for row in rows}
    if len(lengths) > 1:
        if not pad_zeros:
            raise ValueError(f"{path}: rows have different lengths; pass --pad-zeros to zero-pad them")
        longest = max(lengths)
        rows = [np.pad(row, (0, longest - row.size)) for row in rows]
    observations = np.stack(rows)
    truth = None
    if with_truth:
        seen: dict[str, int] = {}
        truth = np.array([seen.setdefault(cell, len(seen)) for cell in truth_cells])
    return observations, truth


def _window_for(kind: str, length: int, std: float):
    return make_window(kind, length, std=std if kind == "gaussian" else None)


def _write_labels_csv(path, labels) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["id", "label"])
        for index, label in enumerate(labels):
            writer.writerow([index, int(label)])


def _dump_json(payload, path=None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


# ---------------------------------------------------------------------------
# cluster


def cmd_cluster(args) -> int:
    observations, truth = _read_observation_csv(args.input, args.truth, args.pad_zeros, args.subtract_mean)
    n_obs, obs_len = observations.shape
    window = _window_for(args.window, obs_len, args.std)
    if args.grid_factor < 2:
        raise ValueError("grid factor must be >= 2")
    grid_size = next_pow2(args.grid_factor * obs_len)
    psds = estimate_dataset_psds(observations, window=window, grid_size=grid_size, unit_power=args.normalize_psd)
    dist = distance_matrix(psds)

    auto = args.clusters == "auto"
    requested = None if auto else int(args.clusters)
    if requested is not None and requested > n_obs:
        raise ValueError(f"cluster count {requested} exceeds the {n_obs} observations")

    report = {
        "input": str(args.input),
        "algorithm": args.algorithm,
        "n_obs": n_obs,
        "obs_len": obs_len,
        "window": {"kind": window.kind, "std": window.std},
        "grid_size": grid_size,
        "normalize_psd": bool(args.normalize_psd),
        "pad_zeros": bool(args.pad_zeros),
        "subtract_mean": bool(args.subtract_mean),
        "seed": args.seed,
    }
    if args.algorithm == "nnpc":
        if not 1 <= args.neighbors <= n_obs - 1:
            raise ValueError(f"neighbor count must be in 1..{n_obs - 1}, got {args.neighbors}")
        result = nnpc_from_distances(
            dist,
            args.neighbors,
            requested,
            rng=RngStream(args.seed),
            max_clusters=min(args.max_clusters, n_obs),
        )
        labels = result.labels
        report["neighbors"] = args.neighbors
        report["n_clusters"] = result.n_clusters
        if auto:
            report["estimated_clusters"] = result.n_clusters
    else:
        if auto:
            raise ValueError("the km algorithm needs an explicit cluster count")
        labels = km_from_distances(dist, requested)
        report["n_clusters"] = requested

    if truth is not None:
        report["clustering_error"] = clustering_error(labels, truth)
        report["confusion_entropy"] = confusion_entropy(labels, truth)

    _write_labels_csv(args.labels_out, labels)
    _dump_json(report, args.report_out)
    return 0


# ---------------------------------------------------------------------------
# benchmark configuration


def _load_config(path) -> dict:
    with open(path, encoding="utf-8") as handle:
        try:
            config = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    unknown = set(config) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"{path}: unknown config keys: {sorted(unknown)}")
    return config


def _build_models(config):
    if "models" in config and "preset" in config:
        raise ValueError("config must give either 'models' or 'preset', not both")
    if "models" in config:
        entries = config["models"]
        if not isinstance(entries, list) or not entries:
            raise ValueError("'models' must be a non-empty list of {'a': [...], 'b': [...]} objects")
        models = []
        for entry in entries:
            if not isinstance(entry, dict) or set(entry) != {"a", "b"}:
                raise ValueError("each model needs exactly the keys 'a' and 'b'")
            models.append(normalize_model(make_model(entry["a"], entry["b"])))
        return models
    preset = config.get("preset", "arma3")
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; available: {sorted(PRESETS)}")
    return PRESETS[preset]()


def _int_list(config, key, minimum):
    raw = config.get(key)
    if not isinstance(raw, list) or not raw:
        raise ValueError(f"'{key}' must be a non-empty list")
    values = []
    for item in raw:
        if not isinstance(item, int) or isinstance(item, bool) or item < minimum:
            raise ValueError(f"'{key}' entries must be integers >= {minimum}")
        values.append(item)
    return values


def _float_list(config, key, default):
    raw = config.get(key, default)
    if not isinstance(raw, list) or not raw:
        raise ValueError(f"'{key}' must be a non-empty list")
    values = []
    for item in raw:
        if isinstance(item, bool) or not isinstance(item, (int, float)) or item < 0:
            raise ValueError(f"'{key}' entries must be nonnegative numbers")
        values.append(float(item))
    return values


def _int_option(config, key, default, minimum):
    value = config.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ValueError(f"'{key}' must be an integer >= {minimum}")
    return value


def _parse_config(config) -> dict:
    """Validate the shared benchmark config schema and fill in defaults."""
    models = _build_models(config)
    window_cfg = config.get("window", {"kind": "gaussian", "std": DEFAULT_WINDOW_STD})
    if not isinstance(window_cfg, dict) or "kind" not in window_cfg:
        raise ValueError("'window' must be an object with at least a 'kind'")
    if set(window_cfg) - {"kind", "std"}:
        raise ValueError("'window' accepts only 'kind' and 'std'")
    return {
        "models": models,
        "M_list": _int_list(config, "M_list", minimum=2),
        "sigma2_list": _float_list(config, "sigma2_list", default=[0.0]),
        "trials": _int_option(config, "trials", DEFAULT_TRIALS, minimum=1),
        "n_per_model": _int_option(config, "n_per_model", DEFAULT_N_PER_MODEL, minimum=1),
        "q": _int_option(config, "q", DEFAULT_NEIGHBORS, minimum=1),
        "window_kind": window_cfg["kind"],
        "window_std": float(window_cfg.get("std", DEFAULT_WINDOW_STD)),
        "grid_factor": _int_option(config, "grid_factor", DEFAULT_GRID_FACTOR, minimum=2),
        "seed": _int_option(config, "seed", 0, minimum=0),
    }


def run_synth_bench(config: dict) -> list[dict]:
    """Monte Carlo benchmark over all (M, sigma2) combinations in the config.

    Both algorithms see the same datasets and distance matrices trial by
    trial. Returns one row per (M, sigma2, algorithm) with the mean and
    population std of the clustering error, sorted for stable output.
    """
    cfg = _parse_config(config)
    models = cfg["models"]
    n_clusters = len(models)
    n_obs = n_clusters * cfg["n_per_model"]
    if not 1 <= cfg["q"] <= n_obs - 1:
        raise ValueError(f"'q' must be in 1..{n_obs - 1} for {n_obs} observations, got {cfg['q']}")

    combos = sorted(set(product(cfg["M_list"], cfg["sigma2_list"])))
    trials = cfg["trials"]
    rows = []
    for combo_index, (obs_len, sigma2) in enumerate(combos):
        window = _window_for(cfg["window_kind"], obs_len, cfg["window_std"])
        grid_size = next_pow2(cfg["grid_factor"] * obs_len)
        errors = {"nnpc": [], "km": []}
        for trial in range(trials):
            base = 2 * (combo_index * trials + trial)
            dataset = make_benchmark_dataset(
                models, cfg["n_per_model"], obs_len, sigma2, RngStream(cfg["seed"], base)
            )
            psds = estimate_dataset_psds(dataset.observations, window=window, grid_size=grid_size)
            dist = distance_matrix(psds)
            nnpc_result = nnpc_from_distances(dist, cfg["q"], n_clusters, rng=RngStream(cfg["seed"], base + 1))
            errors["nnpc"].append(clustering_error(nnpc_result.labels, dataset.labels))
            errors["km"].append(clustering_error(km_from_distances(dist, n_clusters), dataset.labels))
        for algorithm in ("km", "nnpc"):
            ce = np.asarray(errors[algorithm])
            rows.append(
                {
                    "M": obs_len,
                    "sigma2": sigma2,
                    "algorithm": algorithm,
                    "mean_ce": float(ce.mean()),
                    "std_ce": float(ce.std()),
                    "trials": trials,
                }
            )
    rows.sort(key=lambda row: (row["M"], row["sigma2"], row["algorithm"]))
    return rows


def cmd_synth_bench(args) -> int:
    rows = run_synth_bench(_load_config(args.config))
    with open(args.out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["M", "sigma2", "algorithm", "mean_ce", "std_ce", "trials"])
        for row in rows:
            writer.writerow(
                [row["M"], repr(row["sigma2"]), row["algorithm"], repr(row["mean_ce"]), repr(row["std_ce"]), row["trials"]]
            )
    sys.stdout.write(f"wrote {args.out} ({len(rows)} rows)\n")
    return 0


# ---------------------------------------------------------------------------
# condition checking


def run_check_condition(config: dict) -> list[dict]:
    """ConditionReport dicts for every (M, sigma2) combination in the config."""
    cfg = _parse_config(config)
    models = cfg["models"]
    if len(models) < 2:
        raise ValueError("the clustering condition needs at least two models")
    n_obs = len(models) * cfg["n_per_model"]
    reports = []
    for obs_len, sigma2 in sorted(set(product(cfg["M_list"], cfg["sigma2_list"]))):
        window = _window_for(cfg["window_kind"], obs_len, cfg["window_std"])
        reports.append(asdict(check_condition(models, window, n_obs, sigma2)))
    return reports


def cmd_check_condition(args) -> int:
    reports = run_check_condition(_load_config(args.config))
    payload = reports[0] if len(reports) == 1 else reports
    _dump_json(payload, args.out)
    return 0


# ---------------------------------------------------------------------------
# eigengap estimate


def cmd_estimate_l(args) -> int:
    observations, _ = _read_observation_csv(args.input, args.truth, args.pad_zeros, args.subtract_mean)
    n_obs, obs_len = observations.shape
    if n_obs == 1:
        _dump_json({"estimate": 1, "eigenvalues": [0.0]})
        return 0
    window = _window_for(args.window, obs_len, args.std)
    if args.grid_factor < 2:
        raise ValueError("grid factor must be >= 2")
    grid_size = next_pow2(args.grid_factor * obs_len)
    if not 1 <= args.neighbors <= n_obs - 1:
        raise ValueError(f"neighbor count must be in 1..{n_obs - 1}, got {args.neighbors}")
    psds = estimate_dataset_psds(observations, window=window, grid_size=grid_size, unit_power=args.normalize_psd)
    dist = distance_matrix(psds)
    adjacency = build_adjacency(dist, nearest_neighbor_sets(dist, args.neighbors))
    estimate = estimate_cluster_count(adjacency, min(args.max_clusters, n_obs))
    eigenvalues = eig_symmetric(normalized_laplacian(adjacency)).eigenvalues
    _dump_json({"estimate": estimate, "eigenvalues": [float(v) for v in eigenvalues]})
    return 0


# ---------------------------------------------------------------------------
# motion-capture conversion


def _extract_column(path, column: str) -> np.ndarray:
    """Pull one marker trajectory out of a per-sequence CSV file.

    `column` is either a zero-based index or a header name; a header row is
    detected automatically in index mode and required in name mode.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        records = [record for record in csv.reader(handle) if any(cell.strip() for cell in record)]
    if not records:
        raise ValueError(f"{path}: empty sequence file")
    try:
        index = int(column)
        named = False
    except ValueError:
        named = True
    if named:
        header = [cell.strip() for cell in records[0]]
        if column not in header:
            raise ValueError(f"{path}: no column named {column!r} in the header")
        index = header.index(column)
        records = records[1:]
    else:
        if index < 0:
            raise ValueError("column index must be nonnegative")
        try:
            float(records[0][index])
        except (ValueError, IndexError):
            records = records[1:]  # header row in index mode
    values = []
    for line_no, record in enumerate(records, start=1):
        if index >= len(record):
            raise ValueError(f"{path}: row {line_no} has no column {index}")
        try:
            values.append(float(record[index]))
        except ValueError as exc:
            raise ValueError(f"{path}: row {line_no}: non-numeric value in column {index}") from exc
    if len(values) < 2:
        raise ValueError(f"{path}: sequence needs at least 2 frames")
    return np.asarray(values)


def _load_label_map(path) -> dict[str, str]:
    labels: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        for record in csv.reader(handle):
            record = [cell.strip() for cell in record]
            if len(record) < 2 or not record[0]:
                continue
            labels[record[0]] = record[1]
    if not labels:
        raise ValueError(f"{path}: no (filename, label) pairs found")
    return labels


def cmd_convert_mocap(args) -> int:
    label_map = _load_label_map(args.labels_csv) if args.labels_csv else None
    with open(args.out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        for path in args.sequences:
            sequence = _extract_column(path, args.column)
            row = [repr(float(v)) for v in sequence]
            if label_map is not None:
                name = Path(path).name
                if name not in label_map:
                    raise ValueError(f"{args.labels_csv}: no label for sequence file {name!r}")
                row = [label_map[name]] + row
            writer.writerow(row)
    sys.stdout.write(f"wrote {args.out} ({len(args.sequences)} sequences)\n")
    return 0


# ---------------------------------------------------------------------------
# parser


def _clusters_arg(text: str):
    if text == "auto":
        return "auto"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer or 'auto'") from None
    if value < 1:
        raise argparse.ArgumentTypeError("cluster count must be positive")
    return value


def _add_observation_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="CSV file, one observation per row")
    parser.add_argument("--truth", action="store_true", help="first CSV column holds the true labels")
    parser.add_argument("--pad-zeros", action="store_true", help="zero-pad ragged rows to the longest one")
    parser.add_argument("--subtract-mean", action="store_true", help="remove each observation's sample mean")
    parser.add_argument("--normalize-psd", action="store_true", help="rescale every PSD estimate to unit power")
    parser.add_argument("--window", choices=WINDOW_KINDS, default="gaussian")
    parser.add_argument("--std", type=float, default=DEFAULT_WINDOW_STD, help="gaussian window std")
    parser.add_argument("--grid-factor", type=int, default=DEFAULT_GRID_FACTOR,
                        help="frequency grid size = next power of two >= factor * M")
    parser.add_argument("--neighbors", type=int, default=DEFAULT_NEIGHBORS,
                        help="nearest-neighbor count (config field 'q')")
    parser.add_argument("--max-clusters", type=int, default=10,
                        help="cap for the eigengap cluster-count estimate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psdcluster",
        description="Cluster stationary time-series observations by spectral-density distance.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cluster = sub.add_parser("cluster", help="cluster the observations in a CSV file")
    _add_observation_options(cluster)
    cluster.add_argument("--algorithm", choices=("nnpc", "km"), default="nnpc")
    cluster.add_argument("--clusters", type=_clusters_arg, default="auto",
                         help="cluster count, or 'auto' for the eigengap estimate (nnpc only)")
    cluster.add_argument("--seed", type=int, default=0)
    cluster.add_argument("--labels-out", default="labels.csv", help="output CSV of (id, label)")
    cluster.add_argument("--report-out", default=None, help="JSON report path (default: stdout)")
    cluster.set_defaults(func=cmd_cluster)

    bench = sub.add_parser("synth-bench", help="Monte Carlo benchmark on synthetic ARMA data")
    bench.add_argument("--config", required=True, help="JSON benchmark configuration")
    bench.add_argument("--out", required=True, help="output CSV path")
    bench.set_defaults(func=cmd_synth_bench)

    condition = sub.add_parser("check-condition", help="evaluate the clustering condition for a model set")
    condition.add_argument("--config", required=True, help="JSON configuration (same schema as synth-bench)")
    condition.add_argument("--out", default=None, help="JSON report path (default: stdout)")
    condition.set_defaults(func=cmd_check_condition)

    estimate = sub.add_parser("estimate-l", help="eigengap estimate of the cluster count")
    _add_observation_options(estimate)
    estimate.set_defaults(func=cmd_estimate_l)

    convert = sub.add_parser("convert-mocap", help="collect one marker column per sequence file into a dataset CSV")
    convert.add_argument("sequences", nargs="+", help="per-sequence CSV files of marker trajectories")
    convert.add_argument("--column", required=True, help="marker column: zero-based index or header name")
    convert.add_argument("--out", required=True, help="output CSV path (one observation per row)")
    convert.add_argument("--labels-csv", default=None,
                         help="optional CSV of (sequence file name, label) to prepend a truth column")
    convert.set_defaults(func=cmd_convert_mocap)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
