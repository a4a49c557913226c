"""Sweep orchestration: config files, artifact layout, and statistics reports.

A sweep run executes coarse-grain clustering over the configured resolution
lattice for every requested cluster count, reduces each per-k ensemble, and
writes a flat artifact directory:

    labels_s{i}_t{j}_k{k}.csv   per-resolution label grids (i1,i2,label)
    nmi_graph_k{k}.csv          complete NMI graph edge list per k
    adjacent_stats.csv          {min, avg, max} per adjacent pair + bins
    mier_k{k}.txt               cut components and representatives per k
    manifest.txt                seeds, versions, and per-job status

Every artifact byte is a deterministic function of (input bytes, config,
seed); the worker-pool size changes wall time only. Statistics aggregate the
NMI values as written to the graph CSVs (12 decimal places) so that
re-aggregation from a sweep directory reproduces adjacent_stats.csv exactly.
"""

from __future__ import annotations

import hashlib
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, backend
from .cgc import CgcConfig, ResolutionPoint, adjacent_pairs, cgc, cgc_seed, lattice_grid
from .cluster import Clustering
from .errors import FormatError
from .infotheory import nmi
from .mier import (
    build_nmi_graph,
    component_scores,
    cut_graph,
    laplacian_spectrum,
    select_representatives,
)
from ._seeds import TAG_SPECTRAL, TAG_TIEBREAK, derive_seed
from .tensorfile import load_tensor
from .wavelet import family_by_name

__all__ = [
    "RunConfig",
    "RunSummary",
    "read_config_file",
    "config_from_sources",
    "run_pipeline",
    "write_labels_csv",
    "read_labels_csv",
    "regenerate_stats",
]

MANIFEST_FORMAT = "cgcluster-sweep-1"
_NMI_DECIMALS = 12


@dataclass(frozen=True)
class RunConfig:
    """Everything a sweep needs besides the input tensor bytes."""

    input: str
    output_dir: str
    levels_spatial: tuple[int, int] = (1, 4)
    levels_temporal: tuple[int, int] = (1, 6)
    wavelet_space: str = "haar"
    wavelet_time: str = "db2"
    k_values: tuple[int, ...] = (10,)
    seed: int = 0
    standardize: bool = True
    variables: tuple[int, ...] | None = None
    threads: int | None = None

    def __post_init__(self):
        if not self.k_values or any(k < 1 for k in self.k_values):
            raise ValueError("k_values must be nonempty positive integers")
        for lo, hi in (self.levels_spatial, self.levels_temporal):
            if lo > hi:
                raise ValueError("level ranges must satisfy low <= high")

    def lattice(self) -> list[ResolutionPoint]:
        s0, s1 = self.levels_spatial
        t0, t1 = self.levels_temporal
        return lattice_grid(range(s0, s1 + 1), range(t0, t1 + 1))


@dataclass
class RunSummary:
    output_dir: str
    jobs_ok: int
    jobs_failed: int
    failures: dict[str, str] = field(default_factory=dict)
    mier_sizes: dict[int, int] = field(default_factory=dict)


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def parse_level_range(s: str) -> tuple[int, int]:
    """Accepts 'a..b' or a single integer."""
    s = s.strip()
    if ".." in s:
        lo, hi = s.split("..", 1)
        return int(lo), int(hi)
    v = int(s)
    return v, v


def parse_int_list(s: str) -> tuple[int, ...]:
    """Accepts 'a..b' (inclusive range), 'a,b,c', or a single integer."""
    s = s.strip()
    if ".." in s:
        lo, hi = s.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    if "," in s:
        return tuple(int(p) for p in s.split(",") if p.strip())
    return (int(s),)


_CONFIG_KEYS = {
    "input",
    "output_dir",
    "levels_spatial",
    "levels_temporal",
    "wavelet_space",
    "wavelet_time",
    "k",
    "seed",
    "standardize",
    "variables",
    "threads",
}


def read_config_file(path) -> dict[str, str]:
    """Line-oriented ``key = value`` config; '#' starts a comment."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise FormatError(f"{path}:{lineno}: expected key = value")
            key, val = line.split("=", 1)
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise FormatError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = val.strip()
    return values


def config_from_sources(file_values: dict[str, str], overrides: dict[str, object]) -> RunConfig:
    """Build a RunConfig from config-file strings plus CLI overrides."""
    merged: dict[str, object] = dict(file_values)
    for key, val in overrides.items():
        if val is not None:
            merged[key] = val
    if "input" not in merged:
        raise ValueError("no input tensor given (config key 'input' or CLI argument)")
    if "output_dir" not in merged:
        raise ValueError("no output directory given")

    def get(key, default=None):
        return merged.get(key, default)

    def as_levels(key, default):
        v = get(key)
        if v is None:
            return default
        return parse_level_range(v) if isinstance(v, str) else v

    def as_ints(key, default):
        v = get(key)
        if v is None:
            return default
        return parse_int_list(v) if isinstance(v, str) else tuple(v)

    standardize = get("standardize", True)
    if isinstance(standardize, str):
        standardize = _parse_bool(standardize)
    threads = get("threads")
    if isinstance(threads, str):
        threads = int(threads)
    seed = get("seed", 0)
    if isinstance(seed, str):
        seed = int(seed)
    variables = get("variables")
    if isinstance(variables, str):
        variables = parse_int_list(variables)
    return RunConfig(
        input=str(get("input")),
        output_dir=str(get("output_dir")),
        levels_spatial=as_levels("levels_spatial", (1, 4)),
        levels_temporal=as_levels("levels_temporal", (1, 6)),
        wavelet_space=str(get("wavelet_space", "haar")),
        wavelet_time=str(get("wavelet_time", "db2")),
        k_values=as_ints("k", (10,)),
        seed=seed,
        standardize=standardize,
        variables=variables,
        threads=threads,
    )


def _point_tag(p: ResolutionPoint) -> str:
    return f"s{p.spatial_levels[0]}_t{p.temporal_level}"


def _pair_tag(a: ResolutionPoint, b: ResolutionPoint) -> str:
    return (
        f"s{a.spatial_levels[0]}t{a.temporal_level}-"
        f"s{b.spatial_levels[0]}t{b.temporal_level}"
    )


def write_labels_csv(path, labels: np.ndarray, face_dims: tuple[int, int]) -> None:
    n1, n2 = face_dims
    grid = np.asarray(labels).reshape(n1, n2)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("i1,i2,label\n")
        for i in range(n1):
            row = grid[i]
            for j in range(n2):
                fh.write(f"{i},{j},{int(row[j])}\n")


def read_labels_csv(path) -> tuple[np.ndarray, tuple[int, int]]:
    """Read an i1,i2,label grid back into a row-major label vector."""
    cells: dict[tuple[int, int], int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "i1,i2,label":
            raise FormatError(f"{path}: expected header 'i1,i2,label', got {header!r}")
        for lineno, line in enumerate(fh, 2):
            line = line.strip()
            if not line:
                continue
            try:
                i, j, lab = (int(p) for p in line.split(","))
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad row {line!r}") from exc
            cells[(i, j)] = lab
    if not cells:
        raise FormatError(f"{path}: no label rows")
    n1 = max(i for i, _ in cells) + 1
    n2 = max(j for _, j in cells) + 1
    if len(cells) != n1 * n2:
        raise FormatError(f"{path}: grid has holes ({len(cells)} cells for {n1}x{n2})")
    grid = np.empty((n1, n2), dtype=np.int64)
    for (i, j), lab in cells.items():
        grid[i, j] = lab
    return grid.reshape(-1), (n1, n2)


def _round_nmi(v: float) -> float:
    return float(f"{v:.{_NMI_DECIMALS}f}")


def _write_nmi_graph_csv(path, graph) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("p_spatial,p_temporal,q_spatial,q_temporal,nmi\n")
        nodes = graph.nodes
        for i in range(len(nodes)):
            for j in range(i + 1, len(nodes)):
                a, b = nodes[i], nodes[j]
                fh.write(
                    f"{a.spatial_levels[0]},{a.temporal_level},"
                    f"{b.spatial_levels[0]},{b.temporal_level},"
                    f"{graph.weights.w[i, j]:.{_NMI_DECIMALS}f}\n"
                )


def read_nmi_graph_csv(path) -> dict[tuple[ResolutionPoint, ResolutionPoint], float]:
    edges: dict[tuple[ResolutionPoint, ResolutionPoint], float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "p_spatial,p_temporal,q_spatial,q_temporal,nmi":
            raise FormatError(f"{path}: unexpected header {header!r}")
        for lineno, line in enumerate(fh, 2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise FormatError(f"{path}:{lineno}: bad row {line!r}")
            ps, pt, qs, qt = (int(p) for p in parts[:4])
            a = ResolutionPoint.of(ps, pt)
            b = ResolutionPoint.of(qs, qt)
            edges[(a, b) if a < b else (b, a)] = float(parts[4])
    return edges


def _aggregate_stats(
    lattice: list[ResolutionPoint],
    per_k_edges: dict[int, dict[tuple[ResolutionPoint, ResolutionPoint], float]],
) -> list[tuple[str, list[float]]]:
    """Rows of the adjacent-scale statistics table, deterministic order.

    Per-pair rows pool values across k; bin rows additionally pool over the
    other axis (spatial bins pool a fixed spatial step over all temporal
    levels, and vice versa); the final row pools everything.
    """
    pairs = adjacent_pairs(lattice)
    ks = sorted(per_k_edges)
    rows: list[tuple[str, list[float]]] = []
    spatial_bins: dict[tuple[int, int], list[float]] = {}
    temporal_bins: dict[tuple[int, int], list[float]] = {}
    everything: list[float] = []
    for a, b in pairs:
        values = []
        for k in ks:
            edges = per_k_edges[k]
            key = (a, b) if a < b else (b, a)
            if key in edges:
                values.append(edges[key])
        if not values:
            continue
        rows.append((_pair_tag(a, b), values))
        everything.extend(values)
        if a.spatial_levels != b.spatial_levels:
            step = (a.spatial_levels[0], b.spatial_levels[0])
            spatial_bins.setdefault(step, []).extend(values)
        else:
            step = (a.temporal_level, b.temporal_level)
            temporal_bins.setdefault(step, []).extend(values)
    for (lo, hi), values in sorted(spatial_bins.items()):
        rows.append((f"spatial-{lo}-{hi}", values))
    for (lo, hi), values in sorted(temporal_bins.items()):
        rows.append((f"temporal-{lo}-{hi}", values))
    if everything:
        rows.append(("all", everything))
    return rows


def _write_stats_csv(path, rows: list[tuple[str, list[float]]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("pair,min,avg,max\n")
        for tag, values in rows:
            arr = np.asarray(values)
            fh.write(
                f"{tag},{arr.min():.{_NMI_DECIMALS}f},"
                f"{arr.mean():.{_NMI_DECIMALS}f},{arr.max():.{_NMI_DECIMALS}f}\n"
            )


def _write_mier_manifest(path, k, cut_k, spectrum, partition, scores, reduced) -> None:
    lines = [f"k={k}", f"cut_k={cut_k}"]
    lines.append("eigenvalues=" + ",".join(f"{v:.{_NMI_DECIMALS}f}" for v in spectrum))
    for ci, comp in enumerate(partition):
        lines.append(f"component_{ci}=" + ",".join(_point_tag(p) for p in comp))
    for rep in reduced.representatives:
        lines.append(f"representative_{rep.component}={_point_tag(rep.point)}")
        lines.append(f"score_{rep.component}={rep.score:.{_NMI_DECIMALS}f}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def run_pipeline(cfg: RunConfig) -> RunSummary:
    """Execute the full sweep and write the artifact directory."""
    tensor, mask = load_tensor(cfg.input)
    if tensor.ndim != 4:
        raise ValueError(f"sweep input must be a 4-way tensor, got {tensor.ndim}-way")
    variables = cfg.variables if cfg.variables is not None else tuple(range(tensor.dims[3]))
    space = family_by_name(cfg.wavelet_space)
    time_fam = family_by_name(cfg.wavelet_time)
    lattice = cfg.lattice()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    jobs = [(p, k) for k in cfg.k_values for p in lattice]
    threads = cfg.threads or min(os.cpu_count() or 1, len(jobs))

    def run_job(job):
        point, k = job
        job_cfg = CgcConfig(
            variable_indices=variables,
            k=k,
            seed=cfg.seed,
            standardize=cfg.standardize,
            spatial_families=(space, space),
            temporal_family=time_fam,
        )
        return cgc(tensor, point, job_cfg, mask)

    outcomes: dict[tuple[ResolutionPoint, int], tuple[bool, object]] = {}
    if threads <= 1:
        for job in jobs:
            outcomes[job] = _safe(run_job, job)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {job: pool.submit(run_job, job) for job in jobs}
            for job, fut in futures.items():
                try:
                    outcomes[job] = (True, fut.result())
                except Exception as exc:  # noqa: BLE001 - per-job isolation
                    outcomes[job] = (False, f"{type(exc).__name__}: {exc}")

    failures: dict[str, str] = {}
    per_k_results: dict[int, dict[ResolutionPoint, Clustering]] = {k: {} for k in cfg.k_values}
    face = (tensor.dims[0], tensor.dims[1])
    for k in cfg.k_values:
        for point in lattice:
            ok, payload = outcomes[(point, k)]
            if ok:
                per_k_results[k][point] = payload
                write_labels_csv(out / f"labels_{_point_tag(point)}_k{k}.csv", payload.labels, face)
            else:
                failures[f"{_point_tag(point)}_k{k}"] = str(payload)

    per_k_edges = {}
    mier_sizes: dict[int, int] = {}
    for k in cfg.k_values:
        results = per_k_results[k]
        if len(results) < 2:
            continue
        graph = build_nmi_graph(results)
        _write_nmi_graph_csv(out / f"nmi_graph_k{k}.csv", graph)
        edges = {}
        nodes = graph.nodes
        for i in range(len(nodes)):
            for j in range(i + 1, len(nodes)):
                edges[(nodes[i], nodes[j])] = _round_nmi(graph.weights.w[i, j])
        per_k_edges[k] = edges

        spectrum = laplacian_spectrum(graph)
        partition = cut_graph(graph, None, derive_seed(cfg.seed, TAG_SPECTRAL, k))
        scores = component_scores(graph, partition)
        reduced = select_representatives(
            graph, partition, scores, results, derive_seed(cfg.seed, TAG_TIEBREAK, k)
        )
        mier_sizes[k] = len(reduced.representatives)
        _write_mier_manifest(
            out / f"mier_k{k}.txt", k, len(partition), spectrum, partition, scores, reduced
        )

    if per_k_edges:
        _write_stats_csv(out / "adjacent_stats.csv", _aggregate_stats(lattice, per_k_edges))

    _write_run_manifest(out / "manifest.txt", cfg, tensor, mask, variables, lattice, failures)
    ok_count = sum(1 for ok, _ in outcomes.values() if ok)
    return RunSummary(str(out), ok_count, len(failures), failures, mier_sizes)


def _safe(fn, arg):
    try:
        return True, fn(arg)
    except Exception as exc:  # noqa: BLE001
        return False, f"{type(exc).__name__}: {exc}"


def _write_run_manifest(path, cfg: RunConfig, tensor, mask, variables, lattice, failures) -> None:
    digest = hashlib.sha256(Path(cfg.input).read_bytes()).hexdigest()
    lines = [
        f"format={MANIFEST_FORMAT}",
        f"package_version={__version__}",
        f"numpy_version={np.__version__}",
        f"backend={backend.BACKEND_NAME}",
        f"input={cfg.input}",
        f"input_sha256={digest}",
        "dims=" + "x".join(str(d) for d in tensor.dims),
        "axis_names=" + ",".join(tensor.axis_names),
        f"mask={'present' if mask is not None else 'none'}",
        f"wavelet_space={cfg.wavelet_space}",
        f"wavelet_time={cfg.wavelet_time}",
        f"levels_spatial={cfg.levels_spatial[0]}..{cfg.levels_spatial[1]}",
        f"levels_temporal={cfg.levels_temporal[0]}..{cfg.levels_temporal[1]}",
        "k_values=" + ",".join(str(k) for k in cfg.k_values),
        f"seed={cfg.seed}",
        f"standardize={'true' if cfg.standardize else 'false'}",
        "variables=" + ",".join(str(v) for v in variables),
        f"points={len(lattice)}",
        f"jobs_failed={len(failures)}",
    ]
    for k in cfg.k_values:
        for point in lattice:
            tag = f"{_point_tag(point)}_k{k}"
            status = f"error:{failures[tag]}" if tag in failures else "ok"
            lines.append(f"status_{tag}={status}")
            lines.append(f"seed_{tag}={cgc_seed(cfg.seed, point, k)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def regenerate_stats(sweep_dir, out_path=None) -> Path:
    """Rebuild adjacent_stats.csv from the NMI graph CSVs in a sweep directory."""
    sweep = Path(sweep_dir)
    graph_files = sorted(sweep.glob("nmi_graph_k*.csv"))
    if not graph_files:
        raise FormatError(f"{sweep}: no nmi_graph_k*.csv files found")
    per_k_edges = {}
    nodes: set[ResolutionPoint] = set()
    for gf in graph_files:
        k = int(gf.stem.split("k")[-1])
        edges = read_nmi_graph_csv(gf)
        per_k_edges[k] = edges
        for a, b in edges:
            nodes.add(a)
            nodes.add(b)
    lattice = sorted(nodes)
    rows = _aggregate_stats(lattice, per_k_edges)
    target = Path(out_path) if out_path is not None else sweep / "adjacent_stats.csv"
    _write_stats_csv(target, rows)
    return target


def nmi_between_files(path_a, path_b) -> float:
    """NMI between two label CSVs over the same grid."""
    la, dims_a = read_labels_csv(path_a)
    lb, dims_b = read_labels_csv(path_b)
    if dims_a != dims_b:
        raise ValueError(f"grids differ: {dims_a} vs {dims_b}")
    return nmi(la, lb)
