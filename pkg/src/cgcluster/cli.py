"""Command-line interface.

Subcommands:
    generate   synthesize a gridded tensor with known regions
    cgc        cluster one resolution point, write a label CSV
    sweep      full lattice sweep with ensemble reduction and reports
    nmi        compare two label CSVs
    report     re-aggregate adjacent-scale statistics from a sweep directory

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .cgc import CgcConfig, ResolutionPoint, cgc
from .errors import FormatError
from .pipeline import (
    config_from_sources,
    nmi_between_files,
    parse_int_list,
    parse_level_range,
    read_config_file,
    regenerate_stats,
    run_pipeline,
    write_labels_csv,
)
from .synth import SynthSpec, generate
from .tensorfile import load_tensor, save_tensor
from .wavelet import family_by_name


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgcluster",
        description="Multiscale coarse-grain clustering of gridded tensors",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic tensor file")
    gen.add_argument("output", help="tensor file to write (.cgct)")
    gen.add_argument("--dims", default="64,64,96,3", help="N1,N2,N3,N4 (default 64,64,96,3)")
    gen.add_argument("--biomes", type=int, default=6, help="number of ground-truth regions")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--noise-sigma", type=float, default=0.5)
    gen.add_argument("--period", type=int, default=12, help="time steps per seasonal cycle")
    gen.add_argument("--truth-out", default=None, help="also write the ground-truth label CSV")

    one = sub.add_parser("cgc", help="cluster one resolution point")
    one.add_argument("input", help="tensor file")
    one.add_argument("--levels-spatial", type=int, required=True)
    one.add_argument("--levels-temporal", type=int, required=True)
    one.add_argument("--k", type=int, required=True)
    one.add_argument("--seed", type=int, default=0)
    one.add_argument("--wavelet-space", default="haar")
    one.add_argument("--wavelet-time", default="db2")
    one.add_argument("--variables", default=None, help="comma list of variable indices")
    one.add_argument("--no-standardize", dest="standardize", action="store_false")
    one.add_argument("--out", default="labels.csv", help="label CSV to write")

    sw = sub.add_parser("sweep", help="full lattice sweep incl. ensemble reduction")
    sw.add_argument("input", nargs="?", default=None, help="tensor file (or config key 'input')")
    sw.add_argument("--config", default=None, help="key = value config file")
    sw.add_argument("--out", default=None, help="artifact directory (config key 'output_dir')")
    sw.add_argument("--levels-spatial", default=None, help="a..b")
    sw.add_argument("--levels-temporal", default=None, help="a..b")
    sw.add_argument("--k", default=None, help="single k, a..b range, or comma list")
    sw.add_argument("--seed", type=int, default=None)
    sw.add_argument("--threads", type=int, default=None)
    sw.add_argument("--wavelet-space", default=None)
    sw.add_argument("--wavelet-time", default=None)
    sw.add_argument("--variables", default=None)
    sw.add_argument(
        "--no-standardize", dest="standardize", action="store_const", const=False, default=None
    )

    cmp_ = sub.add_parser("nmi", help="NMI between two label CSVs")
    cmp_.add_argument("labels_a")
    cmp_.add_argument("labels_b")

    rep = sub.add_parser("report", help="re-aggregate statistics from a sweep directory")
    rep.add_argument("sweep_dir")
    rep.add_argument("--out", default=None, help="stats CSV path (default: inside sweep dir)")

    return parser


def _cmd_generate(args) -> int:
    dims = parse_int_list(args.dims)
    if len(dims) != 4:
        raise ValueError(f"--dims needs four integers, got {args.dims!r}")
    spec = SynthSpec(
        dims=dims,
        n_biomes=args.biomes,
        seed=args.seed,
        noise_sigma=args.noise_sigma,
        seasonal_period=args.period,
    )
    tensor, truth = generate(spec)
    save_tensor(args.output, tensor)
    print(f"wrote {args.output} dims={'x'.join(str(d) for d in dims)} biomes={args.biomes}")
    if args.truth_out:
        write_labels_csv(args.truth_out, truth.reshape(-1), (dims[0], dims[1]))
        print(f"wrote {args.truth_out}")
    return 0


def _cmd_cgc(args) -> int:
    tensor, mask = load_tensor(args.input)
    variables = (
        parse_int_list(args.variables)
        if args.variables is not None
        else tuple(range(tensor.dims[3]))
    )
    space = family_by_name(args.wavelet_space)
    cfg = CgcConfig(
        variable_indices=variables,
        k=args.k,
        seed=args.seed,
        standardize=args.standardize,
        spatial_families=(space, space),
        temporal_family=family_by_name(args.wavelet_time),
    )
    res = ResolutionPoint.of(args.levels_spatial, args.levels_temporal)
    result = cgc(tensor, res, cfg, mask)
    write_labels_csv(args.out, result.labels, (tensor.dims[0], tensor.dims[1]))
    print(f"wrote {args.out} k={args.k} inertia={result.inertia:.6g}")
    return 0


def _cmd_sweep(args) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    overrides = {
        "input": args.input,
        "output_dir": args.out,
        "levels_spatial": args.levels_spatial,
        "levels_temporal": args.levels_temporal,
        "k": args.k,
        "seed": args.seed,
        "threads": args.threads,
        "wavelet_space": args.wavelet_space,
        "wavelet_time": args.wavelet_time,
        "variables": args.variables,
        "standardize": args.standardize,
    }
    cfg = config_from_sources(file_values, overrides)
    summary = run_pipeline(cfg)
    print(
        f"sweep finished: {summary.jobs_ok} jobs ok, {summary.jobs_failed} failed, "
        f"artifacts in {summary.output_dir}"
    )
    for k, size in sorted(summary.mier_sizes.items()):
        print(f"  k={k}: reduced ensemble size {size}")
    if summary.jobs_ok == 0:
        for tag, msg in summary.failures.items():
            print(f"  {tag}: {msg}", file=sys.stderr)
        return 1
    return 0


def _cmd_nmi(args) -> int:
    value = nmi_between_files(args.labels_a, args.labels_b)
    print(f"{value:.6f}")
    return 0


def _cmd_report(args) -> int:
    target = regenerate_stats(args.sweep_dir, args.out)
    print(f"wrote {target}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "cgc": _cmd_cgc,
    "sweep": _cmd_sweep,
    "nmi": _cmd_nmi,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
