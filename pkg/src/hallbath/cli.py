"""Command-line front end: bands, decay, ensemble, and sweep subcommands.

Each subcommand reads one JSON config (all fields defaulted), runs the
corresponding library call, writes CSV outputs plus a manifest.json with
content digests into the output directory, and prints a short summary.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from . import __version__
from .config import SimConfig, parse_config, write_manifest
from .dynamics import evolve, write_trace_csv
from .ensemble import (
    EnsembleSpec,
    run_ensemble,
    sweep_disorder,
    write_ensemble_csv,
    write_histogram_csv,
    write_sweep_csv,
)
from .errors import ConfigurationError, NumericalFailureError
from .lattice import build_bath_operator, sample_disorder
from .nonmarkov import MARKOVIAN_CUTOFF, nonmarkovianity
from .spectral import band_structure, find_gaps, write_bands_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _load_config(args) -> SimConfig:
    config = parse_config(args.config) if args.config else SimConfig()
    if args.seed is not None:
        config = dataclasses.replace(
            config, disorder=dataclasses.replace(config.disorder, seed=args.seed)
        )
    if args.out_dir is not None:
        config = dataclasses.replace(
            config, output=dataclasses.replace(config.output, out_dir=args.out_dir)
        )
    return config


def _out_dir(config: SimConfig) -> Path:
    path = Path(config.output.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_bands(args) -> int:
    config = _load_config(args)
    out = _out_dir(config)
    t0 = time.perf_counter()
    bands = band_structure(
        config.flux,
        config.bands.n_sites,
        config.bands.ky_count,
        config.bands.n_edge,
        config.lattice.kappa,
    )
    catalog = find_gaps(bands, config.bands.edge_threshold, config.bands.min_gap_width)
    write_bands_csv(bands, out / "bands.csv")
    report = _gap_report(config, catalog)
    (out / "gaps.txt").write_text(report)
    write_manifest(out, config, time.perf_counter() - t0, ["bands.csv", "gaps.txt"])
    print(report, end="")
    print(f"wrote {out / 'bands.csv'}")
    return EXIT_OK


def _gap_report(config: SimConfig, catalog) -> str:
    kappa = config.lattice.kappa
    lines = [f"flux = {config.flux.p}/{config.flux.q}"]
    if not catalog.gaps:
        lines.append("no gaps")
    for i, gap in enumerate(catalog.gaps):
        lines.append(
            f"gap {i}: ({gap.e_low / kappa:+.4f}, {gap.e_high / kappa:+.4f}) kappa, "
            f"width {gap.width / kappa:.4f}"
        )
        for c in gap.crossings:
            side = "n=0 edge" if c.side == "n0" else "far edge"
            lines.append(
                f"  {side} branch crossing near ky={c.ky:+.3f}, "
                f"velocity sign {c.velocity_sign:+d}"
            )
    detuning = config.qubit.detuning
    host = catalog.gap_containing(detuning)
    if host is not None and host.crossings_on("n0"):
        lines.append(
            f"qubit detuning {detuning / kappa:+.3f} kappa lies in a gap "
            f"hosting an n=0 edge branch"
        )
    elif host is not None:
        lines.append(f"qubit detuning {detuning / kappa:+.3f} kappa lies in a gap")
    else:
        lines.append(f"qubit detuning {detuning / kappa:+.3f} kappa is not inside a gap")
    return "\n".join(lines) + "\n"


def cmd_decay(args) -> int:
    config = _load_config(args)
    out = _out_dir(config)
    t0 = time.perf_counter()
    disorder = sample_disorder(config.disorder.delta, config.disorder.seed, config.lattice)
    bath = build_bath_operator(config.lattice, config.flux, disorder)
    trace = evolve(config.integrator, bath, config.qubit)
    result = nonmarkovianity(trace)
    write_trace_csv(trace, out / "trace.csv")
    write_manifest(out, config, time.perf_counter() - t0, ["trace.csv"])
    tag = "markovian" if result.markovian else "non-markovian"
    print(
        f"population |q(T)|^2 = {trace.populations[-1]:.6f}, "
        f"backflow quantifier = {result.value:.6g} kappa ({tag}, cutoff {MARKOVIAN_CUTOFF})"
    )
    print(f"wrote {out / 'trace.csv'}")
    return EXIT_OK


def cmd_ensemble(args) -> int:
    config = _load_config(args)
    out = _out_dir(config)
    t0 = time.perf_counter()
    spec = EnsembleSpec(config, args.realizations, args.base_seed)
    stats = run_ensemble(spec, workers=args.workers)
    outputs = ["ensemble.csv", "histogram.csv"]
    write_ensemble_csv(stats, out / "ensemble.csv")
    write_histogram_csv(stats, out / "histogram.csv")
    if config.output.write_traces and stats.traces:
        tdir = out / "traces"
        tdir.mkdir(exist_ok=True)
        for r, trace in enumerate(stats.traces):
            name = f"traces/trace_r{r:03d}.csv"
            write_trace_csv(trace, out / name)
            outputs.append(name)
    write_manifest(out, config, time.perf_counter() - t0, outputs)
    print(
        f"R={args.realizations} delta={config.disorder.delta} flux={config.flux.p}/{config.flux.q}: "
        f"mean={stats.mean:.6g} std={stats.std:.6g} "
        f"markovian_fraction={stats.markovian_fraction:.3f}"
    )
    print(f"wrote {out / 'ensemble.csv'}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _load_config(args)
    out = _out_dir(config)
    t0 = time.perf_counter()
    try:
        deltas = [float(tok) for tok in args.deltas.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigurationError(f"--deltas must be a comma-separated list: {exc}") from exc
    spec = EnsembleSpec(config, max(args.realizations, 1), args.base_seed)
    points = sweep_disorder(spec, deltas, args.realizations, workers=args.workers)
    write_sweep_csv(points, out / "sweep.csv")
    write_manifest(out, config, time.perf_counter() - t0, ["sweep.csv"])
    for p in points:
        print(
            f"delta={p.delta:g} flux={p.flux.p}/{p.flux.q}: "
            f"mean={p.mean:.6g} std={p.std:.6g} (R={p.n_realizations})"
        )
    print(f"wrote {out / 'sweep.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hallbath",
        description="Qubit decay and backflow statistics in a flux-threaded photonic lattice",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run configuration (defaults used if omitted)")
        p.add_argument("--out-dir", help="output directory (overrides output.out_dir)")
        p.add_argument("--seed", type=int, help="disorder seed override")
        p.add_argument("--workers", type=int, default=1,
                       help="parallel ensemble members (affects speed only, never results)")

    p = sub.add_parser("bands", help="strip band structure, gaps, and edge branches")
    common(p)
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("decay", help="single decay trace and its backflow quantifier")
    common(p)
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("ensemble", help="disorder ensemble statistics at fixed delta")
    common(p)
    p.add_argument("-R", "--realizations", type=int, default=100)
    p.add_argument("--base-seed", type=int, default=1)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("sweep", help="mean backflow versus disorder strength, both fluxes")
    common(p)
    p.add_argument("--deltas", default="0,0.5,1,2,5",
                   help="comma-separated disorder strengths in units of kappa")
    p.add_argument("-R", "--realizations", type=int, default=50)
    p.add_argument("--base-seed", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
