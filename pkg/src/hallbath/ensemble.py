"""Seeded disorder ensembles and disorder-strength sweeps.

Each ensemble member r gets its own detuning field from a seed derived by a
64-bit mix of (base_seed, r), so results are reproducible bit-for-bit no
matter how many workers run the members or in which order they finish.  The
same derived-seed schedule is reused across flux values, which pairs the
disorder fields of the trivial and topological phases for direct comparison.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .config import SimConfig
from .dynamics import evolve
from .errors import ConfigurationError, EnsembleMemberError, NumericalFailureError
from .lattice import FluxRational, build_bath_operator, sample_disorder
from .nonmarkov import MARKOVIAN_CUTOFF, nonmarkovianity

__all__ = [
    "EnsembleSpec",
    "EnsembleStats",
    "SweepPoint",
    "derive_seed",
    "run_ensemble",
    "sweep_disorder",
    "histogram",
    "write_ensemble_csv",
    "write_histogram_csv",
    "write_sweep_csv",
]

_MASK64 = 0xFFFFFFFFFFFFFFFF
RETAINED_TRACES = 20


def derive_seed(base_seed: int, r: int) -> int:
    """Member seed via the splitmix64 finalizer; injective in r for fixed base."""
    z = (base_seed + r * 0x9E3779B97F4A7C15) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


@dataclass(frozen=True)
class EnsembleSpec:
    base_config: SimConfig
    n_realizations: int
    base_seed: int = 1

    def __post_init__(self):
        if self.n_realizations < 1:
            raise ConfigurationError("n_realizations must be >= 1")
        if not (0 <= self.base_seed < 2**64):
            raise ConfigurationError("base_seed must be a 64-bit unsigned integer")


@dataclass
class EnsembleStats:
    """Per-member backflow values plus their aggregate statistics."""

    nt_values: np.ndarray
    seeds: np.ndarray
    mean: float
    std: float
    hist_edges: np.ndarray
    hist_counts: np.ndarray
    markovian_fraction: float
    traces: list = field(default_factory=list)


def _member_task(args):
    config, r, seed = args
    try:
        dis = sample_disorder(config.disorder.delta, seed, config.lattice)
        bath = build_bath_operator(config.lattice, config.flux, dis)
        trace = evolve(config.integrator, bath, config.qubit)
        keep = r < RETAINED_TRACES
        return (r, seed, nonmarkovianity(trace).value, trace if keep else None, None)
    except NumericalFailureError as exc:
        return (r, seed, None, None, str(exc))


def run_ensemble(spec: EnsembleSpec, workers: int = 1,
                 hist_bins: int = 20, hist_range=None) -> EnsembleStats:
    """Sample, build, evolve, and quantify every member; aggregate by index.

    `workers` > 1 distributes members over processes; it changes wall time
    only, never the results.  Any member tripping its numerical guards aborts
    the whole ensemble, reporting the offending seed.  The first few member
    traces (RETAINED_TRACES) are kept for plotting.
    """
    config = spec.base_config
    tasks = [(config, r, derive_seed(spec.base_seed, r)) for r in range(spec.n_realizations)]
    if workers <= 1:
        results = [_member_task(t) for t in tasks]
    else:
        _warm_kernel(config)
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_member_task, tasks, chunksize=1))
    results.sort(key=lambda res: res[0])
    for r, seed, _, _, err in results:
        if err is not None:
            raise EnsembleMemberError(r, seed, NumericalFailureError(err))
    nt = np.array([res[2] for res in results])
    seeds = np.array([res[1] for res in results], dtype=np.uint64)
    traces = [res[3] for res in results if res[3] is not None]
    if hist_range is None:
        hist_range = (0.0, max(float(nt.max()), MARKOVIAN_CUTOFF))
    edges, counts = histogram(nt, hist_bins, hist_range)
    return EnsembleStats(
        nt_values=nt,
        seeds=seeds,
        mean=float(nt.mean()),
        std=float(nt.std()),
        hist_edges=edges,
        hist_counts=counts,
        markovian_fraction=float((nt < MARKOVIAN_CUTOFF).mean()),
        traces=traces,
    )


def _warm_kernel(config: SimConfig) -> None:
    # compile the jit kernel in the parent so forked workers inherit it
    from .dynamics import IntegratorSpec
    from .lattice import LatticeSpec

    tiny = LatticeSpec(2, 3, config.lattice.kappa)
    bath = build_bath_operator(tiny, config.flux)
    evolve(IntegratorSpec(dt=0.05, t_final=0.1, sample_every=1), bath, config.qubit)


@dataclass(frozen=True)
class SweepPoint:
    delta: float
    flux: FluxRational
    mean: float
    std: float
    n_realizations: int


SWEEP_FLUXES = (FluxRational(0, 1), FluxRational(1, 4))


def sweep_disorder(base: EnsembleSpec, deltas, r_per_point: int, workers: int = 1):
    """Mean backflow versus disorder strength for the trivial and p/q = 1/4 phases.

    Every (delta, flux) point reuses the same derived-seed schedule, so the
    two flux curves see identical disorder fields realization by realization.
    """
    deltas = list(deltas)
    if not deltas or any(d < 0 for d in deltas):
        raise ConfigurationError("deltas must be a nonempty list of nonnegative values")
    points = []
    for delta in deltas:
        for flux in SWEEP_FLUXES:
            config = dataclasses.replace(
                base.base_config,
                flux=flux,
                disorder=dataclasses.replace(base.base_config.disorder, delta=float(delta)),
            )
            stats = run_ensemble(
                EnsembleSpec(config, r_per_point, base.base_seed), workers=workers
            )
            points.append(SweepPoint(float(delta), flux, stats.mean, stats.std, r_per_point))
    return points


def histogram(values, bin_count: int, value_range):
    """Uniform-bin counts with out-of-range values clamped to the edge bins."""
    lo, hi = value_range
    if bin_count < 1:
        raise ConfigurationError("bin_count must be >= 1")
    if not lo < hi:
        raise ConfigurationError(f"histogram range must satisfy lo < hi, got {value_range}")
    vals = np.clip(np.asarray(values, dtype=float), lo, hi)
    counts, edges = np.histogram(vals, bins=bin_count, range=(lo, hi))
    return edges, counts


def write_ensemble_csv(stats: EnsembleStats, path) -> None:
    with open(path, "w") as fh:
        fh.write("r,derived_seed,nt\n")
        for r, (seed, nt) in enumerate(zip(stats.seeds, stats.nt_values)):
            fh.write(f"{r},{seed},{nt:.17g}\n")


def write_histogram_csv(stats: EnsembleStats, path) -> None:
    with open(path, "w") as fh:
        fh.write("bin_lo,bin_hi,count\n")
        for lo, hi, c in zip(stats.hist_edges[:-1], stats.hist_edges[1:], stats.hist_counts):
            fh.write(f"{lo:.17g},{hi:.17g},{c}\n")


def write_sweep_csv(points, path) -> None:
    with open(path, "w") as fh:
        fh.write("delta_over_kappa,flux_p,flux_q,mean_nt_over_kappa,std_nt_over_kappa,realizations\n")
        for p in points:
            fh.write(
                f"{p.delta:.17g},{p.flux.p},{p.flux.q},{p.mean:.17g},{p.std:.17g},{p.n_realizations}\n"
            )
