"""Strip spectra, magnetic gaps, and chiral edge branches.

With a clean lattice the bath is translation invariant along the rows, so its
eigenstates factor into exp(i ky m) times a column profile A_n obeying the
Harper equation

    kappa (A_{n+1} + A_{n-1}) + 2 kappa cos(2 pi phi n + ky) A_n = E(ky) A_n

with A_{-1} = 0.  Scanning ky maps out the projected band structure of the
semi-infinite bath: a single gapless band of width 8 kappa at zero flux, and q
magnetic subbands with gap-crossing chiral edge branches at flux p/q.  The
truncation at n = n_sites - 1 introduces a second, artificial boundary, so
states are tagged with their weight near both ends and "bulk" means far from
either.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigurationError
from .lattice import FluxRational

__all__ = [
    "StripProblem",
    "BandStructure",
    "EdgeCrossing",
    "Gap",
    "GapCatalog",
    "dispersion_zero_flux",
    "solve_strip",
    "band_structure",
    "find_gaps",
    "write_bands_csv",
]

MIN_GAP_WIDTH = 0.05     # smallest reportable gap, units of kappa
EDGE_THRESHOLD = 0.5     # squared-norm fraction near a boundary that marks an edge state
N_EDGE_COLUMNS = 4       # one magnetic period at q = 4


@dataclass(frozen=True)
class StripProblem:
    """One Harper-equation eigenproblem at fixed transverse wavenumber ky."""

    ky: float
    flux: FluxRational
    n_sites: int
    kappa: float = 1.0

    def __post_init__(self):
        if self.n_sites < 2:
            raise ConfigurationError(f"strip n_sites must be >= 2, got {self.n_sites}")
        if not (self.kappa > 0):
            raise ConfigurationError("strip kappa must be > 0")


def dispersion_zero_flux(kx: float, ky: float, kappa: float = 1.0) -> float:
    """Zero-flux scattering-state energy 2 kappa cos(kx) + 2 kappa cos(ky)."""
    return 2.0 * kappa * np.cos(kx) + 2.0 * kappa * np.cos(ky)


def solve_strip(problem: StripProblem):
    """Full spectrum of the strip: ascending eigenvalues, orthonormal columns."""
    n = np.arange(problem.n_sites)
    diag = 2.0 * problem.kappa * np.cos(2.0 * np.pi * problem.flux.value * n + problem.ky)
    off = np.full(problem.n_sites - 1, problem.kappa)
    return eigh_tridiagonal(diag, off)


@dataclass
class BandStructure:
    """Strip spectra over a uniform ky grid, with boundary weights per state.

    edge_weights holds the squared-norm fraction in the first n_edge columns
    (the physical n = 0 boundary); far_edge_weights the fraction in the last
    n_edge columns (the artificial truncation boundary).
    """

    ky_grid: np.ndarray
    energies: np.ndarray
    edge_weights: np.ndarray
    far_edge_weights: np.ndarray
    flux: FluxRational
    n_edge: int
    kappa: float = 1.0

    def bulk_mask(self, edge_threshold: float = EDGE_THRESHOLD) -> np.ndarray:
        return (self.edge_weights < edge_threshold) & (self.far_edge_weights < edge_threshold)


def band_structure(
    flux: FluxRational,
    n_sites: int,
    ky_count: int,
    n_edge: int = N_EDGE_COLUMNS,
    kappa: float = 1.0,
) -> BandStructure:
    """Solve the strip over ky_count uniform points of [-pi, pi)."""
    if ky_count < 16:
        raise ConfigurationError(f"ky_count must be >= 16, got {ky_count}")
    kys = -np.pi + 2.0 * np.pi * np.arange(ky_count) / ky_count
    energies = np.empty((ky_count, n_sites))
    wl = np.empty((ky_count, n_sites))
    wr = np.empty((ky_count, n_sites))
    for i, ky in enumerate(kys):
        w, v = solve_strip(StripProblem(ky, flux, n_sites, kappa))
        p = np.abs(v) ** 2
        energies[i] = w
        wl[i] = p[:n_edge].sum(axis=0)
        wr[i] = p[n_sites - n_edge:].sum(axis=0)
    return BandStructure(kys, energies, wl, wr, flux, n_edge, kappa)


@dataclass(frozen=True)
class EdgeCrossing:
    """One edge branch crossing the middle of a gap."""

    side: str            # "n0" (physical edge) or "far" (truncation edge)
    ky: float            # grid point just below the crossing
    velocity_sign: int   # sign of dE/dky through the crossing


@dataclass
class Gap:
    e_low: float
    e_high: float
    crossings: list = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.e_high - self.e_low

    def contains(self, energy: float) -> bool:
        return self.e_low < energy < self.e_high

    def crossings_on(self, side: str) -> list:
        return [c for c in self.crossings if c.side == side]


@dataclass
class GapCatalog:
    gaps: list

    def gap_containing(self, energy: float):
        for g in self.gaps:
            if g.contains(energy):
                return g
        return None


def find_gaps(
    bands: BandStructure,
    edge_threshold: float = EDGE_THRESHOLD,
    min_width: float = MIN_GAP_WIDTH,
) -> GapCatalog:
    """Energy intervals free of bulk states, with their edge-branch crossings.

    Bulk states (below the edge-weight threshold on both boundaries) from the
    whole ky grid are pooled; maximal empty intervals wider than min_width (in
    units of kappa) form the catalog.  For each gap and boundary side, the
    in-gap states nearest mid-gap are followed around the periodic ky grid and
    every crossing of the mid-gap energy is recorded with the sign of its
    numerically differenced group velocity.
    """
    if bands.energies.size == 0:
        raise ConfigurationError("band structure is empty")
    bulk = np.sort(bands.energies[bands.bulk_mask(edge_threshold)])
    if bulk.size < 2:
        return GapCatalog([])
    holes = np.diff(bulk)
    gaps = [
        Gap(float(bulk[i]), float(bulk[i + 1]))
        for i in np.nonzero(holes > min_width * bands.kappa)[0]
    ]
    for gap in gaps:
        gap.crossings = _mid_gap_crossings(bands, gap, edge_threshold)
    return GapCatalog(gaps)


def _mid_gap_crossings(bands: BandStructure, gap: Gap, edge_threshold: float) -> list:
    nky = bands.ky_grid.size
    mid = 0.5 * (gap.e_low + gap.e_high)
    crossings = []
    for side, weights in (("n0", bands.edge_weights), ("far", bands.far_edge_weights)):
        # per ky: the in-gap state of this side closest to mid-gap, if any
        branch = np.full(nky, np.nan)
        for i in range(nky):
            sel = (
                (bands.energies[i] > gap.e_low)
                & (bands.energies[i] < gap.e_high)
                & (weights[i] >= edge_threshold)
            )
            if sel.any():
                cand = bands.energies[i][sel]
                branch[i] = cand[np.argmin(np.abs(cand - mid))]
        for i in range(nky):
            j = (i + 1) % nky
            a, b = branch[i], branch[j]
            if np.isnan(a) or np.isnan(b):
                continue
            if (a - mid) * (b - mid) < 0:
                crossings.append(EdgeCrossing(side, float(bands.ky_grid[i]), int(np.sign(b - a))))
    return crossings


def write_bands_csv(bands: BandStructure, path) -> None:
    """One row per (ky, band index): ky, energy in units of kappa, n0 edge weight."""
    with open(path, "w") as fh:
        fh.write("ky,energy,edge_weight\n")
        for i, ky in enumerate(bands.ky_grid):
            for e, w in zip(bands.energies[i], bands.edge_weights[i]):
                fh.write(f"{ky:.17g},{e / bands.kappa:.17g},{w:.17g}\n")
