"""Finite truncation of the disordered Harper-Hofstadter photon bath.

The bath is a square array of resonators, semi-infinite in the column index
n = 0, 1, 2, ... and infinite in the row index m = 0, +-1, +-2, ...; a qubit
sits in the edge resonator (n, m) = (0, 0).  This module builds the truncated
single-excitation Hamiltonian acting on amplitude fields alpha[n, m]:

    (H alpha)[n, m] = dw[n, m] * alpha[n, m]
                      + kappa * ( alpha[n+1, m] + alpha[n-1, m]
                                  + exp(+2i pi n phi) * alpha[n, m+1]
                                  + exp(-2i pi n phi) * alpha[n, m-1] )

with hard walls (out-of-range amplitudes are zero), uniform flux phi = p/q per
plaquette in Landau gauge, and on-site detunings dw drawn uniformly from the
open interval (-delta, delta).  Optionally, absorbing strips (a linearly
ramped, purely imaginary on-site potential) are added on the three far
boundaries so long horizons can be run on smaller lattices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError

__all__ = [
    "FluxRational",
    "Boundary",
    "LatticeSpec",
    "DisorderRealization",
    "BathOperator",
    "sample_disorder",
    "build_bath_operator",
]


@dataclass(frozen=True)
class FluxRational:
    """Magnetic flux per plaquette, phi = p/q in units of the flux quantum."""

    p: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ConfigurationError(f"flux.q must be >= 1, got {self.q}")
        if math.gcd(abs(self.p), self.q) != 1:
            raise ConfigurationError(
                f"flux p/q = {self.p}/{self.q} must be in lowest terms"
            )

    @property
    def value(self) -> float:
        return self.p / self.q

    @property
    def trivial(self) -> bool:
        return self.p == 0


@dataclass(frozen=True)
class Boundary:
    """Far-boundary treatment: plain hard wall or hard wall plus absorber.

    kind is "hard" or "sponge".  A sponge adds -i*gamma on-site over `width`
    sites of the three far boundaries (large n, both m extremes), with gamma
    ramping linearly up to `strength`.  The physical n = 0 edge never absorbs.
    """

    kind: str = "hard"
    width: int = 0
    strength: float = 0.0

    def __post_init__(self):
        if self.kind not in ("hard", "sponge"):
            raise ConfigurationError(f"boundary.kind must be 'hard' or 'sponge', got {self.kind!r}")
        if self.kind == "sponge":
            if self.width < 1:
                raise ConfigurationError("boundary.width must be >= 1 for a sponge")
            if self.strength <= 0:
                raise ConfigurationError("boundary.strength must be > 0 for a sponge")

    @classmethod
    def hard(cls) -> "Boundary":
        return cls("hard")

    @classmethod
    def sponge(cls, width: int, strength: float) -> "Boundary":
        return cls("sponge", width, strength)


@dataclass(frozen=True)
class LatticeSpec:
    """Truncation of the bath: nx columns, ny rows centered on m = 0.

    Column index runs n = 0 .. nx-1; row index runs over ny consecutive
    integers m = -(ny//2) .. ny - 1 - ny//2.  kappa is the hopping energy and
    sets the energy unit throughout the package.
    """

    nx: int
    ny: int
    kappa: float = 1.0
    boundary: Boundary = field(default_factory=Boundary.hard)

    def __post_init__(self):
        if self.nx < 1:
            raise ConfigurationError(f"lattice.nx must be >= 1, got {self.nx}")
        if self.ny < 1:
            raise ConfigurationError(f"lattice.ny must be >= 1, got {self.ny}")
        if not (self.kappa > 0):
            raise ConfigurationError(f"lattice.kappa must be > 0, got {self.kappa}")
        if self.boundary.kind == "sponge" and self.boundary.width >= min(self.nx, self.ny) / 2:
            raise ConfigurationError(
                f"boundary.width {self.boundary.width} too large for a "
                f"{self.nx}x{self.ny} lattice (must be < min(nx, ny)/2)"
            )

    @property
    def n_sites(self) -> int:
        return self.nx * self.ny

    @property
    def m_min(self) -> int:
        return -(self.ny // 2)

    @property
    def m_max(self) -> int:
        return self.ny - 1 - self.ny // 2

    def site_index(self, n: int, m: int) -> int:
        """Linear index of site (n, m) in row-major (n outer, m inner) order."""
        if not (0 <= n < self.nx and self.m_min <= m <= self.m_max):
            raise ConfigurationError(f"site ({n}, {m}) outside the retained lattice")
        return n * self.ny + (m - self.m_min)

    @property
    def qubit_site(self) -> int:
        return self.site_index(0, 0)


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of the on-site detuning field dw[n, m], |dw| < delta strictly."""

    delta: float
    seed: int
    detunings: np.ndarray

    def __post_init__(self):
        if self.delta > 0 and not (np.abs(self.detunings) < self.delta).all():
            raise ConfigurationError("detunings must lie strictly inside (-delta, delta)")
        if self.delta == 0 and self.detunings.any():
            raise ConfigurationError("delta = 0 requires an all-zero detuning field")


def sample_disorder(delta: float, seed: int, spec: LatticeSpec) -> DisorderRealization:
    """Draw iid uniform detunings on the open interval (-delta, delta).

    Uses the counter-based Philox generator keyed by `seed`: site k's draw is
    the k-th word of the keyed stream, so the field depends only on
    (seed, delta, nx, ny) and never on traversal order or thread count.
    Repeated calls with the same arguments are bit-for-bit identical.
    """
    if delta < 0:
        raise ConfigurationError(f"disorder.delta must be >= 0, got {delta}")
    if not (0 <= seed < 2**64):
        raise ConfigurationError("disorder.seed must be a 64-bit unsigned integer")
    if delta == 0:
        return DisorderRealization(0.0, seed, np.zeros((spec.nx, spec.ny)))
    raw = np.random.Generator(np.random.Philox(key=seed)).integers(
        0, 2**64, size=spec.n_sites, dtype=np.uint64, endpoint=False
    )
    # (raw >> 11) + 0.5 lies in (0, 2^53), so u is strictly inside (0, 1) and
    # the detunings stay strictly inside the open interval.
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) / 2**53
    dw = delta * (2.0 * u - 1.0)
    return DisorderRealization(delta, seed, dw.reshape(spec.nx, spec.ny))


def _sponge_profile(spec: LatticeSpec) -> np.ndarray:
    """Absorption rate gamma[n, m] >= 0 for the configured boundary."""
    gamma = np.zeros((spec.nx, spec.ny))
    if spec.boundary.kind != "sponge":
        return gamma
    w = spec.boundary.width
    ramp = spec.boundary.strength * np.arange(1, w + 1) / w
    # far column side; the n = 0 edge (where the qubit sits) never absorbs
    gamma[spec.nx - w:, :] = np.maximum(gamma[spec.nx - w:, :], ramp[:, None])
    gamma[:, :w] = np.maximum(gamma[:, :w], ramp[::-1][None, :])
    gamma[:, spec.ny - w:] = np.maximum(gamma[:, spec.ny - w:], ramp[None, :])
    return gamma


class BathOperator:
    """Single-excitation bath Hamiltonian on the truncated lattice.

    Holds a stencil representation (complex on-site array plus one Peierls
    phase per column) that integrators can consume directly; an explicit CSR
    matrix is assembled lazily for spectral checks and debugging.  Immutable
    after construction and safe to share across workers.
    """

    def __init__(self, spec: LatticeSpec, flux: FluxRational, disorder: DisorderRealization):
        if disorder.detunings.shape != (spec.nx, spec.ny):
            raise ConfigurationError(
                f"disorder field shape {disorder.detunings.shape} does not match "
                f"lattice {spec.nx}x{spec.ny}"
            )
        self.spec = spec
        self.flux = flux
        self.disorder = disorder
        self.kappa = spec.kappa
        # hop (n, m) -> (n, m+1) carries exp(+2i pi n phi) as seen from row (n, m)
        self.col_phase = np.exp(2j * np.pi * flux.value * np.arange(spec.nx))
        gamma = _sponge_profile(spec)
        self.absorbing = bool(gamma.any())
        self.onsite = disorder.detunings - 1j * gamma
        self._matrix = None

    @property
    def dimension(self) -> int:
        return self.spec.n_sites

    @property
    def matrix(self) -> sp.csr_matrix:
        """Explicit sparse matrix, assembled on first use."""
        if self._matrix is None:
            self._matrix = self._assemble()
        return self._matrix

    def _assemble(self) -> sp.csr_matrix:
        nx, ny, kappa = self.spec.nx, self.spec.ny, self.kappa
        N = nx * ny
        lin = np.arange(N).reshape(nx, ny)
        rows = [np.arange(N)]
        cols = [np.arange(N)]
        vals = [self.onsite.ravel().astype(complex)]
        if nx > 1:
            a = lin[:-1, :].ravel()
            b = lin[1:, :].ravel()
            hop = np.full(a.size, kappa, dtype=complex)
            rows += [a, b]
            cols += [b, a]
            vals += [hop, hop]
        if ny > 1:
            a = lin[:, :-1].ravel()
            b = lin[:, 1:].ravel()
            ph = kappa * np.repeat(self.col_phase, ny - 1)
            rows += [a, b]
            cols += [b, a]
            vals += [ph, ph.conj()]
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(N, N),
        )

    def apply(self, alpha: np.ndarray) -> np.ndarray:
        """Apply the Hamiltonian to an amplitude field (shape (nx, ny) or flat)."""
        flat = np.asarray(alpha).reshape(self.dimension)
        out = self.matrix @ flat
        return out.reshape(np.asarray(alpha).shape)

    def plaquette_phase(self, n: int, m: int) -> complex:
        """Oriented product of the four hop phases around plaquette (n, m).

        Legs are read as matrix elements H[from, to] along
        (n,m) -> (n+1,m) -> (n+1,m+1) -> (n,m+1) -> (n,m); the result is
        exp(2i pi p/q) regardless of n, m and of gauge.
        """
        s = self.spec.site_index
        corners = [(n, m), (n + 1, m), (n + 1, m + 1), (n, m + 1), (n, m)]
        H = self.matrix
        prod = 1.0 + 0.0j
        for (a, b) in zip(corners[:-1], corners[1:]):
            prod *= H[s(*a), s(*b)]
        return prod / self.kappa**4

    def dump_coo(self, path) -> None:
        """Write the matrix as coordinate-format text: row col re im."""
        coo = self.matrix.tocoo()
        with open(path, "w") as fh:
            for r, c, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"{r} {c} {v.real:.17g} {v.imag:.17g}\n")

    def gauge_transformed(self, chi: np.ndarray) -> "SparseOperator":
        """Conjugate by the site-local gauge U = diag(exp(i chi[n, m])).

        Returns a generic sparse-matrix operator; observables built from
        |q(t)| are invariant when chi vanishes at the qubit site.
        """
        if chi.shape != (self.spec.nx, self.spec.ny):
            raise ConfigurationError("gauge field shape must match the lattice")
        u = np.exp(1j * chi.ravel())
        mat = (sp.diags(u) @ self.matrix @ sp.diags(u.conj())).tocsr()
        return SparseOperator(self.spec, mat, absorbing=self.absorbing)


class SparseOperator:
    """Bath Hamiltonian given only as an explicit sparse matrix.

    Produced by gauge transformations (arbitrary per-bond phases cannot be
    stored in the column-phase stencil).  Integrators fall back to sparse
    matrix-vector products for these.
    """

    def __init__(self, spec: LatticeSpec, matrix: sp.csr_matrix, absorbing: bool = False):
        self.spec = spec
        self.kappa = spec.kappa
        self.matrix = matrix
        self.absorbing = absorbing

    @property
    def dimension(self) -> int:
        return self.spec.n_sites

    def apply(self, alpha: np.ndarray) -> np.ndarray:
        flat = np.asarray(alpha).reshape(self.dimension)
        return (self.matrix @ flat).reshape(np.asarray(alpha).shape)


def build_bath_operator(
    spec: LatticeSpec,
    flux: FluxRational,
    disorder: DisorderRealization | None = None,
) -> BathOperator:
    """Construct the bath Hamiltonian for one disorder realization.

    `disorder=None` means the clean lattice.  Out-of-range neighbor amplitudes
    are treated as zero (hard wall); if the spec's boundary is a sponge, the
    three far boundaries additionally acquire the -i*gamma absorber.
    """
    if disorder is None:
        disorder = DisorderRealization(0.0, 0, np.zeros((spec.nx, spec.ny)))
    return BathOperator(spec, flux, disorder)
