"""Decoherence of a qubit coupled to a disordered flux-threaded photonic lattice.

The package builds truncated Harper-Hofstadter bath Hamiltonians with tunable
plaquette flux and on-site disorder, integrates the single-excitation
qubit-bath dynamics, quantifies information backflow from the sampled decay
trace, and runs seeded disorder ensembles and disorder sweeps that contrast
the topologically trivial and nontrivial phases of the bath.
"""

__version__ = "0.1.0"

from .config import SimConfig, parse_config
from .dynamics import (
    DecayTrace,
    IntegratorSpec,
    JointState,
    QubitParams,
    evolve,
    fit_decay_rate,
    rhs,
)
from .ensemble import (
    EnsembleSpec,
    EnsembleStats,
    derive_seed,
    histogram,
    run_ensemble,
    sweep_disorder,
)
from .errors import ConfigurationError, EnsembleMemberError, NumericalFailureError
from .lattice import (
    BathOperator,
    Boundary,
    DisorderRealization,
    FluxRational,
    LatticeSpec,
    build_bath_operator,
    sample_disorder,
)
from .nonmarkov import MARKOVIAN_CUTOFF, NonMarkovResult, nonmarkovianity, reduced_density_matrix
from .spectral import (
    BandStructure,
    GapCatalog,
    StripProblem,
    band_structure,
    dispersion_zero_flux,
    find_gaps,
    solve_strip,
)

__all__ = [
    "__version__",
    "SimConfig",
    "parse_config",
    "DecayTrace",
    "IntegratorSpec",
    "JointState",
    "QubitParams",
    "evolve",
    "fit_decay_rate",
    "rhs",
    "EnsembleSpec",
    "EnsembleStats",
    "derive_seed",
    "histogram",
    "run_ensemble",
    "sweep_disorder",
    "ConfigurationError",
    "EnsembleMemberError",
    "NumericalFailureError",
    "BathOperator",
    "Boundary",
    "DisorderRealization",
    "FluxRational",
    "LatticeSpec",
    "build_bath_operator",
    "sample_disorder",
    "MARKOVIAN_CUTOFF",
    "NonMarkovResult",
    "nonmarkovianity",
    "reduced_density_matrix",
    "BandStructure",
    "GapCatalog",
    "StripProblem",
    "band_structure",
    "dispersion_zero_flux",
    "find_gaps",
    "solve_strip",
]
