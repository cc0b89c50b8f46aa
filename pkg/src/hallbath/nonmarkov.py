"""Reduced qubit state and the time-averaged information-backflow quantifier.

Tracing the lattice out of the evolved single-excitation state leaves a qubit
density matrix fully determined by q(t); its coherence decays as |q(t)|.
Memoryless decay means |q(t)| shrinks monotonically, so the positive variation
of |q| accumulated per unit time,

    N = (1/T) * sum over rising intervals of the increase of |q|,

is zero exactly for Markovian traces and positive whenever the bath feeds
amplitude back into the qubit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import DecayTrace
from .errors import ConfigurationError

__all__ = [
    "MARKOVIAN_CUTOFF",
    "NonMarkovResult",
    "reduced_density_matrix",
    "nonmarkovianity",
]

# Operational classification cutoff, units of kappa: traces with a quantifier
# below this count as Markovian in ensemble statistics.
MARKOVIAN_CUTOFF = 0.002


def reduced_density_matrix(q: complex, rho0: np.ndarray) -> np.ndarray:
    """Qubit density matrix at time t given q(t), basis {excited, ground}.

    rho0 is the initial qubit state (the lattice starts in the vacuum).  The
    map is amplitude damping: populations relax by |q|^2, coherences by q.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    _validate_density_matrix(rho0)
    p = abs(q) ** 2
    return np.array(
        [
            [p * rho0[0, 0], q * rho0[0, 1]],
            [np.conj(q) * rho0[1, 0], (1.0 - p) * rho0[0, 0] + rho0[1, 1]],
        ]
    )


def _validate_density_matrix(rho: np.ndarray) -> None:
    if rho.shape != (2, 2):
        raise ConfigurationError("density matrix must be 2x2")
    if abs(np.trace(rho) - 1.0) > 1e-12:
        raise ConfigurationError("density matrix must have unit trace")
    if np.abs(rho - rho.conj().T).max() > 1e-12:
        raise ConfigurationError("density matrix must be Hermitian")
    ev = np.linalg.eigvalsh(rho)
    if ev.min() < -1e-12 or ev.max() > 1.0 + 1e-12:
        raise ConfigurationError("density matrix eigenvalues must lie in [0, 1]")


@dataclass(frozen=True)
class NonMarkovResult:
    """Time-averaged positive variation of |q| and where the rises happened."""

    value: float
    rise_intervals: tuple

    @property
    def markovian(self) -> bool:
        return self.value < MARKOVIAN_CUTOFF


def nonmarkovianity(trace: DecayTrace) -> NonMarkovResult:
    """Discrete positive variation of |q(t)| divided by the horizon T.

    Sums max(0, |q_{k+1}| - |q_k|) over the sampled trace; rise intervals are
    the maximal runs of consecutive positive increments.  Exact for traces
    monotone between samples, which the default sampling density ensures.
    """
    if trace.q.size < 2:
        raise ConfigurationError("need at least 2 samples to quantify backflow")
    amp = np.abs(trace.q)
    inc = np.diff(amp)
    rising = inc > 0
    value = float(inc[rising].sum() / trace.times[-1])
    intervals = []
    start = None
    for k, r in enumerate(rising):
        if r and start is None:
            start = k
        elif not r and start is not None:
            intervals.append((float(trace.times[start]), float(trace.times[k])))
            start = None
    if start is not None:
        intervals.append((float(trace.times[start]), float(trace.times[-1])))
    return NonMarkovResult(value, tuple(intervals))
