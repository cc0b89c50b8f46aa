import dataclasses

import pytest

from hallbath import FluxRational, IntegratorSpec, LatticeSpec, QubitParams, SimConfig
from hallbath.config import DisorderParams, OutputParams


@pytest.fixture
def small_config():
    """A cheap-to-evolve run configuration for plumbing tests."""
    return SimConfig(
        lattice=LatticeSpec(16, 33),
        flux=FluxRational(1, 4),
        qubit=QubitParams(0.2, -1.5),
        integrator=IntegratorSpec(dt=0.01, t_final=8.0, sample_every=2),
        disorder=DisorderParams(delta=1.0, seed=3),
        output=OutputParams(out_dir="runs"),
    )


def with_output_dir(config, out_dir):
    return dataclasses.replace(config, output=dataclasses.replace(config.output, out_dir=str(out_dir)))
