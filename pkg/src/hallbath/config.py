"""Run configuration: one JSON document describes one experiment.

All energies are in units of the lattice hopping kappa (fixed to 1 by
default) and times in 1/kappa, matching how results are reported.  Every
field has a documented default, so the minimal valid document is "{}";
unknown fields and invariant violations are rejected eagerly with the
offending dotted field name.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .dynamics import IntegratorSpec, QubitParams
from .errors import ConfigurationError
from .lattice import Boundary, FluxRational, LatticeSpec
from .spectral import EDGE_THRESHOLD, MIN_GAP_WIDTH, N_EDGE_COLUMNS

__all__ = [
    "DisorderParams",
    "BandScanParams",
    "OutputParams",
    "SimConfig",
    "parse_config",
    "write_manifest",
    "verify_manifest",
]


@dataclass(frozen=True)
class DisorderParams:
    delta: float = 0.0
    seed: int = 1

    def __post_init__(self):
        if self.delta < 0:
            raise ConfigurationError(f"disorder.delta must be >= 0, got {self.delta}")
        if not (0 <= self.seed < 2**64):
            raise ConfigurationError("disorder.seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class BandScanParams:
    n_sites: int = 200
    ky_count: int = 256
    n_edge: int = N_EDGE_COLUMNS
    edge_threshold: float = EDGE_THRESHOLD
    min_gap_width: float = MIN_GAP_WIDTH

    def __post_init__(self):
        if self.n_sites < 8:
            raise ConfigurationError(f"bands.n_sites must be >= 8, got {self.n_sites}")
        if self.ky_count < 16:
            raise ConfigurationError(f"bands.ky_count must be >= 16, got {self.ky_count}")
        if not (0 < self.n_edge < self.n_sites):
            raise ConfigurationError("bands.n_edge must lie inside the strip")
        if not (0 < self.edge_threshold <= 1):
            raise ConfigurationError("bands.edge_threshold must be in (0, 1]")
        if self.min_gap_width <= 0:
            raise ConfigurationError("bands.min_gap_width must be > 0")


@dataclass(frozen=True)
class OutputParams:
    out_dir: str = "runs"
    write_traces: bool = True


@dataclass(frozen=True)
class SimConfig:
    """Complete parameterization of one run."""

    lattice: LatticeSpec = field(default_factory=lambda: LatticeSpec(60, 241))
    flux: FluxRational = field(default_factory=lambda: FluxRational(1, 4))
    qubit: QubitParams = field(default_factory=lambda: QubitParams(0.2, -1.5))
    integrator: IntegratorSpec = field(default_factory=IntegratorSpec)
    disorder: DisorderParams = field(default_factory=DisorderParams)
    bands: BandScanParams = field(default_factory=BandScanParams)
    output: OutputParams = field(default_factory=OutputParams)

    def to_dict(self) -> dict:
        b = self.lattice.boundary
        boundary = {"kind": b.kind}
        if b.kind == "sponge":
            boundary.update(width=b.width, strength=b.strength)
        return {
            "lattice": {
                "nx": self.lattice.nx,
                "ny": self.lattice.ny,
                "kappa": self.lattice.kappa,
                "boundary": boundary,
            },
            "flux": {"p": self.flux.p, "q": self.flux.q},
            "qubit": {"coupling": self.qubit.coupling, "detuning": self.qubit.detuning},
            "integrator": {
                "dt": self.integrator.dt,
                "t_final": self.integrator.t_final,
                "sample_every": self.integrator.sample_every,
            },
            "disorder": {"delta": self.disorder.delta, "seed": self.disorder.seed},
            "bands": {
                "n_sites": self.bands.n_sites,
                "ky_count": self.bands.ky_count,
                "n_edge": self.bands.n_edge,
                "edge_threshold": self.bands.edge_threshold,
                "min_gap_width": self.bands.min_gap_width,
            },
            "output": {
                "out_dir": self.output.out_dir,
                "write_traces": self.output.write_traces,
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SimConfig":
        return _build_config(doc)


class _Section:
    """Reads one config section, tracking unknown keys and naming bad fields."""

    def __init__(self, doc: dict, name: str):
        if not isinstance(doc, dict):
            raise ConfigurationError(f"config section '{name}' must be an object")
        self.doc = dict(doc)
        self.name = name

    def _take(self, key, default):
        return self.doc.pop(key, default)

    def integer(self, key, default):
        v = self._take(key, default)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigurationError(f"{self.name}.{key} must be an integer, got {v!r}")
        return v

    def number(self, key, default):
        v = self._take(key, default)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigurationError(f"{self.name}.{key} must be a number, got {v!r}")
        return float(v)

    def string(self, key, default):
        v = self._take(key, default)
        if not isinstance(v, str):
            raise ConfigurationError(f"{self.name}.{key} must be a string, got {v!r}")
        return v

    def boolean(self, key, default):
        v = self._take(key, default)
        if not isinstance(v, bool):
            raise ConfigurationError(f"{self.name}.{key} must be true/false, got {v!r}")
        return v

    def subsection(self, key):
        return self._take(key, {})

    def finish(self):
        if self.doc:
            extra = ", ".join(f"{self.name}.{k}" for k in sorted(self.doc))
            raise ConfigurationError(f"unknown config field(s): {extra}")


def _build_config(doc: dict) -> SimConfig:
    if not isinstance(doc, dict):
        raise ConfigurationError("config document must be a JSON object")
    defaults = SimConfig()
    top = _Section(doc, "config")

    lat = _Section(top.subsection("lattice"), "lattice")
    bnd = _Section(lat.subsection("boundary"), "lattice.boundary")
    kind = bnd.string("kind", "hard")
    if kind == "sponge":
        boundary = Boundary.sponge(bnd.integer("width", 0), bnd.number("strength", 0.0))
    else:
        boundary = Boundary(kind)
    bnd.finish()
    lattice = LatticeSpec(
        nx=lat.integer("nx", defaults.lattice.nx),
        ny=lat.integer("ny", defaults.lattice.ny),
        kappa=lat.number("kappa", defaults.lattice.kappa),
        boundary=boundary,
    )
    lat.finish()

    fl = _Section(top.subsection("flux"), "flux")
    flux = FluxRational(fl.integer("p", defaults.flux.p), fl.integer("q", defaults.flux.q))
    fl.finish()

    qb = _Section(top.subsection("qubit"), "qubit")
    qubit = QubitParams(
        coupling=qb.number("coupling", defaults.qubit.coupling),
        detuning=qb.number("detuning", defaults.qubit.detuning),
    )
    qb.finish()

    it = _Section(top.subsection("integrator"), "integrator")
    integrator = IntegratorSpec(
        dt=it.number("dt", defaults.integrator.dt),
        t_final=it.number("t_final", defaults.integrator.t_final),
        sample_every=it.integer("sample_every", defaults.integrator.sample_every),
    )
    it.finish()

    ds = _Section(top.subsection("disorder"), "disorder")
    disorder = DisorderParams(
        delta=ds.number("delta", defaults.disorder.delta),
        seed=ds.integer("seed", defaults.disorder.seed),
    )
    ds.finish()

    bd = _Section(top.subsection("bands"), "bands")
    bands = BandScanParams(
        n_sites=bd.integer("n_sites", defaults.bands.n_sites),
        ky_count=bd.integer("ky_count", defaults.bands.ky_count),
        n_edge=bd.integer("n_edge", defaults.bands.n_edge),
        edge_threshold=bd.number("edge_threshold", defaults.bands.edge_threshold),
        min_gap_width=bd.number("min_gap_width", defaults.bands.min_gap_width),
    )
    bd.finish()

    out = _Section(top.subsection("output"), "output")
    output = OutputParams(
        out_dir=out.string("out_dir", defaults.output.out_dir),
        write_traces=out.boolean("write_traces", defaults.output.write_traces),
    )
    out.finish()
    top.finish()

    return SimConfig(lattice, flux, qubit, integrator, disorder, bands, output)


def parse_config(path) -> SimConfig:
    """Load and validate a JSON run configuration."""
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"config file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    return _build_config(doc)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, config: SimConfig, duration_seconds: float, outputs) -> Path:
    """Record the config snapshot, code version, timing, and output digests."""
    from . import __version__

    out_dir = Path(out_dir)
    entries = []
    for name in outputs:
        fp = out_dir / name
        entries.append({"path": str(name), "sha256": _sha256(fp)})
    manifest = {
        "config": config.to_dict(),
        "version": __version__,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "duration_seconds": duration_seconds,
        "outputs": entries,
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def verify_manifest(path) -> bool:
    """Re-hash every listed output and compare against the recorded digests."""
    path = Path(path)
    manifest = json.loads(path.read_text())
    for entry in manifest["outputs"]:
        fp = path.parent / entry["path"]
        if not fp.is_file() or _sha256(fp) != entry["sha256"]:
            return False
    return True


def replace(config: SimConfig, **kwargs) -> SimConfig:
    """dataclasses.replace that keeps SimConfig immutability ergonomic."""
    return dataclasses.replace(config, **kwargs)
