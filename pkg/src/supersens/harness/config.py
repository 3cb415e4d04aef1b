"""Experiment configuration: nested dataclasses with canonical JSON."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace

from ..burgers1d import CutoffConfig, Scheme, SolverConfig1D
from ..burgers2d import BoundaryData2D, Scheme2D, SolverConfig2D


class ConfigError(ValueError):
    pass


class Dimension(str, enum.Enum):
    ONE_D = "OneD"
    TWO_D = "TwoD"


SCHEMES_1D = tuple(s.value for s in Scheme)
SCHEMES_2D = tuple(s.value for s in Scheme2D)


@dataclass(frozen=True)
class Physics:
    eps: float
    delta: float | None = None
    delta0: float | None = None
    delta_amp: float = 0.0
    boundary_kind: str | None = None
    beta: float = 0.0


@dataclass(frozen=True)
class Discretization:
    n_pts: int = 39
    dt: float = 0.02
    n_y: int | None = None
    alpha: float | None = None


@dataclass(frozen=True)
class Control:
    max_steps: int = 20_000_000
    steady_tol: float = 1e-10
    relocation_distance: float | None = None
    refresh_factor: float = 10.0
    cutoff_half_width: float | None = None
    cutoff_sharpness: float = 200.0


@dataclass(frozen=True)
class Output:
    csv: str = "results.csv"
    sample_stride: int = 1
    plot_script: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    dimension: Dimension
    scheme: str
    physics: Physics
    discretization: Discretization = field(default_factory=Discretization)
    control: Control = field(default_factory=Control)
    output: Output = field(default_factory=Output)
    workers: int = 1
    nightly: bool = False

    def __post_init__(self):
        object.__setattr__(self, "dimension", Dimension(self.dimension))
        allowed = SCHEMES_1D if self.dimension is Dimension.ONE_D else SCHEMES_2D
        if self.scheme not in allowed:
            raise ConfigError(
                f"scheme {self.scheme!r} is not a {self.dimension.value} scheme; choose from {allowed}"
            )
        p = self.physics
        if self.dimension is Dimension.ONE_D:
            if p.delta is None:
                raise ConfigError("1D experiments need physics.delta")
            if self.scheme in ("Qui", "NewQui") and self.control.cutoff_half_width is None:
                raise ConfigError(f"{self.scheme} needs control.cutoff_half_width")
        else:
            if p.delta0 is None or p.boundary_kind is None:
                raise ConfigError("2D experiments need physics.delta0 and physics.boundary_kind")
            if self.discretization.n_y is None:
                raise ConfigError("2D experiments need discretization.n_y")
        if self.workers < 1:
            raise ConfigError("workers must be positive")

    # -- serialisation -----------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dimension"] = self.dimension.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        try:
            for key, sub in (("physics", Physics), ("discretization", Discretization),
                             ("control", Control), ("output", Output)):
                if key in d:
                    d[key] = _build(sub, d[key])
            return _build(cls, d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    def config_hash(self) -> str:
        """Digest of everything that affects the numbers (not name, output, workers)."""
        d = self.to_dict()
        for key in ("name", "output", "workers", "nightly"):
            d.pop(key)
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    # -- overrides ---------------------------------------------------------

    def with_overrides(self, *, dt=None, max_steps=None, workers=None) -> "ExperimentConfig":
        out = self
        if dt is not None:
            out = replace(out, discretization=replace(out.discretization, dt=float(dt)))
        if max_steps is not None:
            out = replace(out, control=replace(out.control, max_steps=int(max_steps)))
        if workers is not None:
            out = replace(out, workers=int(workers))
        return out

    # -- solver configs ----------------------------------------------------

    def solver_1d(self) -> SolverConfig1D:
        p, q, c = self.physics, self.discretization, self.control
        return SolverConfig1D(
            eps=p.eps, delta=p.delta, n_pts=q.n_pts, dt=q.dt, alpha=q.alpha,
            relocation_distance=c.relocation_distance, steady_tol=c.steady_tol,
            max_steps=c.max_steps, refresh_factor=c.refresh_factor,
        )

    def cutoff(self) -> CutoffConfig | None:
        c = self.control
        if c.cutoff_half_width is None:
            return None
        return CutoffConfig(c.cutoff_half_width, c.cutoff_sharpness)

    def solver_2d(self) -> SolverConfig2D:
        p, q, c = self.physics, self.discretization, self.control
        return SolverConfig2D(
            eps=p.eps, beta=p.beta,
            boundary=BoundaryData2D(p.boundary_kind, p.delta0, p.delta_amp),
            n_pts=q.n_pts, n_y=q.n_y, dt=q.dt, alpha=q.alpha,
            relocation_distance=c.relocation_distance, steady_tol=c.steady_tol,
            max_steps=c.max_steps, refresh_factor=c.refresh_factor, workers=self.workers,
        )


def _build(cls, d):
    names = {f.name for f in fields(cls)}
    unknown = set(d) - names
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**d)
