"""Experiment configuration shared by the CLI and the scripts."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .groups import GroupSpec
from .povm import basis_fiducial, discrete_gaussian_fiducial, random_fiducial
from .serialization import load_json, matrix_from_json, vector_from_json
from .tomography import check_density_matrix, random_density_matrix

FIDUCIAL_PRESETS = ("basis", "discrete-gaussian", "random")
STATE_PRESETS = ("random", "maximally-mixed", "basis")


class ConfigError(ValueError):
    """Invalid or unreadable configuration (CLI exit code 4)."""


@dataclass
class ExperimentConfig:
    group: str = "2"
    fiducial: str = "random"
    seed: int = 0
    state: str = "random"
    rank: int | None = None
    shots: int = 0
    schedule: list[int] = field(default_factory=list)
    n_seeds: int = 20
    project: bool = False
    ic_tol: float = 1e-10
    identity_tol: float = 1e-12
    residual_tol: float = 1e-11
    ambiguity_tol: float = 1e-12
    tomo_tol: float = 1e-10
    slope_tol: float = 0.15
    trunc: int = 16
    radius: float = 7.0
    step: float = 0.05
    alpha: str = "0.5+0.3i"
    n_check: int | None = None
    cv_tol: float = 1e-3
    strict: bool = False
    output: str | None = None
    csv: str | None = None

    def validate(self) -> "ExperimentConfig":
        try:
            self.group_spec
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.shots < 0:
            raise ConfigError("shots must be >= 0")
        if any(int(n) <= 0 for n in self.schedule):
            raise ConfigError("schedule entries must be positive shot counts")
        if self.n_seeds < 1:
            raise ConfigError("n_seeds must be >= 1")
        for name in ("ic_tol", "identity_tol", "residual_tol", "ambiguity_tol", "tomo_tol", "slope_tol", "cv_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        self.alpha_value
        return self

    @property
    def group_spec(self) -> GroupSpec:
        return GroupSpec.parse(self.group)

    @property
    def alpha_value(self) -> complex:
        return parse_complex(self.alpha)

    def seed_streams(self) -> tuple[np.random.Generator, np.random.Generator, list[int]]:
        """Independent generators for fiducial and state plus the per-repeat sampling seeds."""
        fid_ss, state_ss, samp_ss = np.random.SeedSequence(self.seed).spawn(3)
        sampling = [int(s) for s in samp_ss.generate_state(self.n_seeds, dtype=np.uint64)]
        return np.random.default_rng(fid_ss), np.random.default_rng(state_ss), sampling

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            data = load_json(path)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def merged(self, overrides: dict) -> "ExperimentConfig":
        data = self.to_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig.from_dict(data)


def parse_complex(text) -> complex:
    """Accepts ``0.5+0.3i``, ``0.5+0.3j`` or a plain real number."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}") from None


def resolve_fiducial(config: ExperimentConfig, rng: np.random.Generator) -> np.ndarray:
    spec = config.group_spec
    name = config.fiducial
    if name == "basis":
        return basis_fiducial(spec)
    if name == "discrete-gaussian":
        return discrete_gaussian_fiducial(spec)
    if name == "random":
        return random_fiducial(spec, rng)
    try:
        psi = vector_from_json(load_json(name))
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise ConfigError(f"cannot load fiducial {name!r}: {exc}") from None
    if psi.shape != (spec.order,):
        raise ConfigError(f"fiducial file has {psi.size} entries, group {spec} needs {spec.order}")
    return psi


def resolve_state(config: ExperimentConfig, rng: np.random.Generator) -> np.ndarray:
    d = config.group_spec.order
    name = config.state
    if name == "random":
        return random_density_matrix(d, config.rank, rng)
    if name == "maximally-mixed":
        return np.eye(d, dtype=complex) / d
    if name == "basis":
        rho = np.zeros((d, d), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    if not Path(name).is_file():
        raise ConfigError(f"state file {name!r} not found")
    try:
        rho = matrix_from_json(load_json(name))
        return check_density_matrix(rho, d, atol=1e-9)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise ConfigError(f"cannot load state {name!r}: {exc}") from None
