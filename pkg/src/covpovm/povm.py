"""Covariant POVMs generated by a Weyl orbit, their contraction family and multipliers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NormalizationError, TheoremViolationError
from .groups import GroupSpec, haar_pair
from .weyl import (
    PhasePoint,
    as_state_vector,
    orbit,
    phase_point_at,
    weyl_operator,
    weyl_stack,
)

MATERIALIZE_MAX_DIM = 32
RESOLUTION_TOL = 1e-11


@dataclass(frozen=True)
class CovariantPovm:
    """Effects ``weight * |U_p psi0><U_p psi0|`` over all d^2 phase points.

    ``orbit_vectors`` always holds the d^2 orbit vectors; the (d^2, d, d)
    effect array is only kept for ``d <= MATERIALIZE_MAX_DIM``.
    """

    spec: GroupSpec
    fiducial: np.ndarray
    weight: float
    orbit_vectors: np.ndarray = field(repr=False)
    _effects: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.spec.order

    def effect(self, p: PhasePoint | int) -> np.ndarray:
        idx = p.index if isinstance(p, PhasePoint) else int(p)
        if self._effects is not None:
            return self._effects[idx]
        v = self.orbit_vectors[idx]
        return self.weight * np.outer(v, v.conj())

    @property
    def effects(self) -> np.ndarray:
        if self._effects is not None:
            return self._effects
        v = self.orbit_vectors
        return self.weight * np.einsum("pi,pj->pij", v, v.conj())

    def total(self) -> np.ndarray:
        """M(phase space) = sum of all effects."""
        v = self.orbit_vectors
        return self.weight * (v.T @ v.conj())

    def identity_defect(self) -> float:
        return float(np.max(np.abs(self.total() - np.eye(self.dim))))


def build_povm(spec: GroupSpec, fiducial) -> CovariantPovm:
    d = spec.order
    psi = as_state_vector(fiducial, d)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise NormalizationError(f"fiducial must have unit norm, got {norm:.12g}")
    psi = psi.copy()
    psi.setflags(write=False)
    vectors = orbit(spec, psi)
    vectors.setflags(write=False)
    weight = haar_pair(spec).phase_weight
    effects = None
    if d <= MATERIALIZE_MAX_DIM:
        effects = weight * np.einsum("pi,pj->pij", vectors, vectors.conj())
        effects.setflags(write=False)
    povm = CovariantPovm(spec, psi, weight, vectors, effects)
    defect = povm.identity_defect()
    if defect > 1e-10:
        raise TheoremViolationError(f"effects do not resolve the identity (defect {defect:.3g})")
    return povm


def contraction_kernel(spec: GroupSpec) -> np.ndarray:
    """K[p, p'] = chi'(g) conj(chi(g')) for p = (chi, g), p' = (chi', g')."""
    d = spec.order
    table = spec.character_table
    # K[a, i, a', i'] = table[a', i] * conj(table[a, i'])
    kern = table.T[None, :, :, None] * table.conj()[:, None, None, :]
    return kern.reshape(d * d, d * d)


def contraction_at(povm: CovariantPovm, p: PhasePoint) -> np.ndarray:
    """T_p = sum_{p'} weight * chi'(g) conj(chi(g')) |U_{p'} psi0><U_{p'} psi0|."""
    spec = povm.spec
    table = spec.character_table
    coeff = np.outer(table[:, p.g.index], table[p.chi.index].conj()).reshape(-1)
    v = povm.orbit_vectors
    return povm.weight * (v.T * coeff) @ v.conj()


def contractions(povm: CovariantPovm) -> np.ndarray:
    """All T_p stacked as (d^2, d, d)."""
    v = povm.orbit_vectors
    kern = contraction_kernel(povm.spec)
    return povm.weight * np.einsum("pq,qi,qj->pij", kern, v, v.conj(), optimize=True)


def ambiguity_function(spec: GroupSpec, psi) -> np.ndarray:
    """<psi, U_p psi> for every phase point (conjugate-linear in the first slot)."""
    psi = as_state_vector(psi, spec.order)
    return orbit(spec, psi) @ psi.conj()


@dataclass(frozen=True)
class MultiplierTable:
    spec: GroupSpec
    values: np.ndarray
    residuals: np.ndarray

    @property
    def min_modulus(self) -> float:
        return float(np.min(np.abs(self.values)))

    @property
    def argmin(self) -> PhasePoint:
        return phase_point_at(self.spec, int(np.argmin(np.abs(self.values))))

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals))

    def __getitem__(self, p: PhasePoint) -> complex:
        return complex(self.values[p.index])


def extract_multiplier(povm: CovariantPovm, tol: float = RESOLUTION_TOL) -> MultiplierTable:
    """f(p) = Tr(U_p^* T_p) / d, checking that T_p - f(p) U_p vanishes at every point."""
    spec = povm.spec
    d = spec.order
    n = d * d
    values = np.empty(n, dtype=complex)
    residuals = np.empty(n)
    stack = weyl_stack(spec) if d <= MATERIALIZE_MAX_DIM else None
    for idx in range(n):
        p = phase_point_at(spec, idx)
        t = contraction_at(povm, p)
        u = stack[idx] if stack is not None else weyl_operator(p)
        f = np.sum(u.conj() * t) / d
        values[idx] = f
        residuals[idx] = np.max(np.abs(t - f * u))
    worst = int(np.argmax(residuals))
    if residuals[worst] > tol:
        raise TheoremViolationError(
            f"T_p differs from f(p) U_p by {residuals[worst]:.3g} at {phase_point_at(spec, worst)}"
        )
    values.setflags(write=False)
    residuals.setflags(write=False)
    return MultiplierTable(spec, values, residuals)


@dataclass(frozen=True)
class ICReport:
    complete: bool
    min_modulus: float
    worst_point: PhasePoint
    tol: float

    def to_dict(self) -> dict:
        return {
            "complete": self.complete,
            "min_modulus": self.min_modulus,
            "worst_point": {"chi": list(self.worst_point.chi.coords), "g": list(self.worst_point.g.coords)},
            "tol": self.tol,
        }


def informational_completeness_report(table: MultiplierTable, tol: float = 1e-10) -> ICReport:
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = table.min_modulus
    return ICReport(complete=m > tol, min_modulus=m, worst_point=table.argmin, tol=tol)


# fiducial presets


def basis_fiducial(spec: GroupSpec, index: int = 0) -> np.ndarray:
    psi = np.zeros(spec.order, dtype=complex)
    psi[index] = 1.0
    return psi


def random_fiducial(spec: GroupSpec, rng: np.random.Generator | int | None = None) -> np.ndarray:
    """Normalized complex Gaussian vector; generic, hence informationally complete almost surely."""
    rng = np.random.default_rng(rng)
    psi = rng.standard_normal(spec.order) + 1j * rng.standard_normal(spec.order)
    return psi / np.linalg.norm(psi)


def discrete_gaussian_fiducial(spec: GroupSpec, wraps: int = 6) -> np.ndarray:
    """Tensor product over factors of the periodized Gaussian sum_w exp(-pi (h + w n)^2 / n)."""
    psi = np.ones(1)
    for n in spec.factors:
        h = np.arange(n)[:, None] + n * np.arange(-wraps, wraps + 1)[None, :]
        factor = np.exp(-np.pi * h.astype(float) ** 2 / n).sum(axis=1)
        psi = np.kron(psi, factor)
    psi = psi.astype(complex)
    return psi / np.linalg.norm(psi)


def covariance_defect(povm: CovariantPovm, q: PhasePoint, p: PhasePoint) -> float:
    """Max-entry error of U_q M(p) U_q^* = M(q o p); the projector absorbs the cocycle phase."""
    u = weyl_operator(q)
    moved = u @ povm.effect(p) @ u.conj().T
    return float(np.max(np.abs(moved - povm.effect(q.compose(p)))))
