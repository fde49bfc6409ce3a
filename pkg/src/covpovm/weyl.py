"""Weyl operators U_{chi,g} on C^d, their relations, commutant and Weyl transform.

``U[h, h + g] = chi(h)`` so that ``(U psi)(h) = chi(h) psi(h + g)`` on column
vectors.  Phase points (chi, g) are enumerated character-major: the point with
character index a and element index i has flat index ``a * d + i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SpecMismatchError
from .groups import Character, GroupElement, GroupSpec, haar_pair


@dataclass(frozen=True)
class PhasePoint:
    chi: Character
    g: GroupElement

    def __post_init__(self):
        if self.chi.spec != self.g.spec:
            raise SpecMismatchError(f"character of {self.chi.spec} paired with element of {self.g.spec}")

    @classmethod
    def of(cls, spec: GroupSpec, chi, g) -> "PhasePoint":
        return cls(spec.character(chi), spec.element(g))

    @property
    def spec(self) -> GroupSpec:
        return self.g.spec

    @property
    def index(self) -> int:
        return self.chi.index * self.spec.order + self.g.index

    def compose(self, other: "PhasePoint") -> "PhasePoint":
        """Group law of the phase space: (chi, g) o (chi', g') = (chi chi', g + g')."""
        return PhasePoint(self.chi * other.chi, self.g + other.g)

    def __repr__(self):
        return f"({self.chi.coords}, {self.g.coords})"


def phase_points(spec: GroupSpec) -> list[PhasePoint]:
    d = spec.order
    return [phase_point_at(spec, i) for i in range(d * d)]


def phase_point_at(spec: GroupSpec, index: int) -> PhasePoint:
    a, i = divmod(int(index), spec.order)
    return PhasePoint(spec.character_at(a), spec.element_at(i))


def as_matrix(x, d: int | None = None) -> np.ndarray:
    m = np.asarray(x, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if d is not None and m.shape[0] != d:
        raise ValueError(f"expected a {d}x{d} matrix, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def as_state_vector(x, d: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=complex).reshape(-1)
    if d is not None and v.shape[0] != d:
        raise ValueError(f"expected a vector with {d} entries, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def weyl_operator(p: PhasePoint) -> np.ndarray:
    spec = p.spec
    d = spec.order
    rows = np.arange(d)
    u = np.zeros((d, d), dtype=complex)
    u[rows, spec.add_table[rows, p.g.index]] = spec.character_table[p.chi.index]
    return u


@lru_cache(maxsize=16)
def weyl_stack(spec: GroupSpec) -> np.ndarray:
    """All d^2 Weyl operators as a read-only (d^2, d, d) array in phase-point order."""
    d = spec.order
    table = spec.character_table
    add = spec.add_table
    stack = np.zeros((d, d, d, d), dtype=complex)
    rows = np.arange(d)
    for i in range(d):
        stack[:, i, rows, add[rows, i]] = table
    stack = stack.reshape(d * d, d, d)
    stack.setflags(write=False)
    return stack


def apply_weyl(p: PhasePoint, psi) -> np.ndarray:
    """U_p psi without materializing U_p."""
    spec = p.spec
    psi = as_state_vector(psi, spec.order)
    return spec.character_table[p.chi.index] * psi[spec.add_table[:, p.g.index]]


def orbit(spec: GroupSpec, psi) -> np.ndarray:
    """Rows are U_p psi for every phase point p, shape (d^2, d)."""
    d = spec.order
    psi = as_state_vector(psi, d)
    # orbit[a, i, h] = chi_a(h) psi(h + g_i)
    shifted = psi[spec.add_table.T]
    return (spec.character_table[:, None, :] * shifted[None, :, :]).reshape(d * d, d)


def check_projective_relation(p: PhasePoint, q: PhasePoint) -> float:
    """Max-entry error of U_p U_q = chi'(g) U_{p o q}."""
    if p.spec != q.spec:
        raise SpecMismatchError(f"{p.spec} vs {q.spec}")
    lhs = weyl_operator(p) @ weyl_operator(q)
    rhs = q.chi(p.g) * weyl_operator(p.compose(q))
    return float(np.max(np.abs(lhs - rhs)))


def check_commutation_phase(p: PhasePoint, q: PhasePoint) -> float:
    """Max-entry error of U_p U_q = chi'(g) conj(chi(g')) U_q U_p."""
    up, uq = weyl_operator(p), weyl_operator(q)
    phase = q.chi(p.g) * np.conj(p.chi(q.g))
    return float(np.max(np.abs(up @ uq - phase * (uq @ up))))


def weyl_adjoint_point(p: PhasePoint) -> tuple[complex, PhasePoint]:
    """Return (phase, q) with U_p^* = phase * U_q."""
    return p.chi(p.g), PhasePoint(p.chi.conj(), -p.g)


def generator_points(spec: GroupSpec) -> list[PhasePoint]:
    """k shift generators and k character generators."""
    zero_chi = spec.character_at(0)
    points = []
    for e in spec.generators():
        points.append(PhasePoint(zero_chi, e))
        points.append(PhasePoint(spec.character(e.coords), spec.zero()))
    return points


def commutant_dimension(spec: GroupSpec, points: list[PhasePoint] | None = None, rtol: float = 1e-9) -> int:
    """Dimension of {X : U_p X = X U_p for all p in points}.

    With ``points=None`` only the generators are used, which already pins the
    commutant of the whole representation.
    """
    d = spec.order
    if points is None:
        points = generator_points(spec)
    eye = np.eye(d)
    # row-major vec: vec(U X) = (U kron I) vec X, vec(X U) = (I kron U^T) vec X
    blocks = []
    for p in points:
        u = weyl_operator(p)
        blocks.append(np.kron(u, eye) - np.kron(eye, u.T))
    system = np.vstack(blocks)
    sv = np.linalg.svd(system, compute_uv=False)
    scale = max(1.0, float(sv[0])) if sv.size else 1.0
    rank = int(np.sum(sv > rtol * scale))
    return d * d - rank


def weyl_transform(rho, spec: GroupSpec) -> np.ndarray:
    """F(chi, g) = Tr(rho U_{chi,g}) for every phase point, flat in phase-point order."""
    d = spec.order
    rho = as_matrix(rho, d)
    rows = np.arange(d)
    # Tr(rho U) = sum_h rho[h + g, h] chi(h)
    gathered = rho[spec.add_table, rows[:, None]]  # [h, g] -> rho[h + g, h]
    return (spec.character_table @ gathered).reshape(d * d)


def weyl_inverse_transform(values, spec: GroupSpec) -> np.ndarray:
    """(1/d) sum_p F(p) U_p^*; inverse of :func:`weyl_transform`."""
    d = spec.order
    f = np.asarray(values, dtype=complex).reshape(d, d)
    w = haar_pair(spec).phase_weight
    # U_p^*[h + g, h] = conj(chi(h)); entry [g, h] collects column h of shift g
    coeff = w * (f.T @ spec.character_table.conj())
    rho = np.zeros((d, d), dtype=complex)
    rows = np.arange(d)
    rho[spec.add_table, rows[:, None]] = coeff.T
    return rho


def parseval_defect(rho, sigma, spec: GroupSpec) -> float:
    """|(1/d) sum_p Tr(rho U_p) conj(Tr(sigma U_p)) - Tr(rho sigma^*)|."""
    w = haar_pair(spec).phase_weight
    lhs = w * np.sum(weyl_transform(rho, spec) * np.conj(weyl_transform(sigma, spec)))
    rhs = np.trace(as_matrix(rho) @ as_matrix(sigma).conj().T)
    return float(abs(lhs - rhs))
