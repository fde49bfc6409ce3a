"""Forward model, Born-rule sampling and linear-inversion reconstruction for covariant POVMs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import IllConditionedError, NormalizationError
from .groups import GroupSpec
from .povm import CovariantPovm, MultiplierTable
from .weyl import as_matrix, weyl_inverse_transform


@dataclass(frozen=True)
class ProbabilityTable:
    """Density p(p) of outcomes with respect to the phase-space weight 1/d.

    ``sum_p weight * p(p) == 1``; an empirical table stores ``frequency * d``.
    """

    spec: GroupSpec
    values: np.ndarray
    kind: Literal["exact", "empirical"] = "exact"
    shots: int | None = None

    @property
    def weight(self) -> float:
        return 1.0 / self.spec.order

    def total(self) -> float:
        return float(self.weight * np.sum(self.values))

    def to_dict(self) -> dict:
        return {
            "group": list(self.spec.factors),
            "kind": self.kind,
            "shots": self.shots,
            "values": [float(v) for v in self.values],
        }


@dataclass
class TomographyResult:
    rho_hat: np.ndarray
    rho_raw: np.ndarray
    condition_indicator: float
    kind: str
    frobenius_error: float | None = None
    trace_distance: float | None = None

    def to_dict(self) -> dict:
        from .serialization import matrix_to_json

        return {
            "kind": self.kind,
            "condition_indicator": self.condition_indicator,
            "frobenius_error": self.frobenius_error,
            "trace_distance": self.trace_distance,
            "rho_hat": matrix_to_json(self.rho_hat),
        }


def check_density_matrix(rho, d: int | None = None, atol: float = 1e-12) -> np.ndarray:
    rho = as_matrix(rho, d)
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise NormalizationError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise NormalizationError(f"density matrix has trace {np.trace(rho).real:.12g}")
    if np.min(np.linalg.eigvalsh(rho)) < -1e-10:
        raise NormalizationError("density matrix has a negative eigenvalue")
    return rho


def random_density_matrix(d: int, rank: int | None = None, rng=None) -> np.ndarray:
    """Ginibre-distributed state of the given rank (full rank by default)."""
    rng = np.random.default_rng(rng)
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise ValueError(f"rank must be between 1 and {d}")
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def forward_probabilities(povm: CovariantPovm, rho) -> ProbabilityTable:
    """p(p) = <U_p psi0, rho U_p psi0>."""
    rho = as_matrix(rho)
    if rho.shape[0] != povm.dim:
        raise ValueError(f"state has dimension {rho.shape[0]}, POVM acts on C^{povm.dim}")
    v = povm.orbit_vectors
    values = np.einsum("pi,ij,pj->p", v.conj(), rho, v).real
    values.setflags(write=False)
    return ProbabilityTable(povm.spec, values, "exact", None)


def sample_outcomes(table: ProbabilityTable, shots: int, seed: int) -> ProbabilityTable:
    """Draw i.i.d. phase points from weight * p and return ``frequency * d``.

    Inverse-CDF sampling over the fixed phase-point order with PCG64, so the
    result depends only on (table, shots, seed).
    """
    shots = int(shots)
    if shots <= 0:
        raise ValueError("shots must be a positive integer")
    probs = np.clip(np.asarray(table.values, dtype=float), 0.0, None) * table.weight
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    draws = np.minimum(draws, cdf.size - 1)
    counts = np.bincount(draws, minlength=cdf.size)
    values = counts / shots * table.spec.order
    values.setflags(write=False)
    return ProbabilityTable(table.spec, values, "empirical", shots)


def kernel_transform(table: ProbabilityTable) -> np.ndarray:
    """S(chi, g) = sum_{chi', g'} weight * chi'(g) conj(chi(g')) p(chi', g'), flat in phase-point order."""
    spec = table.spec
    d = spec.order
    x = spec.character_table
    prob = np.asarray(table.values, dtype=complex).reshape(d, d)  # [a', g']
    # sum_{g'} conj(x[a, g']) sum_{a'} p[a', g'] x[a', g]
    return (table.weight * (x.conj() @ (prob.T @ x))).reshape(d * d)


def reconstruct(
    povm: CovariantPovm,
    table: ProbabilityTable,
    multipliers: MultiplierTable,
    *,
    tol: float = 1e-10,
    project: bool = False,
) -> TomographyResult:
    """Invert the measurement: W = S / f, then rho = (1/d) sum_p W(p) U_p^*.

    Exact tables come back untouched; empirical estimates are Hermitized and,
    with ``project=True``, mapped to the nearest state in Frobenius norm.
    """
    if table.spec != povm.spec or multipliers.spec != povm.spec:
        raise ValueError("POVM, probability table and multipliers must share one group")
    m = multipliers.min_modulus
    if m <= tol:
        worst = multipliers.argmin
        raise IllConditionedError(
            f"multiplier vanishes at {worst} (|f| = {m:.3g} <= {tol:.3g}); the POVM is not informationally complete",
            worst_point=worst,
            min_modulus=m,
        )
    weyl_coeffs = stage_one(table, multipliers)
    raw = weyl_inverse_transform(weyl_coeffs, povm.spec)
    rho_hat = raw
    if table.kind == "empirical":
        rho_hat = (raw + raw.conj().T) / 2
        if project:
            rho_hat = project_to_states(rho_hat)
    return TomographyResult(rho_hat=rho_hat, rho_raw=raw, condition_indicator=m, kind=table.kind)


def stage_one(table: ProbabilityTable, multipliers: MultiplierTable) -> np.ndarray:
    """Estimated Weyl coefficients Tr(rho U_p)."""
    return kernel_transform(table) / multipliers.values


def project_simplex(x: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, x.size + 1)
    r = np.nonzero(u - css / k > 0)[0][-1]
    theta = css[r] / (r + 1)
    return np.maximum(x - theta, 0.0)


def project_to_states(a) -> np.ndarray:
    """Nearest density matrix to the Hermitian part of ``a`` in Frobenius norm."""
    a = as_matrix(a)
    herm = (a + a.conj().T) / 2
    vals, vecs = np.linalg.eigh(herm)
    vals = project_simplex(vals)
    return (vecs * vals) @ vecs.conj().T


def error_metrics(rho_true, rho_hat) -> dict[str, float]:
    rho_true, rho_hat = as_matrix(rho_true), as_matrix(rho_hat)
    if rho_true.shape != rho_hat.shape:
        raise ValueError(f"dimension mismatch: {rho_true.shape} vs {rho_hat.shape}")
    diff = rho_true - rho_hat
    sv = np.linalg.svd(diff, compute_uv=False)
    return {
        "frobenius": float(np.linalg.norm(diff, "fro")),
        "trace_distance": float(0.5 * np.sum(sv)),
    }


def evaluate(result: TomographyResult, rho_true) -> TomographyResult:
    metrics = error_metrics(rho_true, result.rho_hat)
    result.frobenius_error = metrics["frobenius"]
    result.trace_distance = metrics["trace_distance"]
    return result


def loglog_slope(shots, errors) -> float:
    """Least-squares slope of log(error) against log(shots)."""
    slope, _ = np.polyfit(np.log(np.asarray(shots, float)), np.log(np.asarray(errors, float)), 1)
    return float(slope)
