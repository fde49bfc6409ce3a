"""Coherent states, displacement operators and the Glauber-Sudarshan measure on truncated Fock space.

Everything is written in the complex amplitude alpha = (-y + i x) / sqrt(2),
where D(alpha) = e^{i x y / 2} U_{x,y}.  The phase-space measure in these
coordinates is d^2 beta / pi.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import GridTooSmallError, TruncationWarning
from .groups import GroupSpec
from .povm import ambiguity_function, discrete_gaussian_fiducial


@dataclass(frozen=True)
class FockSpace:
    """Number states |0>, ..., |N>."""

    N: int

    def __post_init__(self):
        if int(self.N) < 1:
            raise ValueError("truncation N must be >= 1")
        object.__setattr__(self, "N", int(self.N))

    @property
    def dim(self) -> int:
        return self.N + 1

    def annihilation(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.dim, dtype=float)), 1).astype(complex)

    def creation(self) -> np.ndarray:
        return self.annihilation().conj().T


def coherent_state(space: FockSpace, beta: complex) -> np.ndarray:
    """Components beta^n e^{-|beta|^2/2} / sqrt(n!) for n = 0..N (not renormalized)."""
    return coherent_states(space, np.array([beta], dtype=complex))[0]


def coherent_states(space: FockSpace, betas: np.ndarray) -> np.ndarray:
    """Row i holds the truncated coherent state for ``betas[i]``; shape (len(betas), N + 1)."""
    betas = np.asarray(betas, dtype=complex).reshape(-1)
    n = np.arange(space.dim)
    mod = np.abs(betas)
    with np.errstate(divide="ignore", invalid="ignore"):
        logmod = np.log(mod)
        logmag = n[None, :] * logmod[:, None] - 0.5 * mod[:, None] ** 2 - 0.5 * gammaln(n + 1)[None, :]
    # 0 * log 0 -> 0 for the vacuum component
    logmag[:, 0] = -0.5 * mod**2
    phase = np.exp(1j * np.outer(np.angle(betas), n))
    return np.exp(logmag) * phase


def truncation_tail(space: FockSpace, beta: complex) -> float:
    """Poisson(|beta|^2) mass beyond level N, i.e. 1 - ||truncated coherent state||^2."""
    return float(poisson.sf(space.N, abs(beta) ** 2))


def _laguerre_table(n_max: int, x: float) -> np.ndarray:
    """L[n, k] = generalized Laguerre L_n^{(k)}(x) for 0 <= n, k <= n_max by three-term recurrence in n."""
    k = np.arange(n_max + 1, dtype=float)
    table = np.empty((n_max + 1, n_max + 1))
    table[0] = 1.0
    if n_max >= 1:
        table[1] = 1.0 + k - x
    for n in range(1, n_max):
        table[n + 1] = ((2 * n + 1 + k - x) * table[n] - (n + k) * table[n - 1]) / (n + 1)
    return table


def displacement_operator(space: FockSpace, alpha: complex) -> np.ndarray:
    """Closed-form <m|D(alpha)|n> through associated Laguerre polynomials.

    For m >= n the element is sqrt(n!/m!) alpha^(m-n) e^{-|alpha|^2/2} L_n^{(m-n)}(|alpha|^2);
    the m < n half follows from D(alpha)^dagger = D(-alpha).
    """
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    if x * math.e / space.N > 1:
        warnings.warn(
            f"|alpha|^2 = {x:.3g} is large for truncation N = {space.N}; matrix is badly truncated",
            TruncationWarning,
            stacklevel=2,
        )
    dim = space.dim
    if alpha == 0:
        return np.eye(dim, dtype=complex)
    lag = _laguerre_table(space.N, x)
    m = np.arange(dim)[:, None]
    n = np.arange(dim)[None, :]
    lo, hi = np.minimum(m, n), np.maximum(m, n)
    k = hi - lo
    logmag = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) + k * math.log(abs(alpha)) - x / 2
    theta = np.where(m >= n, math.atan2(alpha.imag, alpha.real), math.atan2(alpha.imag, -alpha.real))
    return np.exp(logmag + 1j * k * theta) * lag[lo, k]


def displacement_expm(space: FockSpace, alpha: complex) -> np.ndarray:
    """exp(alpha a^dagger - conj(alpha) a) on the truncated space; independent check of the closed form."""
    a = space.annihilation()
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


@dataclass(frozen=True)
class QuadratureGrid:
    """Midpoint lattice of step h clipped to the disk |beta| <= R, weight h^2 per node."""

    radius: float
    step: float
    nodes: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def disk(cls, radius: float, step: float) -> "QuadratureGrid":
        radius, step = float(radius), float(step)
        if not (radius > 0 and step > 0 and step <= radius):
            raise ValueError(f"need R > 0, h > 0 and h <= R, got R={radius}, h={step}")
        half = math.ceil(radius / step)
        axis = (np.arange(-half, half) + 0.5) * step
        re, im = np.meshgrid(axis, axis, indexing="ij")
        nodes = (re + 1j * im).reshape(-1)
        nodes = nodes[np.abs(nodes) <= radius]
        nodes.setflags(write=False)
        return cls(radius, step, nodes)

    @property
    def weight(self) -> float:
        return self.step**2

    def __len__(self):
        return self.nodes.size


@dataclass
class CVReport:
    check: str
    params: dict
    max_error: float
    per_level_errors: list[float]

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "max_error": self.max_error,
            "per_level_errors": self.per_level_errors,
        }


def weighted_projector_sum(space: FockSpace, grid: QuadratureGrid, alpha: complex = 0) -> np.ndarray:
    """(1/pi) sum_nodes h^2 e^{2i Im(alpha conj(beta))} |beta><beta|."""
    if len(grid) == 0:
        return np.zeros((space.dim, space.dim), dtype=complex)
    states = coherent_states(space, grid.nodes)
    kernel = np.exp(2j * np.imag(alpha * np.conj(grid.nodes)))
    return (grid.weight / np.pi) * (states.T * kernel) @ states.conj()


def _block_errors(diff: np.ndarray, n_check: int) -> list[float]:
    block = np.abs(diff[: n_check + 1, : n_check + 1])
    return [float(max(block[n].max(), block[:, n].max())) for n in range(n_check + 1)]


def gs_identity_check(space: FockSpace, grid: QuadratureGrid, n_check: int | None = None) -> CVReport:
    """Deviation of the discretized resolution of identity from I on levels n <= n_check."""
    n_check = space.N // 2 if n_check is None else int(n_check)
    if not 0 <= n_check <= space.N:
        raise ValueError(f"n_check must lie in [0, {space.N}]")
    total = weighted_projector_sum(space, grid)
    levels = _block_errors(total - np.eye(space.dim), n_check)
    params = {"N": space.N, "R": grid.radius, "h": grid.step, "alpha": [0.0, 0.0], "n_check": n_check}
    return CVReport("gs_identity", params, max(levels), levels)


def verify_gaussian_contraction(
    space: FockSpace, grid: QuadratureGrid, alpha: complex, n_check: int | None = None
) -> CVReport:
    """Compare the quadrature contraction T_alpha with exp(-|alpha|^2/2) D(alpha) on the low block."""
    alpha = complex(alpha)
    if abs(alpha) > grid.radius / 4:
        raise GridTooSmallError(f"|alpha| = {abs(alpha):.3g} exceeds R/4 = {grid.radius / 4:.3g}")
    n_check = space.N // 2 if n_check is None else int(n_check)
    if not 0 <= n_check <= space.N:
        raise ValueError(f"n_check must lie in [0, {space.N}]")
    t_alpha = weighted_projector_sum(space, grid, alpha)
    target = math.exp(-abs(alpha) ** 2 / 2) * displacement_operator(space, alpha)
    levels = _block_errors(t_alpha - target, n_check)
    params = {
        "N": space.N,
        "R": grid.radius,
        "h": grid.step,
        "alpha": [alpha.real, alpha.imag],
        "n_check": n_check,
    }
    return CVReport("gaussian_contraction", params, max(levels), levels)


def gaussian_multiplier(x, y) -> np.ndarray:
    """f(x, y) = exp(-(x^2 + y^2)/4) e^{i x y / 2} for the vacuum fiducial."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    return np.exp(-(x**2 + y**2) / 4) * np.exp(0.5j * x * y)


def finite_to_cv_consistency(d_list) -> list[dict]:
    """Multiplier of Z_d with the discrete Gaussian fiducial against the continuum Gaussian f.

    Residues a, g are read as centered integers and mapped to x = a sqrt(2 pi / d),
    y = g sqrt(2 pi / d).  Points with |a|, |g| <= floor(sqrt(d)) form the comparison window.
    """
    rows = []
    for d in d_list:
        d = int(d)
        if d < 4:
            raise ValueError("finite_to_cv_consistency needs d >= 4")
        spec = GroupSpec((d,))
        f = np.conj(ambiguity_function(spec, discrete_gaussian_fiducial(spec))).reshape(d, d)
        scale = math.sqrt(2 * math.pi / d)
        r = math.isqrt(d)
        offsets = np.arange(-r, r + 1)
        a, g = np.meshgrid(offsets, offsets, indexing="ij")
        discrete = f[a % d, g % d]
        continuum = gaussian_multiplier(a * scale, g * scale)
        rel_mod = np.abs(np.abs(discrete) - np.abs(continuum)) / np.abs(continuum)
        rel_complex = np.abs(discrete - continuum) / np.abs(continuum)
        central = abs(abs(f[0, 1]) - abs(continuum[r, r + 1])) / abs(continuum[r, r + 1])
        rows.append(
            {
                "d": d,
                "f_origin": [float(f[0, 0].real), float(f[0, 0].imag)],
                "central_point_rel_dev": float(central),
                "window_radius": r,
                "window_max_rel_dev_modulus": float(rel_mod.max()),
                "window_max_rel_dev_complex": float(rel_complex.max()),
            }
        )
    return rows
