"""Finite Abelian groups Z_{n1} x ... x Z_{nk}, their characters and Haar weights.

Elements and characters are both coordinate tuples of residues.  Everything
downstream indexes by the lexicographic enumeration of those tuples, so the
integer index of an element is its mixed-radix value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import product
from typing import Sequence

import numpy as np

from .errors import SpecMismatchError


@dataclass(frozen=True)
class GroupSpec:
    """A product of cyclic groups given by their orders."""

    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(n) for n in self.factors)
        if not factors:
            raise ValueError("a group needs at least one cyclic factor (use Z_1 for the trivial group)")
        if any(n < 1 for n in factors):
            raise ValueError(f"cyclic orders must be >= 1, got {factors}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Parse a comma-separated factor string such as ``"4"`` or ``"2,2,3"``."""
        parts = [p.strip() for p in str(text).split(",")]
        if not parts or any(not p for p in parts):
            raise ValueError(f"cannot parse group factors from {text!r}")
        try:
            return cls(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise ValueError(f"cannot parse group factors from {text!r}: {exc}") from None

    def __str__(self):
        return "x".join(f"Z{n}" for n in self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def exponent(self) -> int:
        """Least common multiple of the factors; every character value is an exponent-th root of unity."""
        return reduce(math.lcm, self.factors, 1)

    @cached_property
    def coords(self) -> np.ndarray:
        """Integer array of shape (d, k) listing all elements in lexicographic order."""
        grid = list(product(*(range(n) for n in self.factors)))
        arr = np.array(grid, dtype=np.int64).reshape(self.order, self.rank)
        arr.setflags(write=False)
        return arr

    @cached_property
    def _radix(self) -> np.ndarray:
        weights = np.ones(self.rank, dtype=np.int64)
        for j in range(self.rank - 2, -1, -1):
            weights[j] = weights[j + 1] * self.factors[j + 1]
        return weights

    def reduce_coords(self, coords: Sequence[int]) -> tuple[int, ...]:
        if len(coords) != self.rank:
            raise SpecMismatchError(f"expected {self.rank} coordinates for {self}, got {len(coords)}")
        return tuple(int(c) % n for c, n in zip(coords, self.factors))

    def index_of(self, coords) -> np.ndarray | int:
        """Mixed-radix index of one coordinate tuple or of a (..., k) array of them."""
        arr = np.asarray(coords, dtype=np.int64) % np.asarray(self.factors)
        idx = arr @ self._radix
        return int(idx) if np.ndim(idx) == 0 else idx

    @cached_property
    def add_table(self) -> np.ndarray:
        """``add_table[i, j]`` is the index of element i + element j."""
        c = self.coords
        table = self.index_of(c[:, None, :] + c[None, :, :])
        table.setflags(write=False)
        return table

    @cached_property
    def neg_index(self) -> np.ndarray:
        table = self.index_of(-self.coords)
        table.setflags(write=False)
        return table

    @cached_property
    def character_table(self) -> np.ndarray:
        """``character_table[a, g] = chi_a(g)`` for character index a and element index g."""
        n = self.exponent
        scale = np.array([n // nj for nj in self.factors], dtype=np.int64)
        # integer pairing reduced mod n before forming the angle
        pairing = (self.coords * scale) @ self.coords.T % n
        roots = _roots_of_unity(n)
        table = roots[pairing]
        table.setflags(write=False)
        return table

    def element(self, *coords) -> "GroupElement":
        if len(coords) == 1 and isinstance(coords[0], (tuple, list, np.ndarray)):
            coords = tuple(coords[0])
        return GroupElement(self, self.reduce_coords(coords))

    def character(self, *coords) -> "Character":
        if len(coords) == 1 and isinstance(coords[0], (tuple, list, np.ndarray)):
            coords = tuple(coords[0])
        return Character(self, self.reduce_coords(coords))

    def element_at(self, index: int) -> "GroupElement":
        return GroupElement(self, tuple(int(c) for c in self.coords[index]))

    def character_at(self, index: int) -> "Character":
        return Character(self, tuple(int(c) for c in self.coords[index]))

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def generators(self) -> list["GroupElement"]:
        """The k unit vectors; they generate G (and, read as characters, the dual group)."""
        return [self.element(tuple(int(i == j) for i in range(self.rank))) for j in range(self.rank)]


def _roots_of_unity(n: int) -> np.ndarray:
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    # snap the quarter points so that +-1, +-i come out exact
    if n % 4 == 0:
        roots[n // 4], roots[3 * n // 4] = 1j, -1j
    if n % 2 == 0:
        roots[n // 2] = -1.0
    roots[0] = 1.0
    return roots


@dataclass(frozen=True)
class GroupElement:
    spec: GroupSpec
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", self.spec.reduce_coords(self.coords))

    @property
    def index(self) -> int:
        return self.spec.index_of(self.coords)

    def _check(self, other):
        if other.spec != self.spec:
            raise SpecMismatchError(f"{self.spec} vs {other.spec}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(self.spec, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.spec, tuple(-a for a in self.coords))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __repr__(self):
        return f"g{self.coords}"


@dataclass(frozen=True)
class Character:
    """The character chi_a(g) = exp(2 pi i sum_j a_j g_j / n_j)."""

    spec: GroupSpec
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", self.spec.reduce_coords(self.coords))

    @property
    def index(self) -> int:
        return self.spec.index_of(self.coords)

    def __call__(self, g: GroupElement) -> complex:
        return char_eval(self, g)

    def __mul__(self, other: "Character") -> "Character":
        if other.spec != self.spec:
            raise SpecMismatchError(f"{self.spec} vs {other.spec}")
        return Character(self.spec, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def conj(self) -> "Character":
        return Character(self.spec, tuple(-a for a in self.coords))

    def __repr__(self):
        return f"chi{self.coords}"


def enumerate_elements(spec: GroupSpec) -> list[GroupElement]:
    return [spec.element_at(i) for i in range(spec.order)]


def enumerate_characters(spec: GroupSpec) -> list[Character]:
    return [spec.character_at(i) for i in range(spec.order)]


def char_eval(chi: Character, g: GroupElement) -> complex:
    if chi.spec != g.spec:
        raise SpecMismatchError(f"character of {chi.spec} evaluated on element of {g.spec}")
    return complex(chi.spec.character_table[chi.index, g.index])


@dataclass(frozen=True)
class HaarPair:
    """Counting measure on G and counting/d on the dual, so Fourier inversion has no stray factor."""

    order: int

    @property
    def nu_weight(self) -> Fraction:
        return Fraction(1)

    @property
    def nu_hat_weight(self) -> Fraction:
        return Fraction(1, self.order)

    @property
    def phase_weight(self) -> float:
        """Weight nu_hat * nu of one phase-space point (chi, g)."""
        return float(self.nu_weight * self.nu_hat_weight)

    def duality_product(self) -> Fraction:
        return self.nu_weight * self.nu_hat_weight * self.order


def haar_pair(spec: GroupSpec) -> HaarPair:
    return HaarPair(spec.order)


def verify_pontryagin_inversion(spec: GroupSpec, psi) -> float:
    """Max error of the finite Fourier inversion sum_{chi,g} chi(h) conj(chi(g)) psi(g) nu_hat nu = psi(h)."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (spec.order,):
        raise ValueError(f"psi must have {spec.order} entries, got shape {psi.shape}")
    haar = haar_pair(spec)
    table = spec.character_table
    inner = float(haar.nu_weight) * (table.conj() @ psi)
    restored = float(haar.nu_hat_weight) * (table.T @ inner)
    return float(np.max(np.abs(restored - psi), initial=0.0))
