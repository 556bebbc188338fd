"""Monomial bases and the elementary operators acting on their coefficients.

Monomials xi^p = xi1^p1 xi2^p2 xi3^p3 are ordered by total degree, then by
p1 descending, then p2 descending.  The ordering is a pure function of the
maximal degree, so coefficient vectors are stable across runs and a basis of
degree N is always a prefix of any basis of higher degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import DomainError


@lru_cache(maxsize=None)
def monomials(n_max: int) -> tuple[tuple[int, int, int], ...]:
    """All exponent triples of total degree <= n_max in canonical order."""
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    out = []
    for d in range(n_max + 1):
        for p in range(d, -1, -1):
            for q in range(d - p, -1, -1):
                out.append((p, q, d - p - q))
    return tuple(out)


def basis_size(n_max: int) -> int:
    return (n_max + 1) * (n_max + 2) * (n_max + 3) // 6


@dataclass(frozen=True)
class PolyBasis:
    """Truncated monomial basis p + q + r <= n_max."""

    n_max: int
    monomials: tuple = field(init=False, repr=False, compare=False)
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n_max, (int, np.integer)) or self.n_max < 0:
            raise DomainError(f"n_max must be a non-negative integer, got {self.n_max!r}")
        ms = monomials(int(self.n_max))
        object.__setattr__(self, "monomials", ms)
        object.__setattr__(self, "index", {m: i for i, m in enumerate(ms)})

    def __len__(self):
        return len(self.monomials)

    @property
    def size(self) -> int:
        return len(self.monomials)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([sum(m) for m in self.monomials])

    @property
    def exponents(self) -> np.ndarray:
        return np.array(self.monomials, dtype=int).reshape(-1, 3)

    def degree_slices(self) -> list[slice]:
        """Contiguous index range of each homogeneous degree."""
        out, start = [], 0
        for d in range(self.n_max + 1):
            n = (d + 1) * (d + 2) // 2
            out.append(slice(start, start + n))
            start += n
        return out

    def evaluate(self, coeffs, points) -> np.ndarray:
        """Evaluate sum_k coeffs[k] xi^m_k at ``points`` of shape (..., 3)."""
        pts = np.asarray(points, dtype=float)
        e = self.exponents
        powers = [pts[..., a, None] ** e[:, a] for a in range(3)]
        return (powers[0] * powers[1] * powers[2]) @ np.asarray(coeffs)


def derivative_matrix(axis: int, src: PolyBasis, dst: PolyBasis) -> np.ndarray:
    """Matrix of d/d xi_axis from coefficients over ``src`` to ``dst``."""
    out = np.zeros((dst.size, src.size))
    for c, m in enumerate(src.monomials):
        if m[axis] == 0:
            continue
        t = list(m)
        t[axis] -= 1
        row = dst.index.get(tuple(t))
        if row is None:
            raise DomainError("destination basis too small for derivative")
        out[row, c] = m[axis]
    return out


def multiply_matrix(exponent, src: PolyBasis, dst: PolyBasis) -> np.ndarray:
    """Matrix of multiplication by the monomial xi^exponent."""
    out = np.zeros((dst.size, src.size))
    for c, m in enumerate(src.monomials):
        t = (m[0] + exponent[0], m[1] + exponent[1], m[2] + exponent[2])
        row = dst.index.get(t)
        if row is None:
            raise DomainError("destination basis too small for product")
        out[row, c] = 1.0
    return out
