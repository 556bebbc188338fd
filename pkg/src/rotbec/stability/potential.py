"""Interior Newtonian potential of polynomial densities on an ellipsoid.

For a density supported on the ellipsoid with semi-axes a = (Rx, Ry, Rz),

    phi(r) = 1/(4 pi) int_ellipsoid rho(s) / |r - s| d^3 s,

is a polynomial of degree d + 2 inside when rho is a polynomial of degree d.
Write xi_i = x_i / a_i and t_i(u) = a_i^2 / (a_i^2 + u).  The density
(1 - |xi|^2)^n has the classical interior potential

    (a1 a2 a3 / 4) int_0^inf (1 - sum t_i xi_i^2)^(n+1) / (n+1) du / Delta(u),

and the same formula holds with xi replaced by xi - c for any shift c, as an
identity of polynomials in c.  The coefficients of c^m with |m| = n of the
shifted densities span all polynomials of degree n, so inverting that
(universal, rational) change of basis gives the potential of every monomial.
The only kappa-dependent ingredients are the one-dimensional integrals
T_e = (kx ky / 4) kx^(2 e1) ky^(2 e2) beta_e.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb, factorial

import numpy as np

from ..core_model import weighted_beta_table
from ..errors import CapabilityError, DomainError
from .basis import PolyBasis, derivative_matrix

MAX_DEGREE = 16


def _axis_terms(m, total):
    """Index triples j with |j| <= total and 2 j_i >= m_i, with their signed weights.

    Weight: total! / ((total - |j|)! prod j_i!) (-1)^|j| prod C(2 j_i, m_i) (-1)^m_i.
    """
    lo = [(mi + 1) // 2 for mi in m]
    for j0 in range(lo[0], total + 1):
        for j1 in range(lo[1], total + 1 - j0):
            for j2 in range(lo[2], total + 1 - j0 - j1):
                jj = (j0, j1, j2)
                big_j = j0 + j1 + j2
                w = factorial(total) // (factorial(total - big_j) * factorial(j0)
                                         * factorial(j1) * factorial(j2))
                for ji, mi in zip(jj, m):
                    w *= comb(2 * ji, mi) * (-1) ** mi
                w *= (-1) ** big_j
                yield jj, w


@lru_cache(maxsize=8)
def _tables(n_max: int):
    """kappa-independent pieces of the potential map for degree <= n_max."""
    src = PolyBasis(n_max)
    dst = PolyBasis(n_max + 2)
    nb = src.size
    gen = np.zeros((nb, nb))
    rows, cols, exps, coef = [], [], [], []
    exp_index: dict = {}
    for c, m in enumerate(src.monomials):
        n = sum(m)
        for j, w in _axis_terms(m, n):
            p = tuple(2 * ji - mi for ji, mi in zip(j, m))
            gen[src.index[p], c] += w
        for j, w in _axis_terms(m, n + 1):
            p = tuple(2 * ji - mi for ji, mi in zip(j, m))
            rows.append(dst.index[p])
            cols.append(c)
            exps.append(exp_index.setdefault(j, len(exp_index)))
            coef.append(w / (n + 1))
    gen_inv = np.linalg.inv(gen)
    err = np.abs(gen @ gen_inv - np.eye(nb)).max()
    if err > 1e-10:
        raise CapabilityError(f"generating basis inversion lost accuracy ({err:.2e}) at degree {n_max}")
    exponent_list = np.array(sorted(exp_index, key=exp_index.get), dtype=int).reshape(-1, 3)
    return (src, dst, gen_inv, np.array(rows), np.array(cols), np.array(exps),
            np.array(coef, dtype=float), exponent_list)


def scaled_potential_matrix(kx: float, ky: float, n_max: int) -> np.ndarray:
    """Map from density coefficients to potential coefficients in scaled coordinates.

    With rho(x) = sum_m c_m xi^m on the ellipsoid (kx Rz, ky Rz, Rz), the
    interior potential is Rz^2 sum_p (M c)_p xi^p, where M is returned here
    with rows over PolyBasis(n_max + 2) and columns over PolyBasis(n_max).
    """
    if n_max > MAX_DEGREE:
        raise CapabilityError(f"potential supported up to degree {MAX_DEGREE}, asked {n_max}")
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    src, dst, gen_inv, rows, cols, exps, coef, exponent_list = _tables(int(n_max))
    t = weighted_beta_table(exponent_list, kx, ky)
    shifted = np.zeros((dst.size, src.size))
    np.add.at(shifted, (rows, cols), coef * t[exps])
    return shifted @ gen_inv


@dataclass(frozen=True)
class EllipsoidPoly:
    """Polynomial in physical coordinates (x, y, z) restricted to an ellipsoid.

    ``coeffs`` maps exponent triples to real coefficients; ``semi_axes`` are
    (Rx, Ry, Rz) of the reference ellipsoid.
    """

    coeffs: dict
    semi_axes: tuple

    def __post_init__(self):
        axes = tuple(float(a) for a in self.semi_axes)
        if len(axes) != 3 or not all(a > 0 for a in axes):
            raise DomainError("semi_axes must be three positive lengths")
        clean = {}
        for k, v in dict(self.coeffs).items():
            k = tuple(int(e) for e in k)
            if len(k) != 3 or min(k) < 0:
                raise DomainError(f"bad exponent triple {k!r}")
            if v != 0:
                clean[k] = clean.get(k, 0.0) + float(v)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "semi_axes", axes)

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.coeffs), default=0)

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        out = np.zeros(pts.shape[:-1])
        for (p, q, r), v in self.coeffs.items():
            out = out + v * pts[..., 0] ** p * pts[..., 1] ** q * pts[..., 2] ** r
        return out

    def inside(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.sum((pts / np.array(self.semi_axes)) ** 2, axis=-1) < 1.0

    def to_scaled(self, basis: PolyBasis) -> np.ndarray:
        """Coefficient vector over ``basis`` in xi = x / a."""
        a = self.semi_axes
        vec = np.zeros(basis.size)
        for k, v in self.coeffs.items():
            vec[basis.index[k]] += v * a[0] ** k[0] * a[1] ** k[1] * a[2] ** k[2]
        return vec

    @classmethod
    def from_scaled(cls, vec, basis: PolyBasis, semi_axes, scale: float = 1.0,
                    drop: float = 0.0) -> "EllipsoidPoly":
        a = tuple(float(s) for s in semi_axes)
        coeffs = {}
        for k, v in zip(basis.monomials, vec):
            if abs(v) > drop:
                coeffs[k] = scale * v / (a[0] ** k[0] * a[1] ** k[1] * a[2] ** k[2])
        return cls(coeffs, a)


def _shape_of(axes):
    rz = axes[2]
    return axes[0] / rz, axes[1] / rz, rz


def ellipsoid_potential(density: EllipsoidPoly) -> EllipsoidPoly:
    """Interior potential (1/4 pi) int rho(s)/|r - s| d^3 s as a polynomial of degree d + 2."""
    n = density.degree
    if n > MAX_DEGREE:
        raise CapabilityError(f"density degree {n} above supported maximum {MAX_DEGREE}")
    kx, ky, rz = _shape_of(density.semi_axes)
    src = PolyBasis(n)
    mat = scaled_potential_matrix(kx, ky, n)
    phi = mat @ density.to_scaled(src)
    return EllipsoidPoly.from_scaled(phi, PolyBasis(n + 2), density.semi_axes, scale=rz * rz)


def k_operator(density: EllipsoidPoly) -> EllipsoidPoly:
    """Dipolar operator K[rho] = -3 d^2/dx^2 phi[rho] - rho, kept on the ellipsoid."""
    phi = ellipsoid_potential(density)
    out: dict = {}
    for (p, q, r), v in phi.coeffs.items():
        if p >= 2:
            key = (p - 2, q, r)
            out[key] = out.get(key, 0.0) - 3.0 * p * (p - 1) * v
    for k, v in density.coeffs.items():
        out[k] = out.get(k, 0.0) - v
    return EllipsoidPoly(out, density.semi_axes)


def scaled_k_matrix(kx: float, ky: float, n_max: int) -> np.ndarray:
    """K in scaled coordinates: -3 kx^-2 d^2/dxi1^2 M - 1, square over PolyBasis(n_max)."""
    src = PolyBasis(n_max)
    wide = PolyBasis(n_max + 2)
    mid = PolyBasis(n_max + 1)
    mat = scaled_potential_matrix(kx, ky, n_max)
    d2 = derivative_matrix(0, mid, src) @ derivative_matrix(0, wide, mid)
    return -3.0 / (kx * kx) * (d2 @ mat) - np.eye(src.size)
