"""Units, geometry and special functions shared by the whole package.

Oscillator units are used throughout: hbar = m = omega_perp = 1, lengths in
l_perp = sqrt(hbar / (m omega_perp)), times in 1/omega_perp and energies in
hbar omega_perp.  The atom number N is folded into ``interaction_scale``
(g~ = 4 pi a_s N / l_perp), so densities are normalised to one particle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError, UnstableRegimeError

__all__ = [
    "SystemParams",
    "TFState",
    "BetaIndex",
    "beta_integral",
    "beta_integrals",
    "weighted_beta_table",
    "f_kappa",
    "dressed_frequencies",
    "zeta",
    "tf_density",
    "tf_phase",
    "tf_radius_and_mu",
    "make_tf_state",
]

DEFAULT_INTERACTION_SCALE = 1500.0


@dataclass(frozen=True)
class SystemParams:
    """Physical configuration of one trapped dipolar condensate.

    gamma: axial/radial trap ratio; omega: polarisation rotation rate in
    units of omega_perp; eps_dd: C_dd / (3 g); interaction_scale: contact
    coupling g~ = 4 pi a_s N / l_perp.  The default coupling puts the
    non-dipolar ground state at mu ~ 10 hbar omega_perp (Thomas-Fermi regime).
    """

    gamma: float = 1.0
    omega: float = 0.0
    eps_dd: float = 0.0
    interaction_scale: float = DEFAULT_INTERACTION_SCALE

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be positive, got {self.gamma!r}")
        if not (self.omega >= 0 and math.isfinite(self.omega)):
            raise DomainError(f"omega must be >= 0, got {self.omega!r}")
        if not math.isfinite(self.eps_dd):
            raise DomainError(f"eps_dd must be finite, got {self.eps_dd!r}")
        if not (self.interaction_scale >= 0 and math.isfinite(self.interaction_scale)):
            raise DomainError(
                f"interaction_scale must be >= 0, got {self.interaction_scale!r}"
            )

    def with_(self, **changes) -> "SystemParams":
        return SystemParams(**{**self.__dict__, **changes})

    def require_solver_range(self):
        if not (0.0 <= self.eps_dd < 1.0):
            raise DomainError(f"eps_dd must lie in [0, 1), got {self.eps_dd!r}")


@dataclass(frozen=True)
class TFState:
    """Rotating-frame Thomas-Fermi stationary state.

    kappa_x, kappa_y are R_x/R_z and R_y/R_z, alpha the amplitude of the
    velocity field alpha * grad(xy), r_z the axial radius, n0 the peak
    density for unit norm and mu the chemical potential.
    """

    kappa_x: float
    kappa_y: float
    alpha: float
    r_z: float
    n0: float
    mu: float

    @property
    def semi_axes(self) -> tuple[float, float, float]:
        return (self.kappa_x * self.r_z, self.kappa_y * self.r_z, self.r_z)


class BetaIndex(NamedTuple):
    i: int
    j: int
    k: int


# ---------------------------------------------------------------------------
# beta integrals
# ---------------------------------------------------------------------------

_GL_ORDER = 20
_MAX_LEVELS = 14


@lru_cache(maxsize=None)
def _gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _check_kappas(kx, ky):
    if not (kx > 0 and ky > 0 and math.isfinite(kx) and math.isfinite(ky)):
        raise DomainError(f"aspect ratios must be positive, got ({kx!r}, {ky!r})")


def _theta_breakpoints(kx: float, ky: float) -> np.ndarray:
    # the integrand varies on the scale theta ~ arctan(kappa) for each axis
    pts = {0.0, math.pi / 2, math.pi / 4, math.atan(kx), math.atan(ky)}
    for k in (kx, ky):
        for s in (0.25, 4.0):
            pts.add(math.atan(k * s))
    return np.array(sorted(pts))


def _nodes(edges: np.ndarray):
    x, w = _gauss_legendre(_GL_ORDER)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    theta = (a + half * (x[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel()
    return theta, weights


def _refine(edges: np.ndarray) -> np.ndarray:
    mids = 0.5 * (edges[:-1] + edges[1:])
    out = np.empty(edges.size + mids.size)
    out[0::2] = edges
    out[1::2] = mids
    return out


def _adaptive_theta_quad(kx, ky, integrand, rtol):
    """Composite Gauss-Legendre on [0, pi/2], refined until all components agree.

    ``integrand(theta)`` returns an array of shape (n_components, n_nodes).
    """
    edges = _refine(_theta_breakpoints(kx, ky))
    theta, w = _nodes(edges)
    prev = integrand(theta) @ w
    for _ in range(_MAX_LEVELS):
        edges = _refine(edges)
        theta, w = _nodes(edges)
        cur = integrand(theta) @ w
        scale = np.maximum(np.abs(cur), np.finfo(float).tiny)
        if np.all(np.abs(cur - prev) <= rtol * scale):
            return cur
        prev = cur
    raise ConvergenceError(
        "beta quadrature did not reach the requested accuracy",
        residuals=np.abs(cur - prev) / scale,
    )


def _trig_parts(theta, kx, ky):
    s = np.sin(theta)
    c = np.cos(theta)
    a = s * s + (kx * c) ** 2
    b = s * s + (ky * c) ** 2
    return s, c, a, b


def beta_integrals(indices: Iterable[Sequence[int]], kx: float, ky: float,
                   rtol: float = 1e-12) -> np.ndarray:
    """Evaluate beta_ijk(kx, ky) for many index triples at once.

    beta_ijk = int_0^inf (chi + kx^2)^(-i-1/2) (chi + ky^2)^(-j-1/2)
    (chi + 1)^(-k-1/2) dchi, computed after chi = tan^2(theta), which turns the
    integrand into 2 sin(theta) cos^(2(i+j+k))(theta) / (A^(i+1/2) B^(j+1/2))
    with A = sin^2 + kx^2 cos^2 and B = sin^2 + ky^2 cos^2.
    """
    _check_kappas(kx, ky)
    idx = np.asarray(list(indices), dtype=int).reshape(-1, 3)
    if np.any(idx < 0):
        raise DomainError("beta indices must be non-negative")
    i, j, k = (idx[:, n][:, None] for n in range(3))

    def integrand(theta):
        s, c, a, b = _trig_parts(theta, kx, ky)
        with np.errstate(divide="ignore"):
            logc = np.log(c)
        log_f = (np.log(2.0 * s) + 2.0 * (i + j + k) * logc
                 - (i + 0.5) * np.log(a) - (j + 0.5) * np.log(b))
        return np.exp(log_f)

    return _adaptive_theta_quad(kx, ky, integrand, rtol)


def beta_integral(idx: Sequence[int], kx: float, ky: float, rtol: float = 1e-12) -> float:
    """Single beta_ijk(kx, ky); see :func:`beta_integrals`."""
    return float(beta_integrals([tuple(idx)], kx, ky, rtol)[0])


def weighted_beta_table(exponents: np.ndarray, kx: float, ky: float,
                        rtol: float = 1e-12) -> np.ndarray:
    """T_e = (kx ky / 4) kx^(2 e1) ky^(2 e2) beta_e for each exponent triple e.

    These are the scale-free coefficients that appear in the interior potential
    of polynomial densities on the ellipsoid.  The integrand is written with
    bounded factors t_i = a_i^2 / (a_i^2 + u) so high orders do not overflow.
    """
    _check_kappas(kx, ky)
    e = np.asarray(exponents, dtype=int).reshape(-1, 3)
    e1, e2, e3 = (e[:, n][:, None] for n in range(3))

    def integrand(theta):
        s, c, a, b = _trig_parts(theta, kx, ky)
        c2 = c * c
        with np.errstate(divide="ignore"):
            lt1 = np.log(kx * kx * c2 / a)
            lt2 = np.log(ky * ky * c2 / b)
            lt3 = np.log(c2)
        base = 0.5 * kx * ky * s / np.sqrt(a * b)
        with np.errstate(invalid="ignore"):
            out = base * np.exp(e1 * lt1 + e2 * lt2 + e3 * lt3)
        return np.nan_to_num(out, nan=0.0)

    return _adaptive_theta_quad(kx, ky, integrand, rtol)


# ---------------------------------------------------------------------------
# dipolar shape function
# ---------------------------------------------------------------------------

_SERIES_BAND = 0.05
_SERIES_TERMS = 40


def f_kappa(kappa: float) -> float:
    """Dipolar shape function f(kappa) of a cylindrically symmetric paraboloid.

    Decreases monotonically from 1 (kappa -> 0) through 0 (kappa = 1) to -2
    (kappa -> inf).  For kappa > 1 the arctanh branch continues to arctan.
    """
    if not (kappa > 0 and math.isfinite(kappa)):
        raise DomainError(f"kappa must be positive, got {kappa!r}")
    k2 = kappa * kappa
    w = 1.0 - k2
    if abs(w) < _SERIES_BAND:
        # arctanh(u)/u = sum u^(2n)/(2n+1); the 1/w poles cancel exactly
        s = 0.0
        for n in range(_SERIES_TERMS, 0, -1):
            s = s * w + 1.0 / (2 * n + 1)
        return 1.0 - 3.0 * k2 * s
    if w > 0:
        u = math.sqrt(w)
        ratio = math.atanh(u) / u
    else:
        u = math.sqrt(-w)
        ratio = math.atan(u) / u
    return (1.0 + 2.0 * k2) / w - 3.0 * k2 * ratio / w


def f_kappa_over_gap(kappa: float) -> float:
    """f(kappa) / (1 - kappa^2), finite at kappa = 1 (value 2/5)."""
    k2 = kappa * kappa
    w = 1.0 - k2
    if abs(w) < _SERIES_BAND:
        s = 0.0
        for n in range(_SERIES_TERMS, 1, -1):
            s = s * w + 1.0 / (2 * n + 1)
        return 1.0 - 3.0 * k2 * s
    return f_kappa(kappa) / w


# ---------------------------------------------------------------------------
# stationary-state building blocks
# ---------------------------------------------------------------------------

def dressed_frequencies(alpha: float, omega: float) -> tuple[float, float]:
    """Squared dressed trap frequencies (1 + a^2 - 2 a W, 1 + a^2 + 2 a W)."""
    base = 1.0 + alpha * alpha
    return base - 2.0 * alpha * omega, base + 2.0 * alpha * omega


def zeta(kx: float, ky: float, eps_dd: float) -> float:
    """zeta = 1 + eps_dd (3/2 kx ky beta_101 - 1)."""
    if eps_dd == 0.0:
        _check_kappas(kx, ky)
        return 1.0
    return 1.0 + eps_dd * (1.5 * kx * ky * beta_integral((1, 0, 1), kx, ky) - 1.0)


def tf_density(state: TFState, r) -> np.ndarray | float:
    """Inverted-paraboloid density at points ``r`` (shape (..., 3)), clipped at 0."""
    r = np.asarray(r, dtype=float)
    rx, ry, rz = state.semi_axes
    q = 1.0 - (r[..., 0] / rx) ** 2 - (r[..., 1] / ry) ** 2 - (r[..., 2] / rz) ** 2
    out = state.n0 * np.maximum(q, 0.0)
    return float(out) if out.ndim == 0 else out


def tf_phase(state: TFState, r) -> np.ndarray | float:
    """Stationary phase alpha * x * y at t = 0."""
    r = np.asarray(r, dtype=float)
    out = state.alpha * r[..., 0] * r[..., 1]
    return float(out) if np.ndim(out) == 0 else out


def tf_radius_and_mu(kx: float, ky: float, params: SystemParams) -> tuple[float, float, float]:
    """Close the shape (kx, ky) into (R_z, n0, mu) for unit norm.

    R_z^2 = 2 g~ n0 zeta / gamma^2 with n0 = 15 / (8 pi kx ky R_z^3), hence
    R_z^5 = 15 g~ zeta / (4 pi kx ky gamma^2); the chemical potential is the
    constant term of the stationary density,
    mu = g~ n0 [(1 - eps_dd) + 3/2 eps_dd kx ky beta_100].
    """
    _check_kappas(kx, ky)
    eps = params.eps_dd
    if eps >= 1.0:
        raise DomainError(f"eps_dd must be < 1, got {eps!r}")
    z = zeta(kx, ky, eps)
    if z <= 0.0:
        raise UnstableRegimeError(f"zeta = {z:.6g} <= 0: no Thomas-Fermi closure")
    g = params.interaction_scale
    if g <= 0.0:
        raise DomainError("interaction_scale must be positive for the TF closure")
    rz = (15.0 * g * z / (4.0 * math.pi * kx * ky * params.gamma ** 2)) ** 0.2
    n0 = 15.0 / (8.0 * math.pi * kx * ky * rz ** 3)
    b100 = beta_integral((1, 0, 0), kx, ky) if eps != 0.0 else 0.0
    mu = g * n0 * ((1.0 - eps) + 1.5 * eps * kx * ky * b100)
    return rz, n0, mu


def make_tf_state(kx: float, ky: float, params: SystemParams) -> TFState:
    """Assemble a full :class:`TFState` from a solved shape.

    alpha follows from the in-plane anisotropy; R_z, n0, mu from the closure.
    """
    alpha = params.omega * (kx * kx - ky * ky) / (kx * kx + ky * ky)
    rz, n0, mu = tf_radius_and_mu(kx, ky, params)
    return TFState(kx, ky, alpha, rz, n0, mu)
