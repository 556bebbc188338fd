"""Linearised hydrodynamic operator about a rotating-frame Thomas-Fermi state.

Fluctuations (delta S, delta n) of phase and density are expanded in
monomials of the scaled coordinates xi_i = x_i / a_i, with semi-axes
a = (kx Rz, ky Rz, Rz).  Writing delta S = Rz^2 sigma and delta n = n0 eta,
and using Rz^2 = 2 g n0 zeta / gamma^2, the equations of motion become

    d sigma/dt = -v.grad sigma - gamma^2 / (2 zeta) (1 + eps K) eta
    d eta/dt   = -sum_i kappa_i^-2 d_i((1 - |xi|^2) d_i sigma) - v.grad eta

with v.grad = (alpha + Omega)(ky/kx) xi2 d1 + (alpha - Omega)(kx/ky) xi1 d2 and
kappa = (kx, ky, 1).  Nothing depends on g, N or Rz.  Every block preserves
the total degree or lowers it, so the operator is block upper-triangular by
degree and any truncation p + q + r <= N_max is an exactly invariant subspace.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from ..core_model import SystemParams, TFState, zeta
from ..errors import DomainError, NumericError, PreconditionError, RotBecError
from ..tf_solver import consistency_residuals, eps_continuation
from .basis import PolyBasis, derivative_matrix, multiply_matrix
from .potential import scaled_k_matrix

DEFAULT_NMAX = 13
LAMBDA_CLAMP = 1e-8
PRECONDITION_TOL = 1e-8


@dataclass
class StabilitySpectrum:
    """Eigenvalues of the linearised operator at one parameter point.

    ``lambda0`` is the largest real part, reported as 0 when it does not
    exceed the round-off threshold; ``eigenvalues`` are unclamped.
    ``mode_order`` attributes each eigenvalue to a polynomial order (the total
    degree of the largest-magnitude eigenvector coefficient) when eigenvectors
    were requested.
    """

    eigenvalues: np.ndarray
    lambda0: float
    n_max: int
    omega: float
    eps_dd: float
    gamma: float
    tf: TFState
    mode_order: np.ndarray | None = None
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def max_real(self) -> float:
        return float(np.max(self.eigenvalues.real))


def _check_pairing(tf: TFState, params: SystemParams):
    try:
        res = consistency_residuals(tf.kappa_x, tf.kappa_y, tf.alpha, params)
    except RotBecError as exc:
        raise PreconditionError(f"TF state not admissible at these parameters: {exc}") from exc
    if res.max_abs() > PRECONDITION_TOL:
        raise PreconditionError(
            f"TF state does not solve the stationary relations (max residual {res.max_abs():.2e})")
    k2x, k2y = tf.kappa_x ** 2, tf.kappa_y ** 2
    if abs(tf.alpha - params.omega * (k2x - k2y) / (k2x + k2y)) > PRECONDITION_TOL:
        raise PreconditionError("alpha inconsistent with the in-plane anisotropy")


def _transport_matrix(kx, ky, alpha, omega, basis: PolyBasis) -> np.ndarray:
    """Matrix of v.grad in scaled coordinates (degree preserving)."""
    n = basis.n_max
    if n == 0:
        return np.zeros((1, 1))
    low = PolyBasis(n - 1)
    d1 = derivative_matrix(0, basis, low)
    d2 = derivative_matrix(1, basis, low)
    y_times = multiply_matrix((0, 1, 0), low, basis)
    x_times = multiply_matrix((1, 0, 0), low, basis)
    return (alpha + omega) * (ky / kx) * (y_times @ d1) + (alpha - omega) * (kx / ky) * (x_times @ d2)


def _pressure_matrix(kx, ky, basis: PolyBasis) -> np.ndarray:
    """Matrix of sum_i kappa_i^-2 d_i((1 - |xi|^2) d_i)."""
    n = basis.n_max
    out = np.zeros((basis.size, basis.size))
    if n == 0:
        return out
    low, high = PolyBasis(n - 1), PolyBasis(n + 1)
    weight = multiply_matrix((0, 0, 0), low, high)
    for e in ((2, 0, 0), (0, 2, 0), (0, 0, 2)):
        weight = weight - multiply_matrix(e, low, high)
    for axis, kap in enumerate((kx, ky, 1.0)):
        inner = derivative_matrix(axis, basis, low)
        outer = derivative_matrix(axis, high, basis)
        out += (outer @ weight @ inner) / (kap * kap)
    return out


def assemble_L(tf: TFState, params: SystemParams, basis: PolyBasis | int,
               check: bool = True) -> np.ndarray:
    """Real 2B x 2B matrix acting on stacked (sigma, eta) coefficient vectors."""
    if not isinstance(basis, PolyBasis):
        basis = PolyBasis(int(basis))
    params.require_solver_range()
    if check:
        _check_pairing(tf, params)
    kx, ky, alpha, om = tf.kappa_x, tf.kappa_y, tf.alpha, params.omega
    z = zeta(kx, ky, params.eps_dd)
    nb = basis.size
    adv = _transport_matrix(kx, ky, alpha, om, basis)
    press = _pressure_matrix(kx, ky, basis)
    coupling = np.eye(nb)
    if params.eps_dd != 0.0:
        coupling = coupling + params.eps_dd * scaled_k_matrix(kx, ky, basis.n_max)
    out = np.empty((2 * nb, 2 * nb))
    out[:nb, :nb] = -adv
    out[:nb, nb:] = -(params.gamma ** 2 / (2.0 * z)) * coupling
    out[nb:, :nb] = -press
    out[nb:, nb:] = -adv
    return out


def _mode_orders(vecs: np.ndarray, basis: PolyBasis) -> np.ndarray:
    deg = np.tile(basis.degrees, 2)
    return deg[np.argmax(np.abs(vecs), axis=0)]


def spectrum(tf: TFState, params: SystemParams, n_max: int = DEFAULT_NMAX,
             vectors: bool = False) -> StabilitySpectrum:
    """Dense nonsymmetric eigendecomposition of the truncated operator."""
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    basis = PolyBasis(int(n_max))
    mat = assemble_L(tf, params, basis)
    try:
        if vectors:
            vals, vecs = linalg.eig(mat, check_finite=True)
        else:
            vals, vecs = linalg.eigvals(mat, check_finite=True), None
    except (linalg.LinAlgError, ValueError) as exc:
        diag = {"cond_estimate": float(np.linalg.cond(mat)) if np.all(np.isfinite(mat)) else math.inf,
                "max_abs_entry": float(np.nanmax(np.abs(mat)))}
        raise NumericError(f"eigensolver failed: {exc}", diagnostics=diag) from exc
    lam0 = float(np.max(vals.real))
    return StabilitySpectrum(
        eigenvalues=vals,
        lambda0=lam0 if lam0 > LAMBDA_CLAMP else 0.0,
        n_max=int(n_max), omega=params.omega, eps_dd=params.eps_dd, gamma=params.gamma,
        tf=tf,
        mode_order=_mode_orders(vecs, basis) if vectors else None,
        eigenvectors=vecs,
    )


def instability_timescale(lambda0: float, omega: float) -> float:
    """Growth time Omega / (2 pi lambda0) measured in rotation cycles.

    Returns ``math.inf`` for a dynamically stable point (lambda0 <= 0).
    """
    if not lambda0 > 0.0:
        return math.inf
    return omega / (2.0 * math.pi * lambda0)


@dataclass
class MapPoint:
    omega: float
    eps_dd: float
    gamma: float
    n_max: int
    lambda0: float | None = None
    n_eigs: int | None = None
    tf: TFState | None = None
    error: str = ""

    @property
    def lambda0_quarter(self) -> float | None:
        return None if self.lambda0 is None else self.lambda0 ** 0.25

    def row(self) -> tuple:
        tf = self.tf
        return (self.omega, self.eps_dd, self.gamma, self.n_max, self.lambda0, self.lambda0_quarter,
                self.n_eigs, tf.kappa_x if tf else None, tf.kappa_y if tf else None,
                tf.alpha if tf else None)


MAP_COLUMNS = ("Omega", "eps_dd", "gamma", "N_max", "lambda0", "lambda0_quarter", "n_eigs",
               "kappa_x", "kappa_y", "alpha")


def _map_row(omega, eps_values, gamma, n_max, interaction_scale):
    """One Omega row: continue in eps from the eps = 0 branch, then diagonalise."""
    base = SystemParams(gamma=gamma, omega=omega, eps_dd=0.0, interaction_scale=interaction_scale)
    uniq = sorted(set(eps_values))
    found, why = {}, "no TF solution"
    try:
        curve = eps_continuation(base, uniq)
        found = dict(curve.samples)
        if curve.terminated_at is not None:
            why = f"branch terminated at eps_dd={curve.terminated_at:.6g} ({curve.termination_reason})"
    except RotBecError as exc:
        why = f"no TF solution: {exc}"
    out = []
    for e in eps_values:
        pt = MapPoint(omega, float(e), gamma, n_max)
        st = found.get(e)
        if st is None:
            pt.error = why
        else:
            pt.tf = st
            try:
                sp = spectrum(st, base.with_(eps_dd=float(e)), n_max)
                pt.lambda0, pt.n_eigs = sp.lambda0, len(sp.eigenvalues)
            except RotBecError as exc:
                pt.error = f"{type(exc).__name__}: {exc}"
        out.append(pt)
    return out


def stability_map(omega_grid, eps_grid, gamma: float = 1.0, n_max: int = DEFAULT_NMAX,
                  threads: int = 1, interaction_scale: float | None = None) -> list[MapPoint]:
    """lambda0 over an (Omega, eps_dd) grid, Omega-major.

    Each Omega row follows the branch continued in eps_dd from the eps_dd = 0
    state; points without a TF solution carry an error string and no lambda0.
    """
    omegas = [float(w) for w in omega_grid]
    eps = [float(e) for e in eps_grid]
    if not omegas or not eps:
        raise DomainError("stability_map needs non-empty grids")
    scale = 1500.0 if interaction_scale is None else float(interaction_scale)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda w: _map_row(w, eps, gamma, n_max, scale), omegas))
    else:
        rows = [_map_row(w, eps, gamma, n_max, scale) for w in omegas]
    return [pt for row in rows for pt in row]
