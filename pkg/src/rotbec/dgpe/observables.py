"""Energies, moments and shape estimators of a simulated field."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy import fft as sfft

from ..errors import DomainError
from .grid import FieldState
from .kernel import DipolarKernel, dipolar_potential, ddi_kernel_cutoff


class Energy(NamedTuple):
    """Rotating-frame energy per particle and its parts (units of hbar omega_perp)."""

    kinetic: float
    trap: float
    contact: float
    dipolar: float
    lz: float
    total: float
    mu: float


class Moments(NamedTuple):
    x2: float
    y2: float
    z2: float
    xy: float


class AlphaEstimate(NamedTuple):
    moment: float
    phase_fit: float


def trap_potential(state: FieldState) -> np.ndarray:
    x, y, z = state.grid.mesh()
    return 0.5 * (x * x + y * y + (state.params.gamma * z) ** 2)


def _deriv(psi, axis, k, workers):
    shape = [1, 1, 1]
    shape[axis] = -1
    return sfft.ifft(1j * k.reshape(shape) * sfft.fft(psi, axis=axis, workers=workers),
                     axis=axis, workers=workers)


def angular_momentum(state: FieldState, workers: int = 1) -> float:
    """<L_z> = <psi| -i (x d_y - y d_x) |psi>."""
    x, y, _ = state.grid.mesh()
    k = state.grid.k
    psi = state.psi
    lz = -1j * (x * _deriv(psi, 1, k, workers) - y * _deriv(psi, 0, k, workers))
    return float(np.real(np.vdot(psi, lz)) * state.grid.cell_volume)


def energy(state: FieldState, kernel: DipolarKernel | None = None, workers: int = 1) -> Energy:
    """Gross-Pitaevskii energy functional in the frame rotating at Omega."""
    grid, p = state.grid, state.params
    dv = grid.cell_volume
    if kernel is None:
        kernel = ddi_kernel_cutoff(grid, p.eps_dd, p.interaction_scale)
    k = grid.k
    k2 = (k ** 2)[:, None, None] + (k ** 2)[None, :, None] + (k ** 2)[None, None, :]
    spec = sfft.fftn(state.psi, workers=workers)
    kin = 0.5 * float(np.sum(k2 * (spec.real ** 2 + spec.imag ** 2))) * dv / grid.n ** 3
    dens = state.density()
    trap = float(np.sum(trap_potential(state) * dens)) * dv
    contact = 0.5 * kernel.g_scale * float(np.sum(dens * dens)) * dv
    dip = 0.0
    if kernel.eps_dd != 0.0:
        dip = 0.5 * float(np.sum(dipolar_potential(dens, kernel, workers) * dens)) * dv
    lz = angular_momentum(state, workers) if p.omega != 0.0 else 0.0
    total = kin + trap + contact + dip - p.omega * lz
    mu = kin + trap + 2.0 * contact + 2.0 * dip - p.omega * lz
    norm = float(np.sum(dens)) * dv
    return Energy(kin / norm, trap / norm, contact / norm ** 2, dip / norm ** 2, lz / norm,
                  total / norm, mu / norm)


def moments(state: FieldState) -> Moments:
    x, y, z = state.grid.mesh()
    dens = state.density()
    tot = float(np.sum(dens))
    return Moments(float(np.sum(dens * x * x)) / tot, float(np.sum(dens * y * y)) / tot,
                   float(np.sum(dens * z * z)) / tot, float(np.sum(dens * x * y)) / tot)


def alpha_from_moments(m: Moments, omega: float) -> float:
    den = m.x2 + m.y2
    if not den > 0:
        raise DomainError("vanishing second moments: alpha undefined")
    return omega * (m.x2 - m.y2) / den


def phase_fit(state: FieldState, threshold: float = 0.5) -> float:
    """Least-squares c in phase = c x y + const over the region n > threshold n_peak.

    Works on neighbour phase differences arg(psi(r + d e_i) psi*(r)), which
    for a phase c x y equal c y d and c x d exactly, so no explicit
    unwrapping is needed.
    """
    psi = state.psi
    dens = state.density()
    mask = dens > threshold * dens.max()
    x, y, _ = state.grid.mesh()
    d = state.grid.d
    gx = np.angle(np.roll(psi, -1, 0) * np.conj(psi)) / d
    gy = np.angle(np.roll(psi, -1, 1) * np.conj(psi)) / d
    mx = mask & np.roll(mask, -1, 0)
    my = mask & np.roll(mask, -1, 1)
    yb = np.broadcast_to(y, psi.shape)
    xb = np.broadcast_to(x, psi.shape)
    # gx is c y on x-links, gy is c x on y-links
    num = np.sum(gx[mx] * yb[mx]) + np.sum(gy[my] * xb[my])
    den = np.sum(yb[mx] ** 2) + np.sum(xb[my] ** 2)
    if not den > 0:
        raise DomainError("phase-fit region is empty")
    return float(num / den)


def alpha_estimate(state: FieldState, threshold: float = 0.5) -> AlphaEstimate:
    """Primary moment estimator and the phase-fit diagnostic of alpha."""
    return AlphaEstimate(alpha_from_moments(moments(state), state.params.omega),
                         phase_fit(state, threshold))


def z0_slices(state: FieldState) -> tuple[np.ndarray, np.ndarray]:
    """Density and phase in the plane z = 0 (index n/2), indexed [x, y]."""
    c = state.grid.n // 2
    sl = state.psi[:, :, c]
    return sl.real ** 2 + sl.imag ** 2, np.angle(sl)


def paraboloid_residual(density2d: np.ndarray, x: np.ndarray, threshold: float = 0.1) -> float:
    """Relative L2 misfit of a quadratic surface fitted where n > threshold n_max.

    Smooth Thomas-Fermi clouds give a small value; surface ripples and
    fragmentation raise it.
    """
    n = np.asarray(density2d, dtype=float)
    mask = n > threshold * n.max()
    xx, yy = np.meshgrid(x, x, indexing="ij")
    a = np.stack([np.ones(mask.sum()), xx[mask], yy[mask], xx[mask] ** 2, yy[mask] ** 2,
                  xx[mask] * yy[mask]], axis=1)
    coef, *_ = np.linalg.lstsq(a, n[mask], rcond=None)
    res = n[mask] - a @ coef
    return float(math.sqrt(np.sum(res ** 2) / np.sum(n[mask] ** 2)))
