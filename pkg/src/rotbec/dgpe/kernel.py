"""Dipolar interaction with a spherical cut-off, evaluated spectrally.

With dipoles fixed along x (rotating frame) the cut-off interaction has the
closed-form transform

    U(k) = (C_dd / 3) [1 + 3 cos(u)/u^2 - 3 sin(u)/u^3] (3 kx^2/k^2 - 1),   u = rc k,

and C_dd = 3 g~ eps_dd in units where the contact coupling is g~.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from ..errors import PreconditionError
from .grid import FieldState, SimGrid

_SERIES_CUT = 0.05


def cutoff_bracket(u) -> np.ndarray:
    """1 + 3 cos(u)/u^2 - 3 sin(u)/u^3, with its u^2/10 - u^4/280 limit near 0."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = np.abs(u) < _SERIES_CUT
    us = u[small] ** 2
    out[small] = us / 10.0 - us * us / 280.0 + us ** 3 / 15120.0
    ul = u[~small]
    out[~small] = 1.0 + 3.0 * np.cos(ul) / ul ** 2 - 3.0 * np.sin(ul) / ul ** 3
    return out


@dataclass(frozen=True)
class DipolarKernel:
    """Reciprocal-space table on the half-spectrum layout of a real 3D FFT.

    ``table`` already includes eps_dd and the coupling g~; ``unit`` is the
    same table for eps_dd = 1 so a ramp can rescale without rebuilding.
    """

    grid: SimGrid
    eps_dd: float
    g_scale: float
    unit: np.ndarray

    @property
    def table(self) -> np.ndarray:
        return self.eps_dd * self.unit

    def with_eps(self, eps_dd: float) -> "DipolarKernel":
        return DipolarKernel(self.grid, float(eps_dd), self.g_scale, self.unit)


def _unit_table(grid: SimGrid, g_scale: float) -> np.ndarray:
    k = grid.k
    kz = 2.0 * np.pi * np.fft.rfftfreq(grid.n, grid.d)
    kx2 = (k ** 2)[:, None, None]
    k2 = kx2 + (k ** 2)[None, :, None] + (kz ** 2)[None, None, :]
    kk = np.sqrt(k2)
    with np.errstate(invalid="ignore", divide="ignore"):
        ang = np.where(k2 > 0, 3.0 * kx2 / k2 - 1.0, 0.0)
    tab = g_scale * cutoff_bracket(grid.rc * kk) * ang
    tab[0, 0, 0] = 0.0
    return tab


def ddi_kernel_cutoff(grid: SimGrid, eps_dd: float, g_scale: float) -> DipolarKernel:
    """Tabulate the cut-off dipolar kernel for dipoles along x."""
    return DipolarKernel(grid, float(eps_dd), float(g_scale), _unit_table(grid, float(g_scale)))


def dipolar_potential(density: np.ndarray, kernel: DipolarKernel, workers: int = 1) -> np.ndarray:
    """Convolution of a real density with the kernel (periodic box)."""
    if kernel.eps_dd == 0.0:
        return np.zeros_like(density)
    spec = sfft.rfftn(density, workers=workers)
    spec *= kernel.table
    return sfft.irfftn(spec, s=density.shape, workers=workers)


def interaction_potential(state: FieldState, kernel: DipolarKernel, workers: int = 1,
                          diagnostics: dict | None = None) -> np.ndarray:
    """g~ |psi|^2 plus the cut-off dipolar potential of |psi|^2.

    The dipolar part uses the real-input transform pair, so its output is
    real by construction.  If ``diagnostics`` is given, the full complex
    transform is also evaluated and the largest relative imaginary residue is
    stored under ``"imag_residue"`` before being discarded.
    """
    if kernel.grid != state.grid:
        raise PreconditionError("kernel was tabulated for a different grid")
    dens = state.density()
    out = kernel.g_scale * dens
    if kernel.eps_dd != 0.0:
        vdd = dipolar_potential(dens, kernel, workers)
        out = out + vdd
        if diagnostics is not None:
            full = _full_table(kernel)
            cplx = sfft.ifftn(sfft.fftn(dens, workers=workers) * full, workers=workers)
            scale = max(float(np.max(np.abs(cplx.real))), 1e-300)
            diagnostics["imag_residue"] = float(np.max(np.abs(cplx.imag)) / scale)
            diagnostics["real_mismatch"] = float(np.max(np.abs(cplx.real - vdd)) / scale)
    elif diagnostics is not None:
        diagnostics["imag_residue"] = 0.0
    return out


def _full_table(kernel: DipolarKernel) -> np.ndarray:
    grid = kernel.grid
    k = grid.k
    k2 = (k ** 2)[:, None, None] + (k ** 2)[None, :, None] + (k ** 2)[None, None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        ang = np.where(k2 > 0, 3.0 * (k ** 2)[:, None, None] / k2 - 1.0, 0.0)
    tab = kernel.eps_dd * kernel.g_scale * cutoff_bracket(grid.rc * np.sqrt(k2)) * ang
    tab[0, 0, 0] = 0.0
    return tab
