"""Uniform periodic grids and the field state of the simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core_model import SystemParams, TFState
from ..errors import DomainError

DEFAULT_N = 64
DEFAULT_SPACING = 0.3
CUTOFF_FRACTION = 0.45


@dataclass(frozen=True)
class SimGrid:
    """Cubic grid of ``n`` points per axis with spacing ``d`` (units of l_perp).

    The box [-L/2, L/2)^3 with L = n d is periodic.  ``rc`` is the radius of
    the spherical cut-off applied to the dipolar interaction; by default
    0.45 L, so the cut-off sphere fits in the box without touching its images.
    """

    n: int = DEFAULT_N
    d: float = DEFAULT_SPACING
    rc: float | None = None

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 4 or self.n % 2:
            raise DomainError(f"grid size must be an even integer >= 4, got {self.n!r}")
        if not (self.d > 0 and math.isfinite(self.d)):
            raise DomainError(f"grid spacing must be positive, got {self.d!r}")
        if self.rc is None:
            object.__setattr__(self, "rc", CUTOFF_FRACTION * self.n * self.d)
        if not (self.rc > 0 and math.isfinite(self.rc)):
            raise DomainError(f"cut-off radius must be positive, got {self.rc!r}")

    @property
    def length(self) -> float:
        return self.n * self.d

    @property
    def cell_volume(self) -> float:
        return self.d ** 3

    @property
    def x(self) -> np.ndarray:
        """Cell-centred coordinates, symmetric about the origin; x[n/2] = 0."""
        return (np.arange(self.n) - self.n // 2) * self.d

    @property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2.0 * math.pi * np.fft.fftfreq(self.n, self.d)

    def mesh(self):
        x = self.x
        return x[:, None, None], x[None, :, None], x[None, None, :]

    def guidance(self, extent: float | None = None) -> list[str]:
        """Human-readable notes on how the cut-off relates to box and cloud."""
        notes = []
        if self.rc > 0.5 * self.length:
            notes.append(f"rc = {self.rc:.4g} exceeds half the box ({0.5 * self.length:.4g}); "
                         "periodic images of the cut-off sphere overlap")
        if extent is not None and self.rc < 2.0 * extent:
            notes.append(f"rc = {self.rc:.4g} is smaller than the cloud diameter {2 * extent:.4g}")
        if extent is not None and extent > 0.45 * self.length:
            notes.append(f"cloud radius {extent:.4g} approaches the box edge")
        return notes

    def to_dict(self) -> dict:
        return {"n": int(self.n), "d": float(self.d), "rc": float(self.rc)}


@dataclass
class FieldState:
    """Order parameter on a grid, normalised to one; g~ carries the atom number."""

    psi: np.ndarray
    grid: SimGrid
    params: SystemParams
    t: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.grid.n
        if self.psi.shape != (n, n, n):
            raise DomainError(f"field shape {self.psi.shape} does not match grid n={n}")
        self.psi = np.asarray(self.psi, dtype=np.complex128)

    @property
    def eps_dd(self) -> float:
        return self.params.eps_dd

    def density(self) -> np.ndarray:
        return self.psi.real ** 2 + self.psi.imag ** 2

    def norm(self) -> float:
        return float(np.sum(self.density()) * self.grid.cell_volume)

    def normalize(self) -> "FieldState":
        self.psi /= math.sqrt(self.norm())
        return self

    def copy(self) -> "FieldState":
        return FieldState(self.psi.copy(), self.grid, self.params, self.t, dict(self.meta))


def gaussian_field(grid: SimGrid, params: SystemParams, center=(0.0, 0.0, 0.0),
                   momentum=(0.0, 0.0, 0.0)) -> FieldState:
    """Non-interacting trap ground state, optionally displaced and boosted."""
    x, y, z = grid.mesh()
    g = params.gamma
    cx, cy, cz = center
    arg = -0.5 * ((x - cx) ** 2 + (y - cy) ** 2 + g * (z - cz) ** 2)
    phase = momentum[0] * x + momentum[1] * y + momentum[2] * z
    psi = np.exp(arg + 1j * phase)
    return FieldState(psi, grid, params).normalize()


def tf_field(grid: SimGrid, params: SystemParams, state: TFState) -> FieldState:
    """Field sqrt(n_TF) exp(i alpha x y) built from a Thomas-Fermi state."""
    x, y, z = grid.mesh()
    rx, ry, rz = state.semi_axes
    q = 1.0 - (x / rx) ** 2 - (y / ry) ** 2 - (z / rz) ** 2
    psi = np.sqrt(np.maximum(q, 0.0)) * np.exp(1j * state.alpha * x * y)
    return FieldState(psi.astype(np.complex128), grid, params).normalize()
