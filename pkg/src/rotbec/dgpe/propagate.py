"""Split-step propagation of the rotating-frame dipolar GPE.

One step is a Strang splitting: a half step of the local potential
(trap + contact + dipolar), the kinetic and rotation operators, then a second
half step of the local potential.  Kinetic energy and -Omega L_z are split as

    H_x  = kx^2/2 + Omega y kx          (diagonal in (kx, y, z))
    H_yz = ky^2/2 - Omega x ky + kz^2/2  (diagonal in (x, ky, kz))

and applied as H_x/2, H_yz, H_x/2, each exactly through one-dimensional
(resp. two-dimensional) transforms in the mixed representation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft

from ..core_model import SystemParams, make_tf_state
from ..errors import ConvergenceError, DomainError, NumericError
from .grid import FieldState, SimGrid, gaussian_field, tf_field
from .kernel import DipolarKernel, ddi_kernel_cutoff, dipolar_potential
from .observables import Energy, energy

DEFAULT_DT = 0.004
DEFAULT_IMAG_DT = 0.01


class Propagator:
    """Precomputed phase tables for stepping one grid at fixed dt and Omega.

    ``imaginary=True`` replaces exp(-i H dt) by exp(-H dt) and renormalises
    after every step.  ``rotation=False`` drops -Omega L_z from the kinetic
    factors (used for imaginary-time relaxation at Omega >= 1, where the
    rotating-frame energy is unbounded below).
    """

    def __init__(self, grid: SimGrid, params: SystemParams, dt: float = DEFAULT_DT,
                 imaginary: bool = False, rotation: bool = True, workers: int = 1):
        if not dt > 0:
            raise DomainError("time step must be positive")
        self.grid, self.params, self.dt = grid, params, float(dt)
        self.imaginary, self.workers = imaginary, int(workers)
        self.warnings: list[str] = []
        om = params.omega if rotation else 0.0
        self.omega_eff = om
        x = grid.x
        k = grid.k
        fac = -float(dt) if imaginary else -1j * float(dt)
        # H_x on axes (kx, y): shape (n, n, 1)
        hx = 0.5 * (k ** 2)[:, None] + om * x[None, :] * k[:, None]
        self._hx_half = np.exp(0.5 * fac * hx)[:, :, None]
        # H_yz on axes (x, ky, kz)
        hy = 0.5 * (k ** 2)[None, :] - om * x[:, None] * k[None, :]
        hz = 0.5 * k ** 2
        self._hyz = np.exp(fac * hy)[:, :, None] * np.exp(fac * hz)[None, None, :]
        xm, ym, zm = grid.mesh()
        self._vtrap = 0.5 * (xm * xm + ym * ym + (params.gamma * zm) ** 2)
        self._fac = fac
        self._unit_kernel = ddi_kernel_cutoff(grid, 1.0, params.interaction_scale)
        self._cache = None
        shear = abs(om) * 0.5 * grid.length * dt
        if shear > grid.d:
            self.warnings.append(
                f"rotation shear per step {shear:.3g} exceeds the grid spacing {grid.d:.3g}")
            warnings.warn(self.warnings[-1], RuntimeWarning, stacklevel=2)

    def kernel(self, eps_dd: float) -> DipolarKernel:
        return self._unit_kernel.with_eps(eps_dd)

    def local_potential(self, psi: np.ndarray, eps_dd: float) -> np.ndarray:
        dens = psi.real ** 2 + psi.imag ** 2
        v = self._vtrap + self.params.interaction_scale * dens
        if eps_dd != 0.0:
            v = v + dipolar_potential(dens, self.kernel(eps_dd), self.workers)
        return v

    def _kinetic(self, psi):
        w = self.workers
        psi = sfft.ifft(sfft.fft(psi, axis=0, workers=w) * self._hx_half, axis=0, workers=w)
        psi = sfft.ifftn(sfft.fftn(psi, axes=(1, 2), workers=w) * self._hyz, axes=(1, 2), workers=w)
        psi = sfft.ifft(sfft.fft(psi, axis=0, workers=w) * self._hx_half, axis=0, workers=w)
        return psi

    def step(self, psi: np.ndarray, eps_dd: float) -> np.ndarray:
        """One Strang step at constant eps_dd; returns the new array."""
        half = 0.5 * self._fac
        if not self.imaginary and self._cache is not None and self._cache[0] is psi \
                and self._cache[1] == eps_dd:
            v = self._cache[2]
        else:
            v = self.local_potential(psi, eps_dd)
        psi = psi * np.exp(half * v)
        psi = self._kinetic(psi)
        v = self.local_potential(psi, eps_dd)
        psi = psi * np.exp(half * v)
        if self.imaginary:
            psi /= math.sqrt(float(np.sum(psi.real ** 2 + psi.imag ** 2)) * self.grid.cell_volume)
            self._cache = None
        else:
            # |psi| is unchanged by the last phase factor, so v stays valid
            self._cache = (psi, eps_dd, v)
        return psi

    def advance(self, state: FieldState, n_steps: int = 1) -> FieldState:
        """Advance ``state`` in place by ``n_steps`` at its current eps_dd."""
        psi = state.psi
        for _ in range(int(n_steps)):
            psi = self.step(psi, state.params.eps_dd)
        state.psi = psi
        if not self.imaginary:
            state.t += n_steps * self.dt
        return state


def step_real(state: FieldState, dt: float = DEFAULT_DT, propagator: Propagator | None = None,
              workers: int = 1) -> FieldState:
    """Return the state advanced by one real-time step (the input is untouched)."""
    prop = propagator or Propagator(state.grid, state.params, dt, workers=workers)
    if prop.imaginary or prop.dt != dt:
        raise DomainError("propagator does not match a real-time step of this size")
    out = state.copy()
    return prop.advance(out, 1)


@dataclass
class GroundState:
    state: FieldState
    energy: Energy
    iterations: int
    imaginary_time: float
    converged: bool
    history: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def initial_guess(grid: SimGrid, params: SystemParams) -> FieldState:
    """Thomas-Fermi profile of the symmetric state, or a Gaussian if g~ is 0."""
    if params.interaction_scale <= 0.0:
        return gaussian_field(grid, params)
    g = params.gamma
    tf = make_tf_state(g, g, params.with_(eps_dd=0.0, omega=0.0))
    st = tf_field(grid, params, tf)
    # a faint Gaussian floor keeps the phase defined outside the cloud
    gauss = gaussian_field(grid, params)
    st.psi = st.psi + 1e-3 * gauss.psi
    return st.normalize()


def ground_state(params: SystemParams, grid: SimGrid, tol: float = 1e-8,
                 dt: float = DEFAULT_IMAG_DT, max_time: float = 200.0, check_every: int = 10,
                 init: FieldState | None = None, workers: int = 1,
                 min_dt: float = 1e-4) -> GroundState:
    """Imaginary-time relaxation to the lowest-energy stationary state.

    Stops when the relative energy change per unit imaginary time drops
    below ``tol``.  An energy increase between checks halves dt; a rise
    that persists at ``min_dt`` raises :class:`NumericError`.
    """
    notes = []
    rotation = params.omega < 1.0
    if not rotation:
        notes.append("rotation term dropped in imaginary time (Omega >= 1); "
                     "exact for axially symmetric states")
    state = init.copy() if init is not None else initial_guess(grid, params)
    state.params = params
    prop = Propagator(grid, params, dt, imaginary=True, rotation=rotation, workers=workers)
    kern = prop.kernel(params.eps_dd)
    e_rot = lambda st: _relax_energy(st, kern, rotation, workers)
    e_old = e_rot(state)
    hist = [(0.0, e_old)]
    tau, its = 0.0, 0
    while tau < max_time:
        psi = state.psi
        for _ in range(check_every):
            psi = prop.step(psi, params.eps_dd)
        trial = FieldState(psi, grid, params, state.t)
        e_new = e_rot(trial)
        span = check_every * prop.dt
        if e_new > e_old + 1e-12 * abs(e_old):
            if prop.dt / 2 < min_dt:
                raise NumericError("imaginary-time energy not monotone at the minimum step",
                                   {"energy_before": e_old, "energy_after": e_new, "dt": prop.dt})
            prop = Propagator(grid, params, prop.dt / 2, imaginary=True, rotation=rotation,
                              workers=workers)
            notes.append(f"dt halved to {prop.dt:g} at tau={tau:.4g}")
            continue
        state = trial
        tau += span
        its += check_every
        hist.append((tau, e_new))
        rate = abs(e_old - e_new) / (abs(e_new) * span)
        e_old = e_new
        if rate < tol:
            return GroundState(state, energy(state, kern, workers), its, tau, True, hist, notes)
    raise ConvergenceError(f"imaginary time did not converge within tau={max_time}",
                           residuals=hist[-1], iterations=its)


def _relax_energy(state, kern, rotation, workers):
    e = energy(state, kern, workers)
    return e.total if rotation else e.total + state.params.omega * e.lz
