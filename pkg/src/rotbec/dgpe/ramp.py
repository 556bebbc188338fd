"""Linear eps_dd ramps in real time with a one-off density perturbation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import DomainError
from .grid import FieldState
from .observables import alpha_from_moments, energy, moments, z0_slices
from .propagate import DEFAULT_DT, Propagator

TIMESERIES_COLUMNS = ("t", "eps_dd", "norm", "energy", "x2", "y2", "z2", "xy", "alpha_est")


@dataclass(frozen=True)
class RampProtocol:
    """eps_dd(t) = eps_start + rate t up to eps_stop, with seeded noise at t = 0.

    ``amplitude`` is the maximal relative density perturbation eta, applied as
    n -> n (1 + eta u) with u uniform in [-1, 1] independently per grid point.
    """

    rate: float = 1e-3
    eps_start: float = 0.0
    eps_stop: float = 0.2
    amplitude: float = 0.05
    seed: int = 0
    dt: float = DEFAULT_DT
    sample_every: int = 250
    checkpoints: tuple = (0.05, 0.15, 0.20)
    max_norm_drift: float = 1e-6

    def __post_init__(self):
        if not self.rate > 0:
            raise DomainError("ramp rate must be positive")
        if not 0.0 <= self.amplitude <= 0.2:
            raise DomainError("perturbation amplitude must lie in [0, 0.2]")
        if not (0.0 <= self.eps_start <= self.eps_stop < 1.0):
            raise DomainError("need 0 <= eps_start <= eps_stop < 1")
        if not self.dt > 0 or self.sample_every < 1:
            raise DomainError("dt must be positive and sample_every >= 1")
        object.__setattr__(self, "checkpoints", tuple(sorted(float(c) for c in self.checkpoints)))

    @property
    def n_steps(self) -> int:
        return int(math.ceil((self.eps_stop - self.eps_start) / (self.rate * self.dt) - 1e-9))

    def eps_at_step(self, i: int) -> float:
        """Piecewise-constant eps_dd used during step i (set before the step)."""
        return min(self.eps_start + self.rate * self.dt * i, self.eps_stop)

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["checkpoints"] = list(self.checkpoints)
        return d


def seed_perturbation(state: FieldState, amplitude: float, seed: int) -> FieldState:
    """Multiply the density by (1 + amplitude u), u ~ U[-1, 1] per point, then renormalise."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, size=state.psi.shape)
    state.psi = state.psi * np.sqrt(1.0 + amplitude * u)
    return state.normalize()


@dataclass
class RampResult:
    rows: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    final: FieldState | None = None
    aborted: bool = False
    reason: str = ""
    warnings: list = field(default_factory=list)
    extra_columns: tuple = ()

    def column(self, name: str) -> np.ndarray:
        i = (TIMESERIES_COLUMNS + self.extra_columns).index(name)
        return np.array([r[i] for r in self.rows], dtype=float)


def observe(state: FieldState, kernel=None, workers: int = 1) -> tuple:
    m = moments(state)
    e = energy(state, kernel, workers)
    return (state.t, state.params.eps_dd, state.norm(), e.total, m.x2, m.y2, m.z2, m.xy,
            alpha_from_moments(m, state.params.omega))


def run_ramp(initial: FieldState, protocol: RampProtocol,
             observers: Sequence[Callable[[FieldState], dict]] = (), workers: int = 1,
             progress: Callable[[int, int], None] | None = None) -> RampResult:
    """Seed the perturbation once, then step in real time while ramping eps_dd.

    Rows of :data:`TIMESERIES_COLUMNS` (plus observer keys) are recorded every
    ``sample_every`` steps; z = 0 slices are stored at each checkpoint eps_dd.
    A cumulative norm drift beyond ``max_norm_drift`` stops the run with
    ``aborted`` set and the partial record kept.
    """
    state = initial.copy()
    state.params = state.params.with_(eps_dd=protocol.eps_start)
    if protocol.amplitude > 0:
        seed_perturbation(state, protocol.amplitude, protocol.seed)
    prop = Propagator(state.grid, state.params, protocol.dt, workers=workers)
    res = RampResult(warnings=list(prop.warnings))
    extra_keys: list[str] = []

    def record():
        row = observe(state, prop.kernel(state.params.eps_dd), workers)
        extras = {}
        for fn in observers:
            extras.update(fn(state))
        if not extra_keys and extras:
            extra_keys.extend(sorted(extras))
            res.extra_columns = tuple(extra_keys)
        res.rows.append(row + tuple(extras.get(k) for k in extra_keys))
        return row

    pending = list(protocol.checkpoints)
    record()
    n_steps = protocol.n_steps
    psi = state.psi
    for i in range(n_steps):
        eps = protocol.eps_at_step(i)
        while pending and eps >= pending[0] - 1e-12:
            state.psi = psi
            res.snapshots[pending.pop(0)] = (state.t, eps, *z0_slices(state))
        psi = prop.step(psi, eps)
        state.t += protocol.dt
        state.params = state.params.with_(eps_dd=eps)
        if (i + 1) % protocol.sample_every == 0 or i + 1 == n_steps:
            state.psi = psi
            row = record()
            drift = abs(row[2] - 1.0)
            if drift > protocol.max_norm_drift:
                res.aborted = True
                res.reason = f"norm drift {drift:.3e} at t={state.t:.6g}"
                break
            if progress is not None:
                progress(i + 1, n_steps)
    state.psi = psi
    if not res.aborted:
        state.params = state.params.with_(eps_dd=protocol.eps_stop)
        for c in pending:
            if c <= protocol.eps_stop + 1e-12:
                res.snapshots[c] = (state.t, protocol.eps_stop, *z0_slices(state))
    res.final = state
    return res


def branch_comparison(eps: np.ndarray, alpha_sim: np.ndarray, alpha_tf: np.ndarray,
                      track_window=(0.02, 0.05), onset_rel: float = 0.5,
                      departure_rel: float = 2.0) -> dict:
    """Summarise how a simulated alpha(eps) follows the Thomas-Fermi branch.

    ``tracking_error``: worst relative deviation inside ``track_window``;
    ``onset``: first eps beyond the window where the deviation exceeds
    ``onset_rel`` |alpha_tf|; ``departure``: first eps where it exceeds
    ``departure_rel`` |alpha_tf|.
    """
    eps = np.asarray(eps, float)
    dev = np.abs(np.asarray(alpha_sim, float) - np.asarray(alpha_tf, float))
    scale = np.abs(np.asarray(alpha_tf, float))
    rel = np.where(scale > 0, dev / np.maximum(scale, 1e-300), np.inf)
    win = (eps >= track_window[0]) & (eps <= track_window[1])
    after = eps > track_window[1] - 1e-12

    def first(th):
        hit = np.nonzero(after & (rel > th))[0]
        return float(eps[hit[0]]) if hit.size else None

    return {
        "tracking_error": float(np.max(rel[win])) if win.any() else None,
        "onset": first(onset_rel),
        "departure": first(departure_rel),
    }
