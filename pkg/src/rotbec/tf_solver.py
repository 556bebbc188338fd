"""Self-consistent rotating-frame Thomas-Fermi states and their branches.

The unknowns are the aspect ratios (kappa_x, kappa_y); the velocity amplitude
is eliminated through alpha = Omega (kx^2 - ky^2) / (kx^2 + ky^2), so every
returned state satisfies that constraint exactly.  Newton iterations run in
(log kx, log ky) to keep both ratios positive.

For enumerating all branches at one Omega the problem is recast in alpha:
for fixed alpha the two shape equations are solved for (kx, ky) and the
remaining scalar condition

    h(alpha) = (alpha + Omega) / kx^2 + (alpha - Omega) / ky^2

(stationarity of the continuity equation) is scanned for roots.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy import optimize

from .core_model import (
    SystemParams,
    TFState,
    beta_integrals,
    dressed_frequencies,
    f_kappa_over_gap,
    make_tf_state,
)
from .errors import ConvergenceError, DomainError, NotFoundError, UnstableRegimeError

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
MAX_NEWTON = 100

SWEEP_OMEGA = "omega"
SWEEP_EPS = "eps_dd"


class Residuals(NamedTuple):
    """Residuals of the x-shape, y-shape and velocity-amplitude relations."""

    r1: float
    r2: float
    r3: float

    def max_abs(self) -> float:
        return max(abs(self.r1), abs(self.r2), abs(self.r3))


@dataclass
class BranchCurve:
    """Ordered family of stationary states along one sweep parameter."""

    branch_id: str
    sweep_kind: str
    samples: list[tuple[float, TFState]] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    terminated_at: float | None = None
    termination_reason: str | None = None

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.samples])

    @property
    def alphas(self) -> np.ndarray:
        return np.array([s.alpha for _, s in self.samples])

    def rows(self):
        """(sweep_value, kx, ky, alpha, Rz, mu) tuples."""
        return [(v, s.kappa_x, s.kappa_y, s.alpha, s.r_z, s.mu) for v, s in self.samples]


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

_SHAPE_BETAS = [(1, 0, 1), (2, 0, 0), (1, 1, 0)]
# aspect ratios beyond e^10 are treated as outside the physical region
_LOG_KAPPA_MAX = 10.0


def _shape_terms(kx, ky, eps):
    """zeta and the two bracketed dipolar factors of the shape relations."""
    if eps == 0.0:
        return 1.0, 1.0, 1.0, 0.0, 0.0
    b101, b200, b110 = beta_integrals(_SHAPE_BETAS, kx, ky)
    z = 1.0 + eps * (1.5 * kx * ky * b101 - 1.0)
    cx = 1.0 + eps * (4.5 * kx ** 3 * ky * b200 - 1.0)
    cy = 1.0 + eps * (1.5 * ky ** 3 * kx * b110 - 1.0)
    return z, cx, cy, b200, b110


def consistency_residuals(kx: float, ky: float, alpha: float,
                          params: SystemParams) -> Residuals:
    """Residuals (r1, r2, r3) of the three stationary-state relations.

    r1 = kx^2 - gamma^2 [1 + eps (9/2 kx^3 ky b200 - 1)] / (zeta wx^2),
    r2 = ky^2 - gamma^2 [1 + eps (3/2 ky^3 kx b110 - 1)] / (zeta wy^2),
    r3 = (a + W)[wx^2 - 9/2 eps kx ky gamma^2 b200 / zeta]
         + (a - W)[wy^2 - 3/2 eps kx ky gamma^2 b110 / zeta].
    """
    if not (kx > 0 and ky > 0):
        raise DomainError(f"aspect ratios must be positive, got ({kx!r}, {ky!r})")
    eps, g2, om = params.eps_dd, params.gamma ** 2, params.omega
    z, cx, cy, b200, b110 = _shape_terms(kx, ky, eps)
    if z <= 0.0:
        raise UnstableRegimeError(f"zeta = {z:.6g} <= 0")
    wx2, wy2 = dressed_frequencies(alpha, om)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = kx * kx - g2 * cx / (z * wx2) if wx2 != 0 else math.inf
        r2 = ky * ky - g2 * cy / (z * wy2) if wy2 != 0 else math.inf
    r3 = ((alpha + om) * (wx2 - 4.5 * eps * kx * ky * g2 * b200 / z)
          + (alpha - om) * (wy2 - 1.5 * eps * kx * ky * g2 * b110 / z))
    return Residuals(float(r1), float(r2), float(r3))


def _alpha_of(kx, ky, omega):
    return omega * (kx * kx - ky * ky) / (kx * kx + ky * ky)


def _scaled_system(u, params):
    """Newton system in u = (log kx, log ky), multiplied through by zeta wx^2.

    Returns None where the state is outside the physical region
    (zeta <= 0 or a non-positive dressed frequency).
    """
    if np.max(np.abs(u)) > _LOG_KAPPA_MAX:
        return None
    kx, ky = math.exp(u[0]), math.exp(u[1])
    alpha = _alpha_of(kx, ky, params.omega)
    wx2, wy2 = dressed_frequencies(alpha, params.omega)
    if wx2 <= 0.0 or wy2 <= 0.0:
        return None
    z, cx, cy, _, _ = _shape_terms(kx, ky, params.eps_dd)
    if z <= 0.0:
        return None
    g2 = params.gamma ** 2
    return np.array([
        (z * wx2 * kx * kx - g2 * cx) / g2,
        (z * wy2 * ky * ky - g2 * cy) / g2,
    ])


def _newton(fun, u0, tol, max_iter, accept):
    """Damped Newton with a forward-difference Jacobian and backtracking.

    ``fun`` returns None outside its domain; ``accept(u)`` is the convergence
    test on the true (unscaled) residuals.
    """
    u = np.asarray(u0, dtype=float).copy()
    f = fun(u)
    if f is None:
        raise ConvergenceError("seed lies outside the physical region", iterations=0)
    for it in range(max_iter):
        if accept(u):
            return u, it
        jac = np.empty((f.size, u.size))
        for c in range(u.size):
            h = 1e-7 * max(1.0, abs(u[c]))
            up = u.copy()
            up[c] += h
            fp = fun(up)
            if fp is None:
                up[c] -= 2 * h
                fp = fun(up)
                if fp is None:
                    raise ConvergenceError("Jacobian probe left the domain", f, it)
                h = -h
            jac[:, c] = (fp - f) / h
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        norm0 = np.linalg.norm(f)
        lam = 1.0
        while lam > 1e-6:
            trial = u + lam * step
            ft = fun(trial)
            if ft is not None and (np.linalg.norm(ft) < norm0 or lam == 1.0 and norm0 < 1e-10):
                break
            lam *= 0.5
        else:
            raise ConvergenceError("line search failed", f, it)
        u, f = trial, ft
    if accept(u):
        return u, max_iter
    raise ConvergenceError(f"Newton did not converge in {max_iter} iterations", f, max_iter)


def solve_shape(params: SystemParams, seed: Sequence[float], tol: float = RESIDUAL_TOL,
                max_iter: int = MAX_NEWTON) -> tuple[float, float, int]:
    """Solve the consistency relations for (kx, ky); returns (kx, ky, iterations)."""
    params.require_solver_range()

    def accept(u):
        kx, ky = math.exp(u[0]), math.exp(u[1])
        try:
            r = consistency_residuals(kx, ky, _alpha_of(kx, ky, params.omega), params)
        except UnstableRegimeError:
            return False
        return r.max_abs() <= tol

    u, it = _newton(lambda u: _scaled_system(u, params),
                    [math.log(seed[0]), math.log(seed[1])], tol, max_iter, accept)
    return math.exp(u[0]), math.exp(u[1]), it


def solve_consistency(params: SystemParams, seed: Sequence[float],
                      tol: float = RESIDUAL_TOL) -> TFState:
    """Stationary TF state nearest to ``seed = (kx, ky[, alpha])``.

    With a seed alpha, two starting shapes are tried: the given one (nudged
    so that its anisotropy has the sign of alpha) and the shape that alpha
    implies through the dressed frequencies, kappa_i = gamma / w_i.  The
    solution whose alpha is closest to the seed is returned.  At Omega = 0
    the velocity amplitude vanishes identically; the in-plane shape is still
    solved for, since static dipoles along x elongate the cloud along x.
    """
    kx0, ky0 = float(seed[0]), float(seed[1])
    if not (kx0 > 0 and ky0 > 0):
        raise DomainError("seed aspect ratios must be positive")
    starts = [(kx0, ky0)]
    a0 = float(seed[2]) if len(seed) > 2 and params.omega > 0 else None
    if a0 is not None and a0 != 0:
        if np.sign(a0) != np.sign(kx0 - ky0):
            ratio = math.sqrt((params.omega + a0) / (params.omega - a0)) \
                if abs(a0) < params.omega else 1.5 ** np.sign(a0)
            m = math.sqrt(kx0 * ky0)
            starts[0] = (m * math.sqrt(ratio), m / math.sqrt(ratio))
        wx2, wy2 = dressed_frequencies(a0, params.omega)
        if wx2 > 0 and wy2 > 0:
            starts.append((params.gamma / math.sqrt(wx2), params.gamma / math.sqrt(wy2)))
    found, last_exc = [], None
    for start in starts:
        try:
            kx, ky, _ = solve_shape(params, start, tol)
        except (ConvergenceError, UnstableRegimeError) as exc:
            last_exc = exc
            continue
        found.append(make_tf_state(kx, ky, params))
        if a0 is None:
            break
    if not found:
        raise last_exc
    if a0 is None:
        return found[0]
    return min(found, key=lambda st: abs(st.alpha - a0))


def residuals_of(state: TFState, params: SystemParams) -> Residuals:
    return consistency_residuals(state.kappa_x, state.kappa_y, state.alpha, params)


# ---------------------------------------------------------------------------
# continuation
# ---------------------------------------------------------------------------

def _params_at(params: SystemParams, kind: str, value: float) -> SystemParams:
    if kind == SWEEP_OMEGA:
        return params.with_(omega=value)
    if kind == SWEEP_EPS:
        return params.with_(eps_dd=value)
    raise DomainError(f"unknown sweep kind {kind!r}")


def continue_branch(params: SystemParams, values: Sequence[float], seed_state: TFState | Sequence[float],
                    sweep_kind: str = SWEEP_OMEGA, branch_id: str = "branch",
                    min_step: float = 1e-6, tol: float = RESIDUAL_TOL,
                    max_jump: float = 0.05) -> BranchCurve:
    """Natural-parameter continuation of one branch over ``values``.

    Each solve is seeded by a secant predictor from the two previous points.
    A failed step is halved; when the step falls below ``min_step`` the
    branch is declared terminated at the last converged value.  A step whose
    alpha departs from the predictor by more than ``max_jump`` (relative to
    the step taken) is treated as a jump to another branch and rejected.
    """
    values = [float(v) for v in values]
    if len(values) == 0:
        raise DomainError("empty sweep grid")
    if any(b <= a for a, b in zip(values, values[1:])) and \
            any(b >= a for a, b in zip(values, values[1:])):
        raise DomainError("sweep values must be strictly monotone")
    curve = BranchCurve(branch_id, sweep_kind)
    if isinstance(seed_state, TFState):
        seed = (seed_state.kappa_x, seed_state.kappa_y)
    else:
        seed = (float(seed_state[0]), float(seed_state[1]))

    p0 = _params_at(params, sweep_kind, values[0])
    try:
        kx, ky, _ = solve_shape(p0, seed, tol)
    except (ConvergenceError, UnstableRegimeError) as exc:
        raise ConvergenceError(f"seed does not converge at the first point: {exc}") from exc
    state = make_tf_state(kx, ky, p0)
    curve.samples.append((values[0], state))
    curve.residuals.append(residuals_of(state, p0).max_abs())

    hist = [(values[0], np.log([kx, ky]), state.alpha)]
    cur = values[0]
    for target in values[1:]:
        step = target - cur
        while cur != target:
            trial_v = cur + step if abs(step) < abs(target - cur) else target
            pred = _predict(hist, trial_v)
            a_pred, a_slope = _predict_alpha(hist, trial_v)
            pt = _params_at(params, sweep_kind, trial_v)
            ok = False
            try:
                kx, ky, _ = solve_shape(pt, tuple(np.exp(pred)), tol)
                u = np.log([kx, ky])
                a_new = _alpha_of(kx, ky, pt.omega)
                # a jump to a neighbouring branch shows up as a discontinuity in alpha
                ok = abs(a_new - a_pred) <= max_jump + 2.0 * abs(a_slope * (trial_v - cur))
            except (ConvergenceError, UnstableRegimeError, DomainError):
                ok = False
            if ok:
                hist.append((trial_v, u, a_new))
                hist = hist[-3:]
                cur = trial_v
            else:
                step *= 0.5
                if abs(step) < min_step:
                    curve.terminated_at = cur
                    om_last = cur if sweep_kind == SWEEP_OMEGA else params.omega
                    curve.termination_reason = _termination_reason(hist[-1][2], om_last)
                    return curve
        st = make_tf_state(kx, ky, pt)
        curve.samples.append((target, st))
        curve.residuals.append(residuals_of(st, pt).max_abs())
    return curve


def _predict(hist, v):
    if len(hist) == 1:
        return hist[-1][1]
    (v0, u0, _), (v1, u1, _) = hist[-2], hist[-1]
    if v1 == v0:
        return u1
    return u1 + (u1 - u0) * (v - v1) / (v1 - v0)


def _predict_alpha(hist, v):
    """Secant prediction of alpha at ``v`` and the secant slope."""
    if len(hist) == 1:
        return hist[-1][2], 0.0
    (v0, _, a0), (v1, _, a1) = hist[-2], hist[-1]
    slope = (a1 - a0) / (v1 - v0) if v1 != v0 else 0.0
    return a1 + slope * (v - v1), slope


def _termination_reason(alpha: float, omega: float) -> str:
    wx2, wy2 = dressed_frequencies(alpha, omega)
    if min(wx2, wy2) < 0.05:
        return "dressed frequency -> 0 (wx^2=%.3g, wy^2=%.3g)" % (wx2, wy2)
    return "no converged continuation at minimum step"


def eps_continuation(params: SystemParams, eps_values: Sequence[float],
                     seed: Sequence[float] | None = None) -> BranchCurve:
    """Follow the branch adiabatically connected to the eps_dd = 0 state.

    At eps_dd = 0 and fixed Omega the symmetric state kx = ky = gamma solves
    the relations for every rotation rate; that is the default seed.
    """
    eps_values = [float(e) for e in eps_values]
    grid = eps_values if eps_values[0] == 0.0 else [0.0] + eps_values
    if seed is None:
        seed = (params.gamma, params.gamma)
    curve = continue_branch(params, _dense_eps_grid(grid), seed, SWEEP_EPS,
                            branch_id="eps-continued")
    wanted = set(eps_values)
    kept = [(v, s) for v, s in curve.samples if v in wanted]
    res = [r for (v, _), r in zip(curve.samples, curve.residuals) if v in wanted]
    curve.samples, curve.residuals = kept, res
    return curve


def _dense_eps_grid(grid, max_step=0.05):
    out = [grid[0]]
    for b in grid[1:]:
        a = out[-1]
        n = max(1, int(math.ceil(abs(b - a) / max_step - 1e-12)))
        out.extend(a + (b - a) * (i / n) for i in range(1, n))
        out.append(b)
    return out


def solve_on_eps_branch(params: SystemParams) -> TFState:
    """TF state at ``params`` on the branch continued in eps_dd from eps_dd = 0."""
    curve = eps_continuation(params, [params.eps_dd])
    if not curve.samples or curve.samples[-1][0] != params.eps_dd:
        raise ConvergenceError(
            f"eps continuation terminated at eps_dd={curve.terminated_at}")
    return curve.samples[-1][1]


# ---------------------------------------------------------------------------
# alpha-parameterised formulation: branch enumeration and bifurcation
# ---------------------------------------------------------------------------

def valid_alpha_window(omega: float, lo: float = -4.0, hi: float = 4.0):
    """Sub-intervals of [lo, hi] where both dressed frequencies are positive."""
    # wx^2 = (a - W)^2 + 1 - W^2, wy^2 = (a + W)^2 + 1 - W^2
    if omega < 1.0:
        return [(lo, hi)]
    s = math.sqrt(omega * omega - 1.0)
    cuts = sorted([-omega - s, -omega + s, omega - s, omega + s])
    bad = [(-omega - s, -omega + s), (omega - s, omega + s)]
    edges = sorted({lo, hi, *[c for c in cuts if lo < c < hi]})
    out = []
    for a, b in zip(edges, edges[1:]):
        m = 0.5 * (a + b)
        if not any(x < m < y for x, y in bad):
            out.append((a, b))
    return out


class _AlphaProblem:
    """Shape solve at fixed alpha, with warm starts between calls."""

    def __init__(self, params: SystemParams):
        self.params = params
        self.last = None

    def shape(self, alpha: float):
        p = self.params
        wx2, wy2 = dressed_frequencies(alpha, p.omega)
        if wx2 <= 0 or wy2 <= 0:
            return None
        g2 = p.gamma ** 2
        if p.eps_dd == 0.0:
            return g2 / wx2, g2 / wy2
        if self.last is None:
            seed = np.log([math.sqrt(g2 / wx2), math.sqrt(g2 / wy2)])
        else:
            seed = self.last

        def fun(u):
            if np.max(np.abs(u)) > _LOG_KAPPA_MAX:
                return None
            kx, ky = math.exp(u[0]), math.exp(u[1])
            z, cx, cy, _, _ = _shape_terms(kx, ky, p.eps_dd)
            if z <= 0:
                return None
            return np.array([(z * wx2 * kx * kx - g2 * cx) / g2,
                             (z * wy2 * ky * ky - g2 * cy) / g2])

        def accept(u):
            f = fun(u)
            return f is not None and np.max(np.abs(f)) <= 1e-13

        try:
            u, _ = _newton(fun, seed, 0, 60, accept)
        except ConvergenceError:
            if self.last is None:
                return None
            self.last = None
            return self.shape(alpha)
        self.last = u
        return math.exp(2 * u[0]), math.exp(2 * u[1])

    def h(self, alpha: float) -> float:
        s = self.shape(alpha)
        if s is None:
            return math.nan
        kx2, ky2 = s
        om = self.params.omega
        # continuity condition, normalised so that h is O(alpha - alpha*)
        return ((alpha + om) / kx2 + (alpha - om) / ky2) / (1.0 / kx2 + 1.0 / ky2)


def alpha_roots(params: SystemParams, n_scan: int = 400, lo: float = -3.0,
                hi: float = 3.0) -> list[float]:
    """All stationary alphas at ``params`` found by scanning h(alpha)."""
    params.require_solver_range()
    roots = []
    for a, b in valid_alpha_window(params.omega, lo, hi):
        pad = 1e-9 * max(1.0, abs(b - a))
        grid = np.linspace(a + pad, b - pad, max(8, int(n_scan * (b - a) / (hi - lo))))
        prob = _AlphaProblem(params)
        vals = np.array([prob.h(x) for x in grid])
        for x0, x1, v0, v1 in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
            if not (np.isfinite(v0) and np.isfinite(v1)):
                continue
            if v0 == 0.0:
                roots.append(float(x0))
            elif v0 * v1 < 0:
                p2 = _AlphaProblem(params)
                roots.append(float(optimize.brentq(p2.h, x0, x1, xtol=1e-14, rtol=1e-14)))
    return sorted(set(roots))


def stationary_states(params: SystemParams, n_scan: int = 400) -> list[TFState]:
    """Every stationary state at ``params`` found by the alpha scan, sorted by alpha.

    Each root of h(alpha) is polished by the Newton solve in (kx, ky).
    """
    out = []
    for a in alpha_roots(params, n_scan=n_scan):
        shape = _AlphaProblem(params).shape(a)
        if shape is None:
            continue
        try:
            kx, ky, _ = solve_shape(params, (math.sqrt(shape[0]), math.sqrt(shape[1])))
        except (ConvergenceError, UnstableRegimeError):
            continue
        st = make_tf_state(kx, ky, params)
        if all(abs(st.alpha - o.alpha) > 1e-9 for o in out):
            out.append(st)
    return sorted(out, key=lambda s: s.alpha)


def _pair_exists(eps, gamma, omega, n_scan=80):
    """Whether the alpha < 0 solution pair exists at this rotation rate."""
    params = SystemParams(gamma=gamma, omega=omega, eps_dd=eps)
    if eps == 0.0:
        # h(alpha) = alpha (1 + alpha^2 - 2 W^2) * const: nonzero root iff W > 1/sqrt 2
        prob = _AlphaProblem(params)
        return prob.h(-1e-9) > 0.0
    prob = _AlphaProblem(params)
    lo = -min(omega, 1.0) * 0.999 if omega < 1 else -1.0
    grid = np.linspace(lo, -1e-6, n_scan)[::-1]
    vals = np.array([prob.h(x) for x in grid])
    finite = np.isfinite(vals)
    if np.any(vals[finite] >= 0.0):
        return True
    # the pair is born where a local maximum of h touches zero
    i = int(np.nanargmax(np.where(finite, vals, -np.inf)))
    if i in (0, len(grid) - 1):
        return False
    a, b = sorted((grid[i - 1], grid[i + 1]))
    p2 = _AlphaProblem(params)
    res = optimize.minimize_scalar(lambda x: -p2.h(x), bounds=(a, b), method="bounded",
                                   options={"xatol": 1e-12})
    return -res.fun >= 0.0


def find_bifurcation(eps_dd: float, gamma: float, window=(0.5, 1.0), tol: float = 1e-7) -> float:
    """Rotation rate Omega_b at which the extra alpha < 0 pair of branches appears.

    Bisection on the existence of the pair inside ``window``.
    """
    if not (0.0 <= eps_dd < 1.0):
        raise DomainError("eps_dd must lie in [0, 1)")
    lo, hi = window
    hi_eval = hi - 1e-9
    if _pair_exists(eps_dd, gamma, lo) or not _pair_exists(eps_dd, gamma, hi_eval):
        # locate a bracket with a coarse scan first
        grid = np.linspace(lo, hi_eval, 41)
        flags = [_pair_exists(eps_dd, gamma, w) for w in grid]
        idx = [i for i in range(1, len(grid)) if flags[i] and not flags[i - 1]]
        if not idx:
            raise NotFoundError(f"no bifurcation in Omega window {window}")
        lo, hi_eval = grid[idx[0] - 1], grid[idx[0]]
    a, b = lo, hi_eval
    while b - a > tol:
        m = 0.5 * (a + b)
        if _pair_exists(eps_dd, gamma, m):
            b = m
        else:
            a = m
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# time-averaged comparison
# ---------------------------------------------------------------------------

def time_averaged_residual(kappa: float, eps_eff: float, gamma: float) -> float:
    """Residual of the cylindrically symmetric shape equation for z-polarised dipoles.

    3 eps kappa^2 [(1 + gamma^2/2) f(kappa)/(1 - kappa^2) - 1] + (1 - eps)(gamma^2 - kappa^2),
    with the removable 0/0 at kappa = 1 handled through f's series.
    """
    k2 = kappa * kappa
    return (3.0 * eps_eff * k2 * ((1.0 + 0.5 * gamma ** 2) * f_kappa_over_gap(kappa) - 1.0)
            + (1.0 - eps_eff) * (gamma ** 2 - k2))


def time_averaged_kappa(eps_eff: float, gamma: float, tol: float = 1e-12) -> float:
    """Aspect ratio of the time-averaged (z-polarised) Thomas-Fermi condensate.

    ``eps_eff`` is the effective dipolar ratio of the averaged interaction;
    for in-plane rotating dipoles pass -eps_dd / 2.
    """
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    if eps_eff == 0.0:
        return float(gamma)
    fun = lambda lk: time_averaged_residual(math.exp(lk), eps_eff, gamma)
    pts = np.linspace(math.log(1e-4), math.log(1e4), 801)
    vals = np.array([fun(x) for x in pts])
    brackets = [(pts[i], pts[i + 1]) for i in range(len(pts) - 1) if vals[i] * vals[i + 1] < 0]
    if not brackets:
        raise NotFoundError(f"no time-averaged root for eps_eff={eps_eff}, gamma={gamma}")
    # the root continuously connected to kappa = gamma at eps_eff = 0
    a, b = min(brackets, key=lambda ab: abs(0.5 * (ab[0] + ab[1]) - math.log(gamma)))
    root = optimize.brentq(fun, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return math.exp(root)


def kappa_perp(kx: float, ky: float) -> float:
    """Time-averaged transverse aspect ratio sqrt(2) (kx^-2 + ky^-2)^(-1/2)."""
    if not (kx > 0 and ky > 0):
        raise DomainError("aspect ratios must be positive")
    return math.sqrt(2.0) / math.sqrt(kx ** -2 + ky ** -2)


# ---------------------------------------------------------------------------
# branch families over an Omega grid
# ---------------------------------------------------------------------------

def omega_branches(params: SystemParams, omegas: Sequence[float]) -> list[BranchCurve]:
    """All stationary branches over an ascending Omega grid at fixed eps_dd, gamma.

    The first branch is the one adiabatically connected to the eps_dd = 0
    symmetric state at the lowest Omega; past the bifurcation point the two
    additional branches are seeded from the alpha scan at the first grid
    point above Omega_b and labelled by alpha (lower = more negative).
    """
    omegas = sorted(float(w) for w in omegas)
    if not omegas:
        raise DomainError("empty Omega grid")
    if omegas[0] < 0:
        raise DomainError("Omega must be non-negative")
    params.require_solver_range()
    seed = solve_on_eps_branch(params.with_(omega=omegas[0]))
    main = continue_branch(params, omegas, seed, SWEEP_OMEGA, "alpha0-continuation")
    out = [main]
    try:
        om_b = find_bifurcation(params.eps_dd, params.gamma)
    except NotFoundError:
        return out
    above = [w for w in omegas if w > om_b]
    if not above:
        return out
    start = above[0]
    states = stationary_states(params.with_(omega=start))
    on_main = dict(main.samples).get(start)
    if on_main is not None:
        states = [s for s in states if abs(s.alpha - on_main.alpha) > 1e-7]
    labels = ["bifurcated-lower", "bifurcated-upper"] if len(states) >= 2 else ["bifurcated-upper"]
    for label, st in zip(labels, states[:2]):
        try:
            out.append(continue_branch(params, above, st, SWEEP_OMEGA, label))
        except ConvergenceError as exc:
            log.warning("branch %s could not be continued: %s", label, exc)
    return out
