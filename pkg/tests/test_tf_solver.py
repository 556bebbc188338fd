import math

import numpy as np
import pytest

from rotbec.core_model import SystemParams, make_tf_state
from rotbec.errors import ConvergenceError, DomainError, NotFoundError
from rotbec.tf_solver import (SWEEP_EPS, SWEEP_OMEGA, BranchCurve, alpha_roots, consistency_residuals,
                              continue_branch, eps_continuation, find_bifurcation, kappa_perp,
                              omega_branches, residuals_of, solve_consistency, solve_on_eps_branch,
                              solve_shape, stationary_states, time_averaged_kappa,
                              time_averaged_residual)


def _newton_states(params, n_seed=9):
    """Distinct solutions reached by Newton in (kx, ky) from a grid of seeds."""
    found = []
    for a in np.geomspace(0.3, 3.0, n_seed):
        for b in np.geomspace(0.3, 3.0, n_seed):
            try:
                kx, ky, _ = solve_shape(params, (a, b))
            except (ConvergenceError, DomainError):
                continue
            if all(abs(kx - x) + abs(ky - y) > 1e-6 for x, y in found):
                found.append((kx, ky))
    return found


# ------------------------------------------------------------ residuals

def test_residuals_vanish_for_isotropic_state():
    for om in (0.0, 5.0):
        r = consistency_residuals(1.0, 1.0, 0.0, SystemParams(1.0, om, 0.0))
        assert r.max_abs() == 0.0


def test_residuals_at_converged_dipolar_state():
    p = SystemParams(1.0, 3.0, 0.4)
    st = solve_on_eps_branch(p)
    assert residuals_of(st, p).max_abs() <= 1e-10
    assert st.alpha == pytest.approx(3.0 * (st.kappa_x ** 2 - st.kappa_y ** 2)
                                     / (st.kappa_x ** 2 + st.kappa_y ** 2), abs=1e-15)


def test_residual_domain():
    with pytest.raises(DomainError):
        consistency_residuals(0.0, 1.0, 0.0, SystemParams())


# ------------------------------------------------------------ single solves

def test_bifurcated_state_without_dipoles():
    st = solve_consistency(SystemParams(1.0, 0.9, 0.0), (1.5, 0.8, 0.5))
    assert st.alpha == pytest.approx(math.sqrt(2 * 0.81 - 1), abs=1e-9)
    lower = solve_consistency(SystemParams(1.0, 0.9, 0.0), (0.8, 1.5, -0.5))
    assert lower.alpha == pytest.approx(-math.sqrt(2 * 0.81 - 1), abs=1e-9)


def test_below_bifurcation_only_symmetric_root():
    p = SystemParams(1.0, 0.5, 0.0)
    for seed in [(1.4, 0.7), (0.7, 1.4), (1.0, 1.0), (2.0, 2.0)]:
        st = solve_consistency(p, seed)
        assert st.alpha == pytest.approx(0.0, abs=1e-10)
        assert st.kappa_x == pytest.approx(1.0, abs=1e-10)
    assert len(_newton_states(p)) == 1


def test_static_dipoles_elongate_along_polarisation():
    # at Omega = 0 alpha vanishes but the dipoles along x stretch the cloud along x
    st = solve_on_eps_branch(SystemParams(1.0, 0.0, 0.4))
    assert st.alpha == 0.0
    assert st.kappa_x > st.kappa_y


def test_fast_rotation_state_has_negative_alpha():
    # at Omega = 3 > 1 only one stationary state survives, on the alpha < 0 side
    p = SystemParams(1.0, 3.0, 0.4)
    states = stationary_states(p)
    assert len(states) == 1
    assert states[0].alpha < 0 and states[0].kappa_x < states[0].kappa_y
    for kx, ky in _newton_states(p, n_seed=7):
        assert make_tf_state(kx, ky, p).alpha == pytest.approx(states[0].alpha, abs=1e-9)


def test_shape_is_scale_free():
    a = solve_on_eps_branch(SystemParams(1.0, 2.0, 0.3, 1500.0))
    b = solve_on_eps_branch(SystemParams(1.0, 2.0, 0.3, 40.0))
    assert (a.kappa_x, a.kappa_y, a.alpha) == pytest.approx((b.kappa_x, b.kappa_y, b.alpha),
                                                            abs=1e-13)
    assert a.r_z != b.r_z


def test_solver_rejects_eps_out_of_range():
    with pytest.raises(DomainError):
        solve_consistency(SystemParams(1.0, 1.0, 1.0), (1.0, 1.0))


def test_dead_seed_is_a_convergence_error():
    # a seed with a negative dressed frequency lies outside the physical region
    with pytest.raises(ConvergenceError):
        solve_shape(SystemParams(1.0, 3.0, 0.1), (3.0, 0.3))


# ------------------------------------------------------------ continuation

def test_nondipolar_branch_closed_form_and_termination():
    om = np.linspace(0.75, 0.999, 40)
    p = SystemParams(1.0, 0.0, 0.0)
    c = continue_branch(p, om, solve_consistency(p.with_(omega=0.75), (1.5, 0.8, 0.5)))
    assert isinstance(c, BranchCurve) and c.sweep_kind == SWEEP_OMEGA
    assert np.max(np.abs(c.alphas - np.sqrt(2 * c.values ** 2 - 1))) <= 1e-8
    assert max(c.residuals) <= 1e-10
    beyond = continue_branch(p, np.linspace(0.95, 1.05, 11), c.samples[-5][1])
    assert beyond.terminated_at == pytest.approx(1.0, abs=1e-3)
    assert "dressed frequency" in beyond.termination_reason


def test_negative_branch_terminates_at_unit_rotation():
    p = SystemParams(1.0, 0.0, 0.0)
    seed = solve_consistency(p.with_(omega=0.8), (0.8, 1.5, -0.5))
    c = continue_branch(p, np.linspace(0.8, 1.2, 41), seed)
    assert c.terminated_at == pytest.approx(1.0, abs=1e-3)
    wx2 = 1 + c.alphas[-1] ** 2 - 2 * c.alphas[-1] * c.values[-1]
    wy2 = 1 + c.alphas[-1] ** 2 + 2 * c.alphas[-1] * c.values[-1]
    assert wy2 < 0.05 < wx2


def test_continuation_requires_monotone_grid():
    p = SystemParams(1.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        continue_branch(p, [0.1, 0.3, 0.2], (1.0, 1.0))
    with pytest.raises(DomainError):
        continue_branch(p, [], (1.0, 1.0))


def test_eps_continuation_keeps_requested_points():
    p = SystemParams(1.0, 3.0, 0.0)
    c = eps_continuation(p, [0.1, 0.37])
    assert c.sweep_kind == SWEEP_EPS
    assert [v for v, _ in c.samples] == [0.1, 0.37]
    assert max(c.residuals) <= 1e-10


def test_main_branch_with_dipoles_ends_below_unit_rotation():
    bs = omega_branches(SystemParams(1.0, 0.0, 0.2), np.linspace(0.0, 6.0, 25))
    main = bs[0]
    assert main.branch_id == "alpha0-continuation"
    assert np.all(main.alphas[main.values > 0] > 0)
    assert main.terminated_at == pytest.approx(1.0, abs=1e-3)


def test_branch_family_structure_with_dipoles():
    bs = {b.branch_id: b for b in omega_branches(SystemParams(1.0, 0.0, 0.4),
                                                  np.linspace(0.0, 6.0, 61))}
    assert set(bs) == {"alpha0-continuation", "bifurcated-lower", "bifurcated-upper"}
    lower, upper = bs["bifurcated-lower"], bs["bifurcated-upper"]
    assert np.all(lower.alphas < 0) and np.all(upper.alphas < 0)
    assert lower.terminated_at is not None and lower.terminated_at < 1.0 + 1e-3
    # the smaller-|alpha| member persists to fast rotation
    assert upper.terminated_at is None and upper.values[-1] == 6.0
    assert upper.alphas[-1] == pytest.approx(stationary_states(
        SystemParams(1.0, 6.0, 0.4))[0].alpha, abs=1e-9)


def test_branch_family_without_dipoles_is_symmetric():
    bs = {b.branch_id: b for b in omega_branches(SystemParams(1.0, 0.0, 0.0),
                                                  np.linspace(0.0, 3.0, 31))}
    assert np.all(bs["alpha0-continuation"].alphas == 0.0)
    lo, up = bs["bifurcated-lower"], bs["bifurcated-upper"]
    assert np.allclose(lo.alphas, -up.alphas, atol=1e-9)
    assert np.allclose(up.alphas, np.sqrt(2 * up.values ** 2 - 1), atol=1e-8)


def test_symmetry_restored_at_fast_rotation():
    p = SystemParams(1.0, 10.0, 0.5)
    seed = solve_on_eps_branch(p)
    om = np.linspace(10.0, 40.0, 7)
    c = continue_branch(p, om, seed)
    a = np.abs(c.alphas)
    assert np.all(np.diff(a) < 0)
    ratio = np.array([s.kappa_x / s.kappa_y for _, s in c.samples])
    assert np.all(np.diff(np.abs(ratio - 1)) < 0)


# ------------------------------------------------------------ bifurcation

def test_bifurcation_without_dipoles():
    assert find_bifurcation(0.0, 1.0) == pytest.approx(1 / math.sqrt(2), abs=1e-6)
    assert find_bifurcation(0.0, 2.0) == pytest.approx(1 / math.sqrt(2), abs=1e-6)


def test_bifurcation_with_dipoles_matches_newton_count():
    ob = find_bifurcation(0.4, 1.0)
    assert 0.7 < ob < 1.0
    below = _newton_states(SystemParams(1.0, ob - 5e-3, 0.4))
    above = _newton_states(SystemParams(1.0, ob + 5e-3, 0.4))
    assert len(below) == 1
    assert len(above) == 3
    assert len(alpha_roots(SystemParams(1.0, ob + 5e-3, 0.4))) == 3


def test_bifurcation_not_found_and_domain():
    with pytest.raises(NotFoundError):
        find_bifurcation(0.0, 1.0, window=(0.1, 0.6))
    with pytest.raises(DomainError):
        find_bifurcation(1.0, 1.0)


# ------------------------------------------------------------ time-averaged comparator

def test_time_averaged_kappa_examples():
    for g in (0.5, 1.0, 2.0):
        assert time_averaged_kappa(0.0, g) == g
    assert time_averaged_kappa(-0.2, 1.0) > 1.0
    k = time_averaged_kappa(-0.3, 0.5)
    assert abs(time_averaged_residual(k, -0.3, 0.5)) <= 1e-10


def test_kappa_perp_examples():
    assert kappa_perp(1.7, 1.7) == pytest.approx(1.7, rel=1e-15)
    assert kappa_perp(1.0, math.sqrt(2)) == pytest.approx(1.15470, abs=1e-5)
    with pytest.raises(DomainError):
        kappa_perp(0.0, 1.0)


def test_fast_rotation_matches_time_average():
    st = solve_on_eps_branch(SystemParams(1.0, 50.0, 0.6))
    assert kappa_perp(st.kappa_x, st.kappa_y) == pytest.approx(
        time_averaged_kappa(-0.3, 1.0), abs=1e-2)
