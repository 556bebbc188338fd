import math

import numpy as np
import pytest

from rotbec.core_model import (BetaIndex, SystemParams, beta_integral, beta_integrals,
                               dressed_frequencies, f_kappa, f_kappa_over_gap, make_tf_state,
                               tf_density, tf_phase, tf_radius_and_mu, weighted_beta_table, zeta)
from rotbec.errors import DomainError
from rotbec.stability import EllipsoidPoly, ellipsoid_potential

from oracles import beta_mp, f_kappa_mp


# ------------------------------------------------------------------ beta

def test_beta_closed_form_examples():
    assert beta_integral((1, 0, 1), 1.0, 1.0) == pytest.approx(0.4, rel=1e-12)
    assert beta_integral((0, 0, 0), 1.0, 1.0) == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("idx", [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (2, 1, 3),
                                 (4, 4, 4)])
def test_beta_unit_kappas_closed_form(idx):
    assert beta_integral(idx, 1.0, 1.0) == pytest.approx(1.0 / (sum(idx) + 0.5), rel=1e-12)


@pytest.mark.parametrize("idx,kx,ky", [
    ((2, 0, 0), 2.0, 0.5),
    ((1, 0, 1), 1.3, 0.7),
    ((0, 0, 0), 0.2, 5.0),
    ((1, 1, 1), 3.0, 0.4),
    ((0, 2, 1), 0.05, 0.9),
    ((3, 0, 2), 12.0, 7.0),
])
def test_beta_matches_mpmath_oracle(idx, kx, ky):
    assert beta_integral(idx, kx, ky) == pytest.approx(beta_mp(*idx, kx, ky), rel=1e-10)


def test_beta_vectorised_matches_single():
    idx = [(0, 0, 0), (1, 2, 0), (2, 0, 3)]
    many = beta_integrals(idx, 1.7, 0.6)
    assert np.allclose(many, [beta_integral(i, 1.7, 0.6) for i in idx], rtol=1e-14, atol=0)


def test_beta_index_namedtuple_accepted():
    assert beta_integral(BetaIndex(1, 0, 1), 1.0, 1.0) == pytest.approx(0.4)


@pytest.mark.parametrize("bad", [(0.0, 1.0), (-1.0, 1.0), (1.0, float("nan"))])
def test_beta_rejects_nonpositive_kappa(bad):
    with pytest.raises(DomainError):
        beta_integral((1, 0, 0), *bad)


def test_beta_rejects_negative_index():
    with pytest.raises(DomainError):
        beta_integral((-1, 0, 0), 1.0, 1.0)


def test_weighted_table_definition():
    e = np.array([[0, 0, 0], [1, 0, 0], [2, 1, 1]])
    kx, ky = 1.4, 0.8
    t = weighted_beta_table(e, kx, ky)
    ref = [kx * ky / 4 * kx ** (2 * a) * ky ** (2 * b) * beta_mp(a, b, c, kx, ky) for a, b, c in e]
    assert np.allclose(t, ref, rtol=1e-10, atol=0)


# ------------------------------------------------------------------ f(kappa)

def test_f_kappa_limits():
    assert f_kappa(1e-8) == pytest.approx(1.0, abs=1e-12)
    assert f_kappa(1.0) == 0.0
    assert f_kappa(1e6) == pytest.approx(-2.0, abs=1e-5)


@pytest.mark.parametrize("kappa", [0.1, 0.5, 0.9, 0.97, 0.999, 1.001, 1.04, 1.3, 2.0, 10.0])
def test_f_kappa_matches_extended_precision(kappa):
    assert f_kappa(kappa) == pytest.approx(f_kappa_mp(kappa), abs=1e-13, rel=1e-12)


def test_f_kappa_example_half():
    assert f_kappa(0.5) == pytest.approx(0.4792, abs=2e-4)


def test_f_kappa_continuous_at_one():
    for d in (1e-4, 1e-6, 1e-9):
        assert abs(f_kappa(1 + d)) <= 2 * d
        assert abs(f_kappa(1 - d)) <= 2 * d


def test_f_kappa_monotone_decreasing():
    ks = np.geomspace(1e-3, 1e3, 400)
    vals = np.array([f_kappa(k) for k in ks])
    assert np.all(np.diff(vals) < 0)


def test_f_over_gap_at_one():
    assert f_kappa_over_gap(1.0) == pytest.approx(0.4, rel=1e-14)
    assert f_kappa_over_gap(1.2) == pytest.approx(f_kappa(1.2) / (1 - 1.44), rel=1e-12)


def test_f_kappa_domain():
    with pytest.raises(DomainError):
        f_kappa(0.0)


# ------------------------------------------------------------------ simple maps

def test_dressed_frequency_examples():
    assert dressed_frequencies(0.0, 3.0) == (1.0, 1.0)
    assert dressed_frequencies(1.0, 1.0) == (0.0, 4.0)
    a = -math.sqrt(0.62)
    wx2, wy2 = dressed_frequencies(a, 0.9)
    assert wx2 == pytest.approx(3.0373, abs=1e-4)
    assert wy2 == pytest.approx(0.2027, abs=1e-4)


def test_zeta_examples():
    assert zeta(1.0, 1.0, 0.0) == 1.0
    assert zeta(1.0, 1.0, 0.5) == pytest.approx(0.8, rel=1e-12)
    ref = 1 + 0.4 * (1.5 * 1.3 * 0.7 * beta_mp(1, 0, 1, 1.3, 0.7) - 1)
    assert zeta(1.3, 0.7, 0.4) == pytest.approx(ref, rel=1e-11)


# ------------------------------------------------------------------ TF closure

def test_tf_density_peak_surface_and_norm():
    st = make_tf_state(1.2, 0.9, SystemParams(1.0, 0.5, 0.3))
    rx, ry, rz = st.semi_axes
    assert tf_density(st, [0, 0, 0]) == st.n0
    assert tf_density(st, [rx, 0, 0]) == 0.0
    assert tf_density(st, [0, 0, 1.01 * rz]) == 0.0
    # Monte-Carlo-free norm check: midpoint rule over the bounding box
    n = 96
    axes = [np.linspace(-s, s, n, endpoint=False) + s / n for s in (rx, ry, rz)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), -1)
    vol = 8 * rx * ry * rz / n ** 3
    assert np.sum(tf_density(st, pts)) * vol == pytest.approx(1.0, rel=2e-3)


def test_tf_density_random_interior_point():
    st = make_tf_state(1.1, 0.8, SystemParams(2.0, 0.0, 0.2))
    rng = np.random.default_rng(5)
    rx, ry, rz = st.semi_axes
    p = rng.uniform(-0.5, 0.5, 3) * np.array([rx, ry, rz])
    ref = st.n0 * (1 - (p[0] / rx) ** 2 - (p[1] / ry) ** 2 - (p[2] / rz) ** 2)
    assert tf_density(st, p) == pytest.approx(ref, rel=1e-14)


def test_tf_phase_is_alpha_xy():
    st = make_tf_state(1.2, 0.9, SystemParams(1.0, 2.0, 0.1))
    assert tf_phase(st, [0.3, -0.7, 2.0]) == pytest.approx(st.alpha * 0.3 * -0.7)


def test_closure_without_dipoles():
    p = SystemParams(1.0, 0.0, 0.0, 1500.0)
    rz, n0, mu = tf_radius_and_mu(1.0, 1.0, p)
    assert rz == pytest.approx((15 * 1500 / (4 * math.pi)) ** 0.2, rel=1e-14)
    assert mu == pytest.approx(1500 * n0, rel=1e-14)
    assert mu == pytest.approx(0.5 * rz ** 2, rel=1e-13)
    assert n0 == pytest.approx(15 / (8 * math.pi * rz ** 3), rel=1e-14)


def test_closure_with_dipoles_matches_potential_route():
    """mu from the beta formula equals g n0 + dipolar potential at the centre.

    The dipolar mean field of a polarised paraboloid is
    -C_dd (d^2 phi / dx^2 + n / 3) with C_dd = 3 g eps_dd, so at the centre
    mu = g n0 (1 - eps) - 3 g eps phi_xx(0); phi comes from the polynomial
    ellipsoid-potential engine, an independent algebraic route.
    """
    kx, ky, eps, g = 1.2, 0.9, 0.4, 1500.0
    p = SystemParams(1.0, 0.0, eps, g)
    rz, n0, mu = tf_radius_and_mu(kx, ky, p)
    axes = (kx * rz, ky * rz, rz)
    dens = EllipsoidPoly({(0, 0, 0): n0, (2, 0, 0): -n0 / axes[0] ** 2,
                          (0, 2, 0): -n0 / axes[1] ** 2, (0, 0, 2): -n0 / axes[2] ** 2}, axes)
    phi = ellipsoid_potential(dens)
    phi_xx = 2.0 * phi.coeffs.get((2, 0, 0), 0.0)
    assert mu == pytest.approx(g * n0 * (1 - eps) - 3 * g * eps * phi_xx, rel=1e-10)
    assert rz ** 5 == pytest.approx(15 * g * zeta(kx, ky, eps) / (4 * math.pi * kx * ky), rel=1e-12)


def test_closure_errors():
    with pytest.raises(DomainError):
        tf_radius_and_mu(1.0, 1.0, SystemParams(1.0, 0.0, 1.0))
    with pytest.raises(DomainError):
        tf_radius_and_mu(1.0, 1.0, SystemParams(1.0, 0.0, 0.0, 0.0))


def test_zeta_positive_below_unit_eps():
    # zeta = (1 - eps) + eps (3/2) kx ky beta_101 > 0, so the closure never fails for eps < 1
    for kx, ky in [(20.0, 0.05), (0.05, 20.0), (1e-3, 1e-3)]:
        assert zeta(kx, ky, 0.999) > 0


def test_alpha_constraint_in_state():
    p = SystemParams(1.0, 2.5, 0.3)
    st = make_tf_state(1.3, 0.9, p)
    assert st.alpha == pytest.approx(2.5 * (1.69 - 0.81) / (1.69 + 0.81), rel=1e-14)


def test_params_validation():
    with pytest.raises(DomainError):
        SystemParams(gamma=0.0)
    with pytest.raises(DomainError):
        SystemParams(omega=-1.0)
    with pytest.raises(DomainError):
        SystemParams(eps_dd=float("inf"))
    with pytest.raises(DomainError):
        SystemParams(interaction_scale=-1.0)
    with pytest.raises(DomainError):
        SystemParams(eps_dd=1.0).require_solver_range()
    assert SystemParams().with_(omega=2.0).omega == 2.0
