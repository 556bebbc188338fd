"""Independent reference computations used by the test-suite.

Nothing here calls into the code paths it is used to check: the beta
integrals go through mpmath on the original semi-infinite form, the
ellipsoid potential through a direct spherical-coordinate quadrature
centred on the evaluation point, and the cut-off kernel through a
one-dimensional Bessel integral.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy import integrate, special


def beta_mp(i, j, k, kx, ky, dps=30):
    """beta_ijk by mpmath tanh-sinh quadrature on [0, inf)."""
    with mp.workdps(dps):
        kx2, ky2 = mp.mpf(kx) ** 2, mp.mpf(ky) ** 2
        f = lambda c: ((c + kx2) ** (-i - mp.mpf(1) / 2) * (c + ky2) ** (-j - mp.mpf(1) / 2)
                       * (c + 1) ** (-k - mp.mpf(1) / 2))
        return float(mp.quad(f, [0, 1, 10, 100, mp.inf]))


def f_kappa_mp(kappa, dps=40):
    """Dipolar shape function evaluated in extended precision (either branch)."""
    with mp.workdps(dps):
        k2 = mp.mpf(kappa) ** 2
        w = 1 - k2
        u = mp.sqrt(w)  # complex for kappa > 1; atanh(u)/u stays real
        val = (1 + 2 * k2) / w - 3 * k2 * mp.atanh(u) / (u * w)
        return float(mp.re(val))


def potential_oracle(coeffs, axes, r, n_ang=(48, 96)):
    """(1/4 pi) int_ellipsoid rho(s) / |r - s| d^3 s for an interior point r.

    Spherical coordinates centred at r: the radial integrand s rho(r + s u)
    is a polynomial in s and is integrated exactly by Gauss-Legendre up to
    the ellipsoid surface; the angular integral uses Gauss-Legendre in
    cos(theta) times the trapezoid rule in phi.
    """
    a = np.asarray(axes, float)
    r = np.asarray(r, float)
    deg = max(sum(k) for k in coeffs)
    xc, wc = np.polynomial.legendre.leggauss(n_ang[0])
    ph = 2 * np.pi * np.arange(n_ang[1]) / n_ang[1]
    wp = 2 * np.pi / n_ang[1]
    st = np.sqrt(1 - xc ** 2)
    u = np.stack([st[:, None] * np.cos(ph), st[:, None] * np.sin(ph),
                  np.broadcast_to(xc[:, None], (len(xc), len(ph)))], -1)
    qa = np.sum((u / a) ** 2, -1)
    qb = 2 * np.sum(r * u / a ** 2, -1)
    qc = np.sum((r / a) ** 2) - 1
    reach = (-qb + np.sqrt(qb * qb - 4 * qa * qc)) / (2 * qa)
    xs, ws = np.polynomial.legendre.leggauss(deg // 2 + 2)
    s = 0.5 * (xs + 1)[:, None, None] * reach
    w = 0.5 * ws[:, None, None] * reach
    pts = r + s[..., None] * u
    rho = sum(v * pts[..., 0] ** k[0] * pts[..., 1] ** k[1] * pts[..., 2] ** k[2]
              for k, v in coeffs.items())
    radial = np.sum(w * s * rho, 0)
    return float(np.sum(wc[:, None] * radial) * wp / (4 * np.pi))


def cutoff_bracket_integral(u):
    """The cut-off bracket 1 + 3 cos u / u^2 - 3 sin u / u^3 as 3 int_0^u j2(t)/t dt.

    The Bessel form follows from the plane-wave expansion of the truncated
    dipolar kernel and is integrated numerically with adaptive quadrature.
    """
    if u == 0:
        return 0.0
    val, _ = integrate.quad(lambda t: special.spherical_jn(2, t) / t if t > 0 else 0.0,
                            0.0, u, limit=400, epsabs=1e-14, epsrel=1e-13)
    return 3.0 * val


def tf_mode_frequencies(n_max_radial=2, l_max=4):
    """Isotropic-trap Thomas-Fermi collective frequencies sqrt(2n^2 + 2nl + 3n + l)."""
    out = set()
    for n in range(n_max_radial + 1):
        for l in range(l_max + 1):
            if n == 0 and l == 0:
                continue
            out.add(math.sqrt(2 * n * n + 2 * n * l + 3 * n + l))
    return sorted(out)
