"""Numba-compiled implementations of the hot numeric kernels.

Twin of :mod:`plasmon_shift._kernels_numpy`; selected by default when numba
imports (``PLASMON_SHIFT_BACKEND`` overrides).  Each grid point is evaluated
serially inside its own prange iteration, so results are deterministic and
bit-compatible with the numpy path up to floating-point associativity of
identical operation order.
"""

import cmath

import numpy as np
from numba import njit, prange

from .constants import HBARC_EV_NM

_TINY = 1e-300
_SMALL_PHASE = 1e-3


@njit(cache=True)
def _j_ratio_sweep(x, n_top, out):
    start = n_top + 24 + int(abs(x))
    r = x / (2 * start + 1)
    for k in range(start, 0, -1):
        if k <= n_top:
            out[k] = r
        denom = (2 * k - 1) / x - r
        if denom == 0:
            denom = _TINY + 0j
        r = 1.0 / denom


@njit(cache=True)
def _mie_series_point(z, eps2, eps1, radius_nm, emitter_radius_nm, tail_tol, n_cap):
    k1 = cmath.sqrt(eps1 + 0j) * z / HBARC_EV_NM
    k2 = cmath.sqrt(eps2) * z / HBARC_EV_NM
    x1 = k1 * radius_nm
    x2 = k2 * radius_nm
    rho = k1 * emitter_radius_nm
    m = k2 / k1

    n_top = n_cap
    r1 = np.empty(n_top + 1, dtype=np.complex128)
    r2 = np.empty(n_top + 1, dtype=np.complex128)
    _j_ratio_sweep(x1, n_top, r1)
    _j_ratio_sweep(x2, n_top, r2)

    j0_x1 = cmath.sin(x1) / x1
    h0_rho = -1j * cmath.exp(1j * rho) / rho
    h0_x1 = -1j * cmath.exp(1j * x1) / x1
    jh = j0_x1 * h0_rho
    hr = h0_rho / h0_x1

    total = 0.0 + 0.0j
    small_run = 0
    q_rho = 0.0 + 0.0j
    q_x1 = 0.0 + 0.0j
    # Terms decay like (a/r0)^(2n); the stop rule bounds the geometric tail,
    # not just the last term, so the tolerance covers the truncated remainder.
    decay = (radius_nm / emitter_radius_nm) ** 2
    tail_factor = decay / (1.0 - decay)
    for n in range(1, n_top + 1):
        if n == 1:
            q_rho = 1.0 / rho - 1j
            q_x1 = 1.0 / x1 - 1j
        else:
            q_rho = (2 * n - 1) / rho - 1.0 / q_rho
            q_x1 = (2 * n - 1) / x1 - 1.0 / q_x1
        jh = jh * (r1[n] * q_rho)
        hr = hr * (q_rho / q_x1)
        dpsi2 = 1.0 / r2[n] - n / x2
        dpsi1 = 1.0 / r1[n] - n / x1
        dxi1 = 1.0 / q_x1 - n / x1
        refl = (dpsi2 - m * dpsi1) / (m * dxi1 - dpsi2)
        term = (n * (n + 1) * (2 * n + 1)) * jh * hr * refl / (rho * rho)
        total = total + term
        bound = abs(total)
        if bound < _TINY:
            bound = _TINY
        if abs(term) * tail_factor <= tail_tol * bound:
            small_run += 1
        else:
            small_run = 0
        if small_run >= 3 and n >= 4:
            return total, n, True
    return total, n_top, False


@njit(cache=True, parallel=True)
def mie_series_grid(z, eps2, eps1, radius_nm, emitter_radius_nm, tail_tol, n_cap):
    npts = z.size
    out = np.empty(npts, dtype=np.complex128)
    n_used = np.empty(npts, dtype=np.int64)
    converged = np.empty(npts, dtype=np.bool_)
    for i in prange(npts):
        total, n, ok = _mie_series_point(
            z[i], eps2[i], eps1, radius_nm, emitter_radius_nm, tail_tol, n_cap
        )
        out[i] = total
        n_used[i] = n
        converged[i] = ok
    return out, n_used, converged


@njit(cache=True)
def volterra_march(kernel, dt):
    npts = kernel.size
    c = np.empty(npts, dtype=np.complex128)
    c[0] = 1.0 + 0.0j
    implicit = 1.0 + 0.5 * dt * kernel[0]
    for k in range(1, npts):
        acc = 0.5 * kernel[k] * c[0]
        for j in range(1, k):
            acc += kernel[k - j] * c[j]
        c[k] = (1.0 - dt * acc) / implicit
    return c


@njit(cache=True)
def _panel_weights_scalar(mu):
    if abs(mu) < _SMALL_PHASE:
        w0 = 0.5 - 1j * mu / 6.0 - mu**2 / 24.0 + 1j * mu**3 / 120.0 + mu**4 / 720.0
        w1 = 0.5 - 1j * mu / 3.0 - mu**2 / 8.0 + 1j * mu**3 / 30.0 + mu**4 / 144.0
        return w0, w1
    e = cmath.exp(-1j * mu)
    phi0 = (1.0 - e) / (1j * mu)
    w1 = (phi0 - e) / (1j * mu)
    return phi0 - w1, w1


@njit(cache=True, parallel=True)
def filon_transform(omega, values, t_nat, omega0):
    nt = t_nat.size
    npanel = omega.size - 1
    out = np.empty(nt, dtype=np.complex128)
    for i in prange(nt):
        t = t_nat[i]
        acc = 0.0 + 0.0j
        for j in range(npanel):
            h = omega[j + 1] - omega[j]
            w0, w1 = _panel_weights_scalar(h * t)
            phase = cmath.exp(-1j * (omega[j] - omega0) * t)
            acc += h * phase * (values[j] * w0 + values[j + 1] * w1)
        out[i] = acc
    return out


@njit(cache=True)
def _osc_factor_scalar(delta, tau):
    x = delta * tau
    if abs(x) < _SMALL_PHASE:
        return tau * (1.0 - 1j * x / 2.0 - x**2 / 6.0 + 1j * x**3 / 24.0 + x**4 / 120.0)
    return (1.0 - cmath.exp(-1j * x)) / (1j * delta)


@njit(cache=True, parallel=True)
def memory_kernel_quad(omega, weights, spectral_density, omega0, tau_nat):
    nt = tau_nat.size
    npts = omega.size
    out = np.empty(nt, dtype=np.complex128)
    for i in prange(nt):
        tau = tau_nat[i]
        acc = 0.0 + 0.0j
        for j in range(npts):
            acc += weights[j] * spectral_density[j] * _osc_factor_scalar(
                omega[j] - omega0, tau
            )
        out[i] = acc
    return out
