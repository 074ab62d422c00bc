"""Pure-numpy implementations of the hot numeric kernels.

Selected by ``PLASMON_SHIFT_BACKEND=numpy`` (see :mod:`plasmon_shift.backend`);
semantically identical to the compiled twins in :mod:`plasmon_shift._kernels_numba`.

The multipole sums never form j_n or h_n values alone: at small size
parameter and large order those overflow/underflow individually while the
assembled series term stays of order (a/r0)^(2n).  Everything is built from
ratio recurrences and the bounded products j_n(x1)*h_n(rho) and
h_n(rho)/h_n(x1).
"""

import numpy as np

_MIE_CHUNK = 512
_TINY = 1e-300
_SMALL_PHASE = 1e-3


def _j_ratio_table(x, n_top):
    """R[n] = j_n(x)/j_{n-1}(x) for n = 1..n_top, vectorized over points."""
    npts = x.size
    table = np.empty((n_top + 1, npts), dtype=np.complex128)
    start = n_top + 24 + int(np.max(np.abs(x)))
    r = x / (2 * start + 1)
    for k in range(start, 0, -1):
        if k <= n_top:
            table[k] = r
        denom = (2 * k - 1) / x - r
        denom = np.where(denom == 0, _TINY, denom)
        r = 1.0 / denom
    return table


def mie_series_grid(z, eps2, eps1, radius_nm, emitter_radius_nm, tail_tol, n_cap):
    """Electric-multipole reflection series at the emitter location.

    Returns ``(series_sum, n_used, converged)`` where ``series_sum`` is
    sum_n n(n+1)(2n+1) B_n [h_n(k1 r0)/(k1 r0)]^2 per grid point.
    """
    z = np.ascontiguousarray(z, dtype=np.complex128)
    eps2 = np.ascontiguousarray(eps2, dtype=np.complex128)
    out = np.zeros(z.size, dtype=np.complex128)
    n_used = np.zeros(z.size, dtype=np.int64)
    converged = np.zeros(z.size, dtype=bool)
    for lo in range(0, z.size, _MIE_CHUNK):
        sl = slice(lo, min(lo + _MIE_CHUNK, z.size))
        out[sl], n_used[sl], converged[sl] = _mie_series_chunk(
            z[sl], eps2[sl], eps1, radius_nm, emitter_radius_nm, tail_tol, n_cap
        )
    return out, n_used, converged


def _mie_series_chunk(z, eps2, eps1, radius_nm, emitter_radius_nm, tail_tol, n_cap):
    from .constants import HBARC_EV_NM

    k1 = np.sqrt(eps1 + 0j) * z / HBARC_EV_NM
    k2 = np.sqrt(eps2) * z / HBARC_EV_NM
    x1 = k1 * radius_nm
    x2 = k2 * radius_nm
    rho = k1 * emitter_radius_nm
    m = k2 / k1

    n_top = int(n_cap)
    r1 = _j_ratio_table(x1, n_top)
    r2 = _j_ratio_table(x2, n_top)

    # Order-0 seeds; only ratios and bounded products appear afterwards.
    j0_x1 = np.sin(x1) / x1
    h0_rho = -1j * np.exp(1j * rho) / rho
    h0_x1 = -1j * np.exp(1j * x1) / x1
    jh = j0_x1 * h0_rho
    hr = h0_rho / h0_x1

    total = np.zeros_like(z)
    small_run = np.zeros(z.size, dtype=np.int64)
    done = np.zeros(z.size, dtype=bool)
    n_used = np.full(z.size, n_top, dtype=np.int64)
    q_rho = np.empty_like(z)
    q_x1 = np.empty_like(z)
    # Terms decay like (a/r0)^(2n); the unfinished tail exceeds the last
    # term by the geometric factor, which the stop rule must absorb so the
    # tolerance really bounds the truncated remainder.
    decay = (radius_nm / emitter_radius_nm) ** 2
    tail_factor = decay / (1.0 - decay)
    for n in range(1, n_top + 1):
        if n == 1:
            q_rho[:] = 1.0 / rho - 1j
            q_x1[:] = 1.0 / x1 - 1j
        else:
            q_rho[:] = (2 * n - 1) / rho - 1.0 / q_rho
            q_x1[:] = (2 * n - 1) / x1 - 1.0 / q_x1
        jh = jh * (r1[n] * q_rho)
        hr = hr * (q_rho / q_x1)
        dpsi2 = 1.0 / r2[n] - n / x2
        dpsi1 = 1.0 / r1[n] - n / x1
        dxi1 = 1.0 / q_x1 - n / x1
        refl = (dpsi2 - m * dpsi1) / (m * dxi1 - dpsi2)
        term = (n * (n + 1) * (2 * n + 1)) * jh * hr * refl / (rho * rho)
        total = np.where(done, total, total + term)
        tiny_term = np.abs(term) * tail_factor <= tail_tol * np.maximum(np.abs(total), _TINY)
        small_run = np.where(tiny_term, small_run + 1, 0)
        newly = (~done) & (small_run >= 3) & (n >= 4)
        n_used[newly] = n
        done |= newly
        if done.all():
            break
    return total, n_used, done


def volterra_march(kernel, dt):
    """Second-order product-trapezoid march of the memory integral equation.

    ``kernel[k]`` is the memory kernel at lag k*dt (natural units); returns
    the amplitude on the same grid with c[0] = 1.
    """
    kernel = np.ascontiguousarray(kernel, dtype=np.complex128)
    npts = kernel.size
    c = np.empty(npts, dtype=np.complex128)
    c[0] = 1.0
    implicit = 1.0 + 0.5 * dt * kernel[0]
    for k in range(1, npts):
        acc = 0.5 * kernel[k] * c[0]
        if k > 1:
            acc += np.dot(kernel[1:k][::-1], c[1:k])
        c[k] = (1.0 - dt * acc) / implicit
    return c


def _panel_weights(mu):
    """Filon-trapezoid panel weights W0, W1 for int_0^1 (1-u, u) e^{-i mu u} du."""
    mu = np.asarray(mu)
    small = np.abs(mu) < _SMALL_PHASE
    mu_safe = np.where(small, 1.0, mu)
    e = np.exp(-1j * mu_safe)
    phi0 = (1.0 - e) / (1j * mu_safe)
    w1 = (phi0 - e) / (1j * mu_safe)
    w0 = phi0 - w1
    m = np.where(small, mu, 0.0)
    w0_series = 0.5 - 1j * m / 6.0 - m**2 / 24.0 + 1j * m**3 / 120.0 + m**4 / 720.0
    w1_series = 0.5 - 1j * m / 3.0 - m**2 / 8.0 + 1j * m**3 / 30.0 + m**4 / 144.0
    return np.where(small, w0_series, w0), np.where(small, w1_series, w1)


def filon_transform(omega, values, t_nat, omega0):
    """sum over panels of int values(omega) e^{-i (omega-omega0) t} domega.

    ``values`` is treated as piecewise linear on the ``omega`` grid, so each
    panel is integrated against the oscillatory factor exactly and accuracy
    does not degrade with t.
    """
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    values = np.ascontiguousarray(values, dtype=np.complex128)
    t_nat = np.atleast_1d(np.asarray(t_nat, dtype=np.float64))
    h = np.diff(omega)
    left = values[:-1]
    right = values[1:]
    out = np.empty(t_nat.size, dtype=np.complex128)
    for i, t in enumerate(t_nat):
        mu = h * t
        w0, w1 = _panel_weights(mu)
        phase = np.exp(-1j * (omega[:-1] - omega0) * t)
        out[i] = np.sum(h * phase * (left * w0 + right * w1))
    return out


def _osc_factor(delta, tau):
    """(1 - e^{-i delta tau}) / (i delta) with the removable point at delta=0."""
    x = delta * tau
    small = np.abs(x) < _SMALL_PHASE
    delta_safe = np.where(small, 1.0, delta)
    full = (1.0 - np.exp(-1j * x)) / (1j * delta_safe)
    xs = np.where(small, x, 0.0)
    series = tau * (1.0 - 1j * xs / 2.0 - xs**2 / 6.0 + 1j * xs**3 / 24.0 + xs**4 / 120.0)
    return np.where(small, series, full)


def memory_kernel_quad(omega, weights, spectral_density, omega0, tau_nat):
    """Trapezoid sum of J(omega) * (1 - e^{-i(omega-omega0) tau})/(i(omega-omega0)).

    ``weights`` are the (possibly non-uniform) trapezoid weights of the
    frequency grid; ``tau_nat`` is the lag grid in natural units.
    """
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    wj = np.ascontiguousarray(weights * spectral_density, dtype=np.float64)
    delta = omega - omega0
    tau_nat = np.atleast_1d(np.asarray(tau_nat, dtype=np.float64))
    out = np.empty(tau_nat.size, dtype=np.complex128)
    for i, tau in enumerate(tau_nat):
        out[i] = np.sum(wj * _osc_factor(delta, tau))
    return out
