"""Spherical Bessel and Hankel functions of complex argument.

SciPy's wrappers target real arguments for derivative bookkeeping and are
unavailable inside compiled kernels, so the recurrences are implemented
directly: upward for the outgoing Hankel function (dominant solution) and
for j_n at large argument, downward (Miller) for j_n when the order exceeds
the argument.
"""

from __future__ import annotations

import cmath

import numpy as np

_RESCALE = 1e250


def sph_bessel(kind: str, n: int, z: complex) -> tuple[complex, complex]:
    """Spherical Bessel j_n or outgoing Hankel h_n^(1) at complex argument.

    Parameters
    ----------
    kind : {'j', 'h1'}
        Regular spherical Bessel function or outgoing spherical Hankel
        function of the first kind.
    n : int
        Order, n >= 0.
    z : complex
        Argument, z != 0.

    Returns
    -------
    (value, riccati_derivative)
        ``f_n(z)`` and ``d/dz [z f_n(z)]``.
    """
    if n < 0:
        raise ValueError("order must be non-negative")
    z = complex(z)
    if z == 0:
        raise ValueError("spherical Bessel functions are singular at z = 0")
    if kind == "j":
        value, below = _jn_with_neighbor(n, z)
    elif kind == "h1":
        value, below = _hn_with_neighbor(n, z)
    else:
        raise ValueError("kind must be 'j' or 'h1'")
    if not (cmath.isfinite(value) and cmath.isfinite(below)):
        raise OverflowError(
            f"{kind}_{n} overflowed at z = {z}; |Im z| too large for this order"
        )
    if n == 0:
        # d/dz [z f_0] closed forms: cos z for j, cos z + i sin z ... use
        # the recurrence-free expressions.
        if kind == "j":
            return value, cmath.cos(z)
        return value, cmath.cos(z) + 1j * cmath.sin(z)
    riccati = z * below - n * value
    return value, riccati


def _h0(z: complex) -> complex:
    return -1j * cmath.exp(1j * z) / z


def _h1(z: complex) -> complex:
    return -cmath.exp(1j * z) * (z + 1j) / (z * z)


def _hn_with_neighbor(n: int, z: complex) -> tuple[complex, complex]:
    """(h_n, h_{n-1}) by upward recurrence from the closed n = 0, 1 forms."""
    h_prev = _h0(z)
    if n == 0:
        return h_prev, 0.0 + 0.0j
    h_cur = _h1(z)
    for k in range(1, n):
        h_prev, h_cur = h_cur, (2 * k + 1) / z * h_cur - h_prev
    return h_cur, h_prev


def _jn_upward(n: int, z: complex) -> tuple[complex, complex]:
    j_prev = cmath.sin(z) / z
    if n == 0:
        return j_prev, 0.0 + 0.0j
    j_cur = cmath.sin(z) / (z * z) - cmath.cos(z) / z
    for k in range(1, n):
        j_prev, j_cur = j_cur, (2 * k + 1) / z * j_cur - j_prev
    return j_cur, j_prev


def _jn_downward(n: int, z: complex) -> tuple[complex, complex]:
    """Miller's algorithm: recur down from a trial start, normalize by j_0."""
    start = n + 16 + int(1.5 * abs(z))
    f_above = 0.0 + 0.0j
    f_cur = 1e-300 + 0.0j
    target = complex(0.0)
    target_below = complex(0.0)
    scale_log = 0.0
    for k in range(start, 0, -1):
        f_below = (2 * k + 1) / z * f_cur - f_above
        if k == n + 1:
            target = f_below  # un-normalized j_n
        elif k == n:
            target_below = f_below  # un-normalized j_{n-1}
        f_above, f_cur = f_cur, f_below
        if abs(f_cur) > _RESCALE:
            f_above /= _RESCALE
            f_cur /= _RESCALE
            target /= _RESCALE
            target_below /= _RESCALE
            scale_log += 1.0
    # f_cur now holds the un-normalized j_0
    norm = (cmath.sin(z) / z) / f_cur
    if n == 0:
        return f_cur * norm, 0.0 + 0.0j
    return target * norm, target_below * norm


def _jn_with_neighbor(n: int, z: complex) -> tuple[complex, complex]:
    if abs(z) < n:
        return _jn_downward(n, z)
    return _jn_upward(n, z)


def j_ratios(n_max: int, z: complex) -> np.ndarray:
    """Ratios j_n(z)/j_{n-1}(z) for n = 1..n_max, by downward recurrence.

    The downward sweep of the ratio recurrence is self-correcting for the
    minimal solution, so the start order only needs a modest buffer above
    max(n_max, |z|).
    """
    start = n_max + 24 + int(abs(z))
    out = np.empty(n_max + 1, dtype=np.complex128)
    r = z / (2 * start + 1)
    for k in range(start, 0, -1):
        if k <= n_max:
            out[k] = r
        denom = (2 * k - 1) / z - r
        if denom == 0:
            denom = 1e-300
        r = 1.0 / denom  # becomes ratio at order k-1
    out[0] = np.nan  # undefined; orders start at 1
    return out


def h_ratio_step(q: complex, n: int, z: complex) -> complex:
    """Advance the Hankel ratio h_{n+1}/h_n given q = h_n/h_{n-1}."""
    return (2 * n + 1) / z - 1.0 / q
