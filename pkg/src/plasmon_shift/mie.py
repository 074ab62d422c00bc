"""Semi-analytic scattered Green function of a sphere, projected on a radial dipole.

The scattered dyadic Green function at the emitter location is an electric
multipole series over TM reflection coefficients of the sphere.  The overall
prefactor follows the convention in which the free-space same-point imaginary
part is omega^3/(6 pi c^3), which reproduces the textbook vacuum decay rate;
the vacuum-limit identity and the electrostatic image series pin this down in
the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bessel
from .backend import kernels
from .constants import (
    HBARC_EV_NM,
    coupling_ev_from_greens,
    vacuum_decay_rate_ev,
)
from .materials import (
    DrudeModel,
    PermittivityModel,
    UnsupportedFrequencyError,
    drude_gold,
    evaluate_eps,
)


class SeriesConvergenceError(RuntimeError):
    """Multipole series failed to reach the tail tolerance within the cap."""

    def __init__(self, message, partial_sum, n_cap):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.n_cap = n_cap


@dataclass(frozen=True)
class MultipoleSeriesPolicy:
    """Truncation control for the multipole series.

    The series is cut when the last term falls below ``tail_tol`` of the
    running sum (three consecutive times); ``n_max`` is a hard cap.  Nanometer
    gaps need orders far beyond far-field rules of thumb, hence the tail-based
    criterion.
    """

    tail_tol: float = 1e-10
    n_max: int = 500

    def __post_init__(self):
        if not 0.0 < self.tail_tol < 1.0:
            raise ValueError("tail tolerance must lie in (0, 1)")
        if self.n_max < 1:
            raise ValueError("multipole cap must be >= 1")


@dataclass(frozen=True)
class SphereSystem:
    """Radially polarized point dipole at gap ``gap_nm`` outside a sphere."""

    radius_nm: float
    gap_nm: float
    dipole_debye: float
    host_eps: float = 1.0
    metal: PermittivityModel = field(default_factory=drude_gold)

    def __post_init__(self):
        if self.radius_nm <= 0:
            raise ValueError("sphere radius must be positive")
        if self.gap_nm <= 0:
            raise ValueError("emitter gap must be positive (emitter outside the sphere)")
        if self.host_eps <= 0:
            raise ValueError("host permittivity must be positive")

    @property
    def emitter_radius_nm(self) -> float:
        return self.radius_nm + self.gap_nm


def vacuum_im_g(omega_ev, dipole_debye):
    """Imaginary part of the free-space coupling strength, in eV.

    Equals d^2 omega^3 / (6 pi^2 eps0 hbar c^3); multiplying by 2*pi gives
    the vacuum decay rate.
    """
    omega = np.asarray(omega_ev, dtype=float)
    if np.any(omega < 0):
        raise ValueError("vacuum coupling is defined for omega >= 0")
    out = vacuum_decay_rate_ev(omega, dipole_debye) / (2.0 * math.pi)
    return float(out) if np.ndim(omega_ev) == 0 else out


def mie_tm_reflection(n: int, omega_ev, system: SphereSystem) -> complex:
    """Electric-type (TM) reflection coefficient B_n of the centered sphere.

    Defined so the radial part of each outside TM multipole reads
    j_n(k1 r) + B_n h1_n(k1 r).  ``omega_ev`` may be complex for analytic
    permittivity models (imaginary-axis evaluation).
    """
    if n < 1:
        raise ValueError("multipole order must be >= 1")
    z = complex(omega_ev)
    if z == 0:
        raise ValueError("reflection coefficients are undefined at zero frequency")
    eps2 = evaluate_eps(system.metal, z)
    k1 = math.sqrt(system.host_eps) * z / HBARC_EV_NM
    k2 = np.sqrt(complex(eps2)) * z / HBARC_EV_NM
    x1 = k1 * system.radius_nm
    x2 = k2 * system.radius_nm
    m = k2 / k1

    r1 = bessel.j_ratios(n, x1)
    r2 = bessel.j_ratios(n, x2)
    # j_n(x1)/h_n(x1) as a product of bounded per-order ratios.
    jh = (np.sin(x1) / x1) / (-1j * np.exp(1j * x1) / x1)  # j0/h0
    q = 1.0 / x1 - 1j
    for k in range(1, n + 1):
        if k > 1:
            q = (2 * k - 1) / x1 - 1.0 / q
        jh = jh * (r1[k] / q)
    dpsi2 = 1.0 / r2[n] - n / x2
    dpsi1 = 1.0 / r1[n] - n / x1
    dxi1 = 1.0 / q - n / x1
    return complex(jh * (dpsi2 - m * dpsi1) / (m * dxi1 - dpsi2))


def scattering_g_rr(
    omega_ev,
    system: SphereSystem,
    policy: MultipoleSeriesPolicy | None = None,
    return_orders: bool = False,
):
    """Scattered coupling strength g_s(omega) = d.G_s(r0,r0,omega).d/(hbar pi eps0), in eV.

    Accepts real or complex frequencies (imaginary axis requires an analytic
    permittivity model).  Vectorized over ``omega_ev``; grid points are
    evaluated independently (parallel in the compiled backend).

    Raises
    ------
    SeriesConvergenceError
        If the multipole series does not converge within ``policy.n_max``;
        the exception carries the partial result.
    """
    policy = policy or MultipoleSeriesPolicy()
    scalar_in = np.ndim(omega_ev) == 0
    z = np.atleast_1d(np.asarray(omega_ev, dtype=np.complex128))
    if np.any(z == 0):
        raise ValueError("scattered coupling is undefined at zero frequency; "
                         "use static_g_rr for the zero-frequency limit")
    eps2 = np.empty(z.size, dtype=np.complex128)
    for i, zi in enumerate(z):
        eps2[i] = evaluate_eps(system.metal, zi)
    series, n_used, ok = kernels.mie_series_grid(
        np.ascontiguousarray(z),
        eps2,
        float(system.host_eps),
        float(system.radius_nm),
        float(system.emitter_radius_nm),
        float(policy.tail_tol),
        int(policy.n_max),
    )
    k1 = np.sqrt(system.host_eps) * z / HBARC_EV_NM
    greens = 1j * k1**3 / (4.0 * math.pi * system.host_eps) * series
    g = coupling_ev_from_greens(greens, system.dipole_debye)
    if not np.all(ok):
        bad = np.flatnonzero(~ok)
        raise SeriesConvergenceError(
            f"multipole series did not converge at {bad.size} frequency point(s) "
            f"(first: {z[bad[0]]}) within n_max = {policy.n_max}",
            partial_sum=g,
            n_cap=policy.n_max,
        )
    if scalar_in:
        g = complex(g[0])
        n_used = int(n_used[0])
    return (g, n_used) if return_orders else g


def static_g_rr(system: SphereSystem) -> float:
    """Zero-frequency limit of the scattered coupling strength, in eV.

    A Drude metal with free carriers becomes a perfect conductor as
    omega -> 0: every multipole response coefficient tends to one and the
    image series sums in closed form.  Without free carriers the static
    dielectric contrast stays finite and the series is summed directly.
    Only analytic (Drude) models have this limit.
    """
    if not isinstance(system.metal, DrudeModel):
        raise UnsupportedFrequencyError(
            "zero-frequency limit requires an analytic permittivity model"
        )
    q = system.radius_nm / system.emitter_radius_nm
    if system.metal.plasma_ev > 0:
        t = q * q
        series = q * ((1.0 + t) / (1.0 - t) ** 3 - 1.0)
    else:
        eps2 = system.metal.background
        eps1 = system.host_eps
        series = 0.0
        for n in range(1, 100_000):
            kappa = n * (eps2 - eps1) / (n * eps2 + (n + 1) * eps1)
            term = (n + 1) ** 2 * kappa * q ** (2 * n + 1)
            series += term
            if abs(term) < 1e-16 * max(abs(series), 1e-300) and n > 4:
                break
    greens = series / (4.0 * math.pi * system.host_eps * system.emitter_radius_nm**3)
    return coupling_ev_from_greens(greens, system.dipole_debye)
