"""Independent reference computations used by the tests.

Everything here deliberately avoids the production code paths: electrostatic
image sums for the sphere, closed-form pole reservoirs, adaptive quadrature
for dispersion integrals, and the two-function oscillation solution for a
Lorentzian reservoir.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from plasmon_shift.constants import RAD_PER_FS_PER_EV, coupling_ev_from_greens
from plasmon_shift.materials import drude_eps


def quasistatic_g(system, omega, n_max=4000):
    """Electrostatic image-multipole coupling for a radial dipole and sphere.

    Independent of the wave-zone multipole series: response coefficients
    n(eps2-eps1)/(n eps2+(n+1) eps1) against the static dipole field
    expansion, valid for size parameters << 1.
    """
    eps2 = drude_eps(system.metal, omega)
    eps1 = system.host_eps
    r0 = system.emitter_radius_nm
    q = system.radius_nm / r0
    total = 0.0j
    for n in range(1, n_max + 1):
        kappa = n * (eps2 - eps1) / (n * eps2 + (n + 1) * eps1)
        total += (n + 1) ** 2 * kappa * q ** (2 * n + 1)
    greens = total / (4.0 * np.pi * eps1 * r0**3)
    return coupling_ev_from_greens(greens, system.dipole_debye)


class PoleReservoir:
    """Retarded coupling built from Lorentzian pole pairs.

    Each (mass, center, width) line contributes
    (mass/pi) * [1/(c - w - i*lam) - 1/(-c - w - i*lam)], so Im g is odd on
    the real axis and g is analytic in the upper half plane; all dispersion
    identities hold exactly.
    """

    def __init__(self, poles):
        self.poles = tuple(poles)

    def g(self, omega):
        w = np.asarray(omega, dtype=complex)
        total = np.zeros_like(w)
        for mass, c, lam in self.poles:
            total = total + (mass / np.pi) * (
                1.0 / (c - w - 1j * lam) - 1.0 / (-c - w - 1j * lam)
            )
        return total

    def im_g(self, omega):
        return np.asarray(self.g(omega)).imag

    def re_g0(self):
        """Re g(0) in closed form."""
        return float(
            sum(
                (mass / np.pi) * 2.0 * c / (c**2 + lam**2)
                for mass, c, lam in self.poles
            )
        )

    def halfline_shift(self, omega):
        """PV transform of 2*pi*Im g over [0, inf), via the analyticity identity.

        Equals -pi*Re g(omega) + int_0^inf Im g(s)/(omega+s) ds; the integral
        is regular and evaluated by adaptive quadrature.
        """
        tail, _ = quad(
            lambda s: self.im_g(s) / (omega + s),
            0.0,
            np.inf,
            limit=800,
            epsabs=1e-14,
            epsrel=1e-12,
        )
        return -np.pi * float(np.asarray(self.g(omega)).real) + tail


def pv_shift_qawc(gamma_func, omega, omega_max, breakpoints=()):
    """(1/2pi) PV int_0^omega_max Gamma(s)/(omega-s) ds via QUADPACK's Cauchy rule."""
    segments = sorted({0.0, omega_max, *[b for b in breakpoints if 0.0 < b < omega_max]})
    total = 0.0
    for a, b in zip(segments[:-1], segments[1:]):
        if a < omega < b:
            val, _ = quad(gamma_func, a, b, weight="cauchy", wvar=omega, limit=400)
        else:
            val, _ = quad(lambda s: gamma_func(s) / (s - omega), a, b, limit=400)
        total += val
    return -total / (2.0 * np.pi)


def lorentzian_reservoir_amplitude(t_fs, mass, detuning_ev, width_ev):
    """Closed-form amplitude for a single full-line Lorentzian reservoir.

    Solves the equivalent two-function linear system (amplitude plus one
    damped mode), giving c1(t) = e^{-zt/2}[cosh(Om t/2) + (z/Om) sinh(Om t/2)]
    with z = width + i*detuning and Om = sqrt(z^2 - 4*mass).
    """
    t = np.asarray(t_fs, dtype=float) * RAD_PER_FS_PER_EV
    z = width_ev + 1j * detuning_ev
    om = np.sqrt(complex(z * z - 4.0 * mass))
    return np.exp(-z * t / 2.0) * (np.cosh(om * t / 2.0) + (z / om) * np.sinh(om * t / 2.0))
