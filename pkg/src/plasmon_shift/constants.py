"""Physical constants and unit conversions.

The package works in a single internal unit regime: energies, frequencies,
rates and level shifts in electron-volts (hbar = 1), lengths in nanometers,
dipole moments in Debye, times in femtoseconds at the public API.  All
conversions to and from SI happen here and nowhere else.
"""

import math

SPEED_OF_LIGHT_M_S = 299792458.0
HBAR_EV_S = 6.582119569e-16
HBAR_J_S = 1.054571817e-34
VACUUM_PERMITTIVITY_F_M = 8.8541878128e-12
DEBYE_C_M = 3.33564e-30

HBAR_EV_FS = HBAR_EV_S * 1e15
#: 1 eV of transition energy advances the phase by this many rad/fs.
RAD_PER_FS_PER_EV = 1.0 / HBAR_EV_FS
#: hbar*c in eV*nm; divides energies into wavenumbers.
HBARC_EV_NM = HBAR_EV_S * SPEED_OF_LIGHT_M_S * 1e9

#: d^2 * G / (hbar * pi * eps0) in eV, for d in Debye and G in nm^-3.
COUPLING_EV_PER_DEBYE2_NM3 = (
    DEBYE_C_M**2 * 1e27 * HBAR_EV_S / (HBAR_J_S * math.pi * VACUUM_PERMITTIVITY_F_M)
)


def ev_to_rad_per_s(energy_ev: float) -> float:
    """Convert an energy in eV to an angular frequency in rad/s."""
    return energy_ev / HBAR_EV_S


def rad_per_s_to_ev(omega_rad_s: float) -> float:
    """Convert an angular frequency in rad/s to an energy in eV."""
    return omega_rad_s * HBAR_EV_S


def fs_to_inverse_ev(t_fs):
    """Convert a time in fs to the natural time unit 1/eV (hbar = 1)."""
    return t_fs * RAD_PER_FS_PER_EV


def wavenumber_per_nm(omega_ev, refractive_index=1.0):
    """Wavenumber n*omega/c in nm^-1 for a frequency in eV.

    ``refractive_index`` may be complex (absorbing media).
    """
    return refractive_index * omega_ev / HBARC_EV_NM


def vacuum_decay_rate_ev(omega_ev, dipole_debye):
    """Free-space spontaneous emission rate omega^3 d^2/(3 pi eps0 hbar c^3), in eV.

    Parameters
    ----------
    omega_ev : float or ndarray
        Transition frequency in eV.
    dipole_debye : float
        Transition dipole magnitude in Debye.
    """
    omega_si = omega_ev / HBAR_EV_S
    d_si = dipole_debye * DEBYE_C_M
    rate_si = omega_si**3 * d_si**2 / (
        3.0 * math.pi * VACUUM_PERMITTIVITY_F_M * HBAR_J_S * SPEED_OF_LIGHT_M_S**3
    )
    return rate_si * HBAR_EV_S


def coupling_ev_from_greens(greens_nm3, dipole_debye):
    """Project a same-point Green-function value (nm^-3) onto a dipole, in eV."""
    return COUPLING_EV_PER_DEBYE2_NM3 * dipole_debye**2 * greens_nm3
