"""Permittivity models evaluated at real or (where analytic) complex frequency."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .constants import rad_per_s_to_ev


class UnsupportedFrequencyError(ValueError):
    """Raised when a model cannot be evaluated at the requested frequency."""


@dataclass(frozen=True)
class DrudeModel:
    """Free-electron permittivity eps_B - wp^2 / (z (z + i*gp)).

    Analytic in the upper half of the complex frequency plane, so it can be
    continued to the positive imaginary axis, where it is purely real.
    """

    plasma_ev: float
    damping_ev: float
    background: float = 1.0

    def __post_init__(self):
        if self.plasma_ev < 0 or self.damping_ev < 0:
            raise ValueError("plasma and damping frequencies must be non-negative")


@dataclass(frozen=True)
class TabulatedModel:
    """Measured permittivity on a real-frequency grid, pchip-interpolated.

    Rows must be sorted by frequency with Im eps >= 0 (passive medium).
    Shape-preserving interpolation is applied to the real and imaginary
    parts independently, so kinks in measured data do not ring.
    """

    omega_ev: np.ndarray
    eps_re: np.ndarray
    eps_im: np.ndarray
    _interp: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        omega = np.asarray(self.omega_ev, dtype=float)
        re = np.asarray(self.eps_re, dtype=float)
        im = np.asarray(self.eps_im, dtype=float)
        if omega.ndim != 1 or omega.size < 2:
            raise ValueError("tabulated model needs at least two rows")
        if np.any(np.diff(omega) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if np.any(im < 0):
            raise ValueError("Im eps must be >= 0 on every row")
        if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
            raise ValueError("permittivity rows must be finite")
        object.__setattr__(self, "omega_ev", omega)
        object.__setattr__(self, "eps_re", re)
        object.__setattr__(self, "eps_im", im)

    def _interpolators(self):
        if not self._interp:
            self._interp["re"] = PchipInterpolator(self.omega_ev, self.eps_re)
            self._interp["im"] = PchipInterpolator(self.omega_ev, self.eps_im)
        return self._interp["re"], self._interp["im"]


PermittivityModel = DrudeModel | TabulatedModel


def drude_gold() -> DrudeModel:
    """Gold free-electron parameters (1.26e16 and 1.41e14 rad/s, in eV)."""
    return DrudeModel(
        plasma_ev=rad_per_s_to_ev(1.26e16),
        damping_ev=rad_per_s_to_ev(1.41e14),
        background=1.0,
    )


def drude_eps(model: DrudeModel, z) -> complex:
    """Evaluate a Drude model at complex frequency ``z`` (eV).

    Raises
    ------
    ValueError
        If ``z`` is 0 (pole at the origin) or at the damping pole -i*gp.
    UnsupportedFrequencyError
        If ``model`` is not a Drude variant.
    """
    if not isinstance(model, DrudeModel):
        raise UnsupportedFrequencyError(
            "drude_eps requires a Drude model, got %s" % type(model).__name__
        )
    z = complex(z)
    if z == 0:
        raise ValueError("Drude permittivity has a pole at zero frequency")
    if z == complex(0.0, -model.damping_ev):
        raise ValueError("Drude permittivity has a pole at -i*damping")
    return model.background - model.plasma_ev**2 / (z * (z + 1j * model.damping_ev))


def tabulated_eps(model: TabulatedModel, omega_ev: float) -> complex:
    """Interpolate a tabulated model at a real frequency inside its grid."""
    if not isinstance(model, TabulatedModel):
        raise UnsupportedFrequencyError(
            "tabulated_eps requires a tabulated model, got %s" % type(model).__name__
        )
    omega = np.asarray(omega_ev, dtype=float)
    lo, hi = model.omega_ev[0], model.omega_ev[-1]
    if np.any(omega < lo) or np.any(omega > hi):
        raise ValueError(
            f"frequency outside tabulated range [{lo:g}, {hi:g}] eV; "
            "no extrapolation is performed"
        )
    f_re, f_im = model._interpolators()
    out = f_re(omega) + 1j * f_im(omega)
    return complex(out) if np.ndim(omega_ev) == 0 else out


def evaluate_eps(model: PermittivityModel, z) -> complex:
    """Evaluate any permittivity model, restricting tables to the real axis."""
    if isinstance(model, DrudeModel):
        return drude_eps(model, z)
    z = complex(z)
    if z.imag != 0.0:
        raise UnsupportedFrequencyError(
            "tabulated permittivity is defined on the real axis only; "
            "analytic continuation of measured data is ill-posed"
        )
    return tabulated_eps(model, z.real)


def load_permittivity_table(path) -> TabulatedModel:
    """Read a permittivity table CSV.

    Format: UTF-8, ``#``-prefixed comment lines, header
    ``omega_ev,eps_re,eps_im``, rows sorted ascending.
    """
    omega, re, im = [], [], []
    with open(path, encoding="utf-8") as fh:
        header_seen = False
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                cols = [c.strip() for c in line.split(",")]
                if cols != ["omega_ev", "eps_re", "eps_im"]:
                    raise ValueError(
                        f"{path}:{lineno}: expected header omega_ev,eps_re,eps_im"
                    )
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns, got {len(parts)}")
            try:
                w, er, ei = (float(p) for p in parts)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            omega.append(w)
            re.append(er)
            im.append(ei)
    if not header_seen:
        raise ValueError(f"{path}: missing header line")
    omega = np.asarray(omega)
    if np.any(np.diff(omega) < 0):
        warnings.warn(f"{path}: rows were not sorted; sorting by frequency")
        order = np.argsort(omega)
        omega = omega[order]
        re = np.asarray(re)[order]
        im = np.asarray(im)[order]
    return TabulatedModel(np.asarray(omega), np.asarray(re), np.asarray(im))
