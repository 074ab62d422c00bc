"""Sampled coupling spectra: data model, CSV wire format, resampling, extrapolation.

A coupling spectrum holds complex g(omega) on a strictly increasing positive
frequency grid.  Consumers treat Im g as exactly zero above the last sample
(with a loud warning): high-frequency tails matter for shift integrals, and
inventing one silently would misstate the physics.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import mie
from .gridutil import detect_peaks, geometric_ladder, merge_grids

_PASSIVITY_SLACK = -1e-12


class SpectrumParseError(ValueError):
    """A spectrum file row could not be parsed; carries the line number."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class SpectrumValidationError(ValueError):
    """Parsed data violates a spectrum invariant."""


@dataclass(frozen=True)
class CouplingSpectrum:
    """Complex coupling strength g(omega_k), all quantities in eV.

    ``includes_vacuum`` records whether Im g already contains the free-space
    part; ``omega_max_ev`` is the validity ceiling of the data.  Instances
    are immutable and safe to share across threads.
    """

    omega_ev: np.ndarray
    g_ev: np.ndarray
    includes_vacuum: bool = False
    source: str = "synthetic"
    omega_max_ev: float | None = None
    dipole_debye: float | None = None
    _interp: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        omega = np.asarray(self.omega_ev, dtype=float)
        g = np.asarray(self.g_ev, dtype=complex)
        if omega.ndim != 1 or omega.size < 2 or g.shape != omega.shape:
            raise SpectrumValidationError("need matching 1-d omega and g arrays (>= 2 samples)")
        if np.any(omega <= 0):
            raise SpectrumValidationError("all frequencies must be positive")
        diffs = np.diff(omega)
        if np.any(diffs == 0):
            dup = omega[1:][diffs == 0][0]
            raise SpectrumValidationError(f"duplicated frequency sample at {dup!r} eV")
        if np.any(diffs < 0):
            raise SpectrumValidationError("frequency grid must be strictly increasing")
        if not np.all(np.isfinite(g)):
            raise SpectrumValidationError("coupling samples must be finite")
        im_total = g.imag.copy()
        if not self.includes_vacuum and self.dipole_debye is not None:
            im_total += mie.vacuum_im_g(omega, self.dipole_debye)
        if (self.includes_vacuum or self.dipole_debye is not None) and np.any(
            im_total < _PASSIVITY_SLACK
        ):
            worst = omega[np.argmin(im_total)]
            raise SpectrumValidationError(
                f"total Im g dips below zero near {worst:.6g} eV (passivity violation)"
            )
        object.__setattr__(self, "omega_ev", omega)
        object.__setattr__(self, "g_ev", g)
        if self.omega_max_ev is None:
            object.__setattr__(self, "omega_max_ev", float(omega[-1]))

    # -- interpolation ----------------------------------------------------
    def _interpolators(self):
        if not self._interp:
            self._interp["re"] = PchipInterpolator(self.omega_ev, self.g_ev.real)
            self._interp["im"] = PchipInterpolator(self.omega_ev, self.g_ev.imag)
        return self._interp["re"], self._interp["im"]

    def im_at(self, omega):
        """Im g interpolated at ``omega``; zero above the sampled range (warns),
        linear through the origin below the first sample."""
        omega = np.asarray(omega, dtype=float)
        f_re, f_im = self._interpolators()
        lo, hi = self.omega_ev[0], self.omega_ev[-1]
        out = np.zeros(omega.shape)
        above = omega > hi
        if np.any(above):
            warnings.warn(
                f"Im g requested above the sampled range (> {hi:g} eV); "
                "treating the spectrum as zero there",
                stacklevel=2,
            )
        below = omega < lo
        inside = ~(above | below)
        out[inside] = f_im(omega[inside])
        if np.any(below):
            out[below] = (self.g_ev[0].imag / lo) * omega[below]
        return float(out) if out.ndim == 0 else out

    def re_at(self, omega):
        """Re g interpolated at ``omega`` (must lie inside the sampled range)."""
        omega = np.asarray(omega, dtype=float)
        if np.any(omega < self.omega_ev[0]) or np.any(omega > self.omega_ev[-1]):
            raise ValueError("Re g requested outside the sampled range")
        f_re, _ = self._interpolators()
        out = f_re(omega)
        return float(out) if out.ndim == 0 else out

    def peaks(self):
        """(positions, widths) of pronounced Im g maxima."""
        return detect_peaks(self.omega_ev, self.g_ev.imag)

    def clipped(self, omega_max_ev):
        """Spectrum restricted to samples <= omega_max_ev."""
        keep = self.omega_ev <= omega_max_ev
        if keep.sum() < 2:
            raise ValueError("clipping would leave fewer than two samples")
        return replace(
            self,
            omega_ev=self.omega_ev[keep],
            g_ev=self.g_ev[keep],
            omega_max_ev=float(min(self.omega_max_ev, omega_max_ev)),
            _interp={},
        )


@dataclass(frozen=True)
class ZeroFreqExtrapolation:
    """Linear fit of Re g over a low-frequency window; intercept is Re g(0)."""

    window_ev: tuple[float, float]
    intercept_ev: float
    slope: float
    residual_norm: float


def from_sphere(system, omega_grid, include_vacuum=False, policy=None) -> CouplingSpectrum:
    """Sample the analytic sphere model on ``omega_grid`` (real, eV)."""
    omega = np.asarray(omega_grid, dtype=float)
    g = mie.scattering_g_rr(omega, system, policy)
    if include_vacuum:
        g = g + 1j * mie.vacuum_im_g(omega, system.dipole_debye)
    return CouplingSpectrum(
        omega_ev=omega,
        g_ev=g,
        includes_vacuum=include_vacuum,
        source="analytic-sphere",
        dipole_debye=system.dipole_debye,
    )


def sphere_frequency_grid(system, lo_ev, hi_ev, base_points=600, peak_points=240):
    """Frequency grid refined around the plasmon resonances of ``system``.

    A coarse scan locates the Im g peaks; each gets a dense cluster, and the
    whole resonance band a blanket, so that shape-preserving interpolation
    of the sampled spectrum resolves the merged high-order modes.
    """
    if not 0 < lo_ev < hi_ev:
        raise ValueError("need 0 < lo < hi")
    coarse = np.linspace(lo_ev, hi_ev, 400)
    im = mie.scattering_g_rr(coarse, system).imag
    centers, widths = detect_peaks(coarse, im)
    parts = [np.linspace(lo_ev, hi_ev, base_points)]
    for c, w in zip(centers, widths):
        span = 8.0 * w
        parts.append(np.linspace(c - span, c + span, peak_points))
        parts.append(geometric_ladder(c, w / 200.0, span, growth=1.12))
    if centers.size:
        band_lo = max(lo_ev, centers.min() - 1.5)
        band_hi = min(hi_ev, centers.max() + 1.0)
        if band_hi > band_lo:
            parts.append(np.linspace(band_lo, band_hi, 800))
    return merge_grids(*parts, lo=lo_ev, hi=hi_ev)


def resample(spec: CouplingSpectrum, grid) -> CouplingSpectrum:
    """Shape-preserving cubic resample of Re and Im independently."""
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < spec.omega_ev[0]) or np.any(grid > spec.omega_ev[-1]):
        raise ValueError("resample grid extends outside the sampled range")
    f_re, f_im = spec._interpolators()
    return replace(
        spec,
        omega_ev=grid,
        g_ev=f_re(grid) + 1j * f_im(grid),
        _interp={},
    )


def extrapolate_zero(spec: CouplingSpectrum, window_ev=(0.125, 0.2)) -> ZeroFreqExtrapolation:
    """Least-squares linear fit of Re g over ``window_ev``; intercept estimates Re g(0).

    The default window reproduces the low-frequency fit used for externally
    computed gap-cavity spectra.
    """
    lo, hi = window_ev
    mask = (spec.omega_ev >= lo) & (spec.omega_ev <= hi)
    if mask.sum() < 3:
        raise ValueError(
            f"need at least 3 samples in the fit window [{lo:g}, {hi:g}] eV, "
            f"got {int(mask.sum())}"
        )
    x = spec.omega_ev[mask]
    y = spec.g_ev[mask].real
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.linalg.norm(y - (intercept + slope * x)))
    return ZeroFreqExtrapolation(
        window_ev=(float(lo), float(hi)),
        intercept_ev=float(intercept),
        slope=float(slope),
        residual_norm=residual,
    )


# -- wire format ----------------------------------------------------------

_HEADER = "omega_ev,g_re_ev,g_im_ev"


def emit_spectrum(spec: CouplingSpectrum, path) -> None:
    """Write the CSV wire format (lossless round trip, LF endings)."""
    lines = [
        "# coupling spectrum",
        f"# source = {spec.source}",
        f"# includes_vacuum = {'true' if spec.includes_vacuum else 'false'}",
        f"# omega_max_ev = {spec.omega_max_ev:.16e}",
    ]
    if spec.dipole_debye is not None:
        lines.append(f"# dipole_debye = {spec.dipole_debye:.16e}")
    lines.append(_HEADER)
    for w, g in zip(spec.omega_ev, spec.g_ev):
        lines.append(f"{w:.16e},{g.real:.16e},{g.imag:.16e}")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"could not write spectrum to {path}: {exc}") from exc


def ingest_spectrum(path) -> CouplingSpectrum:
    """Parse and validate a spectrum CSV; rows re-sorted (with a warning) if needed."""
    omega, re, im = [], [], []
    meta = {"source": "ingested-file", "includes_vacuum": False, "omega_max_ev": None,
            "dipole_debye": None}
    header_seen = False
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                _parse_meta(line, meta)
                continue
            if not header_seen:
                if [c.strip() for c in line.split(",")] != _HEADER.split(","):
                    raise SpectrumParseError(
                        f"{path}:{lineno}: expected header {_HEADER!r}", line=lineno
                    )
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise SpectrumParseError(
                    f"{path}:{lineno}: expected 3 columns, got {len(parts)}", line=lineno
                )
            try:
                w, gr, gi = (float(p) for p in parts)
            except ValueError:
                raise SpectrumParseError(
                    f"{path}:{lineno}: non-numeric value in {line!r}", line=lineno
                ) from None
            if not all(np.isfinite([w, gr, gi])):
                raise SpectrumParseError(
                    f"{path}:{lineno}: non-finite value in {line!r}", line=lineno
                )
            omega.append(w)
            re.append(gr)
            im.append(gi)
    if not header_seen:
        raise SpectrumParseError(f"{path}: missing header {_HEADER!r}")
    omega = np.asarray(omega)
    g = np.asarray(re) + 1j * np.asarray(im)
    if np.any(np.diff(omega) < 0):
        warnings.warn(f"{path}: rows were not sorted by frequency; sorting")
        order = np.argsort(omega)
        omega, g = omega[order], g[order]
    return CouplingSpectrum(
        omega_ev=omega,
        g_ev=g,
        includes_vacuum=meta["includes_vacuum"],
        source=meta["source"],
        omega_max_ev=meta["omega_max_ev"],
        dipole_debye=meta["dipole_debye"],
    )


def _parse_meta(line, meta):
    body = line.lstrip("#").strip()
    if "=" not in body:
        return
    key, _, value = (s.strip() for s in body.partition("="))
    if key == "source":
        meta["source"] = value
    elif key == "includes_vacuum":
        meta["includes_vacuum"] = value.lower() in ("true", "1", "yes")
    elif key == "omega_max_ev":
        meta["omega_max_ev"] = float(value)
    elif key == "dipole_debye":
        meta["dipole_debye"] = float(value)
