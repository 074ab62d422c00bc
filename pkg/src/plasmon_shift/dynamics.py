"""Excited-state amplitude of the emitter: memory-kernel time march and
frequency-domain evolution-spectrum route.

Both solvers work on the spectral density J(omega) = Im g(omega).  The time
march solves the second-kind integral equation

    c1(t) = 1 - int_0^t B(t-t') c1(t') dt',
    B(tau) = int_0^omega_max J(omega) (1 - e^{-i(omega-omega0) tau})/(i(omega-omega0)) domega,

with a product-trapezoid rule; the frequency route integrates the
evolution spectrum S(omega) against e^{-i(omega-omega0)t}, plus explicit
residue terms for bound-state roots of omega - omega0 - Delta(omega) = 0 in
zero-damping regions.  Times are fs at the API; phases use 1 eV = 1.519267
rad/fs internally.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import spectrum as spectrum_mod
from .backend import kernels
from .constants import RAD_PER_FS_PER_EV
from .gridutil import geometric_ladder, merge_grids, trapezoid_weights
from .levelshift import LevelShiftTable, QuadraturePolicy, shift_table
from .mie import SphereSystem
from .spectrum import CouplingSpectrum

_POP_SLACK = 1e-6


class NormalizationError(RuntimeError):
    """Spectral weight failed its sum rule; data or pole coverage is incomplete."""


@dataclass(frozen=True)
class DynamicsProblem:
    """One decay computation: source spectrum, transition frequency, grids."""

    omega0_ev: float
    omega_max_ev: float
    t_max_fs: float
    dt_fs: float
    eta_ev: float = 1e-6
    spectrum: CouplingSpectrum | None = None
    system: SphereSystem | None = None
    include_vacuum: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if (self.spectrum is None) == (self.system is None):
            raise ValueError("provide exactly one of spectrum or system")
        if self.omega0_ev <= 0:
            raise ValueError("transition frequency must be positive")
        if self.dt_fs <= 0 or self.t_max_fs < self.dt_fs:
            raise ValueError("need dt > 0 and t_max >= dt")
        if self.eta_ev < 0:
            raise ValueError("spectral broadening must be >= 0")

    def time_grid_fs(self) -> np.ndarray:
        n = int(round(self.t_max_fs / self.dt_fs))
        return np.arange(n + 1) * self.dt_fs

    def coupling(self) -> CouplingSpectrum:
        """The sampled spectrum driving this problem (built once for a sphere)."""
        if self.spectrum is not None:
            return self.spectrum
        if "spectrum" not in self._cache:
            grid = spectrum_mod.sphere_frequency_grid(
                self.system, 0.01, self.omega_max_ev
            )
            self._cache["spectrum"] = spectrum_mod.from_sphere(
                self.system, grid, include_vacuum=self.include_vacuum
            )
        return self._cache["spectrum"]

    def echo(self) -> dict:
        return {
            "omega0_ev": self.omega0_ev,
            "omega_max_ev": self.omega_max_ev,
            "t_max_fs": self.t_max_fs,
            "dt_fs": self.dt_fs,
            "eta_ev": self.eta_ev,
            "source": "sphere" if self.system is not None else self.coupling().source,
        }


@dataclass(frozen=True)
class DecayTrajectory:
    """Time grid, complex amplitude and population, tagged by solver."""

    t_fs: np.ndarray
    c1: np.ndarray
    population: np.ndarray
    method: str
    problem: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.t_fs[0] != 0.0 or self.c1[0] != 1.0 + 0.0j:
            raise ValueError("trajectories start at t = 0 with unit amplitude")
        if np.any(self.population > 1.0 + _POP_SLACK) or np.any(self.population < 0):
            raise ValueError(
                "population left [0, 1]; refine the time step or frequency grid"
            )


@dataclass(frozen=True)
class EvolutionSpectrum:
    """Continuum weight function S(omega) plus discrete bound-state poles."""

    omega_ev: np.ndarray
    s_per_ev: np.ndarray
    omega0_ev: float
    bound_omega_ev: np.ndarray
    bound_weights: np.ndarray
    report: dict = field(default_factory=dict)

    @property
    def total_weight(self) -> float:
        return float(np.trapezoid(self.s_per_ev, self.omega_ev) + self.bound_weights.sum())


def memory_kernel(
    spec: CouplingSpectrum,
    omega0_ev: float,
    tau_fs,
    omega_max_ev: float,
    phase_oversample: int = 16,
    max_nodes: int = 4_000_000,
) -> np.ndarray:
    """B(tau) on a lag grid, in eV.

    The frequency grid must resolve the fastest oscillation e^{-i delta tau};
    the node spacing is capped at pi/(phase_oversample * tau_max) in natural
    units, the spectrum's own knots and peak clusters are merged in.

    Raises
    ------
    ValueError
        If resolving the requested horizon would exceed ``max_nodes`` (the
        message carries the required estimate).
    """
    tau_fs = np.atleast_1d(np.asarray(tau_fs, dtype=float))
    tau_nat = tau_fs * RAD_PER_FS_PER_EV
    hi = min(omega_max_ev, spec.omega_ev[-1])
    if omega_max_ev > spec.omega_ev[-1]:
        warnings.warn(
            f"kernel cutoff {omega_max_ev:g} eV exceeds the sampled spectrum "
            f"({spec.omega_ev[-1]:g} eV); treating Im g as zero beyond it",
            stacklevel=2,
        )
    tau_top = float(tau_nat.max())
    if tau_top > 0:
        d_osc = math.pi / (phase_oversample * tau_top)
        required = int(hi / d_osc) + 1
        if required > max_nodes:
            raise ValueError(
                f"resolving tau_max = {tau_fs.max():g} fs at this oversampling needs "
                f"~{required} frequency nodes (> {max_nodes}); lower t_max, the "
                "cutoff, or the oversampling"
            )
        base = np.linspace(0.0, hi, required + 1)
    else:
        base = np.linspace(0.0, hi, 64)
    parts = [base, spec.omega_ev[spec.omega_ev <= hi]]
    centers, widths = spec.peaks()
    for c, w in zip(centers, widths):
        if 0 < c < hi:
            parts.append(geometric_ladder(c, w / 50.0, 16.0 * w, growth=1.08))
    nodes = merge_grids(*parts, lo=0.0, hi=hi)
    weights = trapezoid_weights(nodes)
    j_vals = np.ascontiguousarray(spec.im_at(nodes), dtype=np.float64)
    return kernels.memory_kernel_quad(
        np.ascontiguousarray(nodes),
        np.ascontiguousarray(weights),
        j_vals,
        float(omega0_ev),
        np.ascontiguousarray(tau_nat),
    )


def volterra_solve(
    problem: DynamicsProblem,
    phase_oversample: int = 16,
    max_nodes: int = 4_000_000,
) -> DecayTrajectory:
    """Product-trapezoid march of the memory integral equation."""
    t_fs = problem.time_grid_fs()
    spec = problem.coupling()
    kernel = memory_kernel(
        spec,
        problem.omega0_ev,
        t_fs,
        problem.omega_max_ev,
        phase_oversample=phase_oversample,
        max_nodes=max_nodes,
    )
    dt_nat = problem.dt_fs * RAD_PER_FS_PER_EV
    b_max = float(np.abs(kernel).max())
    if b_max * dt_nat >= 1.0:
        warnings.warn(
            f"time step too large for the kernel magnitude (|B|*dt = "
            f"{b_max * dt_nat:.2f} >= 1); suggested dt <= "
            f"{0.5 / (b_max * RAD_PER_FS_PER_EV):.3g} fs",
            stacklevel=2,
        )
    c1 = kernels.volterra_march(np.ascontiguousarray(kernel), dt_nat)
    return DecayTrajectory(
        t_fs=t_fs,
        c1=c1,
        population=np.abs(c1) ** 2,
        method="volterra",
        problem=problem.echo(),
    )


# -- frequency-domain route ---------------------------------------------------


def shift_for_problem(
    problem: DynamicsProblem,
    method: str = "sub-kk",
    policy: QuadraturePolicy | None = None,
    extra_grid=None,
) -> LevelShiftTable:
    """Level-shift table sized for the evolution spectrum of ``problem``."""
    spec = problem.coupling()
    lo = spec.omega_ev[0]
    hi = min(problem.omega_max_ev, spec.omega_ev[-1])
    window = np.linspace(
        max(lo, problem.omega0_ev - 1.5), min(hi, problem.omega0_ev + 1.5), 400
    )
    parts = [np.linspace(lo, hi, 500), window, spec.omega_ev[spec.omega_ev <= hi]]
    if extra_grid is not None:
        parts.append(extra_grid)
    grid = merge_grids(*parts, lo=lo, hi=hi)
    source = problem.system if problem.system is not None else spec
    return shift_table(source, grid, method, problem.omega_max_ev, policy)


def _plain_shift(table_omega, table_gamma, omega):
    """Shift continued outside the damping support (ordinary integral)."""
    return float(
        np.trapezoid(table_gamma / (omega - table_omega), table_omega) / (2.0 * math.pi)
    )


def _plain_shift_slope(table_omega, table_gamma, omega):
    return float(
        -np.trapezoid(table_gamma / (omega - table_omega) ** 2, table_omega)
        / (2.0 * math.pi)
    )


def _hunt_outside_root(table_omega, table_gamma, omega0, side):
    """Bound-state root of omega - omega0 - Delta(omega) outside the support.

    Delta decreases there, so the root function is strictly increasing and
    bisection on a sign change is enough.  The search stands off the support
    edges by a few quadrature panels: right at an edge the sampled-shift
    continuation is unreliable, and any true spectral feature that close is
    already handled as a continuum resonance.
    """
    lo_edge, hi_edge = table_omega[0], table_omega[-1]

    def f(w):
        return w - omega0 - _plain_shift(table_omega, table_gamma, w)

    if side == "below":
        standoff = max(3.0 * (table_omega[1] - table_omega[0]), 1e-2)
        hi = lo_edge - standoff
        if hi <= 0 and lo_edge > 0:
            hi = 0.5 * lo_edge
        if f(hi) <= 0:
            return None
        span = max(1.0, abs(omega0))
        lo = lo_edge - span
        for _ in range(60):
            if f(lo) < 0:
                break
            span *= 2.0
            lo = lo_edge - span
        else:
            return None
    else:
        standoff = max(3.0 * (table_omega[-1] - table_omega[-2]), 1e-2)
        lo = hi_edge + standoff
        if f(lo) >= 0:
            return None
        span = max(1.0, abs(omega0))
        hi = hi_edge + span
        for _ in range(60):
            if f(hi) > 0:
                break
            span *= 2.0
            hi = hi_edge + span
        else:
            return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, abs(mid)):
            break
    root = 0.5 * (lo + hi)
    weight = 1.0 / (1.0 - _plain_shift_slope(table_omega, table_gamma, root))
    return root, weight


def evolution_spectrum(
    problem: DynamicsProblem,
    shift: LevelShiftTable,
    ladder_growth: float = 1.01,
    ladder_inner: float = 1e-3,
) -> EvolutionSpectrum:
    """Evaluate S(omega) on a grid refined around its resonance roots.

    Scattering-only spectra can dip microscopically below zero off
    resonance; the rate entering S is floored at zero so S stays a weight
    function.  A total weight off unity by more than 1e-3 raises
    :class:`NormalizationError`.
    """
    gamma_interp = PchipInterpolator(shift.omega_ev, np.maximum(shift.gamma_ev, 0.0))
    delta_interp = PchipInterpolator(shift.omega_ev, shift.delta_ev)
    eta = problem.eta_ev
    omega0 = problem.omega0_ev
    s_lo = float(shift.omega_ev[0])
    s_hi = float(min(shift.omega_ev[-1], problem.omega_max_ev))

    # Base grid: the shift table plus a spacing cap so the later transform
    # can resolve the requested horizon.
    t_top = problem.t_max_fs * RAD_PER_FS_PER_EV
    h_cap = math.pi / (4.0 * t_top) if t_top > 0 else (s_hi - s_lo)
    n_base = max(int((s_hi - s_lo) / h_cap) + 2, 200)
    base = np.linspace(s_lo, s_hi, n_base)
    parts = [base, shift.omega_ev[(shift.omega_ev >= s_lo) & (shift.omega_ev <= s_hi)]]

    # Resonance roots: local minima of |omega - omega0 - Delta| that are
    # within reach of the local linewidth get a geometric cluster.
    scan = merge_grids(*parts, lo=s_lo, hi=s_hi)
    f_scan = scan - omega0 - delta_interp(scan)
    width_scan = 0.5 * gamma_interp(scan) + eta
    ratio = np.abs(f_scan) / np.maximum(width_scan, 1e-300)
    candidates = []
    sign_change = np.flatnonzero(np.diff(np.sign(f_scan)) != 0)
    candidates.extend(scan[sign_change])
    interior = np.flatnonzero(
        (ratio[1:-1] < ratio[:-2]) & (ratio[1:-1] < ratio[2:]) & (ratio[1:-1] < 20.0)
    )
    candidates.extend(scan[interior + 1])
    roots = []
    for guess in candidates:
        root = _refine_root(lambda w: w - omega0 - float(delta_interp(w)), guess, scan)
        if root is not None and s_lo < root < s_hi:
            roots.append(root)
    roots = sorted(set(np.round(roots, 12)))
    for r in roots:
        w_loc = max(0.5 * float(gamma_interp(r)) + eta, eta, 1e-9)
        outer = max(s_hi - s_lo, 1.0)
        parts.append(geometric_ladder(r, w_loc * ladder_inner, outer, growth=ladder_growth))

    nodes = merge_grids(*parts, lo=s_lo, hi=s_hi)
    f_nodes = nodes - omega0 - delta_interp(nodes)
    half_rate = 0.5 * gamma_interp(nodes)
    eta_eff = np.where(half_rate * 2.0 < eta, eta, 0.0)
    widths = half_rate + eta_eff
    s_vals = widths / (f_nodes**2 + widths**2) / math.pi

    # Bound states outside the damping support contribute residues.
    bound_w, bound_wt = [], []
    for side in ("below", "above"):
        hit = _hunt_outside_root(shift.omega_ev, np.maximum(shift.gamma_ev, 0.0), omega0, side)
        if hit is not None:
            bound_w.append(hit[0])
            bound_wt.append(hit[1])

    ev = EvolutionSpectrum(
        omega_ev=nodes,
        s_per_ev=s_vals,
        omega0_ev=omega0,
        bound_omega_ev=np.asarray(bound_w),
        bound_weights=np.asarray(bound_wt),
        report={
            "resonance_roots_ev": roots,
            "nodes": int(nodes.size),
            "eta_ev": eta,
        },
    )
    weight = ev.total_weight
    if abs(weight - 1.0) > 1e-3:
        raise NormalizationError(
            f"spectral weight {weight:.6f} differs from 1 by more than 1e-3; "
            "likely a missing high-frequency tail in the data or an "
            "undetected bound-state pole"
        )
    return ev


def _refine_root(f, guess, scan):
    """Bisection around a scan candidate; None when no sign change brackets it."""
    idx = np.searchsorted(scan, guess)
    lo = scan[max(idx - 2, 0)]
    hi = scan[min(idx + 2, scan.size - 1)]
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return float(lo)
    if f_hi == 0:
        return float(hi)
    if f_lo * f_hi > 0:
        return None
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0:
            return float(mid)
        if f_lo * f_mid < 0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return float(0.5 * (lo + hi))


def spectral_dynamics(evspec: EvolutionSpectrum, t_fs) -> DecayTrajectory:
    """Transform the evolution spectrum to the time domain.

    Each frequency panel is integrated against the oscillatory factor
    exactly (piecewise-linear S), so accuracy is set by the grid's panel
    sizes, not by the phase; still, panels must satisfy h * t <= pi or the
    piecewise-linear representation cannot see the oscillation, in which
    case the call is refused with the resolvable horizon.
    """
    t_fs = np.atleast_1d(np.asarray(t_fs, dtype=float))
    t_nat = t_fs * RAD_PER_FS_PER_EV
    h_max = float(np.max(np.diff(evspec.omega_ev)))
    t_top = float(t_nat.max())
    if h_max * t_top > math.pi:
        max_t_fs = math.pi / (h_max * RAD_PER_FS_PER_EV)
        raise ValueError(
            f"time horizon {t_fs.max():g} fs beyond the grid's resolvable "
            f"{max_t_fs:g} fs; rebuild the evolution spectrum with a denser grid"
        )
    t_with_zero = np.concatenate([[0.0], t_nat])
    cont = kernels.filon_transform(
        np.ascontiguousarray(evspec.omega_ev),
        np.ascontiguousarray(evspec.s_per_ev, dtype=np.complex128),
        np.ascontiguousarray(t_with_zero),
        float(evspec.omega0_ev),
    )
    c_all = cont
    for wb, weight in zip(evspec.bound_omega_ev, evspec.bound_weights):
        c_all = c_all + weight * np.exp(-1j * (wb - evspec.omega0_ev) * t_with_zero)
    c_norm = c_all / c_all[0]  # weight normalization pins c1(0) = 1
    c1 = c_norm[1:]
    if t_fs[0] == 0.0:
        c1 = c1.copy()
        c1[0] = 1.0 + 0.0j
    return DecayTrajectory(
        t_fs=t_fs,
        c1=c1,
        population=np.abs(c1) ** 2,
        method="spectral",
        problem={"omega0_ev": evspec.omega0_ev, "weight": float(np.real(c_all[0]))},
    )


def weak_coupling_decay(gamma_ev: float, delta_ev: float, t_fs) -> DecayTrajectory:
    """Closed-form flat-reservoir limit c1(t) = exp[-(i Delta + Gamma/2) t]."""
    t_fs = np.atleast_1d(np.asarray(t_fs, dtype=float))
    t_nat = t_fs * RAD_PER_FS_PER_EV
    c1 = np.exp(-(1j * delta_ev + 0.5 * gamma_ev) * t_nat)
    return DecayTrajectory(
        t_fs=t_fs,
        c1=c1,
        population=np.abs(c1) ** 2,
        method="weak-coupling",
        problem={"gamma_ev": gamma_ev, "delta_ev": delta_ev},
    )


# -- wire format ---------------------------------------------------------------

_TRAJ_HEADER = "t_fs,c1_re,c1_im,population,method"


def emit_trajectory(traj: DecayTrajectory, path) -> None:
    """Write a trajectory CSV."""
    lines = ["# decay trajectory", _TRAJ_HEADER]
    for t, c, p in zip(traj.t_fs, traj.c1, traj.population):
        lines.append(f"{t:.16e},{c.real:.16e},{c.imag:.16e},{p:.16e},{traj.method}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
