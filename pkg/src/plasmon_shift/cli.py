"""Command-line front end: spectra, shift tables, dynamics runs, demo recipes.

Every run writes its fully resolved configuration next to its outputs
(``run_config.txt``); re-running from that file reproduces the outputs
byte-identically.  Config files are ``key = value`` lines matching the flag
names with dashes or underscores; explicit flags win over file entries.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dynamics as dyn
from . import levelshift as ls
from . import spectrum as spectrum_mod
from .materials import UnsupportedFrequencyError
from .mie import SphereSystem, scattering_g_rr

_SPHERE_DEFAULTS = {
    "radius_nm": 20.0,
    "gap_nm": 1.0,
    "dipole_debye": 24.0,
}


def _read_config(path):
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args, parser, config_keys):
    """Merge config-file values under explicit flags; return resolved dict."""
    merged = {}
    file_values = _read_config(args.config) if args.config else {}
    for key, caster in config_keys.items():
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            merged[key] = flag_val
        elif key in file_values:
            try:
                merged[key] = caster(file_values[key])
            except ValueError:
                parser.error(f"config key {key}: cannot parse {file_values[key]!r}")
        else:
            merged[key] = parser.get_default(key)
    unknown = set(file_values) - set(config_keys)
    if unknown:
        parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
    return merged


def _echo_config(out_dir: Path, resolved: dict) -> Path:
    lines = [f"{k} = {v}" for k, v in sorted(resolved.items()) if v is not None]
    path = out_dir / "run_config.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _bool(text):
    lowered = str(text).strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _float_list(text):
    return [float(part) for part in str(text).replace(",", " ").split()]


def _sphere_from(cfg) -> SphereSystem:
    return SphereSystem(
        radius_nm=cfg["radius_nm"],
        gap_nm=cfg["gap_nm"],
        dipole_debye=cfg["dipole_debye"],
    )


# -- subcommands ---------------------------------------------------------------


def _add_sphere_flags(sub, with_defaults=True):
    d = _SPHERE_DEFAULTS if with_defaults else {}
    sub.add_argument("--radius-nm", dest="radius_nm", type=float,
                     default=d.get("radius_nm"))
    sub.add_argument("--gap-nm", dest="gap_nm", type=float, default=d.get("gap_nm"))
    sub.add_argument("--dipole-debye", dest="dipole_debye", type=float,
                     default=d.get("dipole_debye"))


def cmd_gf(args, parser):
    keys = {
        "radius_nm": float, "gap_nm": float, "dipole_debye": float,
        "omega_min_ev": float, "omega_max_ev": float, "points": int,
        "include_vacuum": _bool, "out": str,
    }
    cfg = _resolve(args, parser, keys)
    system = _sphere_from(cfg)
    grid = spectrum_mod.sphere_frequency_grid(
        system, cfg["omega_min_ev"], cfg["omega_max_ev"], base_points=cfg["points"]
    )
    spec = spectrum_mod.from_sphere(system, grid, include_vacuum=cfg["include_vacuum"])
    out = Path(cfg["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    spectrum_mod.emit_spectrum(spec, out)
    _echo_config(out.parent, cfg)
    print(f"wrote {out} ({spec.omega_ev.size} samples)")
    return 0


def cmd_shift(args, parser):
    keys = {
        "radius_nm": float, "gap_nm": float, "dipole_debye": float,
        "spectrum": str, "methods": str, "omega_max_ev": _float_list,
        "omega_min_ev": float, "omega_hi_ev": float, "omega_points": int,
        "compare": _bool, "out_dir": str,
    }
    cfg = _resolve(args, parser, keys)
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    if cfg["spectrum"]:
        source = spectrum_mod.ingest_spectrum(cfg["spectrum"])
    else:
        source = _sphere_from(cfg)
    omega_grid = np.linspace(cfg["omega_min_ev"], cfg["omega_hi_ev"], cfg["omega_points"])
    methods = [m.strip() for m in cfg["methods"].split(",") if m.strip()]
    cutoffs = cfg["omega_max_ev"]
    for method in methods:
        for omega_max in cutoffs:
            table = ls.shift_table(source, omega_grid, method, omega_max)
            name = f"shift_{method}_wmax{omega_max:g}.csv"
            ls.emit_table(table, out_dir / name)
            print(f"wrote {out_dir / name}")
    if cfg["compare"]:
        comparison = ls.compare_methods(
            source, omega_grid, cutoffs,
            methods=tuple(m for m in methods if m != "imag-axis"),
        )
        ls.emit_comparison(comparison, out_dir / "comparison.csv")
        print(f"wrote {out_dir / 'comparison.csv'}")
    _echo_config(out_dir, cfg)
    return 0


def cmd_dynamics(args, parser):
    keys = {
        "radius_nm": float, "gap_nm": float, "dipole_debye": float,
        "spectrum": str, "method": str, "omega0_ev": float, "tmax_fs": float,
        "dt_fs": float, "omega_max_ev": float, "eta_ev": float,
        "plot_script": _bool, "out_dir": str,
    }
    cfg = _resolve(args, parser, keys)
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    common = dict(
        omega0_ev=cfg["omega0_ev"],
        omega_max_ev=cfg["omega_max_ev"],
        t_max_fs=cfg["tmax_fs"],
        dt_fs=cfg["dt_fs"],
        eta_ev=cfg["eta_ev"],
    )
    if cfg["spectrum"]:
        problem = dyn.DynamicsProblem(spectrum=spectrum_mod.ingest_spectrum(cfg["spectrum"]), **common)
    else:
        problem = dyn.DynamicsProblem(system=_sphere_from(cfg), **common)
    wanted = cfg["method"]
    written = []
    trajectories = {}
    if wanted in ("volterra", "both"):
        traj = dyn.volterra_solve(problem)
        dyn.emit_trajectory(traj, out_dir / "trajectory_volterra.csv")
        trajectories["volterra"] = traj
        written.append("trajectory_volterra.csv")
    if wanted in ("spectral", "both"):
        shift = dyn.shift_for_problem(problem)
        evspec = dyn.evolution_spectrum(problem, shift)
        traj = dyn.spectral_dynamics(evspec, problem.time_grid_fs())
        dyn.emit_trajectory(traj, out_dir / "trajectory_spectral.csv")
        trajectories["spectral"] = traj
        written.append("trajectory_spectral.csv")
    if wanted == "both":
        diff = float(
            np.max(np.abs(trajectories["volterra"].population - trajectories["spectral"].population))
        )
        (out_dir / "method_difference.txt").write_text(
            f"max_abs_population_difference = {diff:.6e}\n", encoding="utf-8"
        )
        written.append("method_difference.txt")
        print(f"max |P_volterra - P_spectral| = {diff:.3e}")
    if cfg["plot_script"]:
        (out_dir / "plot_trajectories.py").write_text(_PLOT_TEMPLATE, encoding="utf-8")
        written.append("plot_trajectories.py")
    _echo_config(out_dir, cfg)
    for name in written:
        print(f"wrote {out_dir / name}")
    return 0


_PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Plot decay trajectories emitted next to this script."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).parent
fig, ax = plt.subplots()
for path in sorted(here.glob("trajectory_*.csv")):
    t, p, method = [], [], path.stem.split("_", 1)[1]
    with open(path) as fh:
        for row in csv.DictReader(r for r in fh if not r.startswith("#")):
            t.append(float(row["t_fs"]))
            p.append(float(row["population"]))
    ax.plot(t, p, label=method)
ax.set_xlabel("t (fs)")
ax.set_ylabel("excited-state population")
ax.legend()
fig.savefig(here / "trajectories.png", dpi=160)
print("wrote", here / "trajectories.png")
'''


# -- demos ---------------------------------------------------------------------


def _demo_fig2_spectrum(out_dir: Path) -> list[tuple[str, str]]:
    system = SphereSystem(**_SPHERE_DEFAULTS)
    grid = spectrum_mod.sphere_frequency_grid(system, 0.1, 10.0)
    spec = spectrum_mod.from_sphere(system, grid)
    spectrum_mod.emit_spectrum(spec, out_dir / "spectrum.csv")
    xi = np.geomspace(0.1, 200.0, 400)
    g_imag_axis = scattering_g_rr(1j * xi, system).real
    lines = ["# coupling strength on the positive imaginary axis", "xi_ev,g_ev"]
    lines += [f"{x:.16e},{g:.16e}" for x, g in zip(xi, g_imag_axis)]
    (out_dir / "spectrum_imag_axis.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return [
        ("spectrum.csv", "coupling spectrum, sphere a=20 nm h=1 nm d=24 D; "
                         "feeds acceptance 2 (resonance placement)"),
        ("spectrum_imag_axis.csv", "g on the imaginary axis; feeds acceptance 3, 4"),
    ]


def _demo_fig3_shift(out_dir: Path) -> list[tuple[str, str]]:
    system = SphereSystem(radius_nm=20.0, gap_nm=2.0, dipole_debye=24.0)
    omega_grid = np.linspace(1.0, 8.0, 57)
    comparison = ls.compare_methods(system, omega_grid, [10.0, 20.0, 50.0, 200.0])
    ls.emit_table(comparison.reference, out_dir / "shift_reference.csv")
    ls.emit_comparison(comparison, out_dir / "comparison.csv")
    return [
        ("shift_reference.csv", "imaginary-axis reference shift, a=20 nm h=2 nm; "
                                "feeds acceptance 5"),
        ("comparison.csv", "per-method, per-cutoff shift errors; feeds acceptance 6"),
    ]


def _demo_fig4_geometry(out_dir: Path) -> list[tuple[str, str]]:
    entries = []
    for radius, gap in ((10.0, 2.0), (20.0, 1.0)):
        system = SphereSystem(radius_nm=radius, gap_nm=gap, dipole_debye=24.0)
        omega_grid = np.linspace(1.0, 8.0, 36)
        comparison = ls.compare_methods(system, omega_grid, [10.0, 20.0])
        name = f"comparison_a{radius:g}_h{gap:g}.csv"
        ls.emit_comparison(comparison, out_dir / name)
        entries.append((name, f"shift errors for a={radius:g} nm h={gap:g} nm; "
                              "feeds acceptance 7"))
    return entries


def _demo_fig5_dynamics(out_dir: Path) -> list[tuple[str, str]]:
    entries = []
    base = dict(omega0_ev=5.0, t_max_fs=30.0, dt_fs=0.005)
    system = SphereSystem(**_SPHERE_DEFAULTS)
    for omega_max in (10.0, 20.0):
        problem = dyn.DynamicsProblem(system=system, omega_max_ev=omega_max, **base)
        traj = dyn.volterra_solve(problem)
        name = f"trajectory_volterra_wmax{omega_max:g}.csv"
        dyn.emit_trajectory(traj, out_dir / name)
        entries.append((name, f"time-domain run, cutoff {omega_max:g} eV; feeds acceptance 10"))
    problem = dyn.DynamicsProblem(system=system, omega_max_ev=10.0, **base)
    shift = dyn.shift_for_problem(problem)
    evspec = dyn.evolution_spectrum(problem, shift)
    traj = dyn.spectral_dynamics(evspec, problem.time_grid_fs())
    dyn.emit_trajectory(traj, out_dir / "trajectory_spectral.csv")
    entries.append(("trajectory_spectral.csv",
                    f"frequency-domain run (spectral weight {evspec.total_weight:.6f}); "
                    "feeds acceptance 9, 12"))
    return entries


_DEMOS = {
    "fig2-spectrum": _demo_fig2_spectrum,
    "fig3-shift-comparison": _demo_fig3_shift,
    "fig4-geometry-sweep": _demo_fig4_geometry,
    "fig5-dynamics": _demo_fig5_dynamics,
}


def cmd_demo(args, parser):
    name = args.name
    if name not in _DEMOS:
        parser.error(
            f"unknown demo {name!r}; available: {', '.join(sorted(_DEMOS))}"
        )
    out_dir = Path(args.out_dir or f"demo_{name}")
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = _DEMOS[name](out_dir)
    manifest = [f"demo = {name}"]
    manifest += [f"{fname}: {desc}" for fname, desc in entries]
    (out_dir / "MANIFEST").write_text("\n".join(manifest) + "\n", encoding="utf-8")
    _echo_config(out_dir, {"demo": name, "out_dir": str(out_dir)})
    for fname, _ in entries:
        print(f"wrote {out_dir / fname}")
    print(f"wrote {out_dir / 'MANIFEST'}")
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plasmon-shift",
        description="Level shifts and decay dynamics of an emitter in a structured reservoir",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gf = sub.add_parser("gf", help="sample the sphere coupling spectrum to CSV")
    _add_sphere_flags(p_gf)
    p_gf.add_argument("--omega-min-ev", dest="omega_min_ev", type=float, default=0.1)
    p_gf.add_argument("--omega-max-ev", dest="omega_max_ev", type=float, default=10.0)
    p_gf.add_argument("--points", type=int, default=600)
    p_gf.add_argument("--include-vacuum", dest="include_vacuum", type=_bool, default=False)
    p_gf.add_argument("--out", default="spectrum.csv")
    p_gf.add_argument("--config", default=None)
    p_gf.set_defaults(func=cmd_gf)

    p_shift = sub.add_parser("shift", help="level-shift tables and method comparison")
    _add_sphere_flags(p_shift)
    p_shift.add_argument("--spectrum", default=None, help="ingest a spectrum CSV instead of the sphere")
    p_shift.add_argument("--methods", default="sub-kk",
                         help="comma list from hilbert,imag-axis,sub-kk")
    p_shift.add_argument("--omega-max-ev", dest="omega_max_ev", type=float, nargs="+",
                         default=[200.0])
    p_shift.add_argument("--omega-min-ev", dest="omega_min_ev", type=float, default=1.0)
    p_shift.add_argument("--omega-hi-ev", dest="omega_hi_ev", type=float, default=8.0)
    p_shift.add_argument("--omega-points", dest="omega_points", type=int, default=57)
    p_shift.add_argument("--compare", type=_bool, default=False, nargs="?", const=True)
    p_shift.add_argument("--out-dir", dest="out_dir", default="shift_out")
    p_shift.add_argument("--config", default=None)
    p_shift.set_defaults(func=cmd_shift)

    p_dyn = sub.add_parser("dynamics", help="decay trajectories by either solver")
    _add_sphere_flags(p_dyn)
    p_dyn.add_argument("--spectrum", default=None)
    p_dyn.add_argument("--method", choices=("volterra", "spectral", "both"), default="both")
    p_dyn.add_argument("--omega0-ev", dest="omega0_ev", type=float, default=5.0)
    p_dyn.add_argument("--tmax-fs", dest="tmax_fs", type=float, default=30.0)
    p_dyn.add_argument("--dt-fs", dest="dt_fs", type=float, default=0.005)
    p_dyn.add_argument("--omega-max-ev", dest="omega_max_ev", type=float, default=10.0)
    p_dyn.add_argument("--eta-ev", dest="eta_ev", type=float, default=1e-6)
    p_dyn.add_argument("--plot-script", dest="plot_script", type=_bool, default=False,
                       nargs="?", const=True)
    p_dyn.add_argument("--out-dir", dest="out_dir", default="dynamics_out")
    p_dyn.add_argument("--config", default=None)
    p_dyn.set_defaults(func=cmd_dynamics)

    p_demo = sub.add_parser("demo", help="reproduce a named desk-scale study")
    p_demo.add_argument("name", nargs="?", default="")
    p_demo.add_argument("--out-dir", dest="out_dir", default=None)
    p_demo.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (ValueError, OSError, UnsupportedFrequencyError, RuntimeError) as exc:
        print(f"plasmon-shift: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
