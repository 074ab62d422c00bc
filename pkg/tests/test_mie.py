import numpy as np
import pytest

from plasmon_shift import (
    MultipoleSeriesPolicy,
    SeriesConvergenceError,
    SphereSystem,
    mie_tm_reflection,
    scattering_g_rr,
    static_g_rr,
    vacuum_im_g,
)
from plasmon_shift.constants import HBARC_EV_NM, vacuum_decay_rate_ev
from plasmon_shift.materials import UnsupportedFrequencyError, drude_eps, drude_gold, load_permittivity_table

from oracles import quasistatic_g


class TestVacuum:
    def test_rate_identity_to_10_digits(self):
        for omega in (1.0, 2.0, 5.0):
            for d in (1.0, 24.0):
                assert 2.0 * np.pi * vacuum_im_g(omega, d) == pytest.approx(
                    vacuum_decay_rate_ev(omega, d), rel=1e-10
                )

    def test_zero_frequency(self):
        assert vacuum_im_g(0.0, 24.0) == 0.0

    def test_dipole_square_scaling(self):
        assert vacuum_im_g(3.0, 2.0) == pytest.approx(4.0 * vacuum_im_g(3.0, 1.0), rel=1e-14)

    def test_negative_frequency_rejected(self):
        with pytest.raises(ValueError):
            vacuum_im_g(-1.0, 1.0)


class TestReflectionCoefficient:
    def test_quasistatic_dipole_limit(self):
        system = SphereSystem(radius_nm=2.0, gap_nm=1.0, dipole_debye=1.0)
        omega = 1.0
        b1 = mie_tm_reflection(1, omega, system)
        x = omega * system.radius_nm / HBARC_EV_NM
        eps2 = drude_eps(drude_gold(), omega)
        predicted = 2j / 3.0 * x**3 * (eps2 - 1.0) / (eps2 + 2.0)
        assert abs(b1 - predicted) / abs(predicted) < 1e-2

    def test_no_contrast_vanishes(self):
        from plasmon_shift.materials import DrudeModel

        system = SphereSystem(
            radius_nm=20.0, gap_nm=1.0, dipole_debye=24.0,
            metal=DrudeModel(plasma_ev=0.0, damping_ev=0.1, background=1.0),
        )
        for n in (1, 2, 5):
            assert abs(mie_tm_reflection(n, 3.0, system)) < 1e-14

    def test_dipole_resonance_near_expected_band(self, gold_sphere_h1):
        # |B1| maximal near the dipole-mode condition Re(eps2 + 2 eps1) = 0.
        omegas = np.linspace(3.5, 6.0, 400)
        mags = np.array([abs(mie_tm_reflection(1, w, gold_sphere_h1)) for w in omegas])
        peak = omegas[np.argmax(mags)]
        expected = drude_gold().plasma_ev / np.sqrt(3.0)
        # retardation redshifts the mode by ~0.36 eV at a = 20 nm
        assert abs(peak - expected) < 0.4

    def test_tabulated_metal_complex_frequency_rejected(self, silver_table_path):
        table = load_permittivity_table(silver_table_path)
        system = SphereSystem(radius_nm=20.0, gap_nm=2.0, dipole_debye=24.0, metal=table)
        with pytest.raises(UnsupportedFrequencyError):
            mie_tm_reflection(1, 1j * 2.0, system)


class TestScatteredCoupling:
    def test_quasistatic_oracle(self, gold_sphere_h1):
        # Low frequency: the wave-zone series must collapse onto the
        # electrostatic image sum (independent derivation).
        for omega in (0.02, 0.05):
            series = scattering_g_rr(omega, gold_sphere_h1)
            static = quasistatic_g(gold_sphere_h1, omega)
            assert abs(series - static) / abs(static) < 1e-6

    def test_zero_frequency_limit_matches_closed_form(self, gold_sphere_h1):
        g_static = static_g_rr(gold_sphere_h1)
        g_small = scattering_g_rr(1e-3, gold_sphere_h1)
        assert g_small.real == pytest.approx(g_static, rel=1e-5)

    def test_no_contrast_gives_zero(self):
        from plasmon_shift.materials import DrudeModel

        system = SphereSystem(
            radius_nm=20.0, gap_nm=1.0, dipole_debye=24.0,
            metal=DrudeModel(plasma_ev=0.0, damping_ev=0.1, background=1.0),
        )
        g = scattering_g_rr(np.array([0.5, 3.0, 6.0]), system)
        assert np.all(np.abs(g) < 1e-18)

    def test_passivity_with_vacuum(self, gold_sphere_h1):
        omegas = np.linspace(0.1, 10.0, 300)
        g = scattering_g_rr(omegas, gold_sphere_h1)
        total = g.imag + vacuum_im_g(omegas, gold_sphere_h1.dipole_debye)
        assert np.all(total >= 0.0)

    def test_distance_decay(self):
        near = SphereSystem(radius_nm=20.0, gap_nm=1.0, dipole_debye=24.0)
        far = SphereSystem(radius_nm=20.0, gap_nm=10.0, dipole_debye=24.0)
        omega = 4.8
        assert abs(scattering_g_rr(omega, far)) < abs(scattering_g_rr(omega, near))

    def test_imaginary_axis_reality(self, gold_sphere_h1):
        xi = np.geomspace(0.1, 200.0, 60)
        g = scattering_g_rr(1j * xi, gold_sphere_h1)
        assert np.max(np.abs(g.imag) / np.abs(g)) < 1e-10
        assert np.all(np.diff(g.real) < 0)

    def test_tolerance_monotone(self, gold_sphere_h1):
        omega = 5.0
        loose = scattering_g_rr(omega, gold_sphere_h1, MultipoleSeriesPolicy(tail_tol=1e-6))
        tight = scattering_g_rr(omega, gold_sphere_h1, MultipoleSeriesPolicy(tail_tol=1e-12))
        assert abs(loose - tight) < 1e-6 * abs(tight)

    def test_achieved_order_reported(self, gold_sphere_h1):
        g, n_used = scattering_g_rr(5.0, gold_sphere_h1, return_orders=True)
        assert 50 < n_used < 500

    def test_cap_exhaustion_raises_with_partial(self, gold_sphere_h1):
        with pytest.raises(SeriesConvergenceError) as info:
            scattering_g_rr(5.0, gold_sphere_h1, MultipoleSeriesPolicy(tail_tol=1e-10, n_max=40))
        assert info.value.n_cap == 40
        assert np.isfinite(info.value.partial_sum).all()

    def test_zero_frequency_rejected(self, gold_sphere_h1):
        with pytest.raises(ValueError, match="zero frequency"):
            scattering_g_rr(0.0, gold_sphere_h1)


class TestGeometryValidation:
    def test_invalid_geometry(self):
        with pytest.raises(ValueError):
            SphereSystem(radius_nm=0.0, gap_nm=1.0, dipole_debye=1.0)
        with pytest.raises(ValueError):
            SphereSystem(radius_nm=10.0, gap_nm=0.0, dipole_debye=1.0)

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            MultipoleSeriesPolicy(tail_tol=2.0)
        with pytest.raises(ValueError):
            MultipoleSeriesPolicy(n_max=0)
