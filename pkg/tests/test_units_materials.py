import math

import numpy as np
import pytest

from plasmon_shift import constants
from plasmon_shift.materials import (
    DrudeModel,
    TabulatedModel,
    UnsupportedFrequencyError,
    drude_eps,
    drude_gold,
    evaluate_eps,
    load_permittivity_table,
    tabulated_eps,
)

# High-precision reference (independent mpmath evaluation of the same
# closed forms, 40 digits): eps(5 eV) for the converted gold parameters.
EPS_GOLD_5EV = complex(-1.75031864831056246, 0.0510502518728062412)


def test_unit_roundtrip_12_digits():
    for e in (1e-3, 0.5, 1.0, 8.29, 200.0):
        back = constants.rad_per_s_to_ev(constants.ev_to_rad_per_s(e))
        assert abs(back - e) / e < 1e-12


def test_phase_rate_constant():
    assert constants.RAD_PER_FS_PER_EV == pytest.approx(1.519267, rel=1e-6)
    assert constants.HBARC_EV_NM == pytest.approx(197.3269804, rel=1e-9)


def test_vacuum_rate_internal_consistency():
    # The coupling prefactor and the closed-form rate must agree exactly:
    # 2*pi * d^2 ImG0/(hbar pi eps0) == omega^3 d^2/(3 pi eps0 hbar c^3).
    for omega in (0.5, 2.0, 5.0):
        for d in (1.0, 24.0):
            im_g0 = (omega / constants.HBARC_EV_NM) ** 3 / (6.0 * math.pi)
            via_greens = 2.0 * math.pi * constants.coupling_ev_from_greens(im_g0, d)
            closed = constants.vacuum_decay_rate_ev(omega, d)
            assert via_greens == pytest.approx(closed, rel=1e-12)


class TestDrude:
    def test_gold_parameters_converted(self):
        gold = drude_gold()
        assert gold.plasma_ev == pytest.approx(8.29347065694, rel=1e-11)
        assert gold.damping_ev == pytest.approx(0.0928078859229, rel=1e-11)

    def test_reference_value_at_5ev(self):
        eps = drude_eps(drude_gold(), 5.0)
        assert eps == pytest.approx(EPS_GOLD_5EV, rel=1e-12)

    def test_imaginary_axis_real_and_above_background(self):
        gold = drude_gold()
        for xi in (0.1, 1.0, 10.0, 100.0):
            eps = drude_eps(gold, 1j * xi)
            closed = gold.background + gold.plasma_ev**2 / (xi * (xi + gold.damping_ev))
            assert eps.imag == pytest.approx(0.0, abs=1e-14)
            assert eps.real == pytest.approx(closed, rel=1e-12)
            assert eps.real > gold.background

    def test_monotone_decreasing_on_imaginary_axis(self):
        gold = drude_gold()
        xi = np.geomspace(0.05, 300.0, 200)
        vals = np.array([drude_eps(gold, 1j * x).real for x in xi])
        assert np.all(np.diff(vals) < 0)

    def test_passivity_on_real_axis(self):
        gold = drude_gold()
        omegas = np.geomspace(1e-3, 1e3, 400)
        assert all(drude_eps(gold, w).imag > 0 for w in omegas)

    def test_no_free_carriers_limit(self):
        model = DrudeModel(plasma_ev=0.0, damping_ev=0.1, background=2.25)
        for z in (0.3, 5.0, 1j * 2.0, 1.0 + 0.5j):
            assert drude_eps(model, z) == pytest.approx(2.25)

    def test_pole_errors(self):
        gold = drude_gold()
        with pytest.raises(ValueError, match="pole"):
            drude_eps(gold, 0.0)
        with pytest.raises(ValueError, match="pole"):
            drude_eps(gold, complex(0.0, -gold.damping_ev))

    def test_wrong_variant_rejected(self, silver_table_path):
        table = load_permittivity_table(silver_table_path)
        with pytest.raises(UnsupportedFrequencyError):
            drude_eps(table, 1.0)


class TestTabulated:
    def test_knot_reproduction(self, silver_table_path):
        table = load_permittivity_table(silver_table_path)
        i = len(table.omega_ev) // 2
        val = tabulated_eps(table, table.omega_ev[i])
        assert val.real == pytest.approx(table.eps_re[i], rel=1e-14)
        assert val.imag == pytest.approx(table.eps_im[i], rel=1e-14)

    def test_two_row_midpoint_is_mean(self):
        table = TabulatedModel(
            omega_ev=np.array([1.0, 2.0]),
            eps_re=np.array([-10.0, -6.0]),
            eps_im=np.array([0.2, 0.4]),
        )
        mid = tabulated_eps(table, 1.5)
        assert mid.real == pytest.approx(-8.0, rel=1e-12)
        assert mid.imag == pytest.approx(0.3, rel=1e-12)

    def test_between_rows_bracketed(self, silver_table_path):
        table = load_permittivity_table(silver_table_path)
        rng = np.random.default_rng(7)
        for _ in range(40):
            i = rng.integers(0, len(table.omega_ev) - 1)
            frac = rng.uniform(0.05, 0.95)
            w = table.omega_ev[i] + frac * (table.omega_ev[i + 1] - table.omega_ev[i])
            val = tabulated_eps(table, w)
            lo_re, hi_re = sorted((table.eps_re[i], table.eps_re[i + 1]))
            lo_im, hi_im = sorted((table.eps_im[i], table.eps_im[i + 1]))
            assert lo_re - 1e-12 <= val.real <= hi_re + 1e-12
            assert lo_im - 1e-12 <= val.imag <= hi_im + 1e-12

    def test_monotone_interpolation_no_overshoot(self, silver_table_path):
        # Shape preservation: monotone data cannot produce Im eps < 0.
        table = load_permittivity_table(silver_table_path)
        w = np.linspace(table.omega_ev[0], table.omega_ev[-1], 4000)
        vals = np.array([tabulated_eps(table, wi) for wi in w])
        assert np.all(vals.imag >= 0)

    def test_out_of_range_refused(self, silver_table_path):
        table = load_permittivity_table(silver_table_path)
        with pytest.raises(ValueError, match="range"):
            tabulated_eps(table, table.omega_ev[-1] + 1.0)
        with pytest.raises(ValueError, match="range"):
            tabulated_eps(table, table.omega_ev[0] / 2.0)

    def test_complex_frequency_refused(self, silver_table_path):
        table = load_permittivity_table(silver_table_path)
        with pytest.raises(UnsupportedFrequencyError):
            evaluate_eps(table, 1j * 2.0)

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            TabulatedModel(np.array([1.0, 1.0]), np.array([1.0, 1.0]), np.array([0.0, 0.0]))
        with pytest.raises(ValueError):
            TabulatedModel(np.array([1.0, 2.0]), np.array([1.0, 1.0]), np.array([0.0, -0.1]))


class TestTableIO:
    def test_malformed_rows_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("omega_ev,eps_re,eps_im\n1.0,2.0\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":2"):
            load_permittivity_table(bad)

    def test_unsorted_rows_sorted_with_warning(self, tmp_path):
        path = tmp_path / "unsorted.csv"
        path.write_text(
            "omega_ev,eps_re,eps_im\n2.0,-5.0,0.2\n1.0,-10.0,0.1\n", encoding="utf-8"
        )
        with pytest.warns(UserWarning, match="sorted"):
            table = load_permittivity_table(path)
        assert list(table.omega_ev) == [1.0, 2.0]
