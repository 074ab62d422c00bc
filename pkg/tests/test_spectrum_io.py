import hashlib

import numpy as np
import pytest

from plasmon_shift import (
    CouplingSpectrum,
    SphereSystem,
    SpectrumParseError,
    SpectrumValidationError,
    emit_spectrum,
    extrapolate_zero,
    from_sphere,
    ingest_spectrum,
    resample,
    scattering_g_rr,
    sphere_frequency_grid,
)


def _simple_spectrum(n=40, hi=10.0):
    omega = np.linspace(0.1, hi, n)
    g = 0.01 / (omega + 1.0) + 1j * 1e-3 * omega / (1.0 + omega**2)
    return CouplingSpectrum(omega_ev=omega, g_ev=g, includes_vacuum=True, source="synthetic")


class TestValidation:
    def test_happy_path(self, tmp_path):
        path = tmp_path / "three.csv"
        path.write_text(
            "omega_ev,g_re_ev,g_im_ev\n"
            "1.0,0.5,0.1\n2.0,0.4,0.2\n3.0,0.3,0.1\n",
            encoding="utf-8",
        )
        spec = ingest_spectrum(path)
        assert spec.omega_ev.size == 3
        assert spec.source == "ingested-file"

    def test_duplicate_frequency_named(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text(
            "omega_ev,g_re_ev,g_im_ev\n1.0,0.5,0.1\n1.0,0.4,0.2\n2.0,0.3,0.1\n",
            encoding="utf-8",
        )
        with pytest.raises(SpectrumValidationError, match="1.0"):
            ingest_spectrum(path)

    def test_malformed_row_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(
            "omega_ev,g_re_ev,g_im_ev\n1.0,0.5,0.1\n2.0,oops,0.2\n", encoding="utf-8"
        )
        with pytest.raises(SpectrumParseError) as err:
            ingest_spectrum(path)
        assert err.value.line == 3

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "cols.csv"
        path.write_text("omega_ev,g_re_ev,g_im_ev\n1.0,0.5\n", encoding="utf-8")
        with pytest.raises(SpectrumParseError, match="3 columns"):
            ingest_spectrum(path)

    def test_nonpositive_frequency_rejected(self, tmp_path):
        path = tmp_path / "neg.csv"
        path.write_text(
            "omega_ev,g_re_ev,g_im_ev\n-1.0,0.5,0.1\n2.0,0.3,0.1\n", encoding="utf-8"
        )
        with pytest.raises(SpectrumValidationError, match="positive"):
            ingest_spectrum(path)

    def test_unsorted_rows_sorted_with_warning(self, tmp_path):
        path = tmp_path / "unsorted.csv"
        path.write_text(
            "omega_ev,g_re_ev,g_im_ev\n2.0,0.4,0.2\n1.0,0.5,0.1\n", encoding="utf-8"
        )
        with pytest.warns(UserWarning, match="sort"):
            spec = ingest_spectrum(path)
        assert list(spec.omega_ev) == [1.0, 2.0]

    def test_passivity_guard(self):
        omega = np.array([1.0, 2.0])
        with pytest.raises(SpectrumValidationError, match="passivity"):
            CouplingSpectrum(
                omega_ev=omega, g_ev=np.array([0.1 - 1e-3j, 0.1 + 0.1j]),
                includes_vacuum=True,
            )


class TestRoundTrip:
    def test_values_identical_to_full_precision(self, tmp_path):
        spec = _simple_spectrum()
        path = tmp_path / "spec.csv"
        emit_spectrum(spec, path)
        back = ingest_spectrum(path)
        np.testing.assert_array_equal(back.omega_ev, spec.omega_ev)
        np.testing.assert_array_equal(back.g_ev, spec.g_ev)
        assert back.includes_vacuum == spec.includes_vacuum
        assert back.omega_max_ev == spec.omega_max_ev

    def test_metadata_comments_preserved(self, tmp_path):
        spec = _simple_spectrum()
        path = tmp_path / "spec.csv"
        emit_spectrum(spec, path)
        text = path.read_text(encoding="utf-8")
        assert text.startswith("#")
        assert "# source = synthetic" in text
        assert "\r" not in text  # LF endings

    def test_deterministic_bytes(self, tmp_path):
        spec = _simple_spectrum()
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_spectrum(spec, p1)
        emit_spectrum(spec, p2)
        h1 = hashlib.sha256(p1.read_bytes()).hexdigest()
        h2 = hashlib.sha256(p2.read_bytes()).hexdigest()
        assert h1 == h2


class TestResample:
    def test_knot_reproduction(self):
        spec = _simple_spectrum()
        again = resample(spec, spec.omega_ev)
        np.testing.assert_allclose(again.g_ev, spec.g_ev, rtol=0, atol=0)

    def test_midpoint_bracketing(self):
        spec = _simple_spectrum()
        mids = 0.5 * (spec.omega_ev[:-1] + spec.omega_ev[1:])
        vals = resample(spec, mids).g_ev
        lo = np.minimum(spec.g_ev.real[:-1], spec.g_ev.real[1:])
        hi = np.maximum(spec.g_ev.real[:-1], spec.g_ev.real[1:])
        assert np.all(vals.real >= lo - 1e-15) and np.all(vals.real <= hi + 1e-15)

    def test_out_of_range_rejected(self):
        spec = _simple_spectrum()
        with pytest.raises(ValueError, match="outside"):
            resample(spec, np.array([spec.omega_ev[-1] + 1.0]))

    def test_refinement_convergence_high_order(self, gold_sphere_h2):
        # Interpolation error against the analytic model must fall at
        # high (cubic) order when the sampling grid is refined 2x.
        probe = np.linspace(4.0, 6.0, 1501)
        exact = scattering_g_rr(probe, gold_sphere_h2)
        errs = []
        for n in (400, 800):
            grid = np.linspace(3.5, 6.5, n)
            spec = from_sphere(gold_sphere_h2, grid)
            approx = resample(spec, probe).g_ev
            errs.append(np.max(np.abs(approx - exact)))
        order = np.log2(errs[0] / errs[1])
        assert order > 2.5


class TestExtrapolation:
    def test_exact_line_recovered(self):
        omega = np.linspace(0.05, 0.3, 30)
        g = (178.685 + 2.44152 * omega) + 0.0j
        spec = CouplingSpectrum(omega_ev=omega, g_ev=g, includes_vacuum=True)
        fit = extrapolate_zero(spec, (0.125, 0.2))
        assert fit.intercept_ev == pytest.approx(178.685, abs=1e-9)
        assert fit.slope == pytest.approx(2.44152, abs=1e-8)
        assert fit.residual_norm < 1e-10

    def test_constant_data(self):
        omega = np.linspace(0.05, 0.3, 30)
        spec = CouplingSpectrum(
            omega_ev=omega, g_ev=np.full(30, 3.25 + 0j), includes_vacuum=True
        )
        fit = extrapolate_zero(spec, (0.125, 0.2))
        assert fit.intercept_ev == pytest.approx(3.25, abs=1e-12)
        assert fit.slope == pytest.approx(0.0, abs=1e-10)

    def test_noisy_line_within_confidence(self):
        rng = np.random.default_rng(11)
        omega = np.linspace(0.1, 0.25, 120)
        sigma = 1e-3
        intercept, slope = 0.42, 1.7
        g = intercept + slope * omega + rng.normal(0.0, sigma, omega.size)
        spec = CouplingSpectrum(omega_ev=omega, g_ev=g + 0j, includes_vacuum=True)
        fit = extrapolate_zero(spec, (0.1, 0.25))
        # 3-sigma band for the intercept of an evenly sampled line
        x = omega - omega.mean()
        se = sigma * np.sqrt(1.0 / omega.size + omega.mean() ** 2 / np.sum(x**2))
        assert abs(fit.intercept_ev - intercept) < 3.0 * se

    def test_invariant_under_exact_line_insertion(self):
        omega = np.linspace(0.05, 0.3, 40)
        g = 1.5 - 0.3 * omega + 0.0j
        spec = CouplingSpectrum(omega_ev=omega, g_ev=g, includes_vacuum=True)
        fit1 = extrapolate_zero(spec, (0.1, 0.25))
        extra = np.sort(np.concatenate([omega, [0.151, 0.201]]))
        spec2 = CouplingSpectrum(
            omega_ev=extra, g_ev=1.5 - 0.3 * extra + 0.0j, includes_vacuum=True
        )
        fit2 = extrapolate_zero(spec2, (0.1, 0.25))
        assert fit1.intercept_ev == pytest.approx(fit2.intercept_ev, abs=1e-12)

    def test_too_few_samples(self):
        spec = _simple_spectrum(n=5, hi=10.0)
        with pytest.raises(ValueError, match="at least 3"):
            extrapolate_zero(spec, (0.0, 0.2))


class TestTailPolicy:
    def test_warning_above_range(self):
        spec = _simple_spectrum()
        with pytest.warns(UserWarning, match="zero"):
            val = spec.im_at(spec.omega_ev[-1] + 1.0)
        assert val == 0.0

    def test_sphere_grid_covers_resonances(self, gold_sphere_h1):
        grid = sphere_frequency_grid(gold_sphere_h1, 0.1, 10.0)
        spec = from_sphere(gold_sphere_h1, grid)
        centers, widths = spec.peaks()
        assert centers.size >= 1
        assert np.all((centers > 4.0) & (centers < 6.0))
