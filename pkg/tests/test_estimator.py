import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rebar_gauge import SPEED_OF_LIGHT
from rebar_gauge import estimator as est
from rebar_gauge.curve import TheoreticalCurve, build_curve
from rebar_gauge.errors import AmbiguityError, DomainError, OutOfRangeError
from rebar_gauge.scattering import MediumModel
from rebar_gauge.sigproc import auto_band, forward_spectrum
from rebar_gauge.synth import generate_pair
from rebar_gauge.workflow import analyze, prepare_pair


def _toy_curve(ratios, grid=None):
    grid = np.arange(1.0, 1.0 + len(ratios)) if grid is None else grid
    return TheoreticalCurve(np.asarray(grid, float), np.asarray(ratios, float),
                            MediumModel(1.0), (1e9, 2e9), 0.0, 1e9)


@pytest.fixture
def case_inputs(case_scenario):
    par, perp = generate_pair(case_scenario)
    prep = prepare_pair(perp, par)
    spec = forward_spectrum(prep.par, auto_band(forward_spectrum(prep.par)))
    return prep, spec


def test_grid_point_hit_exactly():
    c = _toy_curve([0.1, 0.2, 0.4, 0.8])
    assert est.estimate_diameter(0.4, c).diameter_mm == 3.0
    assert est.estimate_diameter(0.1, c).diameter_mm == 1.0
    assert est.estimate_diameter(0.8, c).diameter_mm == 4.0


def test_linear_interpolation_and_slope():
    res = est.estimate_diameter(0.3, _toy_curve([0.1, 0.2, 0.4, 0.8]))
    assert res.diameter_mm == pytest.approx(2.5)
    assert res.curve_slope_at_estimate == pytest.approx(0.2)


def test_out_of_range():
    c = _toy_curve([0.1, 0.2, 0.4])
    with pytest.raises(OutOfRangeError):
        est.estimate_diameter(1.01 * 0.4, c)
    with pytest.raises(OutOfRangeError):
        est.estimate_diameter(0.05, c)


def test_ambiguity_on_non_monotone_curve():
    with pytest.raises(AmbiguityError):
        est.estimate_diameter(0.35, _toy_curve([0.1, 0.4, 0.3, 0.5]))


def test_rejects_non_positive_ratio():
    with pytest.raises(DomainError):
        est.estimate_diameter(0.0, _toy_curve([0.1, 0.2]))


def test_residual_is_tiny(case_inputs):
    prep, spec = case_inputs
    curve = build_curve(spec, prep.s_t, MediumModel(3.0), fc=1.2e9)
    for target in (0.01, 0.0857, 0.3):
        d = est.estimate_diameter(target, curve).diameter_mm
        again = np.interp(d, curve.diameters_mm, curve.ratios)
        assert abs(again - target) < 1e-9 * target


def test_round_trip_on_grid(case_inputs):
    prep, spec = case_inputs
    curve = build_curve(spec, prep.s_t, MediumModel(3.0), fc=1.2e9)
    step = curve.diameters_mm[1] - curve.diameters_mm[0]
    for d, r in curve.points[::7]:
        assert abs(est.estimate_diameter(r, curve).diameter_mm - d) <= step


def test_bit_identical_repeats(case_inputs):
    prep, spec = case_inputs
    curve = build_curve(spec, prep.s_t, MediumModel(3.0), fc=1.2e9)
    a = est.estimate_diameter(0.0857, curve)
    b = est.estimate_diameter(0.0857, curve)
    assert a == b


class TestPlate:
    def test_case_values(self):
        cal = est.permittivity_from_plate(2.3094e-9, 0.20)
        assert cal.relative_permittivity == pytest.approx(3.00, abs=0.01)
        assert not cal.unphysical

    def test_free_space(self):
        cal = est.permittivity_from_plate(2 * 0.3 / SPEED_OF_LIGHT, 0.3)
        assert cal.relative_permittivity == pytest.approx(1.0, rel=1e-14)

    def test_round_trip_eight(self):
        dt = 2 * 0.15 * np.sqrt(8.0) / SPEED_OF_LIGHT
        assert est.permittivity_from_plate(dt, 0.15).relative_permittivity == pytest.approx(8.0, rel=1e-13)

    def test_flags_unphysical(self):
        assert est.permittivity_from_plate(1e-9, 0.3).unphysical

    @pytest.mark.parametrize("dt, depth", [(0.0, 0.2), (1e-9, 0.0), (-1e-9, 0.2)])
    def test_rejects(self, dt, depth):
        with pytest.raises(DomainError):
            est.permittivity_from_plate(dt, depth)


class TestSensitivity:
    def test_zero_perturbation(self, case_inputs):
        prep, spec = case_inputs
        rows = est.sensitivity_sweep(0.0857, spec, prep.s_t, 3.0, [0.0])
        assert rows[0].percent_error == 0.0

    def test_sign_rule(self, case_inputs):
        prep, spec = case_inputs
        low, high = est.sensitivity_sweep(0.0857, spec, prep.s_t, 3.0, [-0.1, 0.1])
        assert low.percent_error > 0.0 > high.percent_error
        assert abs(low.percent_error) <= 10 and abs(high.percent_error) <= 10

    def test_rejects_sub_unity(self, case_inputs):
        prep, spec = case_inputs
        with pytest.raises(DomainError):
            est.sensitivity_sweep(0.0857, spec, prep.s_t, 1.05, [-0.1])


class TestSingleFrequency:
    @settings(max_examples=30, deadline=None)
    @given(d=st.floats(0.5, 30.0), er=st.floats(1.0, 9.0))
    def test_inverts_own_forward_map(self, d, er):
        medium = MediumModel(er)
        f = 1e9
        limit_mm = 2e3 * est.single_freq_monotone_limit() / (2 * np.pi * f * np.sqrt(er) / SPEED_OF_LIGHT)
        if d >= limit_mm:
            return
        r = est.single_freq_ratio(d, f, medium)
        assert est.estimate_diameter_single_freq(r, f, medium).diameter_mm == pytest.approx(d, abs=1e-6)

    def test_vanishing_ratio_vanishing_diameter(self):
        ds = [est.estimate_diameter_single_freq(r, 1e9, MediumModel(1.0)).diameter_mm
              for r in (1e-4, 1e-8, 1e-12, 1e-16)]
        assert np.all(np.diff(ds) < 0) and 0.0 < ds[-1] < 0.01

    def test_out_of_range(self):
        with pytest.raises(OutOfRangeError):
            est.estimate_diameter_single_freq(5.0, 1e9, MediumModel(1.0))

    def test_wideband_beats_single_frequency(self, case_scenario):
        par, perp = generate_pair(case_scenario)
        wide = analyze(perp, par, case_scenario.medium).estimate.diameter_mm
        ratio = analyze(perp, par, case_scenario.medium).ratio
        narrow = est.estimate_diameter_single_freq(ratio, case_scenario.fc, case_scenario.medium).diameter_mm
        assert abs(narrow - 12.0) > abs(wide - 12.0)


def test_calibration_bar_recovers_permittivity(case_scenario):
    par, perp = generate_pair(case_scenario)
    prep = prepare_pair(perp, par)
    spec = forward_spectrum(prep.par, auto_band(forward_spectrum(prep.par)))
    from rebar_gauge.sigproc import wideband_power_ratio

    ratio = wideband_power_ratio(prep.perp, prep.par)
    er = est.calibrate_permittivity(12.0, ratio, spec, prep.s_t, fc=1.2e9)
    assert er == pytest.approx(3.0, rel=1e-3)


def test_calibration_out_of_bracket(case_inputs):
    prep, spec = case_inputs
    with pytest.raises(OutOfRangeError):
        est.calibrate_permittivity(12.0, 5.0, spec, prep.s_t)
