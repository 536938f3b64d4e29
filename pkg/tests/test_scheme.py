import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from awisim.scheme import (
    SchemeParams,
    TWO_PI,
    convert_params,
    departure_rates,
    hg_gain_preset,
    hg_preset,
    load_params,
    save_params,
    scan_preset,
    to_gamma21_units,
    validity_check,
)

finite_rate = st.floats(min_value=0.0, max_value=1e3, allow_nan=False)


class TestPresets:
    def test_hg_decay_rates(self):
        p = hg_preset()
        assert p.gamma_21 == pytest.approx(TWO_PI * 1.27)
        assert p.gamma_32 == pytest.approx(TWO_PI * 8.86)
        assert p.gamma_34 == pytest.approx(TWO_PI * 7.75)
        assert p.omega_p == p.omega_s == p.omega_w == 0.0

    def test_hg_rate_ratios(self):
        p = hg_preset()
        assert p.gamma_34 / p.gamma_21 == pytest.approx(6.10, abs=5e-3)
        assert p.gamma_32 / p.gamma_21 == pytest.approx(6.98, abs=5e-3)

    def test_hg_gain_fields(self):
        p = hg_gain_preset()
        assert p.omega_s == pytest.approx(TWO_PI * 88.9)
        assert p.omega_w == pytest.approx(TWO_PI * 25.4)
        assert p.omega_p == pytest.approx(TWO_PI * 0.0013)
        assert p.delta_p == p.delta_s == p.delta_w == 0.0
        assert p.lambda_pump == pytest.approx(TWO_PI * 0.38)
        assert hg_gain_preset(pumped=False).lambda_pump == 0.0

    def test_scan_preset_is_gamma21_units(self):
        p = scan_preset()
        assert p.gamma_21 == 1.0
        assert (p.gamma_32, p.gamma_34, p.lambda_pump) == (5.0, 10.0, 0.3)
        assert (p.omega_p, p.omega_w, p.omega_s) == (0.001, 20.0, 70.0)


class TestValidation:
    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError, match="gamma_32"):
            SchemeParams(gamma_21=1.0, gamma_32=-0.1)

    def test_negative_rabi_rejected(self):
        with pytest.raises(ValueError, match="omega_s"):
            SchemeParams(gamma_21=1.0, omega_s=-1.0)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="delta_p"):
            SchemeParams(gamma_21=1.0, delta_p=math.inf)

    def test_signed_detunings_allowed(self):
        SchemeParams(gamma_21=1.0, delta_p=-5.0, delta_w=3.0)


class TestDepartureRates:
    def test_scan_rates(self):
        g = departure_rates(SchemeParams(gamma_21=1.0, gamma_32=5.0, gamma_34=10.0,
                                         lambda_pump=0.3))
        assert g.as_tuple() == (0.3, 1.3, 15.0, 0.0)

    def test_zero_pump(self):
        g = departure_rates(SchemeParams(gamma_21=1.0, gamma_32=2.0, gamma_34=3.0))
        assert g.g1 == 0.0

    def test_hg_pumped_g2(self):
        p = hg_preset().replace(lambda_pump=TWO_PI * 0.38)
        assert departure_rates(p).g2 == pytest.approx(TWO_PI * 1.65)

    @given(g21=finite_rate, g32=finite_rate, g34=finite_rate, lam=finite_rate,
           scale=st.floats(min_value=0.25, max_value=4.0))
    @settings(max_examples=50)
    def test_linear_in_rates_and_field_independent(self, g21, g32, g34, lam, scale):
        base = SchemeParams(gamma_21=g21, gamma_32=g32, gamma_34=g34, lambda_pump=lam)
        scaled = departure_rates(base.scaled(scale))
        ref = departure_rates(base)
        for a, b in zip(scaled.as_tuple(), ref.as_tuple()):
            assert a == pytest.approx(scale * b, rel=1e-12, abs=1e-300)
        with_fields = base.replace(omega_p=1.0, omega_s=2.0, omega_w=3.0,
                                   delta_p=-1.0, delta_s=0.5, delta_w=2.0)
        assert departure_rates(with_fields) == ref

    @given(g21=finite_rate, g32=finite_rate, g34=finite_rate, lam=finite_rate)
    @settings(max_examples=50)
    def test_level4_never_departs(self, g21, g32, g34, lam):
        p = SchemeParams(gamma_21=g21, gamma_32=g32, gamma_34=g34, lambda_pump=lam)
        assert departure_rates(p).g4 == 0.0


class TestValidityCheck:
    def test_scan_configuration_holds(self):
        report = validity_check(SchemeParams(
            omega_p=0.001, omega_s=70.0, omega_w=20.0,
            gamma_21=1.0, gamma_32=5.0, gamma_34=10.0, lambda_pump=0.3))
        assert report.holds
        assert report.messages == ()

    def test_probe_equal_to_pump_fails(self):
        p = SchemeParams(omega_p=0.3, omega_s=70.0, omega_w=20.0,
                         gamma_21=1.0, gamma_32=5.0, gamma_34=10.0, lambda_pump=0.3)
        report = validity_check(p)
        assert not report.probe_below_pump
        assert not report.holds

    def test_zero_weak_field_fails(self):
        p = SchemeParams(omega_p=0.001, omega_s=70.0, omega_w=0.0,
                         gamma_21=1.0, gamma_32=5.0, gamma_34=10.0, lambda_pump=0.3)
        report = validity_check(p)
        assert not report.weak_exceeds_rates
        assert not report.holds


class TestUnits:
    def test_round_trip_via_gamma21(self):
        p = hg_gain_preset()
        scaled = to_gamma21_units(p)
        assert scaled.gamma_21 == 1.0
        back = scaled.scaled(p.gamma_21)
        for name in ("omega_p", "omega_s", "omega_w", "gamma_32", "gamma_34", "lambda_pump"):
            assert getattr(back, name) == pytest.approx(getattr(p, name), rel=1e-12)

    @given(st.floats(min_value=1e-3, max_value=1e3),
           st.floats(min_value=1e-3, max_value=1e3))
    @settings(max_examples=50)
    def test_round_trip_random(self, omega, gamma):
        p = SchemeParams(omega_s=omega, gamma_21=gamma)
        back = to_gamma21_units(p).scaled(gamma)
        assert back.omega_s == pytest.approx(omega, rel=1e-12)
        assert back.gamma_21 == pytest.approx(gamma, rel=1e-12)

    def test_two_pi_mhz_conversion(self):
        p = SchemeParams(omega_s=88.9, gamma_21=1.27)  # interpreted as 2*pi x MHz
        q = convert_params(p, "two_pi_MHz", "us_inv")
        assert q.omega_s == pytest.approx(TWO_PI * 88.9)
        assert convert_params(q, "us_inv", "two_pi_MHz").omega_s == pytest.approx(88.9)

    def test_gamma21_conversion_needs_reference(self):
        p = SchemeParams(omega_s=70.0, gamma_21=1.0)
        with pytest.raises(ValueError, match="gamma21_us_inv"):
            convert_params(p, "gamma21", "us_inv")
        q = convert_params(p, "gamma21", "us_inv", gamma21_us_inv=TWO_PI * 1.27)
        assert q.omega_s == pytest.approx(70.0 * TWO_PI * 1.27)

    def test_rescale_requires_positive_gamma21(self):
        with pytest.raises(ValueError, match="gamma_21"):
            to_gamma21_units(SchemeParams(omega_s=1.0))


class TestParameterFiles:
    def test_round_trip(self, tmp_path):
        p = hg_gain_preset()
        path = tmp_path / "params.cfg"
        save_params(p, path, units="us_inv")
        q, units = load_params(path)
        assert units == "us_inv"
        assert q == p

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("units = gamma21\nomega_q = 1.0\n")
        with pytest.raises(ValueError, match="omega_q"):
            load_params(path)

    def test_missing_keys_rejected(self, tmp_path):
        path = tmp_path / "partial.cfg"
        path.write_text("units = gamma21\nomega_p = 0.001\n")
        with pytest.raises(ValueError, match="missing keys"):
            load_params(path)

    def test_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "c.cfg"
        save_params(scan_preset(), path)
        text = "# a comment\n\n" + path.read_text() + "\n# trailing\n"
        path.write_text(text)
        q, units = load_params(path)
        assert q == scan_preset()
        assert units == "gamma21"
