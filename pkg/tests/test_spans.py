import math

import numpy as np
import pytest

from gncf.exceptions import ModelDomainError, ModelValidityWarning
from gncf.model import FrequencyProfile, Link, Span
from gncf.spans import (beta2_bar, effective_alpha0, effective_span_params,
                        fit_effective_raman, fit_effective_raman_arrays,
                        g0, g0_flat, lorentzian_coefficients, psd_at_span,
                        xi_squared_direct)

from conftest import make_flat_link, make_general_link, make_general_span


def flat_span(alpha_np_m=2.5e-5, length=100e3, beta2=-2e-27, gain=None):
    return Span(length=length, gamma=1.3e-3,
                alpha0=FrequencyProfile.constant(alpha_np_m),
                beta2=beta2, beta3=0.121e-39, fc=193.41e12,
                noise_figure_db=6.0,
                edfa_gain=None if gain is None else FrequencyProfile.constant(gain))


class TestEffectiveAlpha0:
    def test_flat_profile(self):
        span = flat_span(alpha_np_m=3.0e-5)
        assert effective_alpha0(span, 193.0e12, 193.5e12, 193.2e12) == \
            pytest.approx(3.0e-5, rel=1e-15)

    def test_linear_tilt(self):
        a, b = 2.5e-5, 1e-19
        knots = np.linspace(192e12, 195e12, 7)
        prof = FrequencyProfile.from_table([(f, a + b * f) for f in knots])
        span = Span(length=1e5, gamma=1e-3, alpha0=prof, beta2=-2e-27,
                    beta3=0.0, fc=193.41e12, noise_figure_db=6.0)
        f1s, f2s, f = 192.8e12, 193.9e12, 193.3e12
        f3s = f1s + f2s - f
        want = 0.5 * ((a + b * f1s) + (a + b * f2s) + (a + b * f3s) - (a + b * f))
        assert effective_alpha0(span, f1s, f2s, f) == pytest.approx(want, rel=1e-13)

    def test_table_profile_four_point_combination(self):
        span = make_general_span(seed=8)
        f1s, f2s, f = 193.1e12, 193.7e12, 193.4e12
        f3s = f1s + f2s - f
        want = 0.5 * (span.alpha0(f1s) + span.alpha0(f2s)
                      + span.alpha0(f3s) - span.alpha0(f))
        assert effective_alpha0(span, f1s, f2s, f) == pytest.approx(want, rel=1e-15)


class TestRamanFit:
    def test_uniform_profiles_recovered_exactly(self):
        a1, sig = 4.0e-6, 1.0 / 22e3
        span = Span(length=1e5, gamma=1e-3,
                    alpha0=FrequencyProfile.constant(2.5e-5),
                    alpha1=FrequencyProfile.constant(a1),
                    sigma=FrequencyProfile.constant(sig),
                    beta2=-2e-27, beta3=0.0, fc=193.41e12, noise_figure_db=6.0)
        got_a1, got_sig = fit_effective_raman(span, 193.0e12, 193.5e12, 193.2e12)
        assert got_a1 == pytest.approx(a1, rel=1e-15)
        assert got_sig == pytest.approx(sig, rel=1e-12)

    def test_no_raman_term(self):
        span = flat_span()
        assert fit_effective_raman(span, 193.0e12, 193.5e12, 193.2e12) == (0.0, 0.0)

    def test_four_distinct_pairs_match_dense_grid_conditions(self):
        # oracle re-checks the two fit conditions (value at z=0, integral
        # over the span) on a 10^4-point grid
        span = make_general_span(seed=3)
        f1s, f2s, f = 193.05e12, 193.80e12, 193.40e12
        f3s = f1s + f2s - f
        a1_bar, sigma_bar = fit_effective_raman(span, f1s, f2s, f)

        pts = (f1s, f2s, f, f3s)
        signs = (0.5, 0.5, -0.5, 0.5)
        z = np.linspace(0.0, span.length, 10_001)
        target = sum(s * span.alpha1(p) * np.exp(-span.sigma(p) * z)
                     for s, p in zip(signs, pts))
        assert a1_bar == pytest.approx(float(target[0]), rel=1e-12)
        target_integral = np.trapezoid(target, z)
        fit_integral = a1_bar * (1 - math.exp(-sigma_bar * span.length)) / sigma_bar
        assert fit_integral == pytest.approx(float(target_integral), rel=1e-6)

    def test_sign_change_warns(self):
        # the subtracted term at f decays slowest -> combination flips sign
        span = Span(
            length=1e5, gamma=1e-3,
            alpha0=FrequencyProfile.constant(2.5e-5),
            alpha1=FrequencyProfile.from_table(
                [(192.0e12, 1e-6), (192.5e12, 2e-6),
                 (193.5e12, 1e-6), (194.0e12, 1e-6)]),
            sigma=FrequencyProfile.from_table(
                [(192.0e12, 1 / 8e3), (192.5e12, 1 / 60e3),
                 (193.5e12, 1 / 8e3), (194.0e12, 1 / 8e3)]),
            beta2=-2e-27, beta3=0.0, fc=193.41e12, noise_figure_db=6.0,
        )
        with pytest.warns(ModelValidityWarning):
            a1_bar, sigma_bar = fit_effective_raman(span, 192.0e12, 194.0e12, 192.5e12)
        assert math.isfinite(a1_bar) and math.isfinite(sigma_bar)

    def test_vectorized_matches_scalar(self):
        span = make_general_span(seed=12)
        rng = np.random.default_rng(0)
        f = 193.4e12
        f1s = rng.uniform(192.9e12, 193.9e12, size=32)
        f2s = rng.uniform(192.9e12, 193.9e12, size=32)
        a1v, sv = fit_effective_raman_arrays(span, f1s, f2s, f)
        for i in range(32):
            a1, s = fit_effective_raman(span, float(f1s[i]), float(f2s[i]), f)
            assert a1v[i] == pytest.approx(a1, rel=1e-13)
            assert sv[i] == pytest.approx(s, rel=1e-10, abs=1e-18)


class TestBeta2Bar:
    def test_no_slope(self):
        span = flat_span(beta2=-5e-27)
        span = Span(**{**span.__dict__, "beta3": 0.0})
        assert beta2_bar(span, 193.0e12, 194.0e12) == -5e-27

    def test_cancels_at_expansion_center(self):
        span = flat_span(beta2=-5e-27)
        fc = span.fc
        assert beta2_bar(span, fc + 3e11, fc - 3e11) == pytest.approx(-5e-27, rel=1e-15)

    def test_symmetry_and_value(self):
        span = flat_span(beta2=2e-28)
        fa, fb = 193.1e12, 193.9e12
        want = span.beta2 + math.pi * span.beta3 * (fa + fb - 2 * span.fc)
        assert beta2_bar(span, fa, fb) == pytest.approx(want, rel=1e-15)
        assert beta2_bar(span, fa, fb) == beta2_bar(span, fb, fa)


class TestLorentzianCoefficients:
    def test_flat_loss_values(self):
        a0, b2 = 2.5e-5, -2e-27
        J1, J2, D1, D2 = lorentzian_coefficients(a0, 0.0, 0.0, b2)
        assert J1 == 0.0
        assert J2 == pytest.approx(1.0 / (4 * a0 * a0), rel=1e-15)
        assert D2 == pytest.approx(2 * math.pi**2 * b2 / a0, rel=1e-15)

    def test_sigma_equals_twice_alpha1_kills_j2(self):
        a0, a1 = 2.5e-5, 3.0e-6
        J1, J2, D1, D2 = lorentzian_coefficients(a0, a1, 2 * a1, -2e-27)
        assert J2 == 0.0
        assert J1 > 0.0

    def test_rejects_nonpositive_alpha0(self):
        with pytest.raises(ModelDomainError):
            lorentzian_coefficients(0.0, 0.0, 0.0, 1e-27)
        with pytest.raises(ModelDomainError):
            lorentzian_coefficients(-1e-6, 0.0, 0.0, 1e-27)

    def test_decomposition_matches_direct_kernel(self):
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(500):
            a0 = 10 ** rng.uniform(-6, -4)
            a1 = rng.uniform(-1, 1) * 10 ** rng.uniform(-7, -5)
            s = 10 ** rng.uniform(-6, -4)
            b2 = rng.uniform(-1, 1) * 10 ** rng.uniform(-28, -26)
            J1, J2, D1, D2 = (float(v) for v in
                              lorentzian_coefficients(a0, a1, s, b2))
            from gncf.spans import EffectiveSpanParams
            eff = EffectiveSpanParams(a0, a1, s, b2, J1, J2, D1, D2)
            f = 193.4e12
            for _ in range(20):
                f1 = f + rng.uniform(-1, 1) * 10 ** rng.uniform(9, 12)
                f2 = f + rng.uniform(-1, 1) * 10 ** rng.uniform(9, 12)
                x2 = ((f1 - f) * (f2 - f)) ** 2
                lhs = J1 / (1 + x2 * D1 * D1) + J2 / (1 + x2 * D2 * D2)
                rhs = float(xi_squared_direct(eff, f1, f2, f))
                worst = max(worst, abs(lhs - rhs) / abs(rhs))
        assert worst <= 1e-9

    def test_zero_detuning_value(self):
        a0, a1, s = 2.5e-5, 3e-6, 5e-5
        from gncf.spans import EffectiveSpanParams
        J1, J2, D1, D2 = (float(v) for v in
                          lorentzian_coefficients(a0, a1, s, -2e-27))
        eff = EffectiveSpanParams(a0, a1, s, -2e-27, J1, J2, D1, D2)
        f = 193.4e12
        want = abs(1 / (2 * a0) - 2 * a1 / ((2 * a0) * (2 * a0 + s))) ** 2
        assert float(xi_squared_direct(eff, f, f + 5e10, f)) == \
            pytest.approx(want, rel=1e-13)
        # continuity: J1 + J2 equals the zero-detuning kernel value
        assert J1 + J2 == pytest.approx(want, rel=1e-13)


class TestG0:
    def test_transparent_flat_link(self):
        link = make_flat_link(n_channels=2, n_spans=3, seed=4)
        f = link.f_cut
        for ns in range(1, 4):
            want = math.exp(sum(
                -2.0 * s.alpha0.values[0] * s.length
                for s in link.spans[ns - 1:]
            ))
            assert g0(link, ns, f + 3e10, f - 2e10, f) == pytest.approx(want, rel=1e-12)

    def test_single_transparent_span(self):
        link = make_flat_link(n_channels=1, n_spans=1, seed=5)
        span = link.spans[0]
        f = link.f_cut
        want = math.exp(-2.0 * span.alpha0.values[0] * span.length)
        assert g0(link, 1, f, f, f) == pytest.approx(want, rel=1e-13)

    def test_general_matches_independent_product(self):
        link = make_general_link(n_channels=2, n_spans=3, seed=9)
        f = link.f_cut
        f1s, f2s = f + 4.1e10, f - 2.7e10
        f3s = f1s + f2s - f
        for ns in range(1, 4):
            log_total = 0.0
            for p in range(ns - 1):
                sp = link.spans[p]
                for x in (f1s, f2s, f3s):
                    raman = (sp.alpha1(x) / sp.sigma(x)
                             * (math.exp(-sp.sigma(x) * sp.length) - 1.0))
                    log_total += (0.5 * math.log(float(sp.gain(x)))
                                  - sp.length * sp.alpha0(x) + raman)
            for p in range(ns - 1, 3):
                sp = link.spans[p]
                raman = (sp.alpha1(f) / sp.sigma(f)
                         * (math.exp(-sp.sigma(f) * sp.length) - 1.0))
                log_total += (-0.5 * math.log(float(sp.gain(f)))
                              - sp.length * sp.alpha0(f) + raman)
            assert g0(link, ns, f1s, f2s, f) == \
                pytest.approx(math.exp(log_total), rel=1e-12)

    def test_flat_route_equals_general_route(self):
        link = make_flat_link(n_channels=3, n_spans=3, seed=6)
        f = link.f_cut
        for ns in (1, 2, 3):
            assert g0_flat(link, ns, f + 5e10, f, f) == \
                pytest.approx(g0(link, ns, f + 5e10, f, f), rel=1e-13)

    def test_near_zero_length_transparent_span_is_neutral(self):
        base = make_flat_link(n_channels=2, n_spans=2, seed=7)
        tiny = Span(length=1e-6, gamma=0.0,
                    alpha0=FrequencyProfile.constant(2.5e-5),
                    beta2=0.0, beta3=0.0, fc=193.41e12, noise_figure_db=6.0)
        spans = (base.spans[0], tiny, base.spans[1])
        grown = Link(spans=spans, comb=base.comb, cut_index=base.cut_index)
        f = base.f_cut
        a = g0(base, 2, f + 1e10, f, f)
        b = g0(grown, 3, f + 1e10, f, f)
        assert b == pytest.approx(a, rel=1e-9)

    def test_current_span_toggle(self):
        link = make_flat_link(n_channels=2, n_spans=2, seed=8)
        f = link.f_cut
        span1 = link.spans[0]
        with_own = g0(link, 1, f, f, f)
        without = g0(link, 1, f, f, f, include_current_span=False)
        ratio = math.exp(-2.0 * span1.alpha0.values[0] * span1.length)
        assert with_own / without == pytest.approx(ratio, rel=1e-12)


class TestPsdAtSpan:
    def test_first_span_unchanged(self):
        link = make_general_link(n_channels=2, n_spans=3, seed=2)
        ch = link.comb[0]
        assert psd_at_span(link, ch, 1, ch.f_center) == ch.psd

    def test_transparent_spans_preserve_psd(self):
        link = make_flat_link(n_channels=2, n_spans=4, seed=3)
        ch = link.comb[1]
        for ns in range(1, 5):
            assert psd_at_span(link, ch, ns, ch.f_center) == \
                pytest.approx(ch.psd, rel=1e-12)

    def test_lossy_uncompensated_span(self):
        span = flat_span(gain=1.0)  # unity-gain amplifier after a lossy span
        link = Link(spans=(span, span), comb=make_flat_link(1, 1, 1).comb,
                    cut_index=0)
        ch = link.comb[0]
        scale = float(span.gain(ch.f_center)) * math.exp(
            -2 * span.alpha0.values[0] * span.length)
        assert psd_at_span(link, ch, 2, ch.f_center) == \
            pytest.approx(ch.psd * scale, rel=1e-12)


class TestEffectiveSpanParams:
    def test_cache_round_trip(self):
        span = make_general_span(seed=1)
        cache = {}
        p1 = effective_span_params(span, 193.1e12, 193.5e12, 193.3e12,
                                   cache=cache, cache_key=(1, 0))
        p2 = effective_span_params(span, 193.1e12, 193.5e12, 193.3e12,
                                   cache=cache, cache_key=(1, 0))
        assert p1 is p2

    def test_flat_input_reduces_to_flat_forms(self):
        span = flat_span(alpha_np_m=2.2e-5, beta2=-3e-27)
        eff = effective_span_params(span, 193.2e12, 193.6e12, 193.4e12)
        assert eff.alpha1_bar == 0.0 and eff.sigma_bar == 0.0
        assert eff.J1 == 0.0
        assert eff.J2 == pytest.approx(1 / (4 * 2.2e-5**2), rel=1e-15)
        assert eff.D2_bar == pytest.approx(
            2 * math.pi**2 * eff.beta2_bar / 2.2e-5, rel=1e-15)
