import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gncf import units
from gncf.config import emit_link_config, ingest_link_config
from gncf.exceptions import ConfigError
from gncf.formats import CONSTELLATIONS, PHI_TABLE, compute_phi, phi_for_format


class TestComputePhi:
    def test_qpsk(self):
        assert compute_phi(CONSTELLATIONS["qpsk"]) == pytest.approx(1.0, rel=1e-15)

    def test_16qam(self):
        assert compute_phi(CONSTELLATIONS["16qam"]) == pytest.approx(17.0 / 25.0, rel=1e-14)

    def test_64qam(self):
        assert compute_phi(CONSTELLATIONS["64qam"]) == pytest.approx(13.0 / 21.0, rel=1e-14)

    def test_256qam(self):
        assert compute_phi(CONSTELLATIONS["256qam"]) == pytest.approx(257.0 / 425.0, rel=1e-14)

    def test_circular_gaussian_is_zero(self):
        # Gauss-Hermite grid with weights: moments up to order 4 are exact,
        # so the discretized circular-Gaussian ensemble must give phi = 0
        nodes, weights = np.polynomial.hermite_e.hermegauss(7)
        pts, probs = [], []
        for x, wx in zip(nodes, weights):
            for y, wy in zip(nodes, weights):
                pts.append(complex(x, y))
                probs.append(wx * wy)
        probs = [p / sum(probs) for p in probs]
        assert compute_phi(pts, probs) == pytest.approx(0.0, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            compute_phi([])

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            compute_phi([0j, 0j])

    @given(st.floats(min_value=0.01, max_value=100.0),
           st.floats(min_value=0.0, max_value=2 * math.pi))
    def test_scale_invariance(self, mag, angle):
        c = mag * complex(math.cos(angle), math.sin(angle))
        base = compute_phi(CONSTELLATIONS["32qam"])
        scaled = compute_phi([c * p for p in CONSTELLATIONS["32qam"]])
        assert scaled == pytest.approx(base, rel=1e-9)

    def test_format_lookup(self):
        assert phi_for_format("PM-QPSK") == PHI_TABLE["qpsk"]
        assert phi_for_format("gaussian") == 0.0
        with pytest.raises(ConfigError):
            phi_for_format("13qam")


class TestUnitConversions:
    def test_alpha_db_km(self):
        # 0.22 dB/km -> 2.5328e-5 Np/m field attenuation
        got = units.atten_db_km_to_field_np_m(0.22)
        assert got == pytest.approx(0.22 * math.log(10) / 20.0 / 1000.0, rel=1e-15)
        assert got == pytest.approx(2.5328e-5, rel=1e-4)

    def test_dispersion_to_beta2(self):
        # D = 16.7 ps/nm/km at 1550 nm -> beta2 ~ -21.3 ps^2/km
        d = 16.7 * units.PS_PER_NM_KM
        b2 = units.dispersion_to_beta2(d, 1550e-9)
        want = -d * (1550e-9) ** 2 / (2 * math.pi * units.LIGHT_SPEED)
        assert b2 == pytest.approx(want, rel=1e-15)
        assert b2 / units.PS2_PER_KM == pytest.approx(-21.3, abs=0.05)


class TestIngest:
    def test_rectangle_replacement(self, demo_doc):
        # 64 GBaud at 193.41 THz -> [193.41e12 - 32e9, 193.41e12 + 32e9]
        link = ingest_link_config(demo_doc)
        ch = link.comb[2]
        assert ch.f_start == pytest.approx(193.41e12 - 32e9, abs=1.0)
        assert ch.f_end == pytest.approx(193.41e12 + 32e9, abs=1.0)

    def test_cut_center(self, demo_doc):
        link = ingest_link_config(demo_doc)
        assert link.cut_index == 2

    def test_power_to_psd(self, demo_doc):
        link = ingest_link_config(demo_doc)
        ch = link.comb[0]
        assert ch.psd == pytest.approx(1e-3 / 64e9, rel=1e-12)

    def test_d_and_slope_alternative(self, demo_doc):
        demo_doc["spans"][0].pop("beta2_ps2_km")
        demo_doc["spans"][0].pop("beta3_ps3_km")
        demo_doc["spans"][0]["d_ps_nm_km"] = 16.7
        demo_doc["spans"][0]["slope_ps_nm2_km"] = 0.067
        link = ingest_link_config(demo_doc)
        assert link.spans[0].beta2 / units.PS2_PER_KM == pytest.approx(-21.3, abs=0.1)
        assert link.spans[0].beta3 > 0.0

    def test_overlapping_channels_rejected(self, demo_doc):
        demo_doc["comb"][1]["center_thz"] = demo_doc["comb"][0]["center_thz"] + 0.01
        with pytest.raises(ConfigError, match="overlap"):
            ingest_link_config(demo_doc)

    def test_missing_keys_rejected(self, demo_doc):
        demo_doc["spans"][0].pop("length_km")
        with pytest.raises(ConfigError, match="length_km"):
            ingest_link_config(demo_doc)

    def test_nonpositive_length_rejected(self, demo_doc):
        demo_doc["spans"][0]["length_km"] = 0.0
        with pytest.raises(ConfigError, match="length"):
            ingest_link_config(demo_doc)

    def test_unknown_format_rejected(self, demo_doc):
        demo_doc["comb"][0]["format"] = "17qam"
        with pytest.raises(ConfigError, match="unknown modulation format"):
            ingest_link_config(demo_doc)

    def test_unknown_format_with_phi_ok(self, demo_doc):
        demo_doc["comb"][0].pop("format")
        demo_doc["comb"][0]["phi"] = 0.42
        link = ingest_link_config(demo_doc)
        assert any(c.phi == 0.42 for c in link.comb)

    def test_cut_index_remapped_after_sort(self, demo_doc):
        comb = demo_doc["comb"]
        demo_doc["comb"] = comb[::-1]       # unsorted document
        demo_doc["cut"] = 0                 # refers to the document order
        link = ingest_link_config(demo_doc)
        assert link.cut.f_center == pytest.approx(193.601e12, rel=1e-12)

    def test_transparent_gain(self, demo_doc):
        link = ingest_link_config(demo_doc)
        span = link.spans[0]
        f = link.f_cut
        assert float(span.gain(f)) == pytest.approx(
            math.exp(2 * span.alpha0(f) * span.length), rel=1e-13)


class TestRoundTrip:
    def test_physical_quantities_preserved(self, demo_doc):
        link = ingest_link_config(demo_doc)
        link2 = ingest_link_config(emit_link_config(link))
        assert link2.cut_index == link.cut_index
        for a, b in zip(link.comb, link2.comb):
            assert b.f_start == pytest.approx(a.f_start, rel=1e-12)
            assert b.f_end == pytest.approx(a.f_end, rel=1e-12)
            assert b.psd == pytest.approx(a.psd, rel=1e-12)
            assert b.rolloff == pytest.approx(a.rolloff, rel=1e-12)
            assert b.phi == pytest.approx(a.phi, rel=1e-12)
        for a, b in zip(link.spans, link2.spans):
            assert b.length == pytest.approx(a.length, rel=1e-12)
            assert b.gamma == pytest.approx(a.gamma, rel=1e-12)
            assert b.beta2 == pytest.approx(a.beta2, rel=1e-12)
            assert b.beta3 == pytest.approx(a.beta3, rel=1e-12)
            assert b.fc == pytest.approx(a.fc, rel=1e-12)
            assert b.noise_figure_db == pytest.approx(a.noise_figure_db, rel=1e-12)
            f = link.f_cut
            assert float(b.gain(f)) == pytest.approx(float(a.gain(f)), rel=1e-12)
            assert b.alpha0(f) == pytest.approx(a.alpha0(f), rel=1e-12)

    def test_idempotent(self, demo_doc):
        link = ingest_link_config(demo_doc)
        text1 = emit_link_config(link)
        text2 = emit_link_config(ingest_link_config(text1))
        assert text1 == text2

    def test_profile_and_raman_round_trip(self):
        doc = {
            "spans": [{
                "length_km": 80.0,
                "alpha_profile": [[192.0, 0.21], [194.0, 0.23]],
                "alpha1_db_km": 0.02, "sigma_1_km": 0.05,
                "gamma_1_w_km": 1.3, "beta2_ps2_km": -21.3,
                "beta3_ps3_km": 0.067, "fc_thz": 193.41,
                "edfa_gain_db": 16.0, "nf_db": 5.0, "dcu_ps2": -100.0,
            }],
            "comb": [{"center_thz": 193.0, "baud_gbaud": 32.0,
                      "rolloff": 0.1, "format": "qpsk", "psd_w_hz": 1e-14}],
            "cut": 0,
        }
        link = ingest_link_config(doc)
        span = link.spans[0]
        assert not span.alpha0.is_constant
        assert span.has_raman_term
        assert span.dcu_s2 == pytest.approx(-100e-24, rel=1e-15)
        link2 = ingest_link_config(emit_link_config(link))
        f = 193.1e12
        assert link2.spans[0].alpha0(f) == pytest.approx(span.alpha0(f), rel=1e-12)
        assert link2.spans[0].alpha1(f) == pytest.approx(span.alpha1(f), rel=1e-12)
        assert link2.spans[0].sigma(f) == pytest.approx(span.sigma(f), rel=1e-12)
        assert link2.spans[0].dcu_s2 == pytest.approx(span.dcu_s2, rel=1e-12)
        assert float(link2.spans[0].gain(f)) == pytest.approx(
            float(span.gain(f)), rel=1e-12)
