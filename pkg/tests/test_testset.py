import numpy as np
import pytest

from gncf import units
from gncf.config import ingest_link_config
from gncf.exceptions import ConfigError
from gncf.testset import (TestSystemSpec, generate_testset,
                          generate_testset_with_info)


class TestSpecValidation:
    def test_defaults_valid(self):
        spec = TestSystemSpec()
        assert spec.band_center_thz == 193.41
        assert spec.band_width_thz == 5.0
        assert spec.symbol_rate_choices_gbaud == (32.0, 64.0, 96.0, 128.0)
        assert spec.rolloff_range == (0.05, 0.25)
        assert spec.guard_gap_range_ghz == (5.0, 20.0)
        assert spec.span_length_range_km == (80.0, 120.0)
        assert spec.nf_range_db == (6.0, 7.0)
        assert spec.alpha_db_km == 0.22
        assert spec.gamma_1_w_km == 1.77
        assert spec.beta3_ps3_km == 0.121
        assert spec.lambda0_mean_nm == 1550.0 and spec.lambda0_std_nm == 5.0

    def test_degenerate_range_rejected(self):
        with pytest.raises(ConfigError):
            TestSystemSpec(rolloff_range=(0.1, 0.1))

    def test_bad_policy_rejected(self):
        with pytest.raises(ConfigError):
            TestSystemSpec(cut_policy="middleish")

    def test_json_round_trip(self):
        spec = TestSystemSpec(seed=9, band_width_thz=0.6, max_channels=7)
        spec2 = TestSystemSpec.from_json(spec.to_json())
        assert spec2 == spec


class TestGeneration:
    def test_same_seed_identical(self):
        spec = TestSystemSpec(seed=42, band_width_thz=1.0)
        a = generate_testset(spec, 5)
        b = generate_testset(spec, 5)
        assert a == b

    def test_different_seed_differs(self):
        a = generate_testset(TestSystemSpec(seed=1, band_width_thz=1.0), 3)
        b = generate_testset(TestSystemSpec(seed=2, band_width_thz=1.0), 3)
        assert a != b

    def test_systems_within_band_and_valid(self):
        spec = TestSystemSpec(seed=3)
        docs = generate_testset(spec, 10)
        lo = (spec.band_center_thz - spec.band_width_thz / 2)
        hi = (spec.band_center_thz + spec.band_width_thz / 2)
        for doc in docs:
            link = ingest_link_config(doc)   # validates all invariants
            assert link.comb[0].f_start / units.THZ >= lo - 1e-9
            assert link.comb[-1].f_end / units.THZ <= hi + 1e-9
            for s in link.spans:
                assert 80e3 <= s.length <= 120e3
                assert 6.0 <= s.noise_figure_db <= 7.0
            for c in link.comb:
                assert c.bandwidth / units.GHZ in (32.0, 64.0, 96.0, 128.0)
                assert 0.05 <= c.rolloff <= 0.25

    def test_guard_gaps_in_range(self):
        spec = TestSystemSpec(seed=4)
        doc = generate_testset(spec, 1)[0]
        link = ingest_link_config(doc)
        for a, b in zip(link.comb, link.comb[1:]):
            gap_ghz = (b.f_start - a.f_end) / units.GHZ
            assert 5.0 - 1e-9 <= gap_ghz <= 20.0 + 1e-9

    def test_center_to_center_mode_never_overlaps(self):
        spec = TestSystemSpec(seed=5, gap_reference="center_to_center")
        doc = generate_testset(spec, 1)[0]
        ingest_link_config(doc)  # would raise on overlap

    def test_zero_dispersion_at_band_center(self):
        # lambda0 drawn equal to the band-center wavelength => beta2 at the
        # expansion center vanishes (the nominal 1550 nm label sits 0.036 nm
        # off c/193.41 THz, which leaves a ~0.003 ps^2/km residual)
        lam_c_nm = units.LIGHT_SPEED / 193.41e12 * 1e9
        spec = TestSystemSpec(seed=6, lambda0_mean_nm=lam_c_nm,
                              lambda0_std_nm=1e-15)
        doc = generate_testset(spec, 1)[0]
        for s in doc["spans"]:
            assert s["beta2_ps2_km"] == pytest.approx(0.0, abs=1e-9)
        nominal = generate_testset(TestSystemSpec(seed=6, lambda0_std_nm=1e-15), 1)[0]
        for s in nominal["spans"]:
            assert abs(s["beta2_ps2_km"]) < 0.004

    def test_beta2_sign_follows_lambda0(self):
        # lambda0 above the band center wavelength -> D < 0 at center
        spec = TestSystemSpec(seed=7, lambda0_mean_nm=1560.0, lambda0_std_nm=1e-9)
        doc = generate_testset(spec, 1)[0]
        d_sign = np.sign(doc["spans"][0]["beta2_ps2_km"])
        # D = S0 (lambda_c - lambda0) < 0, beta2 = -D lambda^2/(2 pi c) > 0
        assert d_sign > 0

    def test_span_count_range(self):
        spec = TestSystemSpec(seed=8, span_count_range=(3, 3))
        _, info = generate_testset_with_info(spec, 1)[0]
        assert info["n_spans"] == 3

    def test_cut_policies(self):
        for policy in ("center", "left", "right", "lowest", "highest"):
            spec = TestSystemSpec(seed=9, cut_policy=policy,
                                  band_width_thz=1.0)
            doc, info = generate_testset_with_info(spec, 1)[0]
            link = ingest_link_config(doc)
            n = link.n_channels
            centers = [c.f_center for c in link.comb]
            band_mid = spec.band_center_thz * units.THZ
            center_idx = min(range(n), key=lambda i: abs(centers[i] - band_mid))
            want = {"center": center_idx,
                    "left": max(center_idx - 1, 0),
                    "right": min(center_idx + 1, n - 1),
                    "lowest": 0, "highest": n - 1}[policy]
            assert doc["cut"] == want

    def test_cut_candidates_deduplicated(self):
        spec = TestSystemSpec(seed=10, band_width_thz=0.2, cut_policy="any")
        doc, info = generate_testset_with_info(spec, 1)[0]
        assert len(info["cut_candidates"]) == len(set(info["cut_candidates"]))
        assert doc["cut"] in info["cut_candidates"]

    def test_count_validation(self):
        with pytest.raises(ConfigError):
            generate_testset(TestSystemSpec(), 0)

    def test_600_default_systems_fill_the_band(self):
        spec = TestSystemSpec(seed=600)
        docs = generate_testset(spec, 600)
        assert len(docs) == 600
        lo = spec.band_center_thz - spec.band_width_thz / 2
        hi = spec.band_center_thz + spec.band_width_thz / 2
        for doc in docs:
            for ch in doc["comb"]:
                assert ch["center_thz"] - ch["baud_gbaud"] / 2e3 >= lo - 1e-9
                assert ch["center_thz"] + ch["baud_gbaud"] / 2e3 <= hi + 1e-9
        # full C-band combs hold tens of channels
        assert min(len(d["comb"]) for d in docs) > 30
        # and each validates in full
        for doc in docs[::60]:
            ingest_link_config(doc)
