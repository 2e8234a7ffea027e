import json

import numpy as np
import pytest

from gncf.config import ingest_link_config
from gncf.model import Channel, FrequencyProfile, Link, Span

GHZ = 1e9
THZ = 1e12


def make_flat_link(n_channels=3, n_spans=2, seed=0, beta2_range=(-2.0, 2.0),
                   cut=None, gap_range=(5, 20), power_dbm_range=(-2.0, 2.0)):
    """Random flat-loss transparent link on an exact integer-GHz grid."""
    rng = np.random.default_rng(seed)
    comb = []
    cur = 193_000  # GHz
    for _ in range(n_channels):
        bw = int(rng.choice([32, 64, 96, 128]))
        cur += int(rng.integers(gap_range[0], gap_range[1] + 1))
        comb.append({
            "center_thz": (cur + bw / 2) / 1000.0,
            "baud_gbaud": float(bw),
            "rolloff": float(rng.uniform(0.05, 0.25)),
            "phi": float(rng.choice([1.0, 0.68, 0.0, 0.41675])),
            "power_dbm": float(rng.uniform(*power_dbm_range)),
        })
        cur += bw
    spans = [{
        "length_km": float(rng.uniform(80, 120)),
        "alpha_db_km": 0.22,
        "gamma_1_w_km": 1.77,
        "beta2_ps2_km": float(rng.uniform(*beta2_range)),
        "beta3_ps3_km": 0.121,
        "fc_thz": 193.41,
        "edfa_gain_db": "transparent",
        "nf_db": float(rng.uniform(6.0, 7.0)),
    } for _ in range(n_spans)]
    doc = {"spans": spans, "comb": comb,
           "cut": int(rng.integers(0, n_channels)) if cut is None else cut}
    return ingest_link_config(doc)


def make_general_span(seed=0, length_km=95.0):
    """Span with frequency-tilted loss, a Raman-type term and a gain profile."""
    rng = np.random.default_rng(seed)
    f_lo, f_hi = 192.8e12, 194.2e12
    knots = np.linspace(f_lo, f_hi, 5)

    def table(scale, base):
        return FrequencyProfile.from_table(
            [(f, base * (1.0 + scale * rng.uniform(-0.1, 0.1))) for f in knots]
        )

    alpha0 = table(1.0, 2.53e-5)
    alpha1 = table(1.0, rng.uniform(0.05, 0.3) * 2.53e-5)
    sigma = table(1.0, 1.0 / rng.uniform(15e3, 40e3))
    gain = table(1.0, float(np.exp(2 * 2.53e-5 * length_km * 1e3)))
    return Span(
        length=length_km * 1e3,
        gamma=1.3e-3,
        alpha0=alpha0,
        alpha1=alpha1,
        sigma=sigma,
        beta2=rng.uniform(-22e-27, 2e-27),
        beta3=0.121e-39,
        fc=193.41e12,
        noise_figure_db=5.5,
        edfa_gain=gain,
    )


def make_general_link(n_channels=3, n_spans=2, seed=0):
    rng = np.random.default_rng(seed)
    comb = []
    cur = 193.20e12
    for i in range(n_channels):
        bw = float(rng.choice([32, 64, 96])) * GHZ
        cur += float(rng.integers(5, 20)) * GHZ
        comb.append(Channel(
            f_start=cur, f_end=cur + bw,
            psd=10 ** rng.uniform(-0.2, 0.2) * 1e-3 / bw,
            rolloff=float(rng.uniform(0.05, 0.25)),
            phi=float(rng.choice([1.0, 0.68])),
            label=f"ch{i:02d}",
        ))
        cur += bw
    spans = tuple(make_general_span(seed=seed * 31 + p) for p in range(n_spans))
    return Link(spans=spans, comb=tuple(comb),
                cut_index=int(rng.integers(0, n_channels)))


@pytest.fixture
def flat_link():
    return make_flat_link(n_channels=4, n_spans=2, seed=11)


@pytest.fixture
def general_link():
    return make_general_link(n_channels=3, n_spans=2, seed=5)


DEMO_DOC = {
    "spans": [
        {"length_km": 100.0, "alpha_db_km": 0.22, "gamma_1_w_km": 1.77,
         "beta2_ps2_km": -0.8, "beta3_ps3_km": 0.121, "fc_thz": 193.41,
         "edfa_gain_db": "transparent", "nf_db": 6.0},
        {"length_km": 90.0, "alpha_db_km": 0.22, "gamma_1_w_km": 1.77,
         "beta2_ps2_km": 0.4, "beta3_ps3_km": 0.121, "fc_thz": 193.41,
         "edfa_gain_db": "transparent", "nf_db": 6.5},
    ],
    "comb": [
        {"center_thz": 193.246, "baud_gbaud": 64.0, "rolloff": 0.10,
         "format": "qpsk", "power_dbm": 0.0},
        {"center_thz": 193.328, "baud_gbaud": 64.0, "rolloff": 0.10,
         "format": "16qam", "power_dbm": 0.5},
        {"center_thz": 193.410, "baud_gbaud": 64.0, "rolloff": 0.15,
         "format": "64qam", "power_dbm": 0.0},
        {"center_thz": 193.497, "baud_gbaud": 96.0, "rolloff": 0.20,
         "format": "8qam", "power_dbm": 1.0},
        {"center_thz": 193.601, "baud_gbaud": 96.0, "rolloff": 0.05,
         "format": "gaussian", "power_dbm": -0.5},
    ],
    "cut": "center",
}


@pytest.fixture
def demo_doc():
    return json.loads(json.dumps(DEMO_DOC))
