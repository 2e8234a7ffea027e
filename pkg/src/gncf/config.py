"""Link-configuration ingestion and emission.

A configuration is one JSON document per link::

    {
      "spans": [
        {"length_km": 100.0, "alpha_db_km": 0.22, "gamma_1_w_km": 1.77,
         "beta2_ps2_km": -21.3, "beta3_ps3_km": 0.121, "fc_thz": 193.41,
         "edfa_gain_db": "transparent", "nf_db": 6.0}
      ],
      "comb": [
        {"center_thz": 193.41, "baud_gbaud": 64.0, "rolloff": 0.1,
         "format": "qpsk", "power_dbm": 0.0}
      ],
      "cut": "center"
    }

Span alternatives: ``alpha_profile`` (list of [thz, db_km] pairs) instead of
``alpha_db_km``; ``{"d_ps_nm_km": ..., "slope_ps_nm2_km": ...}`` (evaluated at
the expansion center ``fc_thz``) instead of ``beta2_ps2_km``/``beta3_ps3_km``;
optional Raman-type loss term ``alpha1_db_km`` + ``sigma_1_km``; optional
``dcu_ps2`` lumped dispersion.  Channel alternatives: explicit ``phi`` instead
of ``format``, ``psd_w_hz`` instead of ``power_dbm``.  ``cut`` is a 0-based
index into the comb as written, or ``"center"`` for the channel closest to the
middle of the occupied band.

Raised-cosine carriers are replaced by rectangles: width equals the symbol
rate, height equals the peak PSD of the original carrier.  Ingestion converts
to SI, sorts the comb by start frequency and validates all invariants.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any, Dict

from . import units
from .exceptions import ConfigError
from .formats import phi_for_format
from .model import Channel, FrequencyProfile, Link, Span

_SPAN_KEYS = {
    "length_km", "alpha_db_km", "alpha_profile", "alpha1_db_km", "sigma_1_km",
    "gamma_1_w_km", "beta2_ps2_km", "d_ps_nm_km", "slope_ps_nm2_km",
    "beta3_ps3_km", "fc_thz", "edfa_gain_db", "nf_db", "dcu_ps2",
}
_CHANNEL_KEYS = {
    "center_thz", "baud_gbaud", "rolloff", "format", "phi",
    "power_dbm", "psd_w_hz", "label",
}


def _require(mapping: Dict[str, Any], key: str, where: str) -> Any:
    if key not in mapping:
        raise ConfigError(f"{where}: missing mandatory key {key!r}")
    return mapping[key]


def _number(value: Any, key: str, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: {key!r} must be a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ConfigError(f"{where}: {key!r} must be finite")
    return v


def _ingest_span(doc: Dict[str, Any], where: str) -> Span:
    unknown = set(doc) - _SPAN_KEYS
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")

    length_km = _number(_require(doc, "length_km", where), "length_km", where)
    if length_km <= 0:
        raise ConfigError(f"{where}: non-positive length")
    length = length_km * units.KM

    if "alpha_db_km" in doc and "alpha_profile" in doc:
        raise ConfigError(f"{where}: give alpha_db_km or alpha_profile, not both")
    if "alpha_db_km" in doc:
        alpha0 = FrequencyProfile.constant(
            units.atten_db_km_to_field_np_m(_number(doc["alpha_db_km"], "alpha_db_km", where))
        )
    elif "alpha_profile" in doc:
        try:
            pairs = [(float(f) * units.THZ,
                      units.atten_db_km_to_field_np_m(float(v)))
                     for f, v in doc["alpha_profile"]]
        except (TypeError, ValueError):
            raise ConfigError(f"{where}: alpha_profile must be [[thz, db_km], ...]") from None
        alpha0 = FrequencyProfile.from_table(pairs)
    else:
        raise ConfigError(f"{where}: missing alpha_db_km or alpha_profile")

    alpha1 = FrequencyProfile.constant(0.0)
    sigma = FrequencyProfile.constant(0.0)
    if "alpha1_db_km" in doc:
        if "sigma_1_km" not in doc:
            raise ConfigError(f"{where}: alpha1_db_km requires sigma_1_km")
        alpha1 = FrequencyProfile.constant(
            units.atten_db_km_to_field_np_m(_number(doc["alpha1_db_km"], "alpha1_db_km", where))
        )
        sigma = FrequencyProfile.constant(
            _number(doc["sigma_1_km"], "sigma_1_km", where) / units.KM
        )
    elif "sigma_1_km" in doc:
        raise ConfigError(f"{where}: sigma_1_km requires alpha1_db_km")

    fc = _number(_require(doc, "fc_thz", where), "fc_thz", where) * units.THZ
    wavelength = units.LIGHT_SPEED / fc

    if "beta2_ps2_km" in doc:
        if "d_ps_nm_km" in doc or "slope_ps_nm2_km" in doc:
            raise ConfigError(f"{where}: give beta2_ps2_km or d_ps_nm_km, not both")
        beta2 = _number(doc["beta2_ps2_km"], "beta2_ps2_km", where) * units.PS2_PER_KM
        beta3 = _number(doc.get("beta3_ps3_km", 0.0), "beta3_ps3_km", where) * units.PS3_PER_KM
    elif "d_ps_nm_km" in doc:
        d = _number(doc["d_ps_nm_km"], "d_ps_nm_km", where) * units.PS_PER_NM_KM
        beta2 = units.dispersion_to_beta2(d, wavelength)
        if "slope_ps_nm2_km" in doc:
            slope = _number(doc["slope_ps_nm2_km"], "slope_ps_nm2_km", where) * units.PS_PER_NM2_KM
            beta3 = units.slope_to_beta3(slope, d, wavelength)
        else:
            beta3 = _number(doc.get("beta3_ps3_km", 0.0), "beta3_ps3_km", where) * units.PS3_PER_KM
    else:
        raise ConfigError(f"{where}: missing beta2_ps2_km or d_ps_nm_km")

    gain_spec = _require(doc, "edfa_gain_db", where)
    if gain_spec == "transparent":
        edfa_gain = None
    else:
        edfa_gain = FrequencyProfile.constant(
            units.db_to_linear(_number(gain_spec, "edfa_gain_db", where))
        )

    dcu_s2 = _number(doc.get("dcu_ps2", 0.0), "dcu_ps2", where) * 1e-24

    span = Span(
        length=length,
        gamma=_number(_require(doc, "gamma_1_w_km", where), "gamma_1_w_km", where) / units.KM,
        alpha0=alpha0,
        alpha1=alpha1,
        sigma=sigma,
        beta2=beta2,
        beta3=beta3,
        fc=fc,
        noise_figure_db=_number(_require(doc, "nf_db", where), "nf_db", where),
        edfa_gain=edfa_gain,
        dcu_s2=dcu_s2,
    )
    return span


def _ingest_channel(doc: Dict[str, Any], index: int) -> Channel:
    where = f"comb[{index}]"
    unknown = set(doc) - _CHANNEL_KEYS
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")

    center = _number(_require(doc, "center_thz", where), "center_thz", where) * units.THZ
    baud = _number(_require(doc, "baud_gbaud", where), "baud_gbaud", where) * units.GHZ
    if baud <= 0:
        raise ConfigError(f"{where}: non-positive symbol rate")
    rolloff = _number(_require(doc, "rolloff", where), "rolloff", where)

    if "phi" in doc:
        phi = _number(doc["phi"], "phi", where)
    elif "format" in doc:
        phi = phi_for_format(str(doc["format"]))
    else:
        raise ConfigError(f"{where}: missing format or phi")

    if "psd_w_hz" in doc and "power_dbm" in doc:
        raise ConfigError(f"{where}: give power_dbm or psd_w_hz, not both")
    if "psd_w_hz" in doc:
        psd = _number(doc["psd_w_hz"], "psd_w_hz", where)
    elif "power_dbm" in doc:
        psd = units.dbm_to_watt(_number(doc["power_dbm"], "power_dbm", where)) / baud
    else:
        raise ConfigError(f"{where}: missing power_dbm or psd_w_hz")

    return Channel(
        f_start=center - 0.5 * baud,
        f_end=center + 0.5 * baud,
        psd=psd,
        rolloff=rolloff,
        phi=phi,
        label=str(doc.get("label", f"ch{index:02d}")),
    )


def ingest_link_config(text_or_doc) -> Link:
    """Parse a configuration document into a Link in internal SI units."""
    if isinstance(text_or_doc, (str, bytes)):
        try:
            doc = json.loads(text_or_doc)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"not valid JSON: {exc}") from None
    else:
        doc = text_or_doc
    if not isinstance(doc, dict):
        raise ConfigError("top-level document must be an object")
    unknown = set(doc) - {"spans", "comb", "cut"}
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")

    spans_doc = _require(doc, "spans", "document")
    comb_doc = _require(doc, "comb", "document")
    if not isinstance(spans_doc, list) or not spans_doc:
        raise ConfigError("spans must be a non-empty list")
    if not isinstance(comb_doc, list) or not comb_doc:
        raise ConfigError("comb must be a non-empty list")

    spans = tuple(_ingest_span(s, f"spans[{i}]") for i, s in enumerate(spans_doc))
    channels = [_ingest_channel(c, i) for i, c in enumerate(comb_doc)]

    order = sorted(range(len(channels)), key=lambda i: channels[i].f_start)
    comb = tuple(channels[i] for i in order)

    cut_spec = doc.get("cut", "center")
    if cut_spec == "center":
        band_mid = 0.5 * (comb[0].f_start + comb[-1].f_end)
        cut_index = min(range(len(comb)),
                        key=lambda i: (abs(comb[i].f_center - band_mid), i))
    else:
        if not isinstance(cut_spec, int) or isinstance(cut_spec, bool):
            raise ConfigError("cut must be an integer index or 'center'")
        if not (0 <= cut_spec < len(channels)):
            raise ConfigError(f"cut index {cut_spec} out of range")
        cut_index = order.index(cut_spec)

    return Link(spans=spans, comb=comb, cut_index=cut_index)


def _emit_span(span: Span) -> Dict[str, Any]:
    out: Dict[str, Any] = {"length_km": span.length / units.KM}
    if span.alpha0.is_constant:
        out["alpha_db_km"] = units.field_np_m_to_atten_db_km(span.alpha0.values[0])
    else:
        out["alpha_profile"] = [
            [f / units.THZ, units.field_np_m_to_atten_db_km(v)]
            for f, v in zip(span.alpha0.knots_hz, span.alpha0.values)
        ]
    if span.has_raman_term:
        if not (span.alpha1.is_constant and span.sigma.is_constant):
            raise ConfigError(
                "alpha1/sigma profile tables cannot be expressed in the "
                "config schema (scalar alpha1_db_km + sigma_1_km only)"
            )
        out["alpha1_db_km"] = units.field_np_m_to_atten_db_km(span.alpha1.values[0])
        out["sigma_1_km"] = span.sigma.values[0] * units.KM
    out["gamma_1_w_km"] = span.gamma * units.KM
    out["beta2_ps2_km"] = span.beta2 / units.PS2_PER_KM
    out["beta3_ps3_km"] = span.beta3 / units.PS3_PER_KM
    out["fc_thz"] = span.fc / units.THZ
    if span.transparent:
        out["edfa_gain_db"] = "transparent"
    else:
        if not span.edfa_gain.is_constant:
            raise ConfigError(
                "EDFA gain profile tables cannot be expressed in the config "
                "schema (scalar edfa_gain_db or 'transparent' only)"
            )
        out["edfa_gain_db"] = units.linear_to_db(span.edfa_gain.values[0])
    out["nf_db"] = span.noise_figure_db
    if span.dcu_s2:
        out["dcu_ps2"] = span.dcu_s2 / 1e-24
    return out


def _emit_channel(ch: Channel) -> Dict[str, Any]:
    return {
        "center_thz": ch.f_center / units.THZ,
        "baud_gbaud": ch.bandwidth / units.GHZ,
        "rolloff": ch.rolloff,
        "phi": ch.phi,
        "psd_w_hz": ch.psd,
        "label": ch.label,
    }


def emit_link_config(link: Link) -> str:
    """Serialize a Link back to canonical JSON (SI values converted to the
    config units; format names are not retained, phi is written directly)."""
    doc = {
        "spans": [_emit_span(s) for s in link.spans],
        "comb": [_emit_channel(c) for c in link.comb],
        "cut": link.cut_index,
    }
    return json.dumps(doc, indent=2) + "\n"


def load_link(path) -> Link:
    with open(path, "r", encoding="utf-8") as fh:
        return ingest_link_config(fh.read())


def sha256_of_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        digest.update(fh.read())
    return digest.hexdigest()
