"""Engineering-unit conversions.

Internally everything is SI: Hz, m, W, W/Hz, s^2/m, s^3/m, and *field*
attenuation in Np/m (the loss coefficient that multiplies the optical field,
half the power attenuation).  Config files use the telecom-friendly units in
their key names (dB/km, ps^2/km, THz, GBaud, dBm, ...) and are converted on
ingestion by the functions below.
"""

import math

from scipy.constants import c as LIGHT_SPEED  # m/s
from scipy.constants import h as PLANCK       # J*s

THZ = 1e12
GHZ = 1e9
KM = 1e3

#: ps^2/km -> s^2/m
PS2_PER_KM = 1e-27
#: ps^3/km -> s^3/m
PS3_PER_KM = 1e-39
#: ps/(nm*km) -> s/m^2
PS_PER_NM_KM = 1e-6
#: ps/(nm^2*km) -> s/m^3
PS_PER_NM2_KM = 1e3


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dbm_to_watt(p_dbm: float) -> float:
    return 1e-3 * 10.0 ** (p_dbm / 10.0)


def watt_to_dbm(p_w: float) -> float:
    return 10.0 * math.log10(p_w / 1e-3)


def atten_db_km_to_field_np_m(a_db_km: float) -> float:
    """Power attenuation in dB/km -> field attenuation in Np/m.

    dB values describe power decay; the field decays at half the rate, hence
    the factor 20 instead of 10.
    """
    return a_db_km * math.log(10.0) / 20.0 / KM


def field_np_m_to_atten_db_km(a_np_m: float) -> float:
    return a_np_m * 20.0 * KM / math.log(10.0)


def dispersion_to_beta2(d_s_m2: float, wavelength_m: float) -> float:
    """Dispersion parameter D (s/m^2) -> beta2 (s^2/m) at the given wavelength."""
    return -d_s_m2 * wavelength_m**2 / (2.0 * math.pi * LIGHT_SPEED)


def beta2_to_dispersion(beta2_s2_m: float, wavelength_m: float) -> float:
    return -beta2_s2_m * 2.0 * math.pi * LIGHT_SPEED / wavelength_m**2


def slope_to_beta3(slope_s_m3: float, d_s_m2: float, wavelength_m: float) -> float:
    """Dispersion slope S (s/m^3) and D (s/m^2) -> beta3 (s^3/m)."""
    k = wavelength_m**2 / (2.0 * math.pi * LIGHT_SPEED)
    return k * k * (slope_s_m3 + 2.0 * d_s_m2 / wavelength_m)
