"""Closed-form incoherent Gaussian-noise NLI calculator for WDM links.

Library entry points:

* :func:`gncf.config.ingest_link_config` / :func:`gncf.config.emit_link_config`
* :func:`gncf.engine.g_nli_total` and :func:`gncf.engine.analyze_link`
* :func:`gncf.engine.g_nli_generic` (exact-island triple sum)
* :mod:`gncf.oracle` (quadrature and polygon validators)
* :mod:`gncf.testset` (seeded random system generation)
"""

from .config import emit_link_config, ingest_link_config, load_link
from .engine import (CorrectionCoefficients, EngineSwitches, analyze_link,
                     g_nli_generic, g_nli_total, mci, osnr_nl, sci_xci)
from .exceptions import (ConfigError, GncfError, ModelDomainError,
                         ModelValidityWarning)
from .formats import PHI_TABLE, compute_phi
from .model import Channel, FrequencyProfile, Link, NliReport, NliRow, Span
from .testset import TestSystemSpec, generate_testset

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "ConfigError",
    "CorrectionCoefficients",
    "EngineSwitches",
    "FrequencyProfile",
    "GncfError",
    "Link",
    "ModelDomainError",
    "ModelValidityWarning",
    "NliReport",
    "NliRow",
    "PHI_TABLE",
    "Span",
    "TestSystemSpec",
    "analyze_link",
    "compute_phi",
    "emit_link_config",
    "g_nli_generic",
    "g_nli_total",
    "generate_testset",
    "ingest_link_config",
    "load_link",
    "mci",
    "osnr_nl",
    "sci_xci",
    "__version__",
]
