"""CSV and manifest writers shared by the CLI subcommands.

All numeric CSV output has a one-line header with units embedded in the
column names, and floats are written with ``repr`` (shortest round-trip
form), so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from typing import Any, Dict, Iterable, List, Optional, Sequence

from importlib import metadata

from . import units
from .engine import EngineSwitches
from .islands import classify_triple, island_descriptor
from .model import Link, NliReport


def tool_version() -> str:
    try:
        return metadata.version("gncf")
    except metadata.PackageNotFoundError:
        return "unknown"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


REPORT_HEADER = (
    "channel", "f_cut_thz", "g_sci_w_hz", "g_xci_w_hz", "g_mci_w_hz",
    "g_coh_w_hz", "g_total_w_hz", "osnr_nl_db",
)


def report_rows(report: NliReport) -> List[Sequence]:
    rows = []
    for r in report.rows:
        rows.append((
            r.label, r.f_cut / units.THZ, r.g_sci, r.g_xci, r.g_mci,
            r.g_coherence_correction, r.g_total, r.osnr_nl_db,
        ))
    return rows


ISLANDS_HEADER = (
    "m", "n", "k", "class", "area_hz2", "f1_star_thz", "f2_star_thz", "l1_hz",
)


def island_rows(link: Link, f: float, cut_index: int) -> List[Sequence]:
    import numpy as np

    from .islands import island_arrays

    n_c = link.n_channels
    fs = np.array([c.f_start for c in link.comb])
    fe = np.array([c.f_end for c in link.comb])
    idx = np.arange(n_c**3)
    ms = idx // (n_c * n_c)
    rem = idx - ms * (n_c * n_c)
    ns = rem // n_c
    ks = rem - ns * n_c
    area, f1s, f2s, _ = island_arrays(fs[ms], fe[ms], fs[ns], fe[ns],
                                      fs[ks], fe[ks], f)
    side = np.sqrt(np.maximum(area, 0.0))
    rows = []
    for i in range(n_c**3):
        m, n, k = int(ms[i]), int(ns[i]), int(ks[i])
        cls = classify_triple(m, n, k, cut_index)
        empty = not (area[i] > 0.0)
        rows.append((
            m, n, k, cls.value, float(area[i]),
            None if empty else float(f1s[i]) / units.THZ,
            None if empty else float(f2s[i]) / units.THZ,
            float(side[i]),
        ))
    return rows


def sha256_of_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def run_manifest(config_sha256: str, switches: EngineSwitches,
                 coeffs_sha256: Optional[str],
                 seed: Optional[int] = None,
                 notes: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Reproducibility record: identical manifests imply bit-identical
    output files."""
    doc: Dict[str, Any] = {
        "config_sha256": config_sha256,
        "switches": dataclasses.asdict(switches),
        "coefficients_sha256": coeffs_sha256,
        "tool_version": tool_version(),
        "seed": seed,
    }
    if notes:
        doc["notes"] = notes
    return doc


def write_manifest(path, manifest: Dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def histogram_rows(errors_db: Sequence[float], bin_width: float = 0.05):
    """0.05 dB histogram of the comparison errors as CSV rows."""
    if not errors_db:
        return []
    lo = math.floor(min(errors_db) / bin_width)
    hi = math.floor(max(errors_db) / bin_width)
    counts = {b: 0 for b in range(lo, hi + 1)}
    for e in errors_db:
        counts[min(math.floor(e / bin_width), hi)] += 1
    return [(b * bin_width, (b + 1) * bin_width, counts[b])
            for b in range(lo, hi + 1)]
