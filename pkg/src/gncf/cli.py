"""Command-line front end.

Subcommands::

    gncf analyze --config link.json --out results/ [--cut 3|center|all]
        [--rho-coh {0,1}] [--rho-mci {0,1}] [--rho-sci {unity,fitted}]
        [--rho-xci {unity,fitted}] [--fint {dilog,asinh}] [--coeffs FILE]
        [--oracle {none,square,island}] [--strict] [--dump-islands]
        [--dump-spans] [--ase {auto,none,<watts>}] [--jobs N]

    gncf gen-testset --seed N --count N --out DIR [--spec FILE]

    gncf compare --in DIR --out FILE [--oracle {square,island}]
        [--max-channels N] [--jobs N]

Exit codes: 0 success, 1 configuration error (no partial output), 2 when
``--strict`` escalates model-validity warnings.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

from .config import emit_link_config, ingest_link_config, load_link, sha256_of_file
from .engine import (CorrectionCoefficients, EngineSwitches,
                     analyze_link, g_nli_generic, island_sum_by_class)
from .exceptions import GncfError, ModelValidityWarning
from .model import Link
from .oracle import gn_quadrature_square, gn_quadrature_true_island
from .reporting import (ISLANDS_HEADER, REPORT_HEADER, histogram_rows,
                        island_rows, report_rows, run_manifest, sha256_of_text,
                        write_csv, write_manifest)
from .spans import effective_span_params, g0
from .testset import TestSystemSpec, generate_testset_with_info


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gncf",
        description="Closed-form incoherent Gaussian-noise NLI calculator "
                    "for WDM links",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="evaluate one link configuration")
    pa.add_argument("--config", required=True, help="link configuration JSON")
    pa.add_argument("--cut", default="all",
                    help="channel index, 'center', or 'all' (default)")
    pa.add_argument("--rho-coh", type=int, choices=(0, 1), default=1)
    pa.add_argument("--rho-mci", type=int, choices=(0, 1), default=1)
    pa.add_argument("--rho-sci", choices=("unity", "fitted"), default="fitted")
    pa.add_argument("--rho-xci", choices=("unity", "fitted"), default="fitted")
    pa.add_argument("--fint", choices=("dilog", "asinh"), default="asinh")
    pa.add_argument("--coeffs", default=None,
                    help="correction-coefficient file (default: built-in)")
    pa.add_argument("--out", required=True, help="output directory")
    pa.add_argument("--oracle", choices=("none", "square", "island"),
                    default="none",
                    help="add quadrature cross-check columns (uncorrected "
                         "dilog form vs the chosen oracle)")
    pa.add_argument("--strict", action="store_true",
                    help="exit 2 on model-validity warnings")
    pa.add_argument("--dump-islands", action="store_true",
                    help="write per-triple island descriptors CSV")
    pa.add_argument("--dump-spans", action="store_true",
                    help="write per-span effective parameters CSV")
    pa.add_argument("--ase", default="auto",
                    help="'auto' (from noise figures), 'none', or ASE power "
                         "in watts")
    pa.add_argument("--jobs", type=int, default=1)

    pg = sub.add_parser("gen-testset", help="generate random test systems")
    pg.add_argument("--seed", type=int, required=True)
    pg.add_argument("--count", type=int, required=True)
    pg.add_argument("--spec", default=None,
                    help="JSON file overriding the test-system distribution")
    pg.add_argument("--out", required=True, help="output directory")

    pc = sub.add_parser("compare",
                        help="closed form vs quadrature oracle over a test set")
    pc.add_argument("--in", dest="indir", required=True,
                    help="directory of system_*.json configurations")
    pc.add_argument("--out", required=True, help="summary CSV path")
    pc.add_argument("--oracle", choices=("square", "island"), default="island")
    pc.add_argument("--max-channels", type=int, default=10,
                    help="largest comb the oracle is run on")
    pc.add_argument("--jobs", type=int, default=1)
    return parser


def _span_dump_rows(link: Link):
    f_cut = link.f_cut
    rows = []
    for ns in range(1, link.n_spans + 1):
        span = link.spans[ns - 1]
        eff = effective_span_params(span, f_cut, f_cut, f_cut)
        rows.append((
            ns, eff.alpha0_bar, eff.alpha1_bar, eff.sigma_bar, eff.beta2_bar,
            eff.J1, eff.J2, eff.D1_bar, eff.D2_bar,
            g0(link, ns, f_cut, f_cut, f_cut),
        ))
    return rows


_SPANS_HEADER = (
    "span", "alpha0_bar_np_m", "alpha1_bar_np_m", "sigma_bar_1_m",
    "beta2_bar_s2_m", "j1_m2", "j2_m2", "d1_bar_1_hz2", "d2_bar_1_hz2", "g0",
)


def _oracle_total(link: Link, f: float, which: str):
    fn = gn_quadrature_square if which == "square" else gn_quadrature_true_island
    total = 0.0
    converged = True
    n_c = link.n_channels
    for m in range(n_c):
        for n in range(n_c):
            for k in range(n_c):
                r = fn(link, f, (m, n, k))
                total += r.value
                converged = converged and r.converged
    return total, converged


def _cmd_analyze(args) -> int:
    config_path = Path(args.config)
    link = load_link(config_path)
    switches = EngineSwitches(
        rho_coh=args.rho_coh, rho_mci=args.rho_mci,
        rho_sci_mode=args.rho_sci, rho_xci_mode=args.rho_xci,
        fint_mode=args.fint,
    )
    if args.coeffs is not None:
        coeffs = CorrectionCoefficients.from_file(args.coeffs)
        coeffs_sha = sha256_of_file(args.coeffs)
    else:
        coeffs = CorrectionCoefficients.defaults()
        coeffs_sha = sha256_of_text(coeffs.to_text())

    if args.cut == "all":
        channels = None
    elif args.cut == "center":
        band_mid = 0.5 * (link.comb[0].f_start + link.comb[-1].f_end)
        channels = [min(range(link.n_channels),
                        key=lambda i: (abs(link.comb[i].f_center - band_mid), i))]
    else:
        try:
            channels = [int(args.cut)]
        except ValueError:
            raise GncfError("--cut must be an index, 'center' or 'all'") from None
        if not (0 <= channels[0] < link.n_channels):
            raise GncfError(f"--cut index {channels[0]} out of range")

    ase_power = None
    with_osnr = True
    if args.ase == "none":
        with_osnr = False
    elif args.ase != "auto":
        ase_power = float(args.ase)

    caught: list = []
    with warnings.catch_warnings(record=True) as wlist:
        warnings.simplefilter("always", ModelValidityWarning)
        report = analyze_link(link, switches, coeffs, channels=channels,
                              ase_power=ase_power, with_osnr=with_osnr,
                              n_jobs=args.jobs)
        rows = report_rows(report)
        if args.oracle != "none":
            extended = []
            indices = channels if channels is not None else range(link.n_channels)
            for row, idx in zip(rows, indices):
                f = link.comb[idx].f_center
                closed = g_nli_generic(link, f, fint_mode="dilog",
                                       n_jobs=args.jobs)
                oracle_val, ok = _oracle_total(link, f, args.oracle)
                err_db = (10.0 * math.log10(closed / oracle_val)
                          if closed > 0.0 and oracle_val > 0.0 else None)
                extended.append(tuple(row) + (closed, oracle_val, err_db, ok))
            rows = extended
        caught = [w for w in wlist if issubclass(w.category, ModelValidityWarning)]

    header = REPORT_HEADER
    if args.oracle != "none":
        header = REPORT_HEADER + (
            "g_total_dilog_uncorrected_w_hz", f"g_total_oracle_{args.oracle}_w_hz",
            "oracle_err_db", "oracle_converged",
        )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / "report.csv", header, rows)
    manifest = run_manifest(sha256_of_file(config_path), switches, coeffs_sha,
                            notes={"ase": args.ase, "oracle": args.oracle})
    write_manifest(out_dir / "manifest.json", manifest)
    if args.dump_islands:
        write_csv(out_dir / "islands.csv", ISLANDS_HEADER,
                  island_rows(link, link.f_cut, link.cut_index))
    if args.dump_spans:
        write_csv(out_dir / "spans.csv", _SPANS_HEADER, _span_dump_rows(link))

    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if caught and args.strict:
        print("error: model-validity warnings escalated by --strict",
              file=sys.stderr)
        return 2
    return 0


def _cmd_gen_testset(args) -> int:
    if args.spec is not None:
        with open(args.spec, "r", encoding="utf-8") as fh:
            spec = TestSystemSpec.from_json(fh.read())
        if args.seed is not None:
            spec = TestSystemSpec(**{
                **{f.name: getattr(spec, f.name)
                   for f in spec.__dataclass_fields__.values()},
                "seed": args.seed,
            })
    else:
        spec = TestSystemSpec(seed=args.seed)
    systems = generate_testset_with_info(spec, args.count)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    infos = []
    for doc, info in systems:
        link = ingest_link_config(doc)       # validates every invariant
        text = emit_link_config(link)
        path = out_dir / f"system_{info['index']:04d}.json"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        info["sha256"] = sha256_of_text(text)
        infos.append(info)
    manifest = {
        "seed": spec.seed,
        "count": args.count,
        "spec": spec.to_json(),
        "systems": infos,
    }
    write_manifest(out_dir / "testset_manifest.json", manifest)
    print(f"wrote {len(systems)} systems to {out_dir}")
    return 0


def _cmd_compare(args) -> int:
    in_dir = Path(args.indir)
    paths = sorted(in_dir.glob("system_*.json"))
    rows = []
    errors = []
    skipped = 0
    for path in paths:
        link = load_link(path)
        if link.n_channels > args.max_channels:
            raise GncfError(
                f"{path.name}: {link.n_channels} channels exceeds the oracle "
                f"cap ({args.max_channels}); raise --max-channels if intended"
            )
        f = link.f_cut
        parts = island_sum_by_class(link, f, fint_mode="dilog", n_jobs=args.jobs)
        closed = parts["sci"] + parts["xci"] + parts["mci"]
        oracle_val, converged = _oracle_total(link, f, args.oracle)
        err_db = None
        if converged and closed > 0.0 and oracle_val > 0.0:
            err_db = 10.0 * math.log10(closed / oracle_val)
            errors.append(err_db)
        else:
            skipped += 1
        rows.append((
            path.name, link.n_channels, link.n_spans, link.cut_index,
            closed, parts["sci"], parts["xci"], parts["mci"],
            oracle_val, err_db, converged,
        ))
    header = (
        "system", "n_channels", "n_spans", "cut",
        "g_closed_w_hz", "g_sci_w_hz", "g_xci_w_hz", "g_mci_w_hz",
        f"g_oracle_{args.oracle}_w_hz", "err_db", "oracle_converged",
    )
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_csv(out_path, header, rows)
    hist_path = out_path.with_suffix(".hist.csv")
    write_csv(hist_path, ("bin_lo_db", "bin_hi_db", "count"),
              histogram_rows(errors))
    if errors:
        mean = sum(errors) / len(errors)
        std = math.sqrt(sum((e - mean) ** 2 for e in errors) / len(errors))
        print(f"systems={len(rows)} included={len(errors)} skipped={skipped} "
              f"mean_err_db={mean:.6f} std_err_db={std:.6f}")
    else:
        print(f"systems={len(rows)} included=0 skipped={skipped}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        if args.command == "gen-testset":
            return _cmd_gen_testset(args)
        if args.command == "compare":
            return _cmd_compare(args)
        parser.error(f"unknown command {args.command!r}")
    except GncfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
