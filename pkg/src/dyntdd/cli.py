"""Command-line front end: ``dyntdd run | compare | codebook``.

Exit codes: 0 on success, 2 for scenario/configuration errors, 3 when a
simulation aborts at runtime.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import engine
from .errors import ConfigError, ContractError, ProtocolError, SimulationAbort
from .metrics import DIRECTIONS, nearest_rank
from .scenario import SCHEMES, Scenario, load

log = logging.getLogger("dyntdd")

EXIT_OK, EXIT_CONFIG, EXIT_ABORT = 0, 2, 3

# (family, readout percentiles) for comparison.csv
COMPARE_READOUTS = (
    ("latency", (0.5, 0.9, 0.99, 0.999)),
    ("thr_cell", (0.1, 0.5, 0.95)),
    ("thr_ue", (0.1, 0.5, 0.95)),
    ("interf", (0.2, 0.5)),
)


def _scenario(args) -> Scenario:
    sc = load(args.scenario) if args.scenario else Scenario()
    if getattr(args, "horizon", None):
        sc = sc.replace(engine={"horizon_tti": args.horizon})
    return sc


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _name_list(text: str) -> list[str]:
    return [x.strip().upper() for x in text.split(",") if x.strip()]


def _write_trace(dest: str, lines: list[str]):
    text = "\n".join(lines) + ("\n" if lines else "")
    if dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text)


def cmd_run(args) -> int:
    sc = _scenario(args)
    seed = sc.engine.seed if args.seed is None else args.seed
    scheme = (args.scheme or sc.engine.scheme).upper()
    trace = [] if args.trace_xn else None
    sink = engine.run(sc, seed, scheme, trace)
    summary = sink.write(args.out, engine.manifest(sc, seed, scheme))
    if trace is not None:
        _write_trace(args.trace_xn, trace)
    log.info("%s seed %d: %d TBs, UL p99 latency %s ms, digest %s", scheme, seed,
             sink.counters["tb_count"], summary["latency_ul_ms"]["p99"], summary["digest"][:16])
    print(Path(args.out).resolve())
    return EXIT_OK


def _one_drop(job):
    """Worker for ``compare``: run one (scheme, seed) and write its directory."""
    sc, scheme, seed, out = job
    sink = engine.run(sc, seed, scheme)
    sink.write(out, engine.manifest(sc, seed, scheme))
    row = {"scheme": scheme, "seed": seed, "overhead_bits": sink.overhead_bits}
    for fam, plist in COMPARE_READOUTS:
        for d in DIRECTIONS:
            x = sink.values(fam, d)
            for p in plist:
                row[_column(fam, d, p)] = nearest_rank(x, p) if x.size else float("nan")
    return row


def _column(fam: str, direction: str, p: float) -> str:
    label = f"{p * 100:g}".replace(".", "_")
    return f"{fam}_{direction.lower()}_p{label}"


def cmd_compare(args) -> int:
    sc = _scenario(args)
    schemes = args.schemes or [s.upper() for s in sc.engine.schemes]
    seeds = args.seeds or list(sc.engine.seeds)
    unknown = [s for s in schemes if s not in SCHEMES]
    if unknown:
        raise ConfigError(f"unknown scheme {unknown[0]!r}")
    out = Path(args.out)
    jobs = [(sc, s, seed, out / s / f"seed{seed}") for s in schemes for seed in seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_one_drop, jobs))
    else:
        rows = [_one_drop(j) for j in jobs]
    cols = list(rows[0])
    metric_cols = cols[3:]
    for s in schemes:
        mine = [r for r in rows if r["scheme"] == s]
        mean = {"scheme": s, "seed": "mean",
                "overhead_bits": float(np.mean([r["overhead_bits"] for r in mine]))}
        for c in metric_cols:
            mean[c] = float(np.nanmean([r[c] for r in mine]))
        rows.append(mean)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "comparison.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols)
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in r.items()})
    print((out / "comparison.csv").resolve())
    return EXIT_OK


def cmd_codebook(args) -> int:
    sc = _scenario(args)
    cb = engine.scenario_codebook(sc)
    if args.dump:
        sys.stdout.write(cb.to_text())
    else:
        print(f"N={cb.size} B={cb.index_bits} L={len(cb.groups)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dyntdd", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"dyntdd {__version__}")
    ap.add_argument("--print-defaults", action="store_true",
                    help="print the default scenario as YAML and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command")

    def common(p):
        p.add_argument("scenario", nargs="?", help="scenario YAML (defaults when omitted)")
        p.add_argument("--horizon", type=int, help="override engine.horizon_tti")

    p = sub.add_parser("run", help="simulate one drop")
    common(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--scheme", type=str.upper, choices=["HFCS", "NC", "SCC", "CFC", "STATIC"])
    p.add_argument("--out", default="out")
    p.add_argument("--trace-xn", metavar="PATH",
                   help="write one Xn protocol line per coordination round ('-' for stdout)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="run every scheme over every seed")
    common(p)
    p.add_argument("--schemes", type=_name_list)
    p.add_argument("--seeds", type=_int_list)
    p.add_argument("--out", default="out")
    p.add_argument("--jobs", type=int, default=1, help="drops simulated in parallel")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("codebook", help="show the frame codebook")
    common(p)
    p.add_argument("--dump", action="store_true", help="print every RFC")
    p.set_defaults(func=cmd_codebook)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.print_defaults:
        sys.stdout.write(Scenario().to_yaml())
        return EXIT_OK
    if args.command is None:
        ap.print_help()
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"dyntdd: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationAbort, ProtocolError, ContractError) as exc:
        print(f"dyntdd: simulation aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
