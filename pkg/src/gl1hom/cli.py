"""Command-line interface: compute, batch, selftest, oracle."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import evaluation
from .braid import parse_braid
from .chaincomplex import Calibration
from .config import ENV_CACHE_DIR, ENV_CONFIG, load_config
from .corpus import MISMATCH, read_corpus, report_json, run_batch
from .durbasis import dur_basis, merge_decorations, to_decoration
from .errors import Gl1HomError, InputError, InternalFault
from .gramcache import GramStore
from .homology import compute
from .polyformat import format_poly
from .resolution import Resolution

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3

BASIS_ORDER = "resolutions lexicographic in crossing bits; d.u.r. elements lexicographic in dumbbell bits"


def result_json(braid_text: str, characteristic: int, poly, calibration: Calibration) -> str:
    data = {
        "braid": braid_text,
        "characteristic": characteristic,
        "poincare": [{"t": i, "q": q, "dim": d} for i, q, d in poly.ordered()],
        "total_rank": poly.total_rank,
        "calibration": calibration.as_dict(),
        "basis_order": BASIS_ORDER,
    }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _setup(args):
    try:
        cfg = load_config(args.config)
    except (OSError, ValueError) as exc:
        raise InputError(f"bad configuration: {exc}") from exc
    if cfg.cache_dir:
        evaluation.set_gram_store(GramStore(cfg.cache_dir))
    return cfg


def cmd_compute(args) -> int:
    cfg = _setup(args)
    braid = parse_braid(args.braid, strand_cap=cfg.strand_cap)
    poly = compute(braid, args.char, cfg.calibration, threads=cfg.threads, check=not args.no_check)
    if args.format == "json":
        sys.stdout.write(result_json(args.braid, args.char, poly, cfg.calibration))
    else:
        print(format_poly(poly))
    return EXIT_OK


def _report_csv(report: dict, timings: bool) -> str:
    buf = io.StringIO()
    fields = ["name", "braid", "status", "expected", "computed"] + (["seconds"] if timings else [])
    w = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for rec in report["entries"]:
        row = dict(rec)
        if timings:
            row["seconds"] = f"{rec['seconds']:.3f}"
        w.writerow(row)
    return buf.getvalue()


def cmd_batch(args) -> int:
    cfg = _setup(args)
    entries = read_corpus(args.corpus)
    if args.max_length is not None or args.max_index is not None:
        keep = []
        for e in entries:
            b = parse_braid(e.braid, strand_cap=64)
            if args.max_length is not None and len(b) > args.max_length:
                continue
            if args.max_index is not None and b.index > args.max_index:
                continue
            keep.append(e)
        entries = keep
    if args.only:
        wanted = set(args.only.split(","))
        entries = [e for e in entries if e.name in wanted]
    env = dict(os.environ)
    if args.config:
        env[ENV_CONFIG] = os.path.abspath(args.config)
    if cfg.cache_dir:
        env[ENV_CACHE_DIR] = cfg.cache_dir
    timeout = args.timeout if args.timeout is not None else cfg.timeout

    def progress(rec):
        print(f"{rec['name']:<8} {rec['status']:<16} {rec['seconds']:7.1f}s", file=sys.stderr, flush=True)

    report = run_batch(entries, args.char, timeout, args.jobs, env, None if args.quiet else progress)
    if args.report:
        text = _report_csv(report, args.timings) if args.report.endswith(".csv") else report_json(report, args.timings)
        try:
            with open(args.report, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write report {args.report}: {exc}") from exc
    s = report["summary"]
    print(f"{len(entries)} entries: {s['match']} match, {s['mismatch']} mismatch, "
          f"{s['no-expectation']} no-expectation, {s['error']} error")
    for rec in report["entries"]:
        if rec["status"] == MISMATCH:
            print(f"MISMATCH {rec['name']}: expected {rec['expected']} got {rec['computed']}")
    return EXIT_FAIL if s["mismatch"] or s["error"] else EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    _setup(args)
    ok = run_selftest(seed=args.seed, flip_zip=args.flip_zip_sign, zero_calibration=args.zero_calibration)
    print("selftest passed" if ok else "selftest FAILED")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_oracle(args) -> int:
    cfg = _setup(args)
    braid = parse_braid(args.braid, strand_cap=cfg.strand_cap)
    bits = args.v.strip()
    if len(bits) != len(braid) or set(bits) - {"0", "1"}:
        raise InputError(f"--v needs {len(braid)} binary digits, got {args.v!r}")
    res = Resolution(braid, tuple(int(b) for b in bits))
    if res.t > args.max_dumbbells:
        raise InputError(f"{res.t} dumbbells exceed --max-dumbbells {args.max_dumbbells}")
    fast = evaluation.gram(res)
    basis = dur_basis(res)
    print(f"resolution {bits}: k={res.k} dumbbells={list(res.signature[1])}")
    print(f"{'u':>{max(res.t, 1)}} {'w':>{max(res.t, 1)}} {'oracle':>8} {'fast':>8}")
    bad = 0
    for a, u in enumerate(basis):
        for b, w in enumerate(basis):
            if u.dot_degree + w.dot_degree != res.t:
                continue  # degree gate: both are zero
            dec = merge_decorations(to_decoration(u), to_decoration(w))
            ref = evaluation.oracle_constant(dec)
            got = int(fast[a, b])
            flag = "" if ref == got else "  DIFFER"
            bad += ref != got
            ub = "".join(map(str, u.bits)) or "-"
            wb = "".join(map(str, w.bits)) or "-"
            print(f"{ub:>{max(res.t, 1)}} {wb:>{max(res.t, 1)}} {ref:>8} {got:>8}{flag}")
    print("agree" if not bad else f"{bad} entries differ")
    return EXIT_OK if not bad else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gl1hom", description="Symmetric gl1 homology of braid closures.")
    ap.add_argument("--config", help="JSON configuration file")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="Poincare polynomial of one braid closure")
    p.add_argument("braid", help="braid word, e.g. AbAb or '1 -2 1 -2'")
    p.add_argument("--char", "-p", type=int, default=0, help="0 for Q, or a prime")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--no-check", action="store_true", help="skip the d^2 and Euler characteristic checks")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("batch", help="run a corpus CSV and compare with expectations")
    p.add_argument("corpus")
    p.add_argument("--char", "-p", type=int, default=0)
    p.add_argument("--report", help="write a JSON report (or CSV if the name ends in .csv)")
    p.add_argument("--jobs", type=int, default=1, help="entries computed in parallel")
    p.add_argument("--timeout", type=float, help="per-entry time box in seconds")
    p.add_argument("--timings", action="store_true", help="include wall times in the report")
    p.add_argument("--max-length", type=int, help="skip braids longer than this")
    p.add_argument("--max-index", type=int, help="skip braids on more strands than this")
    p.add_argument("--only", help="comma-separated entry names")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("selftest", help="run the invariant suites")
    p.add_argument("--seed", type=int, default=20240601)
    p.add_argument("--flip-zip-sign", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--zero-calibration", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("oracle", help="symbolic oracle vs fast Gram entries for one resolution")
    p.add_argument("braid")
    p.add_argument("--v", required=True, help="resolution bits, one per crossing")
    p.add_argument("--max-dumbbells", type=int, default=5)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if getattr(args, "char", 0) < 0:
            raise InputError("--char must be 0 or a prime")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalFault as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Gl1HomError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
