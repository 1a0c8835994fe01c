"""Batch command-line front end.

One subcommand per reproducible artifact: digit-lemma verification runs,
trace tables with their statistics, parameter-set classification, and the
full reproduction suite.  Exit codes: 0 success, 1 verification failure,
2 usage error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import acceptance, exp_sums, hyp_params, kubert
from .errors import CapExceededError
from .finite_field import build_field, load_cache, save_cache

CACHE_ENV = "HYPMONO_CACHE"


def _field(p: int, k: int):
    cache_dir = os.environ.get(CACHE_ENV)
    if not cache_dir:
        return build_field(p, k)
    path = Path(cache_dir) / f"field_{p}_{k}.tab"
    if path.exists():
        try:
            return load_cache(path)
        except ValueError:
            pass  # fall through to a rebuild; the cache is never trusted
    field = build_field(p, k)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_cache(field, path)
    return field


def _dump(obj, fh) -> None:
    json.dump(obj, fh, sort_keys=True, separators=(",", ":"))
    fh.write("\n")


def _emit_records(records, out_path, label):
    if out_path is None:
        for rec in records:
            _dump(rec, sys.stdout)
    else:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with open(out_path, "w") as fh:
            for rec in records:
                _dump(rec, fh)
        print(f"{label}: wrote {out_path}")


# defaults deliberately exceed the smallest exhaustive ranges the proofs
# need, to strengthen the numerical evidence
_DEFAULT_R_MAX = {"3x13": 24, "4x5": 14, "28": 12}


def cmd_verify_digit_lemma(args) -> int:
    family = args.family
    lemma = {
        "3x13": kubert.verify_lemma_3x13,
        "4x5": kubert.verify_lemma_4x5,
        "28": kubert.verify_lemma_28,
    }[family]
    r_max = args.r_max if args.r_max is not None else _DEFAULT_R_MAX[family]
    records = []
    all_pass = True
    for r in range(1, r_max + 1):
        rep = lemma(r, workers=args.workers)
        all_pass &= rep.passed
        records.extend(rep.to_json_records())
    for r in range(1, r_max + 1):
        if family == "3x13" and (r % 2 or r < 2):
            continue
        rep = kubert.verify_bracket_corollaries(family, r, workers=args.workers)
        all_pass &= rep.passed
        records.extend(rep.to_json_records())
        if family != "3x13" and r < 2:
            continue
        rep = kubert.verify_sharp_inequality(family, r, workers=args.workers)
        all_pass &= rep.passed
        records.extend(rep.to_json_records())
    out = Path(args.out) / f"digit_lemma_{family}.ndjson" if args.out else None
    _emit_records(records, out, f"digit-lemma {family}")
    return 0 if all_pass else 1


def cmd_trace_table(args) -> int:
    fam = exp_sums.FAMILIES[args.family]
    k = args.field_degree
    if k % fam.base_degree:
        raise CapExceededError(
            f"field degree {k} does not contain the degree-{fam.base_degree} base field"
        )
    field = _field(fam.p, k)
    modes = ["exact", "float"] if args.mode == "both" else [args.mode]
    a_param = fam.A if fam.kind == "AxB" else None
    tables = {
        mode: exp_sums.trace_table_all(
            field, fam.kind, A=a_param, B=fam.B, mode=mode, workers=args.workers
        )
        for mode in modes
    }
    primary = tables.get("exact") or tables["float"]
    stats = exp_sums.table_stats(primary)
    stats["purity_pass"] = exp_sums.purity_check(primary, fam.rank)
    if primary.exact_values is not None:
        stats["galois_pass"] = exp_sums.galois_invariance_check(primary).passed
        if fam.p == 2:
            stats["rationality_pass"] = exp_sums.rationality_check(primary)
    if len(tables) == 2:
        gap = acceptance._float_agrees(tables["exact"], tables["float"])
        stats["float_gap_over_tol"] = gap
    out_dir = Path(args.out) if args.out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    base = f"trace_{args.family}_q{field.q}"
    for mode, table in tables.items():
        exp_sums.export_csv(table, out_dir / f"{base}_{mode}.csv")
    with open(out_dir / f"{base}_stats.json", "w") as fh:
        _dump(stats, fh)
    print(f"trace-table {args.family} over q={field.q}: "
          f"M1={stats['M1']:.6f} max|T|={stats['max_abs']:.4f} -> {out_dir}")
    failed = stats["frobenius_pass"] is False or stats["purity_pass"] is False
    return 1 if failed else 0


def cmd_classify(args) -> int:
    if args.family:
        fam = exp_sums.FAMILIES[args.family]
        if fam.kind == "AxB":
            spec = hyp_params.build_AxB(fam.p, fam.A, fam.B)
            params = {"A": fam.A, "B": fam.B}
        else:
            spec = hyp_params.build_Atimes(fam.p, fam.A)
            params = {"A": fam.A}
        label = args.family
    else:
        if args.A is None or args.p is None:
            print("classify: need --family or both --p and --A", file=sys.stderr)
            return 2
        if args.B is not None:
            spec = hyp_params.build_AxB(args.p, args.A, args.B)
            params = {"A": args.A, "B": args.B}
            label = f"{args.A}x{args.B}"
        else:
            spec = hyp_params.build_Atimes(args.p, args.A)
            params = {"A": args.A}
            label = f"{args.A}x"
    report = hyp_params.classification_report(spec, label, params)
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            _dump(report, fh)
        print(f"classify {label}: wrote {path}")
    else:
        _dump(report, sys.stdout)
    return 0


def cmd_reproduce_all(args) -> int:
    results = acceptance.run_all(workers=args.workers, seed=args.seed)
    out_dir = Path(args.out) if args.out else Path("reproduction")
    out_dir.mkdir(parents=True, exist_ok=True)
    man = acceptance.manifest(results)
    with open(out_dir / "manifest.json", "w") as fh:
        _dump(man, fh)
    timings = {r.cid: round(r.elapsed_s, 3) for r in results}
    with open(out_dir / "timings.json", "w") as fh:
        _dump(timings, fh)
    for r in results:
        print(f"{r.cid} {'PASS' if r.passed else 'FAIL'} {r.description}")
    print(f"manifest: {out_dir / 'manifest.json'}")
    return 0 if man["all_passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypmono",
        description="verification suite for three hypergeometric local systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("verify-digit-lemma",
                        help="exhaustive digit-sum lemma verification")
    p1.add_argument("--family", required=True, choices=["3x13", "4x5", "28"])
    p1.add_argument("--r-max", type=int, default=None,
                    help="defaults per family: 3x13 -> 24, 4x5 -> 14, 28 -> 12")
    p1.add_argument("--workers", type=int, default=1)
    p1.add_argument("--out", default=None)
    p1.set_defaults(func=cmd_verify_digit_lemma)

    p2 = sub.add_parser("trace-table",
                        help="build a trace table with statistics and checks")
    p2.add_argument("--family", required=True, choices=["3x13", "4x5", "28x"])
    p2.add_argument("--field-degree", type=int, required=True)
    p2.add_argument("--mode", choices=["exact", "float", "both"], default="float")
    p2.add_argument("--workers", type=int, default=1)
    p2.add_argument("--out", default=None)
    p2.set_defaults(func=cmd_trace_table)

    p3 = sub.add_parser("classify", help="classify a parameter set")
    p3.add_argument("--family", choices=["3x13", "4x5", "28x"], default=None)
    p3.add_argument("--p", type=int, default=None)
    p3.add_argument("--A", type=int, default=None)
    p3.add_argument("--B", type=int, default=None)
    p3.add_argument("--out", default=None)
    p3.set_defaults(func=cmd_classify)

    p4 = sub.add_parser("reproduce-all",
                        help="run every acceptance criterion and write a manifest")
    p4.add_argument("--workers", type=int, default=max(1, min(8, os.cpu_count() or 1)))
    p4.add_argument("--seed", type=int, default=20240601)
    p4.add_argument("--out", default=None)
    p4.set_defaults(func=cmd_reproduce_all)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) is not None and getattr(args, "workers", 1) < 1:
        parser.error("--workers must be at least 1")
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
