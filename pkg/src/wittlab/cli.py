"""Command-line driver: polynomial tables, tower inspection, lemma
verification, suite aggregation, and brute-force oracles.

Exit codes: 0 pass, 1 fail, 2 undetermined/not-stabilized, 64 usage or
configuration error.  A fixed seed makes every run byte-reproducible;
the aggregate suite report carries no timing so that repeated runs are
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import cohomlab, localfield, wittcore

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_UNDETERMINED = 2
EXIT_CONFIG = 64

DEFAULT_TOWERS = {
    "q2_sqrt2": {"p": 2, "N": 24, "E_K": None, "E_L": ["-2", "0", "1"], "seed": 2026},
    "q2_sqrt_minus2": {"p": 2, "N": 24, "E_K": None, "E_L": ["2", "0", "1"], "seed": 2026},
    "q2_i": {"p": 2, "N": 24, "E_K": None, "E_L": ["2", "-2", "1"], "seed": 2026},
    "q3_ramified": {"p": 3, "N": 16, "E_K": None, "E_L": ["3", "0", "-3", "1"], "seed": 2026},
}

LEMMA_IDS = tuple(cohomlab.VERIFIERS)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_CONFIG)


def _write_json(path: str | None, obj: dict) -> None:
    blob = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(blob, encoding="utf-8")
    else:
        sys.stdout.write(blob)


def _status_exit(status: str) -> int:
    return {"PASS": EXIT_PASS, "FAIL": EXIT_FAIL}.get(status, EXIT_UNDETERMINED)


def cmd_polys(args) -> int:
    try:
        tables = wittcore.dump_tables(args.p, args.n, include_pfold=not args.no_pfold)
        wittcore.ctx_for(args.p, args.n).verify_ghost_identities()
    except ValueError as exc:
        sys.stderr.write(f"polys: {exc}\n")
        return EXIT_CONFIG
    except (wittcore.IntegralityViolation, wittcore.DegreeAuditFailure) as exc:
        sys.stderr.write(f"polys: {exc}\n")
        return EXIT_FAIL
    _write_json(args.out, tables)
    print(f"content hash: {tables['content_hash']}")
    if tables["pfold"]:
        pf = wittcore.pfold_decomposition(args.p, args.n)
        print(f"sign convention: {pf.sign_convention}")
        for l in range(1, args.n + 1):
            deg = pf.carry_polys[l - 1].min_monomial_degree()
            line = f"level {l}: carry min degree {deg}"
            if l >= 2:
                line += f", residual min degree {pf.residual_for_level(l).min_monomial_degree()}"
            print(line)
    print("degree audits: PASS")
    return EXIT_PASS


def _load_tower(args) -> localfield.ExtensionTower:
    overrides = {}
    if getattr(args, "precision", None) and args.precision != "auto":
        overrides["N"] = int(args.precision)
    elif getattr(args, "precision", None) == "auto":
        overrides["N"] = "auto"
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if args.tower in DEFAULT_TOWERS:
        return localfield.tower_from_obj(DEFAULT_TOWERS[args.tower], **overrides)
    return localfield.load_tower(args.tower, **overrides)


def cmd_tower_info(args) -> int:
    try:
        tower = _load_tower(args)
    except (OSError, ValueError, KeyError) as exc:
        sys.stderr.write(f"tower-info: {exc}\n")
        return EXIT_CONFIG
    info = {
        "tower_hash": tower.tower_hash,
        "p": tower.p,
        "N": tower.N,
        "N_internal": tower.N_int,
        "e_K": tower.e_K,
        "e_L": tower.e_L,
        "ramification_break": tower.s,
        "val_cap": tower.val_cap,
        "strict_break_regime": tower.strict_break_regime(),
        "stable_witt_length": cohomlab.stable_witt_length(tower.s, tower.p),
        "h1_order_level1": cohomlab.h1_order_level1(tower),
    }
    if args.json:
        _write_json(args.out, info)
    else:
        for key, value in info.items():
            print(f"{key}: {value}")
    return EXIT_PASS


def cmd_verify(args) -> int:
    if args.lemma not in cohomlab.VERIFIERS:
        sys.stderr.write(
            f"verify: unknown lemma id {args.lemma!r}; known: {', '.join(LEMMA_IDS)}\n"
        )
        return EXIT_CONFIG
    try:
        tower = _load_tower(args)
    except (OSError, ValueError, KeyError) as exc:
        sys.stderr.write(f"verify: {exc}\n")
        return EXIT_CONFIG
    fn = cohomlab.VERIFIERS[args.lemma]
    t0 = time.perf_counter()
    try:
        report = fn(tower, samples=args.samples, seed=args.seed, n=args.n)
    except (cohomlab.NotStabilized, cohomlab.SamplerExhausted) as exc:
        sys.stderr.write(f"verify: {exc}\n")
        return EXIT_UNDETERMINED
    report.runtime_ms = int((time.perf_counter() - t0) * 1000)
    _write_json(args.out, report.to_obj())
    extra = f" sign={report.sign_convention}" if report.sign_convention else ""
    if "M" in report.params:
        extra += f" M={report.params['M']}"
    print(
        f"{args.lemma} on {args.tower}: {report.status} "
        f"({len(report.failures)} failures, {report.runtime_ms} ms){extra}"
    )
    return _status_exit(report.status)


def _default_manifest() -> dict:
    return {
        "towers": sorted(DEFAULT_TOWERS),
        "lemmas": list(LEMMA_IDS),
        "samples": 200,
        "seed": 2026,
    }


def cmd_suite(args) -> int:
    if args.manifest:
        try:
            manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            sys.stderr.write(f"suite: cannot read manifest: {exc}\n")
            return EXIT_CONFIG
    else:
        manifest = _default_manifest()
    towers = manifest.get("towers") or []
    lemmas = manifest.get("lemmas") or []
    if not towers or not lemmas:
        sys.stderr.write("suite: manifest must list towers and lemmas\n")
        return EXIT_CONFIG
    for lemma in lemmas:
        if lemma not in cohomlab.VERIFIERS:
            sys.stderr.write(f"suite: unknown lemma id {lemma!r}\n")
            return EXIT_CONFIG
    samples = int(manifest.get("samples", 200))
    seed = int(manifest.get("seed", 2026))

    cells = []
    worst = EXIT_PASS
    for tower_ref in towers:
        if isinstance(tower_ref, dict):
            tower = localfield.tower_from_obj(tower_ref)
            tower_name = tower_ref.get("name", tower.tower_hash[:12])
        elif tower_ref in DEFAULT_TOWERS:
            tower = localfield.tower_from_obj(DEFAULT_TOWERS[tower_ref], seed=seed)
            tower_name = tower_ref
        else:
            try:
                tower = localfield.load_tower(tower_ref, seed=seed)
            except (OSError, ValueError, KeyError) as exc:
                sys.stderr.write(f"suite: cannot load tower {tower_ref!r}: {exc}\n")
                return EXIT_CONFIG
            tower_name = Path(tower_ref).stem
        for lemma in lemmas:
            fn = cohomlab.VERIFIERS[lemma]
            try:
                report = fn(tower, samples=samples, seed=seed)
                status = report.status
            except (cohomlab.NotStabilized, cohomlab.SamplerExhausted) as exc:
                report = None
                status = "UNDETERMINED"
            cell = {
                "tower": tower_name,
                "tower_hash": tower.tower_hash,
                "lemma": lemma,
                "status": status,
                "samples": samples,
                "seed": seed,
                "failures": len(report.failures) if report else None,
                "margins": report.margins if report else {},
                "sign_convention": report.sign_convention if report else None,
            }
            cells.append(cell)
            worst = max(worst, _status_exit(status))
    aggregate = {
        "config": {"samples": samples, "seed": seed, "lemmas": lemmas},
        "cells": cells,
        "status": "PASS" if worst == EXIT_PASS else ("FAIL" if worst == EXIT_FAIL else "UNDETERMINED"),
    }
    out_path = args.out
    _write_json(out_path, aggregate)
    if args.csv:
        rows = ["tower,lemma,status,samples,failures,worst_margin"]
        for c in cells:
            margin = min(c["margins"].values()) if c["margins"] else ""
            rows.append(
                f"{c['tower']},{c['lemma']},{c['status']},{c['samples']},"
                f"{c['failures']},{margin}"
            )
        Path(args.csv).write_text("\n".join(rows) + "\n", encoding="utf-8")

    names = sorted({c["tower"] for c in cells})
    width = max(len(l) for l in lemmas) + 2
    print("".ljust(width) + "  ".join(n[:14].ljust(14) for n in names))
    for lemma in lemmas:
        row = [lemma.ljust(width)]
        for name in names:
            cell = next(c for c in cells if c["tower"] == name and c["lemma"] == lemma)
            text = cell["status"]
            if cell["margins"]:
                text += f" m={min(cell['margins'].values())}"
            row.append(text.ljust(14))
        print("  ".join(row).rstrip())
    print(f"suite status: {aggregate['status']}")
    return worst


def cmd_oracle(args) -> int:
    try:
        tower = _load_tower(args)
    except (OSError, ValueError, KeyError) as exc:
        sys.stderr.write(f"oracle: {exc}\n")
        return EXIT_CONFIG
    ok = True
    if args.what in ("h1", "all"):
        fast = cohomlab.h1_order_level1(tower)
        try:
            slow = cohomlab.h1_order_enumeration_stable(tower)
        except ValueError as exc:
            sys.stderr.write(f"oracle: {exc}\n")
            return EXIT_CONFIG
        match = fast == slow
        ok &= match
        print(f"h1 order: elementary-divisor={fast} enumeration={slow} match={match}")
    if args.what in ("linsolve", "all"):
        for digits in (2, 3):
            result = cohomlab.linsolve_matches_enumeration(tower, digits)
            for key, value in sorted(result.items()):
                ok &= value
                print(f"linsolve vs enumeration (digits={digits}) {key}: {value}")
    print(f"oracle status: {'PASS' if ok else 'FAIL'}")
    return EXIT_PASS if ok else EXIT_FAIL


def build_parser() -> _Parser:
    parser = _Parser(prog="wittlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_polys = sub.add_parser("polys", help="generate and audit polynomial tables")
    p_polys.add_argument("--p", type=int, required=True)
    p_polys.add_argument("--n", type=int, required=True)
    p_polys.add_argument("--out", default=None)
    p_polys.add_argument("--no-pfold", action="store_true")
    p_polys.set_defaults(fn=cmd_polys)

    p_info = sub.add_parser("tower-info", help="build a tower and print its data")
    p_info.add_argument("--tower", required=True, help="path or builtin name")
    p_info.add_argument("--precision", default=None, help='"auto" or an integer')
    p_info.add_argument("--seed", type=int, default=None)
    p_info.add_argument("--json", action="store_true")
    p_info.add_argument("--out", default=None)
    p_info.set_defaults(fn=cmd_tower_info)

    p_verify = sub.add_parser("verify", help="run one lemma verifier")
    p_verify.add_argument("--lemma", required=True)
    p_verify.add_argument("--tower", required=True)
    p_verify.add_argument("--samples", type=int, default=200)
    p_verify.add_argument("--seed", type=int, default=2026)
    p_verify.add_argument("--n", type=int, default=None, help="Witt length override")
    p_verify.add_argument("--precision", default=None)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(fn=cmd_verify)

    p_suite = sub.add_parser("suite", help="run the full verification table")
    p_suite.add_argument("--manifest", default=None)
    p_suite.add_argument("--out", default=None)
    p_suite.add_argument("--csv", default=None)
    p_suite.set_defaults(fn=cmd_suite)

    p_oracle = sub.add_parser("oracle", help="brute-force cross-checks")
    p_oracle.add_argument("--tower", required=True)
    p_oracle.add_argument("--what", choices=("h1", "linsolve", "all"), default="all")
    p_oracle.add_argument("--precision", default=None)
    p_oracle.add_argument("--seed", type=int, default=None)
    p_oracle.set_defaults(fn=cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
