"""Command-line interface: ``realbott <command> ...``.

Exit codes: 0 success, 2 parse error, 3 not a Bott matrix, 4 hypothesis
violation, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bieberbach
from .census import (
    CHECK_NAMES,
    CensusRangeError,
    CheckSelection,
    export_report,
    run_census,
    verify_two_row_cases,
)
from .cohomology import parse_class, render, ring_context, stiefel_whitney, w1
from .invariants import (
    UNMATCHED,
    HypothesisError,
    has_spin,
    two_row_shape,
    two_row_spin_criterion,
    verdict_dict,
)
from .matrix import (
    MatrixFormatError,
    NotBottError,
    decompose_pairs,
    nonzero_row_count,
    normalize,
    parse_matrix,
    parse_matrix_json,
    parse_matrix_text,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_BOTT = 3
EXIT_HYPOTHESIS = 4
EXIT_VERIFY = 5


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def load_matrix(path: str, fmt: str | None = None):
    """Read, parse and normalize a matrix file; returns (matrix, permutation)."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE) from None
    if fmt is None:
        fmt = "json" if path.endswith(".json") else "txt"
    try:
        if fmt == "json":
            matrix = parse_matrix_json(data)
        elif fmt == "txt":
            matrix = parse_matrix_text(data)
        else:
            matrix = parse_matrix(data)
    except (MatrixFormatError, ValueError) as exc:
        raise CliError(f"parse error in {path}: {exc}", EXIT_PARSE) from None
    try:
        return normalize(matrix)
    except NotBottError as exc:
        raise CliError(f"not a Bott matrix: {exc}", EXIT_NOT_BOTT) from None


def cmd_check(args, out):
    m, perm = load_matrix(args.matrix, args.format_in)
    if args.json:
        out.write(json.dumps(verdict_dict(m)) + "\n")
        return EXIT_OK
    ctx = ring_context(m)
    verdict = has_spin(m, ctx)
    k = nonzero_row_count(m)
    note = " (identity)" if perm.is_identity() else ""
    out.write(f"permutation: {perm}{note}\n")
    out.write(f"n: {m.n}\nk: {k}\n")
    out.write(f"orientable: {_yes(verdict.orientable)}\n")
    out.write(f"w1: {render(w1(ctx))}\n")
    out.write(f"w2: {render(verdict.w2)}\n")
    out.write(f"spin: {_yes(verdict.spin)}\n")
    if k == 2 and verdict.orientable:
        shape = two_row_shape(m)
        out.write(f"case: {shape.case_tag} (shared columns: {len(shape.shared)})\n")
        if shape.pattern_tag == UNMATCHED:
            out.write(f"pattern: {UNMATCHED} (decided by direct w2)\n")
        else:
            params = ", ".join(f"{name}={getattr(shape, name)}" for name in ("k", "l", "m")
                               if getattr(shape, name) is not None)
            prediction = two_row_spin_criterion(shape)
            out.write(f"pattern: {shape.pattern_tag} ({params})\n")
            out.write(f"criterion: {prediction.label} -> spin: {_yes(prediction.spin)}\n")
            if shape.case_tag != "CaseI":
                out.write("note: case label follows the actual shared-column parity\n")
    return EXIT_OK


def cmd_cohomology(args, out):
    m, _ = load_matrix(args.matrix, args.format_in)
    ctx = ring_context(m)
    if args.degree is not None:
        try:
            out.write(render(stiefel_whitney(ctx, args.degree)) + "\n")
        except ValueError as exc:
            raise CliError(str(exc), EXIT_HYPOTHESIS) from None
        return EXIT_OK
    try:
        cls = parse_class(ctx, args.cls)
    except ValueError as exc:
        raise CliError(f"bad class expression: {exc}", EXIT_PARSE) from None
    out.write(render(cls * cls) + "\n")
    used = sorted({i for t in cls.terms for i in range(1, m.n + 1) if t >> (i - 1) & 1})
    for i in used:
        x = ctx.gen(i)
        out.write(f"relation: x{i}^2 = {render(x * x)}\n")
    return EXIT_OK


def cmd_decompose(args, out):
    m, _ = load_matrix(args.matrix, args.format_in)
    k = nonzero_row_count(m)
    if k < 2 or k % 2:
        raise CliError(f"decomposition criterion needs an even number k >= 2 of nonzero rows; got k={k}",
                       EXIT_HYPOTHESIS)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    entries = []
    for pair in decompose_pairs(m):
        name = f"A_{pair.i}_{pair.j}.txt"
        (outdir / name).write_text(pair.base.to_text())
        verdict = has_spin(pair.base)
        entries.append({"i": pair.i, "j": pair.j, "file": name, "orientable": verdict.orientable,
                        "spin": verdict.spin, "w2": render(verdict.w2)})
        out.write(f"{name}: spin {_yes(verdict.spin)}, w2 = {render(verdict.w2)}\n")
    manifest = {
        "n": m.n,
        "k": k,
        "pairs": entries,
        "conjunction": all(e["spin"] for e in entries),
        "spin_direct": has_spin(m).spin,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    out.write(f"pairwise spin: {_yes(manifest['conjunction'])}\n")
    return EXIT_OK


def cmd_group(args, out):
    m, _ = load_matrix(args.matrix, args.format_in)
    for i, g in enumerate(bieberbach.generators(m), 1):
        out.write(f"s{i} = {g}\n")
    report = bieberbach.group_report(m)
    expected = 1 << nonzero_row_count(m)
    out.write(f"lattice: {_yes(report['lattice_ok'])}\n")
    out.write(f"holonomy order {report['holonomy_order']}, torsion-free: {_yes(report['torsion_free'])}\n")
    ok = report["lattice_ok"] and report["torsion_free"]
    if report["holonomy_order"] != expected:
        out.write(f"holonomy order differs from 2^k = {expected} (nonzero rows are linearly dependent)\n")
        ok = False
    return EXIT_OK if ok else EXIT_VERIFY


def _progress(done, total):
    print(f"progress: {done}/{total}", file=sys.stderr, flush=True)


def cmd_census(args, out):
    try:
        checks = CheckSelection.from_names(args.checks.split(","))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    try:
        report = run_census(args.n, checks, allow_large=args.force_large, workers=args.workers,
                            progress=_progress if args.n >= 7 else None)
    except CensusRangeError as exc:
        raise CliError(str(exc), EXIT_HYPOTHESIS) from None
    data = export_report(report, args.format).decode()
    if args.output:
        Path(args.output).write_text(data)
    else:
        out.write(data)
    return EXIT_VERIFY if report.violations else EXIT_OK


def cmd_verify(args, out):
    failed = False
    for n in range(2, args.max_n + 1):
        report = run_census(n, CheckSelection.all(), workers=args.workers)
        for name in CHECK_NAMES:
            bad = report.violations_for(name)
            status = "PASS" if not bad else f"FAIL ({len(bad)} violations)"
            out.write(f"n={n} {name}: {status} [{report.checked.get(name, 0)} checked]\n")
            failed |= bool(bad)
    for n in range(3, args.two_row_max_n + 1):
        matched, disagreements = verify_two_row_cases(n)
        status = "PASS" if not disagreements else f"FAIL ({len(disagreements)} disagreements)"
        out.write(f"n={n} two_row_sweep: {status} [{matched} matched shapes]\n")
        failed |= bool(disagreements)
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="realbott", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def matrix_command(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("matrix", help="matrix file (.txt rows of 0/1 or .json)")
        p.add_argument("--format-in", choices=("txt", "json"), default=None)
        p.set_defaults(func=func)
        return p

    p = matrix_command("check", cmd_check, "orientability and Spin verdict")
    p.add_argument("--json", action="store_true")

    p = matrix_command("cohomology", cmd_cohomology, "compute in the mod 2 cohomology ring")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--degree", type=int, help="print w_d = sigma_d(y)")
    group.add_argument("--class", dest="cls", help='square a class such as "x1*x2 + x3"')

    p = matrix_command("decompose", cmd_decompose, "write the pair matrices A_ij")
    p.add_argument("--out", required=True, help="output directory")

    matrix_command("group", cmd_group, "generators and checks for the fundamental group")

    p = sub.add_parser("census", help="exhaustive census at dimension n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--checks", default="all", help=f"comma list from {','.join(CHECK_NAMES)} or 'all'")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--force-large", action="store_true", help="allow n >= 7")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("verify", help="run every census check up to --max-n")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--two-row-max-n", type=int, default=8)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except HypothesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())
