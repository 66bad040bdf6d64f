"""Exhaustive census of strictly upper triangular Bott matrices.

Matrices of size ``n`` are indexed by a code whose bits are the entries above
the diagonal in row-major order; bit 0 is ``a_12``.  The census walks codes in
ascending order, splits the range into chunks and merges per-chunk reports,
so serial and parallel runs produce identical results.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from . import bieberbach
from .cohomology import ring_context, w1
from .invariants import (
    UNMATCHED,
    additivity_check,
    has_spin,
    main_theorem_check,
    two_row_shape,
    two_row_spin_criterion,
)
from .matrix import BottMatrix, nonzero_row_count, popcount

MIN_N = 2
MAX_N = 8
LARGE_N = 7

CHECK_NAMES = ("main_theorem", "additivity", "two_row_cases", "group_sanity", "w1_equivalence")


class CensusRangeError(ValueError):
    pass


@dataclass(frozen=True)
class CheckSelection:
    main_theorem: bool = False
    additivity: bool = False
    two_row_cases: bool = False
    group_sanity: bool = False
    w1_equivalence: bool = False

    def __post_init__(self):
        if not any(getattr(self, name) for name in CHECK_NAMES):
            raise ValueError("select at least one check")

    @classmethod
    def all(cls) -> CheckSelection:
        return cls(**{name: True for name in CHECK_NAMES})

    @classmethod
    def from_names(cls, names) -> CheckSelection:
        names = list(names)
        if names == ["all"]:
            return cls.all()
        unknown = set(names) - set(CHECK_NAMES)
        if unknown:
            raise ValueError(f"unknown checks: {sorted(unknown)}; choose from {CHECK_NAMES}")
        return cls(**{name: True for name in names})

    def names(self) -> list[str]:
        return [name for name in CHECK_NAMES if getattr(self, name)]


@dataclass
class KStats:
    count: int = 0
    orientable: int = 0
    spin: int = 0


@dataclass(frozen=True)
class Violation:
    matrix: tuple[str, ...]
    check: str


@dataclass
class CensusReport:
    n: int
    total: int = 0
    orientable: int = 0
    spin: int = 0
    by_k: dict[int, KStats] = field(default_factory=dict)
    violations: list[Violation] = field(default_factory=list)
    checked: dict[str, int] = field(default_factory=dict)

    def merge(self, other: CensusReport) -> CensusReport:
        """Combine two disjoint sub-reports; violations stay in code order
        when ``other`` covers a later range."""
        if other.n != self.n:
            raise ValueError("cannot merge reports of different dimensions")
        by_k = {k: KStats(s.count, s.orientable, s.spin) for k, s in self.by_k.items()}
        for k, s in other.by_k.items():
            mine = by_k.setdefault(k, KStats())
            mine.count += s.count
            mine.orientable += s.orientable
            mine.spin += s.spin
        checked = dict(self.checked)
        for name, c in other.checked.items():
            checked[name] = checked.get(name, 0) + c
        return CensusReport(
            self.n,
            self.total + other.total,
            self.orientable + other.orientable,
            self.spin + other.spin,
            dict(sorted(by_k.items())),
            self.violations + other.violations,
            dict(sorted(checked.items())),
        )

    def violations_for(self, prefix: str) -> list[Violation]:
        return [v for v in self.violations if v.check == prefix or v.check.startswith(prefix + ":")]


def free_entries(n: int) -> int:
    return n * (n - 1) // 2


def _check_range(n: int, allow_large: bool):
    if not MIN_N <= n <= MAX_N:
        raise CensusRangeError(f"census supports {MIN_N} <= n <= {MAX_N}, got n={n}")
    if n >= LARGE_N and not allow_large:
        raise CensusRangeError(
            f"n={n} enumerates 2^{free_entries(n)} matrices; pass the large-run override to proceed"
        )


def matrix_from_code(n: int, code: int) -> BottMatrix:
    rows = []
    shift = 0
    for r in range(n):
        width = n - 1 - r
        rows.append(((code >> shift) & ((1 << width) - 1)) << (r + 1))
        shift += width
    return BottMatrix(n, tuple(rows))


def code_of(m: BottMatrix) -> int:
    if not m.is_strictly_upper():
        raise ValueError("only strictly upper triangular matrices have a census code")
    code = 0
    shift = 0
    for r, row in enumerate(m.rows):
        code |= (row >> (r + 1)) << shift
        shift += m.n - 1 - r
    return code


def enumerate_matrices(n: int, allow_large: bool = False) -> Iterator[BottMatrix]:
    """Every strictly upper triangular ``n x n`` binary matrix, ascending code."""
    _check_range(n, allow_large)
    for code in range(1 << free_entries(n)):
        yield matrix_from_code(n, code)


def _examine(m: BottMatrix, checks: CheckSelection, report: CensusReport):
    ctx = ring_context(m)
    k = nonzero_row_count(m)
    verdict = has_spin(m, ctx)
    stats = report.by_k.setdefault(k, KStats())
    report.total += 1
    stats.count += 1
    if verdict.orientable:
        report.orientable += 1
        stats.orientable += 1
    if verdict.spin:
        report.spin += 1
        stats.spin += 1

    found = []
    checked = report.checked
    even_k = k >= 2 and k % 2 == 0
    if checks.main_theorem and even_k:
        checked["main_theorem"] = checked.get("main_theorem", 0) + 1
        if not main_theorem_check(m).agree:
            found.append("main_theorem")
    if checks.additivity and even_k:
        checked["additivity"] = checked.get("additivity", 0) + 1
        result = additivity_check(m, ctx)
        if not result.y_additive:
            found.append("additivity:y")
        if not result.w2_additive:
            found.append("additivity:w2")
    if checks.two_row_cases and k == 2 and verdict.orientable:
        shape = two_row_shape(m)
        if shape.pattern_tag != UNMATCHED:
            checked["two_row_cases"] = checked.get("two_row_cases", 0) + 1
            if two_row_spin_criterion(shape).spin != verdict.spin:
                found.append("two_row_cases")
    if checks.group_sanity:
        checked["group_sanity"] = checked.get("group_sanity", 0) + 1
        if not bieberbach.verify_lattice(m):
            found.append("group_sanity:lattice")
        if bieberbach.holonomy_order(m) != 1 << k:
            found.append("group_sanity:holonomy_order")
        if not bieberbach.verify_torsion_free(m):
            found.append("group_sanity:torsion_free")
    if checks.w1_equivalence:
        checked["w1_equivalence"] = checked.get("w1_equivalence", 0) + 1
        if w1(ctx).is_zero() != verdict.orientable:
            found.append("w1_equivalence")
    if found:
        rows = tuple(m.row_strings())
        report.violations.extend(Violation(rows, name) for name in found)


def census_range(n: int, start: int, stop: int, checks: CheckSelection,
                 progress: Optional[Callable[[int, int], None]] = None,
                 progress_every: int = 1 << 16) -> CensusReport:
    report = CensusReport(n)
    total = 1 << free_entries(n)
    for code in range(start, stop):
        _examine(matrix_from_code(n, code), checks, report)
        if progress is not None and (code + 1) % progress_every == 0:
            progress(code + 1, total)
    report.by_k = dict(sorted(report.by_k.items()))
    report.checked = dict(sorted(report.checked.items()))
    return report


def _range_job(args):
    return census_range(*args)


def run_census(n: int, checks: Optional[CheckSelection] = None, allow_large: bool = False,
               workers: int = 1, chunks: int = 16,
               progress: Optional[Callable[[int, int], None]] = None) -> CensusReport:
    """Enumerate dimension ``n`` and apply the selected checks to every matrix.

    Main-theorem and additivity checks apply to matrices with an even number
    k >= 2 of nonzero rows, the two-row check to orientable k = 2 matrices
    whose shape matches a block pattern.
    """
    _check_range(n, allow_large)
    if checks is None:
        checks = CheckSelection.all()
    total = 1 << free_entries(n)
    chunks = max(1, min(chunks, total))
    bounds = [total * c // chunks for c in range(chunks + 1)]
    jobs = [(n, bounds[c], bounds[c + 1], checks) for c in range(chunks)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_range_job, jobs))
        if progress is not None:
            progress(total, total)
    else:
        parts = [census_range(*job, progress=progress) for job in jobs]
    report = CensusReport(n)
    for part in parts:
        report = report.merge(part)
    return report


def _even_subsets(width: int) -> list[int]:
    return [s for s in range(1, 1 << width) if popcount(s) % 2 == 0]


def two_row_matrices(n: int) -> Iterator[BottMatrix]:
    """Every orientable strictly upper triangular matrix with exactly two
    nonzero rows, ordered by (i, j, row i, row j)."""
    if n < 1:
        raise ValueError("n must be positive")
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for ri in _even_subsets(n - i):
                for rj in _even_subsets(n - j):
                    rows = [0] * n
                    rows[i - 1] = ri << i
                    rows[j - 1] = rj << j
                    yield BottMatrix(n, tuple(rows))


def verify_two_row_cases(n: int) -> tuple[int, list[BottMatrix]]:
    """Compare the closed-form criterion with direct w2 on every matched
    two-row shape at dimension ``n``; returns (matched count, disagreements)."""
    matched = 0
    bad = []
    for m in two_row_matrices(n):
        shape = two_row_shape(m)
        if shape.pattern_tag == UNMATCHED:
            continue
        matched += 1
        if two_row_spin_criterion(shape).spin != has_spin(m).spin:
            bad.append(m)
    return matched, bad


def report_to_dict(r: CensusReport) -> dict:
    return {
        "n": r.n,
        "total": r.total,
        "orientable": r.orientable,
        "spin": r.spin,
        "by_k": {str(k): {"count": s.count, "orientable": s.orientable, "spin": s.spin}
                 for k, s in sorted(r.by_k.items())},
        "checked": dict(sorted(r.checked.items())),
        "violations": [{"matrix": list(v.matrix), "check": v.check} for v in r.violations],
    }


def export_report(r: CensusReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report_to_dict(r), indent=2) + "\n").encode()
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["n", "k", "count", "orientable", "spin"])
        for k, s in sorted(r.by_k.items()):
            writer.writerow([r.n, k, s.count, s.orientable, s.spin])
        return out.getvalue().encode()
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report(data: bytes | str) -> CensusReport:
    doc = json.loads(data)
    return CensusReport(
        n=doc["n"],
        total=doc["total"],
        orientable=doc["orientable"],
        spin=doc["spin"],
        by_k={int(k): KStats(**v) for k, v in doc["by_k"].items()},
        violations=[Violation(tuple(v["matrix"]), v["check"]) for v in doc["violations"]],
        checked=dict(doc.get("checked", {})),
    )
