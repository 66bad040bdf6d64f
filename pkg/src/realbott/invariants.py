"""Orientability, Spin structures and the two-row case analysis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .cohomology import (
    CohomologyClass,
    RingContext,
    forms_of,
    pairwise_square_sum,
    render,
    ring_context,
    w1,
    w2,
    y_classes,
)
from .matrix import BottMatrix, PairMatrix, decompose_pairs, nonzero_row_count, popcount

CASE_I = "CaseI"
CASE_II = "CaseII"
CASE_III = "CaseIII"

UNMATCHED = "Unmatched"
PATTERNS = ("Thm3.1-1", "Thm3.1-2", "Thm3.2-1", "Thm3.2-2", "Thm3.3-1", "Thm3.3-2", UNMATCHED)


class HypothesisError(ValueError):
    """An operation was called outside the hypotheses it is stated for."""


class UnmatchedPatternError(ValueError):
    pass


@dataclass(frozen=True)
class OrientationVerdict:
    orientable: bool
    odd_rows: tuple[int, ...]


@dataclass(frozen=True)
class SpinVerdict:
    orientable: bool
    spin: bool
    w2: CohomologyClass


@dataclass(frozen=True)
class TwoRowShape:
    """Column supports of a two-row matrix and the block pattern they match.

    ``offset`` is the number of leading zero columns before the first block,
    ``k``, ``l``, ``m`` the block half-lengths of the matched pattern.
    Block-pattern parameters are ``None`` when ``pattern`` is Unmatched.
    """

    i: int
    j: int
    exclusive_i: frozenset
    shared: frozenset
    exclusive_j: frozenset
    case_tag: str
    pattern_tag: str
    offset: Optional[int] = None
    k: Optional[int] = None
    l: Optional[int] = None
    m: Optional[int] = None


@dataclass(frozen=True)
class SpinPrediction:
    spin: bool
    pattern: str
    branch: str

    @property
    def label(self) -> str:
        return f"{self.pattern}-{self.branch}-branch"


@dataclass(frozen=True)
class MainTheoremResult:
    spin_direct: bool
    spin_pairwise: bool

    @property
    def agree(self) -> bool:
        return self.spin_direct == self.spin_pairwise


@dataclass(frozen=True)
class AdditivityResult:
    y_additive: bool
    w2_additive: bool


def _require_normalized(m: BottMatrix):
    if not m.is_strictly_upper():
        raise ValueError("expected a normalized (strictly upper triangular) matrix")


def orientable(m: BottMatrix) -> OrientationVerdict:
    odd = tuple(r for r, row in enumerate(m.rows, 1) if popcount(row) % 2)
    return OrientationVerdict(not odd, odd)


def has_spin(m: BottMatrix, ctx: Optional[RingContext] = None) -> SpinVerdict:
    """Decide Spin by computing ``w_2`` in the ring of ``m`` itself.

    Non-orientable input yields ``spin=False`` rather than an error.
    """
    _require_normalized(m)
    if ctx is None:
        ctx = ring_context(m)
    ok = orientable(m).orientable
    w = w2(ctx)
    return SpinVerdict(ok, ok and w.is_zero(), w)


def _as_matrix(m: BottMatrix | PairMatrix) -> BottMatrix:
    return m.base if isinstance(m, PairMatrix) else m


def _block(cols) -> Optional[tuple[int, int]]:
    """``(first, last)`` when ``cols`` is a nonempty run of consecutive columns."""
    if not cols:
        return None
    lo, hi = min(cols), max(cols)
    if hi - lo + 1 != len(cols):
        return None
    return lo, hi


def _chain(*parts) -> Optional[int]:
    """If the column sets are consecutive adjacent runs, return the first column."""
    blocks = [_block(p) for p in parts]
    if any(b is None for b in blocks):
        return None
    for (_, hi), (lo, _) in zip(blocks, blocks[1:]):
        if lo != hi + 1:
            return None
    return blocks[0][0]


def two_row_shape(m: BottMatrix | PairMatrix) -> TwoRowShape:
    """Classify an orientable matrix with exactly two nonzero rows.

    Patterns require the supports to be adjacent runs of columns in one of
    the arrangements below; anything else is reported as Unmatched.

    ======== ===================================== ======================
    pattern  column runs, left to right            block lengths
    ======== ===================================== ======================
    Thm3.1-1 row i only | row j only               2k, 2l
    Thm3.1-2 row j only | row i only               2k, 2l
    Thm3.2-1 row i only | both | row j only        2k, 2l, 2m
    Thm3.2-2 row j only | both | row i only        2k, 2l, 2m
    Thm3.3-1 row i only | both | row j only        2k+1, 2l+1, 2m+1
    Thm3.3-2 row j only | both | row i only        2k+1, 2l+1, 2m+1
    ======== ===================================== ======================

    The second arrangement of each pair additionally needs every support
    column to lie to the right of column ``j``.
    """
    mat = _as_matrix(m)
    _require_normalized(mat)
    rows = mat.nonzero_rows()
    if len(rows) != 2:
        raise HypothesisError(f"two_row_shape needs exactly 2 nonzero rows, found {len(rows)}")
    if not orientable(mat).orientable:
        raise HypothesisError("two_row_shape needs an orientable matrix")
    i, j = rows
    ri, rj = set(mat.row_support(i)), set(mat.row_support(j))
    shared = ri & rj
    ei, ej = ri - shared, rj - shared
    if not shared:
        case = CASE_I
    elif len(shared) % 2:
        case = CASE_II
    else:
        case = CASE_III

    def shape(pattern, offset=None, k=None, l=None, m_=None):
        return TwoRowShape(i, j, frozenset(ei), frozenset(shared), frozenset(ej), case,
                           pattern, offset, k, l, m_)

    right_of_j = min(ri | rj) > j
    if case == CASE_I:
        start = _chain(ei, ej)
        if start is not None:
            return shape("Thm3.1-1", start - 1, len(ei) // 2, len(ej) // 2)
        start = _chain(ej, ei)
        if start is not None and right_of_j:
            return shape("Thm3.1-2", start - 1, len(ej) // 2, len(ei) // 2)
    elif case == CASE_III:
        start = _chain(ei, shared, ej)
        if start is not None:
            return shape("Thm3.2-1", start - 1, len(ei) // 2, len(shared) // 2, len(ej) // 2)
        start = _chain(ej, shared, ei)
        if start is not None and right_of_j:
            return shape("Thm3.2-2", start - 1, len(ej) // 2, len(shared) // 2, len(ei) // 2)
    else:
        start = _chain(ei, shared, ej)
        if start is not None:
            return shape("Thm3.3-1", start - 1, len(ei) // 2, len(shared) // 2, len(ej) // 2)
        start = _chain(ej, shared, ei)
        if start is not None and right_of_j:
            return shape("Thm3.3-2", start - 1, len(ej) // 2, len(shared) // 2, len(ei) // 2)
    return shape(UNMATCHED)


def two_row_spin_criterion(shape: TwoRowShape) -> SpinPrediction:
    """Closed-form Spin verdict for a matched block pattern."""
    p = shape.pattern_tag
    if p == UNMATCHED:
        raise UnmatchedPatternError("no closed-form criterion for an unmatched two-row shape")
    if p in ("Thm3.1-2", "Thm3.2-2"):
        return SpinPrediction(True, p, "unconditional")
    if p == "Thm3.3-2":
        return SpinPrediction(False, p, "unconditional")
    first = shape.offset + 1
    if p == "Thm3.1-1":
        if shape.l % 2 == 0:
            return SpinPrediction(True, p, "even-l")
        return SpinPrediction(not first <= shape.j <= shape.offset + 2 * shape.k, p, "odd-l")
    same = (shape.l - shape.m) % 2 == 0
    branch = "same-parity" if same else "different-parity"
    if p == "Thm3.2-1":
        if same:
            return SpinPrediction(True, p, branch)
        return SpinPrediction(not first <= shape.j <= shape.offset + 2 * shape.k, p, branch)
    # Thm3.3-1
    return SpinPrediction(same and first <= shape.j <= shape.offset + 2 * shape.k + 2, p, branch)


def _even_k(m: BottMatrix, what: str) -> int:
    _require_normalized(m)
    k = nonzero_row_count(m)
    if k < 2 or k % 2:
        raise HypothesisError(f"{what} needs an even number k >= 2 of nonzero rows, got k={k}")
    return k


def main_theorem_check(m: BottMatrix) -> MainTheoremResult:
    """Compare Spin of ``M(A)`` against Spin of every pair manifold ``M(A_ij)``."""
    _even_k(m, "main_theorem_check")
    direct = has_spin(m).spin
    pairwise = all(has_spin(p.base).spin for p in decompose_pairs(m))
    return MainTheoremResult(direct, pairwise)


def additivity_check(m: BottMatrix, ctx: Optional[RingContext] = None) -> AdditivityResult:
    """Check ``y_l = sum y_l^ij`` and ``w2 = sum w2(A_ij)`` inside the ring of ``m``."""
    _even_k(m, "additivity_check")
    if ctx is None:
        ctx = ring_context(m)
    ys = y_classes(ctx)
    y_sums = [ctx.zero() for _ in ys]
    w2_sum = ctx.zero()
    for pair in decompose_pairs(m):
        forms = forms_of(ctx, pair.base)
        for l, f in enumerate(forms):
            y_sums[l] = y_sums[l] + f
        w2_sum = w2_sum + pairwise_square_sum(ctx, forms)
    return AdditivityResult(y_sums == ys, w2_sum == w2(ctx))


def verdict_dict(m: BottMatrix) -> dict:
    """Serializable verdict: orientable, spin, w1, w2, case, pattern, k."""
    ctx = ring_context(m)
    verdict = has_spin(m, ctx)
    k = nonzero_row_count(m)
    case = pattern = None
    if k == 2 and verdict.orientable:
        shape = two_row_shape(m)
        case, pattern = shape.case_tag, shape.pattern_tag
    return {
        "orientable": verdict.orientable,
        "spin": verdict.spin,
        "w1": render(w1(ctx)),
        "w2": render(verdict.w2),
        "case": case,
        "pattern": pattern,
        "k": k,
    }
