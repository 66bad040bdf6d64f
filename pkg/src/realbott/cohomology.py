"""Mod 2 cohomology of a real Bott manifold and its Stiefel-Whitney classes.

The ring is ``Z2[x_1..x_n] / (x_j^2 = x_j * sum_i a_ij x_i)``.  Classes are
kept in normal form over the square-free monomial basis ``x_S``; a monomial is
the bitmask of ``S`` (bit ``i - 1`` for ``x_i``), a class is a frozenset of
monomials.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .matrix import MAX_DIM, BottMatrix, bits, popcount

LARGEST_FIRST = "largest"
SMALLEST_FIRST = "smallest"


@dataclass(frozen=True)
class RingContext:
    """Reduction rules ``x_j^2 -> x_j * sum(x_i for i in reduction[j-1])``.

    ``reduction[j - 1]`` is a bitmask of the indices ``i`` with ``a_ij = 1``.
    """

    n: int
    reduction: tuple[int, ...]
    _products: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _forms: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIM:
            raise ValueError(f"dimension {self.n} outside 1..{MAX_DIM}")
        if len(self.reduction) != self.n:
            raise ValueError("one reduction rule per variable is required")
        for j, mask in enumerate(self.reduction):
            if mask >> j:
                raise ValueError(f"rule for x{j + 1} uses a variable of index >= {j + 1}")

    @classmethod
    def from_matrix(cls, m: BottMatrix) -> RingContext:
        return ring_context(m)

    def zero(self) -> CohomologyClass:
        return CohomologyClass(frozenset(), self)

    def one(self) -> CohomologyClass:
        return CohomologyClass(frozenset((0,)), self)

    def gen(self, i: int) -> CohomologyClass:
        if not 1 <= i <= self.n:
            raise ValueError(f"x{i} is not a generator of a ring in {self.n} variables")
        return CohomologyClass(frozenset((1 << (i - 1),)), self)

    def monomial(self, support: Iterable[int]) -> CohomologyClass:
        mask = 0
        for i in support:
            if not 1 <= i <= self.n:
                raise ValueError(f"x{i} is not a generator of a ring in {self.n} variables")
            mask |= 1 << (i - 1)
        return CohomologyClass(frozenset((mask,)), self)

    def linear(self, mask: int) -> CohomologyClass:
        """The degree one class ``sum(x_i for i in mask)``."""
        return CohomologyClass(frozenset(1 << i for i in bits(mask)), self)

    def element(self, terms: Iterable[int]) -> CohomologyClass:
        """Build a class from raw monomial masks; repeated masks cancel."""
        acc = set()
        for t in terms:
            if t >> self.n:
                raise ValueError(f"monomial {t:#b} uses variables beyond x{self.n}")
            acc ^= {t}
        return CohomologyClass(frozenset(acc), self)

    def monomial_product(self, s: int, t: int) -> frozenset:
        key = (s, t) if s <= t else (t, s)
        hit = self._products.get(key)
        if hit is None:
            exps = [0] * self.n
            for i in bits(s):
                exps[i] += 1
            for i in bits(t):
                exps[i] += 1
            hit = reduce_exponents(self, exps)
            self._products[key] = hit
        return hit


def ring_context(m: BottMatrix) -> RingContext:
    if not m.is_strictly_upper():
        raise ValueError("ring_context needs a normalized (strictly upper triangular) matrix")
    return RingContext(m.n, tuple(m.column_mask(j) for j in range(1, m.n + 1)))


def reduce_exponents(ctx: RingContext, exponents: Sequence[int], strategy: str = LARGEST_FIRST) -> frozenset:
    """Normal form of ``prod x_i^exponents[i-1]`` by explicit rewriting.

    Each step rewrites one square ``x_j^2 -> x_j * sum a_ij x_i`` at the
    largest (or smallest) repeated index.  Rewrites only introduce indices
    below ``j``, so the process terminates.
    """
    if strategy not in (LARGEST_FIRST, SMALLEST_FIRST):
        raise ValueError(f"unknown strategy {strategy!r}")
    if len(exponents) != ctx.n:
        raise ValueError("exponent vector length does not match the ring")
    memo = ctx._forms.setdefault(strategy, {})
    return _reduce(ctx.reduction, tuple(exponents), strategy == LARGEST_FIRST, memo)


def _reduce(reduction, exps, largest, memo):
    hit = memo.get(exps)
    if hit is not None:
        return hit
    pivot = -1
    for j, e in enumerate(exps):
        if e >= 2:
            pivot = j
            if not largest:
                break
    if pivot < 0:
        result = frozenset((sum(1 << j for j, e in enumerate(exps) if e),))
    else:
        acc = set()
        for i in bits(reduction[pivot]):
            nxt = list(exps)
            nxt[pivot] -= 1
            nxt[i] += 1
            acc ^= _reduce(reduction, tuple(nxt), largest, memo)
        result = frozenset(acc)
    memo[exps] = result
    return result


class CohomologyClass:
    """An element of ``H*(M(A); Z2)`` in normal form."""

    __slots__ = ("terms", "ctx")

    def __init__(self, terms: frozenset, ctx: RingContext):
        self.terms = terms
        self.ctx = ctx

    def _check(self, other):
        if not isinstance(other, CohomologyClass):
            return NotImplemented
        if other.ctx is not self.ctx and other.ctx != self.ctx:
            raise ValueError("classes belong to different rings")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return CohomologyClass(self.terms ^ other.terms, self.ctx)

    __sub__ = __add__

    def __mul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        product = self.ctx.monomial_product
        acc = set()
        for s in self.terms:
            for t in other.terms:
                acc.symmetric_difference_update(product(s, t))
        return CohomologyClass(frozenset(acc), self.ctx)

    def __eq__(self, other):
        if not isinstance(other, CohomologyClass):
            return NotImplemented
        return self.terms == other.terms and (self.ctx is other.ctx or self.ctx == other.ctx)

    def __hash__(self):
        return hash((self.terms, self.ctx))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {popcount(t) for t in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def sorted_terms(self) -> list[int]:
        return sorted(self.terms, key=lambda t: (popcount(t), [i for i in bits(t)]))

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"CohomologyClass({render(self)!r}, n={self.ctx.n})"


def render_monomial(mask: int) -> str:
    if mask == 0:
        return "1"
    return "*".join(f"x{i + 1}" for i in bits(mask))


def render(c: CohomologyClass) -> str:
    """Terms sorted by degree then support, joined by ``" + "``; zero is ``"0"``."""
    if not c.terms:
        return "0"
    return " + ".join(render_monomial(t) for t in c.sorted_terms())


_TOKEN = re.compile(r"x(\d+)")


def parse_class(ctx: RingContext, expr: str) -> CohomologyClass:
    """Parse ``"x1*x3 + x2"`` style input; ``"0"`` and ``"1"`` are accepted.

    Repeated generators inside a product are reduced by the ring relations.
    """
    expr = expr.strip()
    if not expr:
        raise ValueError("empty class expression")
    total = ctx.zero()
    for summand in expr.split("+"):
        summand = summand.strip()
        if summand == "0":
            continue
        if summand == "1":
            total = total + ctx.one()
            continue
        term = ctx.one()
        for factor in summand.split("*"):
            factor = factor.strip()
            match = _TOKEN.fullmatch(factor)
            if match is None:
                raise ValueError(f"bad factor {factor!r} in {expr!r}")
            term = term * ctx.gen(int(match.group(1)))
        total = total + term
    return total


def multiply(a: CohomologyClass, b: CohomologyClass) -> CohomologyClass:
    return a * b


def add(a: CohomologyClass, b: CohomologyClass) -> CohomologyClass:
    return a + b


def y_classes(ctx: RingContext) -> list[CohomologyClass]:
    """``[y_1, ..., y_n]`` with ``y_i = sum_k a_ki x_k`` and ``y_1 = 0``."""
    return [ctx.linear(mask) for mask in ctx.reduction]


def forms_of(ctx: RingContext, m: BottMatrix) -> list[CohomologyClass]:
    """The y-classes of ``m`` read as linear forms inside ``ctx``'s ring."""
    if m.n != ctx.n:
        raise ValueError("matrix and ring have different dimensions")
    return [ctx.linear(m.column_mask(j)) for j in range(1, m.n + 1)]


def elementary_symmetric(ctx: RingContext, classes: Sequence[CohomologyClass], k: int) -> CohomologyClass:
    e = [ctx.one()] + [ctx.zero()] * k
    for y in classes:
        for d in range(k, 0, -1):
            if e[d - 1]:
                e[d] = e[d] + e[d - 1] * y
    return e[k]


def stiefel_whitney(ctx: RingContext, k: int) -> CohomologyClass:
    """``w_k = sigma_k(y_1, ..., y_n)`` in normal form."""
    if not 0 <= k <= ctx.n:
        raise ValueError(f"degree {k} outside 0..{ctx.n}")
    return elementary_symmetric(ctx, y_classes(ctx), k)


def pairwise_square_sum(ctx: RingContext, ys: Sequence[CohomologyClass]) -> CohomologyClass:
    """``sum_{l<r} y_l y_r``, grouped as ``sum_r (y_1 + ... + y_{r-1}) y_r``."""
    total = ctx.zero()
    prefix = ctx.zero()
    for y in ys:
        if prefix and y:
            total = total + prefix * y
        prefix = prefix + y
    return total


def w1(ctx: RingContext) -> CohomologyClass:
    total = ctx.zero()
    for y in y_classes(ctx):
        total = total + y
    return total


def w2(ctx: RingContext) -> CohomologyClass:
    return pairwise_square_sum(ctx, y_classes(ctx))


def total_dimension(ctx: RingContext) -> int:
    return 1 << ctx.n
