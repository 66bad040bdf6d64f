"""The group Gamma(A) in E(n) = O(n) x| R^n and its holonomy.

Every element of Gamma(A) has diagonal +-1 rotation part and a translation in
``(1/2) Z^n``.  Translations are stored as integer numerators over 2, which
keeps composition exact without carrying Fractions around.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .matrix import BottMatrix

DEFAULT_TORSION_CAP = 12


class DenominatorError(ArithmeticError):
    """A translation left the half-integers."""


@dataclass(frozen=True)
class IsometryElement:
    signs: tuple[int, ...]
    halves: tuple[int, ...]

    def __post_init__(self):
        if len(self.signs) != len(self.halves):
            raise ValueError("signs and translation differ in length")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    @classmethod
    def from_translation(cls, signs: Sequence[int], translation: Sequence) -> IsometryElement:
        halves = []
        for t in translation:
            doubled = Fraction(t) * 2
            if doubled.denominator != 1:
                raise DenominatorError(f"translation entry {t} is not a half-integer")
            halves.append(int(doubled))
        return cls(tuple(signs), tuple(halves))

    @classmethod
    def identity(cls, n: int) -> IsometryElement:
        return cls((1,) * n, (0,) * n)

    @property
    def n(self) -> int:
        return len(self.signs)

    @property
    def translation(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(h, 2) for h in self.halves)

    def is_translation(self) -> bool:
        return all(s == 1 for s in self.signs)

    def __matmul__(self, other: IsometryElement) -> IsometryElement:
        return compose(self, other)

    def inverse(self) -> IsometryElement:
        # (D, t)^-1 = (D, -D t) since D^-1 = D
        return IsometryElement(self.signs, tuple(-s * h for s, h in zip(self.signs, self.halves)))

    def __str__(self):
        signs = ",".join("+" if s > 0 else "-" for s in self.signs)
        return f"({signs} | {', '.join(str(t) for t in self.translation)})"


@dataclass(frozen=True)
class HolonomySignVector:
    signs: tuple[int, ...]

    @classmethod
    def from_mask(cls, n: int, mask: int) -> HolonomySignVector:
        return cls(tuple(-1 if mask >> c & 1 else 1 for c in range(n)))

    def is_identity(self) -> bool:
        return all(s == 1 for s in self.signs)


def compose(a: IsometryElement, b: IsometryElement) -> IsometryElement:
    """``(D1, t1)(D2, t2) = (D1 D2, D1 t2 + t1)``."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    signs = tuple(x * y for x, y in zip(a.signs, b.signs))
    halves = tuple(s * h2 + h1 for s, h2, h1 in zip(a.signs, b.halves, a.halves))
    return IsometryElement(signs, halves)


def generators(m: BottMatrix) -> list[IsometryElement]:
    """``s_i``: sign ``(-1)^a_ic`` at every column ``c``, translation ``e_i / 2``."""
    if not m.is_strictly_upper():
        raise ValueError("generators need a normalized matrix")
    n = m.n
    gens = []
    for r, row in enumerate(m.rows):
        signs = tuple(-1 if row >> c & 1 else 1 for c in range(n))
        gens.append(IsometryElement(signs, tuple(1 if c == r else 0 for c in range(n))))
    return gens


def verify_lattice(m: BottMatrix) -> bool:
    """Each ``s_i^2`` is exactly the translation by ``e_i``; these commute."""
    n = m.n
    squares = [g @ g for g in generators(m)]
    for r, sq in enumerate(squares):
        expected = tuple(2 if c == r else 0 for c in range(n))
        if not sq.is_translation() or sq.halves != expected:
            return False
    for a in squares:
        for b in squares:
            if a @ b != b @ a:
                return False
    return True


def _holonomy_masks(m: BottMatrix) -> set[int]:
    group = {0}
    for row in m.rows:
        if row and row not in group:
            group |= {g ^ row for g in group}
    return group


def holonomy_group(m: BottMatrix) -> frozenset:
    """The subgroup of ``{+-1}^n`` generated by the sign parts of the ``s_i``."""
    return frozenset(HolonomySignVector.from_mask(m.n, g) for g in _holonomy_masks(m))


def holonomy_order(m: BottMatrix) -> int:
    return len(_holonomy_masks(m))


def coset_representatives(m: BottMatrix):
    """Yield ``(eps_mask, s_1^e1 ... s_n^en)`` for every nonzero ``eps``."""
    gens = generators(m)
    n = m.n
    reps = {0: IsometryElement.identity(n)}
    for eps in range(1, 1 << n):
        top = eps.bit_length() - 1
        rep = reps[eps ^ (1 << top)] @ gens[top]
        reps[eps] = rep
        yield eps, rep


def verify_torsion_free(m: BottMatrix, cap: int = DEFAULT_TORSION_CAP) -> bool:
    """Coset test: a non-translation coset is torsion free iff some coordinate
    with sign +1 carries a half-integer translation."""
    if m.n > cap:
        raise ValueError(f"torsion check limited to n <= {cap}, got n={m.n}")
    for _, rep in coset_representatives(m):
        if rep.is_translation():
            continue
        if not any(s == 1 and h % 2 for s, h in zip(rep.signs, rep.halves)):
            return False
    return True


def holonomy_action(g: HolonomySignVector, e: Sequence[int]) -> tuple[int, ...]:
    if len(g.signs) != len(e):
        raise ValueError(f"dimension mismatch: {len(g.signs)} vs {len(e)}")
    return tuple(s * v for s, v in zip(g.signs, e))


def group_report(m: BottMatrix) -> dict:
    return {
        "lattice_ok": verify_lattice(m),
        "torsion_free": verify_torsion_free(m),
        "holonomy_order": holonomy_order(m),
    }

