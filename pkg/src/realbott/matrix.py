"""Bott matrices: parsing, recognition up to conjugation, pair decomposition.

Indices are 1-based everywhere in the public API (row ``i``, column ``j``,
entry ``a_ij``).  Internally each row is an ``int`` whose bit ``c - 1`` holds
``a_{i,c}``.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

MAX_DIM = 64


class MatrixFormatError(ValueError):
    """Raised when matrix text or JSON cannot be decoded."""


class NotBottError(ValueError):
    """The edge digraph of the matrix has a cycle."""


def bits(mask: int) -> Iterable[int]:
    """Yield the 0-based positions of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class BottMatrix:
    """An ``n x n`` binary matrix with zero diagonal.

    Acyclicity is not enforced here; :func:`recognize` decides whether the
    matrix actually encodes a real Bott manifold.
    """

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIM:
            raise ValueError(f"dimension {self.n} outside 1..{MAX_DIM}")
        if len(self.rows) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(self.rows)}")
        limit = 1 << self.n
        for r, row in enumerate(self.rows):
            if not 0 <= row < limit:
                raise ValueError(f"row {r + 1} has entries outside {self.n} columns")
            if row >> r & 1:
                raise ValueError(f"nonzero diagonal entry at ({r + 1},{r + 1})")

    @classmethod
    def zero(cls, n: int) -> BottMatrix:
        return cls(n, (0,) * n)

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> BottMatrix:
        n = len(entries)
        rows = []
        for r, line in enumerate(entries):
            if len(line) != n:
                raise ValueError(f"row {r + 1} has length {len(line)}, expected {n}")
            mask = 0
            for c, v in enumerate(line):
                if v not in (0, 1):
                    raise ValueError(f"entry ({r + 1},{c + 1}) is not 0/1")
                mask |= v << c
            rows.append(mask)
        return cls(n, tuple(rows))

    def entry(self, i: int, j: int) -> int:
        return self.rows[i - 1] >> (j - 1) & 1

    def row_support(self, i: int) -> tuple[int, ...]:
        return tuple(c + 1 for c in bits(self.rows[i - 1]))

    def column_mask(self, j: int) -> int:
        """Bitmask (bit ``i - 1``) of the rows ``i`` with ``a_ij = 1``."""
        bit = 1 << (j - 1)
        mask = 0
        for r, row in enumerate(self.rows):
            if row & bit:
                mask |= 1 << r
        return mask

    def nonzero_rows(self) -> list[int]:
        return [r + 1 for r, row in enumerate(self.rows) if row]

    def is_strictly_upper(self) -> bool:
        return all(row & ((1 << (r + 1)) - 1) == 0 for r, row in enumerate(self.rows))

    def to_lists(self) -> list[list[int]]:
        return [[row >> c & 1 for c in range(self.n)] for row in self.rows]

    def row_strings(self) -> list[str]:
        return ["".join(str(v) for v in line) for line in self.to_lists()]

    def to_text(self) -> str:
        return "\n".join(" ".join(s) for s in self.row_strings()) + "\n"

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "rows": self.row_strings()})

    def conjugate(self, perm: Permutation) -> BottMatrix:
        """Return ``B`` with ``B[r][c] = A[perm(r)][perm(c)]``."""
        if perm.n != self.n:
            raise ValueError("permutation size does not match matrix")
        order = [p - 1 for p in perm.mapping]
        rows = []
        for old_r in order:
            row = self.rows[old_r]
            rows.append(sum(1 << new_c for new_c, old_c in enumerate(order) if row >> old_c & 1))
        return BottMatrix(self.n, tuple(rows))

    def __str__(self):
        return self.to_text().rstrip("\n")


@dataclass(frozen=True)
class Permutation:
    """``mapping[r - 1]`` is the original index placed at position ``r``."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.mapping) != list(range(1, len(self.mapping) + 1)):
            raise ValueError(f"not a permutation of 1..{len(self.mapping)}: {self.mapping}")

    @property
    def n(self) -> int:
        return len(self.mapping)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    def is_identity(self) -> bool:
        return all(p == r for r, p in enumerate(self.mapping, 1))

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for r, p in enumerate(self.mapping, 1):
            inv[p - 1] = r
        return Permutation(tuple(inv))

    def __str__(self):
        return "(" + " ".join(str(p) for p in self.mapping) + ")"


@dataclass(frozen=True)
class PairMatrix:
    """The matrix ``A_ij`` that keeps rows ``i`` and ``j`` of a Bott matrix."""

    base: BottMatrix
    i: int
    j: int

    def __post_init__(self):
        if not 1 <= self.i < self.j <= self.base.n:
            raise ValueError(f"need 1 <= i < j <= n, got i={self.i}, j={self.j}")
        for r, row in enumerate(self.base.rows, 1):
            if row and r not in (self.i, self.j):
                raise ValueError(f"row {r} of a pair matrix ({self.i},{self.j}) is nonzero")


def _decode_rows(lines: list[str]) -> BottMatrix:
    entries = []
    for number, line in enumerate(lines, 1):
        tokens = line.split(" ") if " " in line else list(line)
        if any(t not in ("0", "1") for t in tokens):
            raise MatrixFormatError(f"row {number}: only 0/1 entries allowed, got {line!r}")
        entries.append([int(t) for t in tokens])
    if not entries:
        raise MatrixFormatError("empty matrix")
    n = len(entries)
    for number, row in enumerate(entries, 1):
        if len(row) != n:
            raise MatrixFormatError(f"matrix is not square: row {number} has {len(row)} entries, expected {n}")
    if n > MAX_DIM:
        raise MatrixFormatError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    for r in range(n):
        if entries[r][r]:
            raise MatrixFormatError(f"nonzero diagonal entry at ({r + 1},{r + 1})")
    return BottMatrix.from_lists(entries)


def parse_matrix(text: bytes | str) -> BottMatrix:
    """Decode a matrix from the row-per-line text format or its JSON form.

    >>> parse_matrix("0 1\\n0 0").rows
    (2, 0)
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MatrixFormatError(f"not valid UTF-8: {exc}") from None
    stripped = text.strip()
    if stripped.startswith("{"):
        return parse_matrix_json(stripped)
    return parse_matrix_text(text)


def parse_matrix_text(text: bytes | str) -> BottMatrix:
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    lines = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        lines.append(line)
    return _decode_rows(lines)


def parse_matrix_json(text: bytes | str) -> BottMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("rows"), list):
        raise MatrixFormatError('JSON matrix needs the form {"n": int, "rows": [...]}')
    rows = doc["rows"]
    if not all(isinstance(r, str) for r in rows):
        raise MatrixFormatError("JSON rows must be strings of 0/1")
    matrix = _decode_rows([r.strip() for r in rows])
    if "n" in doc and doc["n"] != matrix.n:
        raise MatrixFormatError(f'"n" is {doc["n"]} but {matrix.n} rows were given')
    return matrix


def recognize(m: BottMatrix) -> Permutation:
    """Find a permutation conjugating ``m`` to strictly upper triangular form.

    Among all valid orders the lexicographically smallest is returned.
    Raises :class:`NotBottError` when the digraph ``i -> j`` (``a_ij = 1``)
    has a cycle.
    """
    n = m.n
    indegree = [popcount(m.column_mask(j)) for j in range(1, n + 1)]
    heap = [v for v in range(n) if indegree[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v + 1)
        for w in bits(m.rows[v]):
            indegree[w] -= 1
            if indegree[w] == 0:
                heapq.heappush(heap, w)
    if len(order) != n:
        stuck = [v + 1 for v in range(n) if indegree[v] > 0]
        raise NotBottError(f"matrix digraph has a cycle through rows {stuck}")
    return Permutation(tuple(order))


def normalize(m: BottMatrix) -> tuple[BottMatrix, Permutation]:
    perm = recognize(m)
    if perm.is_identity():
        return m, perm
    return m.conjugate(perm), perm


def nonzero_row_count(m: BottMatrix) -> int:
    return sum(1 for row in m.rows if row)


def decompose_pairs(m: BottMatrix) -> list[PairMatrix]:
    """Split ``m`` into the two-row matrices ``A_ij`` over its nonzero rows."""
    if not m.is_strictly_upper():
        raise ValueError("decompose_pairs expects a strictly upper triangular matrix")
    nonzero = m.nonzero_rows()
    if len(nonzero) < 2:
        raise ValueError(f"need at least 2 nonzero rows, found {len(nonzero)}")
    pairs = []
    for i, j in combinations(nonzero, 2):
        rows = [0] * m.n
        rows[i - 1] = m.rows[i - 1]
        rows[j - 1] = m.rows[j - 1]
        pairs.append(PairMatrix(BottMatrix(m.n, tuple(rows)), i, j))
    return pairs


def gf2_sum(matrices: Iterable[BottMatrix]) -> BottMatrix:
    matrices = list(matrices)
    rows = [0] * matrices[0].n
    for mat in matrices:
        for r, row in enumerate(mat.rows):
            rows[r] ^= row
    return BottMatrix(matrices[0].n, tuple(rows))


def integer_sum(matrices: Iterable[BottMatrix]) -> list[list[int]]:
    matrices = list(matrices)
    n = matrices[0].n
    total = [[0] * n for _ in range(n)]
    for mat in matrices:
        for r, line in enumerate(mat.to_lists()):
            for c, v in enumerate(line):
                total[r][c] += v
    return total
