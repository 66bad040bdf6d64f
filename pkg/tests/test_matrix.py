import json
import random

import pytest
from hypothesis import given, strategies as st

from realbott.matrix import (
    MAX_DIM,
    BottMatrix,
    MatrixFormatError,
    NotBottError,
    PairMatrix,
    Permutation,
    decompose_pairs,
    gf2_sum,
    integer_sum,
    nonzero_row_count,
    normalize,
    parse_matrix,
    recognize,
)

from conftest import TWO_ROW_4


def upper_matrices(max_n=7):
    @st.composite
    def build(draw):
        n = draw(st.integers(2, max_n))
        rows = tuple(draw(st.integers(0, (1 << (n - r - 1)) - 1)) << (r + 1) for r in range(n))
        return BottMatrix(n, rows)
    return build()


def test_parse_simple():
    m = parse_matrix(b"0 1\n0 0")
    assert m.n == 2 and m.entry(1, 2) == 1 and m.entry(2, 1) == 0


def test_parse_zero():
    assert parse_matrix("0 0\n0 0\n") == BottMatrix.zero(2)


def test_parse_staircase(staircase):
    assert staircase.row_strings() == ["011000", "001100", "000110", "000011", "000000", "000000"]


def test_parse_comments_and_json():
    text = "# Klein bottle\n01\n00"
    assert parse_matrix(text) == parse_matrix(json.dumps({"n": 2, "rows": ["01", "00"]}))


@pytest.mark.parametrize("text", [
    "0 1 0\n0 0\n",          # not square
    "0 2\n0 0\n",            # bad character
    "1 0\n0 0\n",            # diagonal
    "0  1\n0 0\n",           # double space
    "",
    '{"n": 3, "rows": ["01", "00"]}',
])
def test_parse_errors(text):
    with pytest.raises(MatrixFormatError):
        parse_matrix(text)


def test_dimension_cap():
    with pytest.raises(ValueError):
        BottMatrix.zero(MAX_DIM + 1)
    assert BottMatrix.zero(MAX_DIM).n == MAX_DIM


def test_recognize_upper_is_identity(staircase):
    assert recognize(staircase).is_identity()


def test_recognize_two_cycle():
    with pytest.raises(NotBottError):
        recognize(BottMatrix.from_lists([[0, 1], [1, 0]]))


def test_recognize_transpose_of_staircase(staircase):
    lower = BottMatrix.from_lists([list(col) for col in zip(*staircase.to_lists())])
    perm = recognize(lower)
    assert lower.conjugate(perm).is_strictly_upper()
    # rows 5 and 6 are both sources of the reversed digraph; smallest first
    assert perm.mapping == (5, 6, 4, 3, 2, 1)
    reversal = Permutation((6, 5, 4, 3, 2, 1))
    assert lower.conjugate(reversal).is_strictly_upper()


def test_normalize_staircase_and_zero(staircase):
    assert normalize(staircase) == (staircase, Permutation.identity(6))
    z = BottMatrix.zero(4)
    assert normalize(z) == (z, Permutation.identity(4))


def test_normalize_random_conjugates(staircase):
    rng = random.Random(7)
    for _ in range(20):
        order = list(range(1, 7))
        rng.shuffle(order)
        shuffled = staircase.conjugate(Permutation(tuple(order)))
        back, _ = normalize(shuffled)
        assert back.is_strictly_upper()
        assert nonzero_row_count(back) == 4


@given(upper_matrices(), st.randoms(use_true_random=False))
def test_recognize_property(m, rng):
    order = list(range(1, m.n + 1))
    rng.shuffle(order)
    shuffled = m.conjugate(Permutation(tuple(order)))
    normal, perm = normalize(shuffled)
    assert normal.is_strictly_upper()
    again, perm2 = normalize(normal)
    assert perm2.is_identity() and again == normal


def test_cycle_detection_three():
    m = BottMatrix.from_lists([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    with pytest.raises(NotBottError):
        normalize(m)


def test_nonzero_row_count(staircase):
    assert nonzero_row_count(staircase) == 4
    assert nonzero_row_count(BottMatrix.zero(5)) == 0
    assert nonzero_row_count(parse_matrix(TWO_ROW_4)) == 2


def test_decompose_staircase(staircase):
    pairs = decompose_pairs(staircase)
    assert [(p.i, p.j) for p in pairs] == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    z = "000000"
    expected = {
        (1, 2): ["011000", "001100", z, z, z, z],
        (1, 3): ["011000", z, "000110", z, z, z],
        (1, 4): ["011000", z, z, "000011", z, z],
        (2, 3): [z, "001100", "000110", z, z, z],
        (2, 4): [z, "001100", z, "000011", z, z],
        (3, 4): [z, z, "000110", "000011", z, z],
    }
    for p in pairs:
        assert p.base.row_strings() == expected[(p.i, p.j)]


def test_decompose_two_rows():
    m = parse_matrix(TWO_ROW_4)
    (pair,) = decompose_pairs(m)
    assert pair.base == m and (pair.i, pair.j) == (2, 3)


def test_decompose_needs_two_rows():
    with pytest.raises(ValueError):
        decompose_pairs(parse_matrix("011\n000\n000"))


@given(upper_matrices())
def test_decomposition_sums(m):
    k = nonzero_row_count(m)
    if k < 2:
        return
    pairs = decompose_pairs(m)
    assert len(pairs) == k * (k - 1) // 2
    nonzero = set(m.nonzero_rows())
    for p in pairs:
        assert {p.i, p.j} <= nonzero and nonzero_row_count(p.base) == 2
    bases = [p.base for p in pairs]
    assert integer_sum(bases) == [[(k - 1) * v for v in row] for row in m.to_lists()]
    if k % 2 == 0:
        assert gf2_sum(bases) == m


def test_pair_matrix_invariant(staircase):
    with pytest.raises(ValueError):
        PairMatrix(staircase, 1, 2)


def test_text_roundtrip(staircase):
    assert parse_matrix(staircase.to_text()) == staircase
    assert parse_matrix(staircase.to_json()) == staircase
