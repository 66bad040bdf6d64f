import pytest

from realbott.matrix import parse_matrix

STAIRCASE = """\
011000
001100
000110
000011
000000
000000
"""

# orientable matrices with two nonzero rows, one per block pattern
TWO_ROW_1 = "\n".join(["0" * 8, "00110000", "00001111"] + ["0" * 8] * 5)
TWO_ROW_2 = "\n".join(["0" * 6, "001100", "000011"] + ["0" * 6] * 3)
TWO_ROW_3 = "\n".join(["011110000", "000111111"] + ["0" * 9] * 7)
TWO_ROW_4 = "\n".join(["0" * 13, "0011111100000", "0000011111111"] + ["0" * 13] * 10)

KLEIN = "0 1\n0 0\n"


@pytest.fixture
def staircase():
    return parse_matrix(STAIRCASE)


@pytest.fixture
def two_rows():
    return [parse_matrix(t) for t in (TWO_ROW_1, TWO_ROW_2, TWO_ROW_3, TWO_ROW_4)]


@pytest.fixture
def klein():
    return parse_matrix(KLEIN)
