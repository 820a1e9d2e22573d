import os
import pytest

from fractions import Fraction

from nnrank.errors import ParseError
from nnrank.exact.matrix import Field, exact_equal, exact_matrix, field_of, zeros
from nnrank.exact.scalar import QS3
from nnrank.io.matrix_file import emit_matrix, parse_matrix, read_matrix, write_matrix
from tests.utils import get_fixtures_folder, read_fixture_matrix


class TestParseMatrix:
    def test_single_entry(self):
        matrix = parse_matrix("nnr-matrix v1\ndims 1 1\nfield rat\n2\n")

        assert matrix.shape == (1, 1)
        assert matrix[0, 0] == 2

    def test_qs3_fixture(self):
        matrix = read_fixture_matrix("io", "qs3.mat")

        assert field_of(matrix) is Field.QS3
        assert matrix[0, 0] == Fraction(1, 2)
        assert matrix[0, 1] == QS3(0, 1)
        assert matrix[1, 1] == QS3(2, Fraction(-1, 2))

    def test_hexagram_coordinate(self):
        matrix = parse_matrix("nnr-matrix v1\ndims 1 2\nfield qs3\n1/2 1/2~1/6\n")
        assert matrix[0, 1] == QS3(Fraction(1, 2), Fraction(1, 6))

    def test_canonical_emit(self):
        with open(os.path.join(get_fixtures_folder(), "io", "qs3.mat")) as file:
            text = file.read()

        assert emit_matrix(parse_matrix(text)) == "nnr-matrix v1\ndims 2 2\nfield qs3\n1/2 0~1\n-3/4 2~-1/2\n"

    def test_empty_dimensions(self):
        for shape in [(0, 0), (0, 3), (2, 0)]:
            assert parse_matrix(emit_matrix(zeros(*shape))).shape == shape

    @pytest.mark.parametrize("text, line, column", [
        ("", 1, 1),
        ("nnr-matrix v2\ndims 1 1\nfield rat\n1\n", 1, 1),
        ("nnr-matrix v1\ndims 1\nfield rat\n1\n", 2, 1),
        ("nnr-matrix v1\ndims 1 1\nfield real\n1\n", 3, 7),
        ("nnr-matrix v1\ndims 1 2\nfield rat\n1\n", 4, 1),
        ("nnr-matrix v1\ndims 1 2\nfield rat\n1 x/2\n", 4, 3),
        ("nnr-matrix v1\ndims 1 1\nfield rat\n0~1\n", 4, 1),
        ("nnr-matrix v1\ndims 1 1\nfield rat\n1\n2\n", 5, 1),
        ("nnr-matrix v1\ndims 2 1\nfield rat\n1\n", 4, 1),
    ])
    def test_errors(self, text, line, column):
        with pytest.raises(ParseError) as error:
            parse_matrix(text)

        assert (error.value.line, error.value.column) == (line, column)

    def test_bad_token_fixture(self):
        with pytest.raises(ParseError) as error:
            read_fixture_matrix("io", "bad_token.mat")
        assert error.value.line == 4


class TestWriteMatrix:
    def test_round_trip(self, tmp_path):
        matrix = exact_matrix([["1/3", 0], [QS3(1, -1), "-7/2"]])
        path = str(tmp_path / "m.mat")

        write_matrix(path, matrix)

        assert exact_equal(read_matrix(path), matrix)
        with open(path) as file:
            assert file.read() == emit_matrix(read_matrix(path))
