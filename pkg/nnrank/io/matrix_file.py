import typing

from nnrank.errors import ParseError
from nnrank.exact.matrix import ExactMatrix, Field, field_of, zeros
from nnrank.exact.scalar import QS3, format_scalar, parse_scalar


MATRIX_HEADER = "nnr-matrix v1"


def _content_lines(text: str) -> typing.Iterator[typing.Tuple[int, str]]:
    for number, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            yield number, line


def _tokens(line: str) -> typing.List[typing.Tuple[int, str]]:
    """Whitespace-separated tokens with their 1-based columns"""
    result, column = [], 0
    for token in line.split():
        column = line.index(token, column)
        result.append((column + 1, token))
        column += len(token)
    return result


def _expect_keyword(lines, keyword: str, count: int) -> typing.Tuple[int, typing.List[str]]:
    try:
        number, line = next(lines)
    except StopIteration:
        raise ParseError(f"Missing `{keyword}` line")

    tokens = _tokens(line)
    if not tokens or tokens[0][1] != keyword or len(tokens) != count + 1:
        raise ParseError(f"Expected `{keyword}` with {count} value(s)", number, tokens[0][0] if tokens else 1)
    return number, [token for _, token in tokens[1:]]


def parse_matrix(text: str) -> ExactMatrix:
    """Parses the matrix text format.

    Raises
    ------
    ParseError
        With the line and column of the first malformed token
    """
    lines = _content_lines(text)
    try:
        number, header = next(lines)
    except StopIteration:
        raise ParseError("Empty matrix file", 1, 1)
    if header.strip() != MATRIX_HEADER:
        raise ParseError(f"Expected header `{MATRIX_HEADER}`", number, 1)

    number, dims = _expect_keyword(lines, "dims", 2)
    try:
        m, n = int(dims[0]), int(dims[1])
    except ValueError:
        raise ParseError("Dimensions have to be integers", number, 6)
    if m < 0 or n < 0:
        raise ParseError("Dimensions have to be nonnegative", number, 6)

    number, field = _expect_keyword(lines, "field", 1)
    try:
        field = Field(field[0])
    except ValueError:
        raise ParseError(f"Unknown field `{field[0]}`", number, 7)

    result = zeros(m, n)
    # rows of a matrix without columns are left out
    row = m if n == 0 else 0
    for number, line in lines:
        if row == m:
            raise ParseError(f"More than {m} rows", number, 1)

        tokens = _tokens(line)
        if len(tokens) != n:
            raise ParseError(f"Expected {n} entries, got {len(tokens)}", number, 1)

        for col, (column, token) in enumerate(tokens):
            try:
                value = parse_scalar(token)
            except ValueError as e:
                raise ParseError(str(e), number, column)
            if isinstance(value, QS3) and field is Field.RAT:
                raise ParseError(f"Entry `{token}` isn't rational", number, column)
            result[row, col] = QS3(value) if field is Field.QS3 and not isinstance(value, QS3) else value
        row += 1

    if row != m:
        raise ParseError(f"Expected {m} rows, got {row}", number if m else 0, 1)

    return result


def emit_matrix(matrix: ExactMatrix) -> str:
    """Canonical text of `matrix`, reduced fractions and single spaces"""
    m, n = matrix.shape
    lines = [MATRIX_HEADER, f"dims {m} {n}", f"field {field_of(matrix).value}"]
    for row in (matrix if n > 0 else []):
        lines.append(" ".join(format_scalar(value) for value in row))
    return "\n".join(lines) + "\n"


def read_matrix(path: str) -> ExactMatrix:
    with open(path, "r") as file:
        return parse_matrix(file.read())


def write_matrix(path: str, matrix: ExactMatrix):
    with open(path, "w") as file:
        file.write(emit_matrix(matrix))
