import re
import typing

from nnrank.compiler.polynomial import Mode, Monomial, PolySystem, Polynomial, Role, SystemMeta, Variable
from nnrank.errors import ParseError
from nnrank.exact.scalar import format_scalar, parse_scalar


POLY_HEADER = "nnr-poly v1"

_VAR_PATTERN = re.compile(r"^var (\d+) = (\w+)\[([\d,]*)\]$")
_POLY_PATTERN = re.compile(r"^poly (\w+)\[([\d,]*)\] = (.*)$")
_FACTOR_PATTERN = re.compile(r"^x(\d+)\^(\d+)$")


def _format_indices(indices: typing.Sequence[int]) -> str:
    return ",".join(str(index) for index in indices)


def _parse_indices(text: str) -> typing.Tuple[int, ...]:
    return tuple(int(value) for value in text.split(",")) if text else ()


def _format_monomial(monomial: Monomial) -> str:
    coefficient = format_scalar(monomial.coefficient)
    if not coefficient.startswith("-"):
        coefficient = "+" + coefficient

    factors = [f"x{index}^{exponent}" for index, exponent in monomial.exponents]
    return "*".join([coefficient] + factors)


def emit_poly_system(system: PolySystem) -> str:
    """Line-oriented text of a compiled system"""
    lines = [f"{POLY_HEADER} mode={system.mode.value}", f"vars {system.var_count}"]
    lines += [f"var {index} = {variable}" for index, variable in enumerate(system.variables)]

    for polynomial in system.polynomials:
        body = " ".join(_format_monomial(monomial) for monomial in polynomial.monomials) or "0"
        lines.append(f"poly {polynomial.family}[{_format_indices(polynomial.indices)}] = {body}")

    meta = system.meta
    lines.append(f"meta m={meta.m} n={meta.n} r={meta.r} s={meta.s} t={meta.t} "
                 f"U={_format_indices(meta.U)} V={_format_indices(meta.V)} p={meta.p} q={meta.q}")
    return "\n".join(lines) + "\n"


def _parse_monomial(token: str, var_count: int, line: int, column: int) -> Monomial:
    coefficient, *factors = token.split("*")
    try:
        coefficient = parse_scalar(coefficient.lstrip("+"))
    except ValueError as e:
        raise ParseError(f"Malformed coefficient: {e}", line, column)

    exponents = []
    for factor in factors:
        match = _FACTOR_PATTERN.match(factor)
        if match is None:
            raise ParseError(f"Malformed factor `{factor}`", line, column)
        index, exponent = int(match.group(1)), int(match.group(2))
        if index >= var_count or exponent < 1:
            raise ParseError(f"Factor `{factor}` out of range", line, column)
        exponents.append((index, exponent))

    return Monomial(coefficient=coefficient, exponents=tuple(exponents))


def parse_poly_system(text: str) -> PolySystem:
    """Parses the text written by `emit_poly_system`.

    Raises
    ------
    ParseError
        On the first malformed line or monomial
    """
    lines = [(number, line.rstrip()) for number, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if not lines:
        raise ParseError("Empty polynomial file", 1, 1)

    number, header = lines[0]
    if not header.startswith(POLY_HEADER + " mode="):
        raise ParseError(f"Expected header `{POLY_HEADER} mode=...`", number, 1)
    try:
        mode = Mode(header[len(POLY_HEADER + " mode="):])
    except ValueError:
        raise ParseError("Unknown mode", number, len(POLY_HEADER) + 7)

    if len(lines) < 2 or not lines[1][1].startswith("vars "):
        raise ParseError("Expected `vars <k>`", lines[1][0] if len(lines) > 1 else 2, 1)
    number, tokens = lines[1][0], lines[1][1].split()
    if len(tokens) != 2 or not tokens[1].isdigit():
        raise ParseError("Expected a nonnegative count in `vars <k>`", number, len("vars ") + 1)
    var_count = int(tokens[1])

    variables, polynomials, meta = [], [], None
    for number, line in lines[2:]:
        if line.startswith("var "):
            match = _VAR_PATTERN.match(line)
            if match is None or int(match.group(1)) != len(variables):
                raise ParseError("Malformed variable line", number, 1)
            try:
                role = Role(match.group(2))
            except ValueError:
                raise ParseError(f"Unknown variable role `{match.group(2)}`", number, line.index("=") + 3)
            variables.append(Variable(role=role, coords=_parse_indices(match.group(3))))
        elif line.startswith("poly "):
            match = _POLY_PATTERN.match(line)
            if match is None:
                raise ParseError("Malformed polynomial line", number, 1)
            body = match.group(3).strip()
            monomials = []
            if body != "0":
                column = match.start(3) + 1
                for token in body.split():
                    monomials.append(_parse_monomial(token, var_count, number, column))
                    column += len(token) + 1
            polynomials.append(Polynomial(family=match.group(1),
                                          indices=_parse_indices(match.group(2)),
                                          monomials=tuple(monomials)))
        elif line.startswith("meta "):
            try:
                fields = dict(item.split("=", 1) for item in line.split()[1:])
                meta = SystemMeta(m=int(fields["m"]), n=int(fields["n"]), r=int(fields["r"]),
                                  s=int(fields["s"]), t=int(fields["t"]),
                                  U=_parse_indices(fields["U"]), V=_parse_indices(fields["V"]),
                                  p=int(fields["p"]), q=int(fields["q"]))
            except (KeyError, ValueError):
                raise ParseError("Malformed meta line", number, 1)
        else:
            raise ParseError("Unknown line", number, 1)

    if len(variables) != var_count:
        raise ParseError(f"Expected {var_count} variables, got {len(variables)}", lines[-1][0], 1)
    if meta is None:
        raise ParseError("Missing meta line", lines[-1][0], 1)

    return PolySystem(mode=mode, variables=tuple(variables), polynomials=tuple(polynomials), meta=meta)


def write_poly_system(path: str, system: PolySystem):
    with open(path, "w") as file:
        file.write(emit_poly_system(system))


def read_poly_system(path: str) -> PolySystem:
    with open(path, "r") as file:
        return parse_poly_system(file.read())
