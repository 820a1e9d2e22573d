import os
import shutil
import typing

from fractions import Fraction
from rich.console import Console

from nnrank.errors import DegenerateConfigurationError, ParseError
from nnrank.exact.matrix import exact_equal, exact_matrix
from nnrank.exact.scalar import format_scalar, parse_scalar
from nnrank.fragile.geometry import (
    Triangle,
    build_polygon,
    family_from_rotations,
    gen_triangle_family,
    intersect_and_extract_S
)
from nnrank.fragile.instance import FragileInstance, PremiseReport, epsilon_checks_pass, vavasis_reduce
from nnrank.io.matrix_file import read_matrix, write_matrix
from nnrank.version import __version__


console = Console(stderr=True)

FAMILY_FILE = "family.txt"
EPSILON_FILE = "epsilon.txt"
S_FILE = "S.mat"
U_FILE = "U.mat"
V_FILE = "V.mat"
M_FILE = "M.mat"
INCIDENCE_FILE = "incidence.txt"
PROVENANCE_FILE = "provenance.txt"


def _format_family_line(triangle: Triangle) -> str:
    if triangle.parameter is not None:
        return format_scalar(triangle.parameter)
    return f"rotation {format_scalar(triangle.rotation[0])} {format_scalar(triangle.rotation[1])}"


def _parse_family(text: str) -> typing.List[Triangle]:
    parameters, rotations = [], []
    for number, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        try:
            if tokens[0] == "rotation" and len(tokens) == 3:
                rotations.append((parse_scalar(tokens[1]), parse_scalar(tokens[2])))
            elif len(tokens) == 1:
                parameters.append(Fraction(parse_scalar(tokens[0])))
            else:
                raise ValueError(f"Malformed family line `{line}`")
        except (TypeError, ValueError) as e:
            raise ParseError(str(e), number, 1)

    if parameters and rotations:
        raise ParseError("Family mixes tangent parameters and rotations", 1, 1)
    if rotations:
        return family_from_rotations(rotations)
    return gen_triangle_family(parameters)


def _parse_incidences(text: str) -> typing.List[typing.Tuple[typing.Tuple[int, int], ...]]:
    """Per point, the (triangle, edge) pairs of an `index t:e t:e ...` listing"""
    incidences = []
    for number, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        try:
            if int(tokens[0]) != len(incidences):
                raise ValueError(f"Expected point {len(incidences)}, got `{tokens[0]}`")
            pairs = [token.split(":") for token in tokens[1:]]
            if any(len(pair) != 2 for pair in pairs):
                raise ValueError(f"Malformed incidence line `{line}`")
            incidences.append(tuple((int(triangle), int(edge)) for triangle, edge in pairs))
        except ValueError as e:
            raise ParseError(str(e), number, 1)
    return incidences


class FragileBundle:
    """Directory holding a fragile instance, see the `*_FILE` constants for its layout"""

    def __init__(self, bundle_path: str):
        self._path = bundle_path

    @staticmethod
    def create(bundle_path: str, bundle_clear: bool = False) -> "FragileBundle":
        if bundle_clear and os.path.isdir(bundle_path):
            with console.status(f"Clear previous bundle `{bundle_path}`..."):
                shutil.rmtree(bundle_path, ignore_errors=True)
            console.log(f"Bundle {bundle_path} was cleared")

        os.makedirs(bundle_path, exist_ok=True)
        return FragileBundle(bundle_path)

    @property
    def path(self) -> str:
        return self._path

    def file(self, name: str) -> str:
        return os.path.join(self._path, name)

    def __repr__(self) -> str:
        return f"FragileBundle {self._path}"

    def save(self, inst: FragileInstance, premises: PremiseReport):
        """Writes every file of the bundle"""
        with open(self.file(FAMILY_FILE), "w") as file:
            file.write("\n".join(_format_family_line(triangle) for triangle in inst.triangles) + "\n")

        with open(self.file(EPSILON_FILE), "w") as file:
            file.write(format_scalar(inst.epsilon) + "\n")

        write_matrix(self.file(S_FILE), exact_matrix(inst.S))
        write_matrix(self.file(U_FILE), inst.U)
        write_matrix(self.file(V_FILE), inst.V)
        write_matrix(self.file(M_FILE), inst.M)

        with open(self.file(INCIDENCE_FILE), "w") as file:
            for index, point in enumerate(inst.points):
                pairs = " ".join(f"{incidence.triangle}:{incidence.edge}" for incidence in point.incidences)
                file.write(f"{index} {pairs}\n")

        with open(self.file(PROVENANCE_FILE), "w") as file:
            file.write(f"generator: nnrank {__version__}\n")
            for name, passed in premises.items():
                file.write(f"{name}: {'pass' if passed else 'fail'}\n")

        console.log(f"Saved {repr(self)}")

    def load(self) -> FragileInstance:
        """Rebuilds the instance from the family and epsilon and checks the stored matrices.

        Raises
        ------
        DegenerateConfigurationError
            If a stored matrix or the incidence listing differs from the rebuilt one
        ParseError
            If the family or the incidence listing is malformed
        """
        with open(self.file(FAMILY_FILE), "r") as file:
            triangles = _parse_family(file.read())

        with open(self.file(EPSILON_FILE), "r") as file:
            epsilon = Fraction(parse_scalar(file.read()))

        points = intersect_and_extract_S(triangles)
        polygon = build_polygon(triangles, epsilon)
        if not epsilon_checks_pass(triangles, points, polygon, epsilon):
            raise DegenerateConfigurationError(f"Stored epsilon {epsilon} fails the polygon checks")

        U, V, M = vavasis_reduce(polygon, points)
        inst = FragileInstance(triangles=tuple(triangles),
                               points=tuple(points),
                               epsilon=epsilon,
                               polygon=polygon,
                               U=U,
                               V=V,
                               M=M)

        stored = {S_FILE: exact_matrix(inst.S), U_FILE: U, V_FILE: V, M_FILE: M}
        for name, expected in stored.items():
            if not exact_equal(read_matrix(self.file(name)), expected):
                raise DegenerateConfigurationError(f"Stored `{name}` differs from the rebuilt instance")

        with open(self.file(INCIDENCE_FILE), "r") as file:
            incidences = _parse_incidences(file.read())
        rebuilt = [tuple((incidence.triangle, incidence.edge) for incidence in point.incidences) for point in points]
        if incidences != rebuilt:
            raise DegenerateConfigurationError(f"Stored `{INCIDENCE_FILE}` differs from the rebuilt instance")

        return inst
