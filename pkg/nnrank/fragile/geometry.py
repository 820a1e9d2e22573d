import functools
import itertools
import typing

from dataclasses import dataclass
from fractions import Fraction

from nnrank.errors import DegenerateConfigurationError
from nnrank.exact.scalar import QS3, Scalar, sign


Point = typing.Tuple[Scalar, Scalar]

HALF = Fraction(1, 2)
_HALF_SQRT3 = QS3(0, Fraction(1, 2))


def dot(p: Point, q: Point) -> Scalar:
    return p[0] * q[0] + p[1] * q[1]


def cross(p: Point, q: Point) -> Scalar:
    return p[0] * q[1] - p[1] * q[0]


def sub(p: Point, q: Point) -> Point:
    return (p[0] - q[0], p[1] - q[1])


def scale(p: Point, factor: Scalar) -> Point:
    return (p[0] * factor, p[1] * factor)


def squared_norm(p: Point) -> Scalar:
    return dot(p, p)


def canonical_point(p: Point) -> Point:
    """Collapses QS3 coordinates with zero √3 part to Fractions, so equal points hash equal"""
    return tuple(value.a if isinstance(value, QS3) and value.is_rational else value for value in p)


def rotate_120(p: Point) -> Point:
    """Exact counterclockwise rotation by 2π/3"""
    x, y = p
    return (-HALF * x - _HALF_SQRT3 * y, _HALF_SQRT3 * x - HALF * y)


def rotation_from_tangent(t: Fraction) -> Point:
    """Rational point ((1−t²)/(1+t²), 2t/(1+t²)) on the unit circle"""
    t = Fraction(t)
    denominator = 1 + t * t
    return ((1 - t * t) / denominator, 2 * t / denominator)


def _half_plane(p: Point) -> int:
    x, y = p
    return 0 if y > 0 or (y == 0 and x > 0) else 1


def angle_compare(p: Point, q: Point) -> int:
    """Orders nonzero points by polar angle in [0, 2π), starting at the +x axis"""
    hp, hq = _half_plane(p), _half_plane(q)
    if hp != hq:
        return hp - hq
    return -sign(cross(p, q))


def sort_by_angle(points: typing.Iterable[Point]) -> typing.List[Point]:
    return sorted(points, key=functools.cmp_to_key(angle_compare))


@dataclass(frozen=True)
class Edge:
    """Line `⟨x, normal⟩ = offset` with a unit outward normal"""

    normal: Point
    offset: Fraction = HALF

    def value(self, p: Point) -> Scalar:
        return dot(p, self.normal)

    def contains(self, p: Point) -> bool:
        return self.value(p) == self.offset


@dataclass(frozen=True)
class Triangle:
    """Equilateral triangle inscribed in the unit circle.

    Edge `e` is opposite to vertex `e`, its outward normal is the negated
    vertex, so every edge line lies at distance 1/2 from the origin.
    """

    rotation: Point
    vertices: typing.Tuple[Point, Point, Point]
    edges: typing.Tuple[Edge, Edge, Edge]
    parameter: typing.Optional[Fraction] = None

    @staticmethod
    def from_rotation(rotation: Point, parameter: typing.Optional[Fraction] = None) -> "Triangle":
        if squared_norm(rotation) != 1:
            raise DegenerateConfigurationError(f"Rotation {rotation} is not a unit vector")

        first = canonical_point(rotation)
        second = canonical_point(rotate_120(first))
        third = canonical_point(rotate_120(second))
        vertices = (first, second, third)
        edges = tuple(Edge(normal=canonical_point(scale(vertex, -1))) for vertex in vertices)
        return Triangle(rotation=first, vertices=vertices, edges=edges, parameter=parameter)

    def scaled_vertices(self, factor: Scalar) -> typing.Tuple[Point, Point, Point]:
        return tuple(canonical_point(scale(vertex, factor)) for vertex in self.vertices)

    def contains(self, p: Point, factor: Scalar = 1) -> bool:
        """Whether `p` lies in the triangle scaled about the origin by `factor`"""
        return all(edge.value(p) <= edge.offset * factor for edge in self.edges)


def family_from_rotations(rotations: typing.Sequence[Point],
                          parameters: typing.Optional[typing.Sequence[Fraction]] = None) -> typing.List[Triangle]:
    if len(rotations) < 2:
        raise DegenerateConfigurationError(f"A family needs at least 2 triangles, got {len(rotations)}")

    parameters = parameters if parameters is not None else [None] * len(rotations)
    triangles = [Triangle.from_rotation(rotation, parameter) for rotation, parameter in zip(rotations, parameters)]

    directions = [vertex for triangle in triangles for vertex in triangle.vertices]
    if len(set(directions)) != len(directions):
        raise DegenerateConfigurationError("Two triangles share a vertex direction")

    return triangles


def gen_triangle_family(params: typing.Sequence[Fraction]) -> typing.List[Triangle]:
    """Triangles rotated by the rational unit vectors of the tangent parameters.

    Raises
    ------
    DegenerateConfigurationError
        For fewer than two parameters or two triangles sharing a vertex direction
    """
    params = [Fraction(t) for t in params]
    return family_from_rotations([rotation_from_tangent(t) for t in params], params)


def hexagram_family() -> typing.List[Triangle]:
    """Two triangles rotated against each other by π/3"""
    return family_from_rotations([(Fraction(1), Fraction(0)), (HALF, _HALF_SQRT3)])


@dataclass(frozen=True)
class Incidence:
    triangle: int
    edge: int


@dataclass(frozen=True)
class IntersectionPoint:
    point: Point
    incidences: typing.Tuple[Incidence, Incidence]

    def touches(self, triangle: int) -> bool:
        return any(incidence.triangle == triangle for incidence in self.incidences)


def _line_intersection(first: Edge, second: Edge) -> typing.Optional[Point]:
    determinant = cross(first.normal, second.normal)
    if determinant == 0:
        return None

    x = (first.offset * second.normal[1] - second.offset * first.normal[1]) / determinant
    y = (first.normal[0] * second.offset - second.normal[0] * first.offset) / determinant
    return canonical_point((x, y))


def intersect_and_extract_S(triangles: typing.Sequence[Triangle]) -> typing.List[IntersectionPoint]:
    """Vertices of the intersection of all triangles, in angular order.

    Raises
    ------
    DegenerateConfigurationError
        If the intersection isn't the expected 3n-gon with two points per edge
    """
    lines = [(Incidence(i, e), edge) for i, triangle in enumerate(triangles) for e, edge in enumerate(triangle.edges)]

    points = set()
    for (first, first_edge), (second, second_edge) in itertools.combinations(lines, 2):
        if first.triangle == second.triangle:
            continue
        point = _line_intersection(first_edge, second_edge)
        if point is not None and all(edge.value(point) <= edge.offset for _, edge in lines):
            points.add(point)

    result = []
    for point in sort_by_angle(points):
        incidences = tuple(incidence for incidence, edge in lines if edge.contains(point))
        if len(incidences) != 2 or incidences[0].triangle == incidences[1].triangle:
            raise DegenerateConfigurationError(f"Point {point} lies on {len(incidences)} edge lines")
        result.append(IntersectionPoint(point=point, incidences=incidences))

    n = len(triangles)
    if len(result) != 3 * n:
        raise DegenerateConfigurationError(f"Intersection has {len(result)} vertices, expected {3 * n}")

    for incidence, _ in lines:
        count = sum(1 for point in result if incidence in point.incidences)
        if count != 2:
            raise DegenerateConfigurationError(f"Edge {incidence} contains {count} points, expected 2")

    return result


def convex_facets(points: typing.Sequence[Point]) -> typing.List[typing.Tuple[Point, Point]]:
    """Consecutive pairs of a convex polygon given in counterclockwise order"""
    return [(points[k], points[(k + 1) % len(points)]) for k in range(len(points))]


@dataclass(frozen=True)
class Polygon:
    vertices: typing.Tuple[Point, ...]

    def facets(self) -> typing.List[typing.Tuple[Point, Point]]:
        return convex_facets(self.vertices)

    def facet_normals(self) -> typing.List[Point]:
        """Outward normals of the counterclockwise facets"""
        return [(b[1] - a[1], a[0] - b[0]) for a, b in self.facets()]

    def contains(self, p: Point, strict: bool = True) -> bool:
        for a, b in self.facets():
            side = sign(cross(sub(b, a), sub(p, a)))
            if side < 0 or (strict and side == 0):
                return False
        return True


def build_polygon(triangles: typing.Sequence[Triangle], epsilon: Fraction) -> Polygon:
    """Convex hull of the triangle vertices scaled by 1−ε, all on the circle of radius 1−ε"""
    vertices = [vertex for triangle in triangles for vertex in triangle.scaled_vertices(1 - epsilon)]
    return Polygon(vertices=tuple(sort_by_angle(vertices)))
