import typing

from dataclasses import dataclass
from fractions import Fraction
from rich.console import Console

from nnrank.errors import DegenerateConfigurationError
from nnrank.exact.linalg import rank
from nnrank.exact.matrix import ExactMatrix, block_diagonal, exact_matrix, is_nonnegative
from nnrank.exact.scalar import Scalar, rational_lower_bound
from nnrank.fragile.geometry import (
    HALF,
    IntersectionPoint,
    Point,
    Polygon,
    Triangle,
    build_polygon,
    convex_facets,
    dot,
    intersect_and_extract_S,
    squared_norm,
    sub
)


console = Console(stderr=True)

MAX_EPSILON = Fraction(1, 4)
MAX_EPSILON_HALVINGS = 256

Vector3 = typing.Tuple[Scalar, Scalar, Scalar]


def embed(p: Point) -> Vector3:
    """Affine map of the plane into `x + y + z = 1`, the unit disc lands in the open positive orthant"""
    x, y = p
    third = Fraction(1, 3)
    return (third + x / 6 + y / 12, third - x / 6 + y / 12, third - y / 6)


def cross3(u: Vector3, v: Vector3) -> Vector3:
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def dot3(u: Vector3, v: Vector3) -> Scalar:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


@dataclass(frozen=True, eq=False)
class FragileInstance:
    triangles: typing.Tuple[Triangle, ...]
    points: typing.Tuple[IntersectionPoint, ...]
    epsilon: Fraction
    polygon: Polygon
    U: ExactMatrix
    V: ExactMatrix
    M: ExactMatrix

    @property
    def n(self) -> int:
        return len(self.triangles)

    @property
    def S(self) -> typing.List[Point]:
        return [point.point for point in self.points]


def minimum_gap(triangles: typing.Sequence[Triangle], points: typing.Sequence[IntersectionPoint]) -> Scalar:
    """Smallest distance from an edge line to a point of S off that line"""
    gaps = [edge.offset - edge.value(point.point)
            for triangle in triangles for edge in triangle.edges for point in points
            if not edge.contains(point.point)]
    return min(gaps)


def epsilon_checks_pass(triangles: typing.Sequence[Triangle],
                        points: typing.Sequence[IntersectionPoint],
                        polygon: Polygon,
                        epsilon: Fraction) -> bool:
    if not all(polygon.contains(point.point, strict=True) for point in points):
        return False

    # no point of S strictly between an edge line and its scaled copy
    inner = (1 - epsilon) * HALF
    for triangle in triangles:
        for edge in triangle.edges:
            for point in points:
                value = edge.value(point.point)
                if inner < value < edge.offset:
                    return False

    return True


def choose_epsilon_and_build_P(triangles: typing.Sequence[Triangle],
                               points: typing.Sequence[IntersectionPoint]) -> typing.Tuple[Fraction, Polygon]:
    """Largest power-of-two ε <= 1/4 below the minimum gap that passes every check"""
    lower = rational_lower_bound(minimum_gap(triangles, points))
    epsilon = MAX_EPSILON
    while lower > 0 and epsilon > lower:
        epsilon /= 2

    for _ in range(MAX_EPSILON_HALVINGS):
        polygon = build_polygon(triangles, epsilon)
        if epsilon_checks_pass(triangles, points, polygon, epsilon):
            return epsilon, polygon
        epsilon /= 2

    raise DegenerateConfigurationError("No admissible epsilon found")


def vavasis_reduce(polygon: Polygon,
                   points: typing.Sequence[IntersectionPoint]) -> typing.Tuple[ExactMatrix, ExactMatrix, ExactMatrix]:
    """Cone reduction: rows of U embed S, columns of V are the facet normals of the cone over P.

    Raises
    ------
    DegenerateConfigurationError
        If a facet can't be oriented or M has a negative entry or rank != 3
    """
    center = embed((Fraction(0), Fraction(0)))
    normals = []
    for a, b in polygon.facets():
        normal = cross3(embed(a), embed(b))
        side = dot3(normal, center)
        if side == 0:
            raise DegenerateConfigurationError(f"Cone facet through {a}, {b} contains the center")
        normals.append(normal if side > 0 else tuple(-value for value in normal))

    U = exact_matrix([embed(point.point) for point in points])
    V = exact_matrix(normals).T
    M = U @ V
    if not is_nonnegative(M):
        raise DegenerateConfigurationError("Reduced matrix has negative entries")
    if rank(M) != 3:
        raise DegenerateConfigurationError(f"Reduced matrix has rank {rank(M)}, expected 3")

    return U, V, M


def build_instance(triangles: typing.Sequence[Triangle]) -> FragileInstance:
    points = intersect_and_extract_S(triangles)
    epsilon, polygon = choose_epsilon_and_build_P(triangles, points)
    U, V, M = vavasis_reduce(polygon, points)
    console.log(f"Built fragile instance: n = {len(triangles)}, |S| = {len(points)}, epsilon = {epsilon}")

    return FragileInstance(triangles=tuple(triangles),
                           points=tuple(points),
                           epsilon=epsilon,
                           polygon=polygon,
                           U=U,
                           V=V,
                           M=M)


@dataclass(frozen=True)
class PremiseReport:
    # every facet of conv(S) lies at distance exactly 1/2 from the origin
    inner_circle: bool
    # every vertex of P lies at radius 1 - ε < 1
    polygon_radius: bool
    # every unscaled triangle has its vertices on the unit circle
    triangle_radius: bool
    # no scaled triangle contains all of S
    no_scaled_cover: bool

    @property
    def passed(self) -> bool:
        return self.inner_circle and self.polygon_radius and self.triangle_radius and self.no_scaled_cover

    def items(self) -> typing.List[typing.Tuple[str, bool]]:
        return [("inner_circle", self.inner_circle),
                ("polygon_radius", self.polygon_radius),
                ("triangle_radius", self.triangle_radius),
                ("no_scaled_cover", self.no_scaled_cover)]


def _inner_circle_holds(points: typing.Sequence[IntersectionPoint]) -> bool:
    for first, second in convex_facets(points):
        if not set(first.incidences) & set(second.incidences):
            return False

        direction = sub(second.point, first.point)
        normal = (direction[1], -direction[0])
        value = dot(first.point, normal)
        if value <= 0 or 4 * value * value != squared_norm(normal):
            return False

    return True


def verify_no_premises(inst: FragileInstance) -> PremiseReport:
    """Exact checks of the premises that make the intermediate-polygon instance a NO instance"""
    radius = (1 - inst.epsilon) ** 2
    polygon_radius = 0 < inst.epsilon < 1 and all(squared_norm(vertex) == radius for vertex in inst.polygon.vertices)
    triangle_radius = all(squared_norm(vertex) == 1 for triangle in inst.triangles for vertex in triangle.vertices)
    no_scaled_cover = all(any(not triangle.contains(point.point, 1 - inst.epsilon) for point in inst.points)
                          for triangle in inst.triangles)

    return PremiseReport(inner_circle=_inner_circle_holds(inst.points),
                         polygon_radius=polygon_radius,
                         triangle_radius=triangle_radius,
                         no_scaled_cover=no_scaled_cover)


def block_compose(inst: FragileInstance, blocks: int) -> ExactMatrix:
    """Block-diagonal matrix with `blocks` copies of `inst.M`"""
    if blocks < 1:
        raise ValueError(f"Block count has to be positive, got {blocks}")
    return block_diagonal([inst.M] * blocks)
