import typing

from dataclasses import dataclass

from nnrank.errors import DegenerateConfigurationError
from nnrank.exact.linalg import inverse
from nnrank.exact.matrix import ExactMatrix, block_diagonal, exact_matrix, is_nonnegative, matmul
from nnrank.fragile.geometry import Point, canonical_point, cross, sub
from nnrank.fragile.instance import FragileInstance, embed


@dataclass(frozen=True, eq=False)
class SubCert:
    """Factorization `U_{S'} = (U_{S'}·Q⁻¹)·Q` and `V = Q⁻¹·(Q·V)` through 3 columns"""

    triangle: int
    rows: typing.Tuple[int, ...]
    Q: ExactMatrix
    left: ExactMatrix
    right: ExactMatrix

    @property
    def verified(self) -> bool:
        return is_nonnegative(self.left) and is_nonnegative(self.right)


def _scaled_triangle_matrix(inst: FragileInstance, triangle: int) -> ExactMatrix:
    vertices = inst.triangles[triangle].scaled_vertices(1 - inst.epsilon)
    return exact_matrix([embed(vertex) for vertex in vertices])


def submatrix_certificate(inst: FragileInstance, rows: typing.Sequence[int]) -> typing.Optional[SubCert]:
    """Rank-3 nonnegative certificate of the rows `rows` of `inst.M`.

    The certificate factors through a scaled triangle not touched by any of the
    selected points. Returns `None` when every triangle is touched.
    """
    rows = tuple(rows)
    if any(not 0 <= row < len(inst.points) for row in rows):
        raise IndexError(f"Rows {rows} fall outside of {len(inst.points)} points")

    touched = {incidence.triangle for row in rows for incidence in inst.points[row].incidences}
    for triangle in range(inst.n):
        if triangle in touched:
            continue

        Q = _scaled_triangle_matrix(inst, triangle)
        certificate = SubCert(triangle=triangle,
                              rows=rows,
                              Q=Q,
                              left=matmul(inst.U[list(rows), :], inverse(Q)),
                              right=Q @ inst.V)
        if certificate.verified:
            return certificate

    return None


def _inside_triangle(vertices: typing.Sequence[Point], p: Point) -> bool:
    signs = [cross(sub(vertices[(k + 1) % 3], vertices[k]), sub(p, vertices[k])) for k in range(3)]
    return all(value >= 0 for value in signs) or all(value <= 0 for value in signs)


def triangle_from_certificate(inst: FragileInstance, certificate: SubCert) -> typing.Tuple[Point, Point, Point]:
    """Maps the rows of `Q` back to the plane, the nested triangle the certificate encodes.

    Raises
    ------
    DegenerateConfigurationError
        If the triangle misses a certified point or leaves the polygon
    """
    vertices = []
    for row in certificate.Q:
        total = sum(row)
        p0, p1, p2 = (value / total for value in row)
        vertices.append(canonical_point((3 * (p0 - p1), 2 - 6 * p2)))

    for row in certificate.rows:
        if not _inside_triangle(vertices, inst.points[row].point):
            raise DegenerateConfigurationError(f"Point {row} isn't inside the certified triangle")
    for vertex in vertices:
        if not inst.polygon.contains(vertex, strict=False):
            raise DegenerateConfigurationError(f"Triangle vertex {vertex} leaves the polygon")

    return tuple(vertices)


@dataclass(frozen=True, eq=False)
class BlockCertificate:
    certificates: typing.Tuple[SubCert, ...]
    Q: ExactMatrix
    left: ExactMatrix
    right: ExactMatrix

    @property
    def verified(self) -> bool:
        return is_nonnegative(self.left) and is_nonnegative(self.right)


def block_certificate(inst: FragileInstance, blocks: int, rows: typing.Sequence[int]) -> typing.Optional[BlockCertificate]:
    """Per-block certificates of a row selection of the block-diagonal composition.

    Parameters
    ----------
    inst : FragileInstance
        Instance placed `blocks` times on the diagonal
    blocks : int
        Number of diagonal copies
    rows : typing.Sequence[int]
        Row indices into the composed matrix
    """
    size = len(inst.points)
    if any(not 0 <= row < size * blocks for row in rows):
        raise IndexError(f"Rows fall outside of the {size * blocks} composed rows")

    certificates = []
    for block in range(blocks):
        local = [row - block * size for row in rows if block * size <= row < (block + 1) * size]
        certificate = submatrix_certificate(inst, local)
        if certificate is None:
            return None
        certificates.append(certificate)

    Q = block_diagonal([certificate.Q for certificate in certificates])
    U = block_diagonal([inst.U] * blocks)
    V = block_diagonal([inst.V] * blocks)
    result = BlockCertificate(certificates=tuple(certificates),
                              Q=Q,
                              left=matmul(U[sorted(rows), :], inverse(Q)),
                              right=Q @ V)
    assert result.verified, "Per-block certificates compose into a verified block certificate"
    return result
