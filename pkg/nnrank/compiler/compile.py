import math
import sympy
import typing

from fractions import Fraction
from sympy.polys.domains import QQ

from nnrank.errors import CapExceededError, DimensionError
from nnrank.exact.matrix import ExactMatrix, IndexSet, index_set
from nnrank.exact.scalar import QS3, Scalar
from nnrank.compiler.polynomial import (
    Mode,
    Monomial,
    PolySystem,
    Polynomial,
    Role,
    SystemMeta,
    Variable,
    column_subsets
)
from nnrank.settings import MAX_ENSEMBLE_SIZE, MAX_INNER_DIMENSION


# auxiliary generator standing for √3, reduced with sqrt3**2 = 3 when monomials are extracted
_SQRT3 = sympy.Symbol("sqrt3")


class _Builder:
    """Holds the sympy generators of one system and converts polynomials back to exact monomials"""

    def __init__(self, variables: typing.Sequence[Variable]):
        self.variables = tuple(variables)
        self.symbols = sympy.symbols(f"x0:{len(self.variables)}") if self.variables else ()
        self.gens = (*self.symbols, _SQRT3)

    def poly(self, expr) -> sympy.Poly:
        return sympy.Poly(expr, *self.gens, domain=QQ)

    def constant(self, value: Scalar) -> sympy.Poly:
        if isinstance(value, QS3):
            expr = sympy.Rational(value.a.numerator, value.a.denominator) \
                + sympy.Rational(value.b.numerator, value.b.denominator) * _SQRT3
        else:
            value = Fraction(value)
            expr = sympy.Rational(value.numerator, value.denominator)
        return self.poly(expr)

    def matrix(self, rows: int, cols: int, offset: int) -> sympy.Matrix:
        return sympy.Matrix(rows, cols, list(self.symbols[offset:offset + rows * cols]))

    def monomials(self, poly: sympy.Poly) -> typing.Tuple[Monomial, ...]:
        collected: typing.Dict[typing.Tuple[typing.Tuple[int, int], ...], Scalar] = {}
        for exponents, coefficient in poly.terms():
            *powers, root_power = exponents
            value = Fraction(int(coefficient.p), int(coefficient.q)) * 3 ** (root_power // 2)
            if root_power % 2:
                value = QS3(0, value)

            key = tuple((index, power) for index, power in enumerate(powers) if power)
            collected[key] = collected.get(key, Fraction(0)) + value

        monomials = []
        for key, value in sorted(collected.items(), key=lambda item: (-sum(p for _, p in item[0]), item[0])):
            if value == 0:
                continue
            if isinstance(value, QS3) and value.is_rational:
                value = value.a
            monomials.append(Monomial(coefficient=value, exponents=key))

        return tuple(monomials)

    def polynomial(self, family: str, indices: typing.Tuple[int, ...], poly: sympy.Poly) -> Polynomial:
        return Polynomial(family=family, indices=indices, monomials=self.monomials(poly))


def _check_guess(M: ExactMatrix, r: int, s: int, t: int, U: IndexSet, V: IndexSet) -> typing.Tuple[IndexSet, IndexSet]:
    m, n = M.shape
    U, V = index_set(U), index_set(V)
    if not 1 <= r <= MAX_INNER_DIMENSION:
        raise CapExceededError(f"Inner dimension {r} outside of [1, {MAX_INNER_DIMENSION}]")
    if len(U) != s or len(V) != t:
        raise DimensionError(f"Anchor sizes |U|={len(U)}, |V|={len(V)} don't match s={s}, t={t}")
    if not 1 <= s <= r or not 1 <= t <= r:
        raise DimensionError(f"Ranks s={s}, t={t} have to lie in [1, r={r}]")
    if any(j >= m for j in U) or any(i >= n for i in V):
        raise DimensionError(f"Anchors U={U}, V={V} fall outside of a {m}x{n} matrix")
    return U, V


def compile_take1(M: ExactMatrix,
                  r: int,
                  s: int,
                  t: int,
                  U: IndexSet,
                  V: IndexSet,
                  p: int,
                  q: int) -> PolySystem:
    """System over the entries of the transforms `B_1..B_p` and `C_1..C_q`.

    Families
    --------
    numA[i,k,ℓ] = (B_k·M_i^U)_ℓ, numW[j,l,ℓ] = (M^j_V·C_l)_ℓ and
    prod[i,j,k,l] = M^j_V·C_l·B_k·M_i^U − M_i^j, all of degree at most 2.
    """
    U, V = _check_guess(M, r, s, t, U, V)
    m, n = M.shape
    if p > min(math.comb(r, s), MAX_ENSEMBLE_SIZE) or q > min(math.comb(r, t), MAX_ENSEMBLE_SIZE):
        raise CapExceededError(f"Ensemble sizes p={p}, q={q} exceed C(r,s)={math.comb(r, s)}, C(r,t)={math.comb(r, t)}")
    if p < 1 or q < 1:
        raise DimensionError(f"Ensemble sizes have to be positive, got p={p}, q={q}")

    variables = [Variable(Role.B, (k, row, col)) for k in range(p) for row in range(r) for col in range(s)]
    variables += [Variable(Role.C, (l, row, col)) for l in range(q) for row in range(t) for col in range(r)]
    builder = _Builder(variables)

    B = [builder.matrix(r, s, k * r * s) for k in range(p)]
    C = [builder.matrix(t, r, p * r * s + l * t * r) for l in range(q)]

    column_images = {}
    for i in range(n):
        anchor = sympy.Matrix([builder.constant(M[j, i]).as_expr() for j in U])
        for k in range(p):
            column_images[(i, k)] = [builder.poly(value) for value in B[k] * anchor]

    row_images = {}
    for j in range(m):
        anchor = sympy.Matrix([[builder.constant(M[j, i]).as_expr() for i in V]])
        for l in range(q):
            row_images[(j, l)] = [builder.poly(value) for value in anchor * C[l]]

    polynomials = []
    for (i, k), image in column_images.items():
        polynomials += [builder.polynomial("numA", (i, k, pos), value) for pos, value in enumerate(image)]
    for (j, l), image in row_images.items():
        polynomials += [builder.polynomial("numW", (j, l, pos), value) for pos, value in enumerate(image)]

    for i in range(n):
        for j in range(m):
            for k in range(p):
                for l in range(q):
                    value = sum((x * y for x, y in zip(row_images[(j, l)], column_images[(i, k)])),
                                builder.poly(0))
                    value = value - builder.constant(M[j, i])
                    polynomials.append(builder.polynomial("prod", (i, j, k, l), value))

    return PolySystem(mode=Mode.TAKE1,
                      variables=tuple(variables),
                      polynomials=tuple(polynomials),
                      meta=SystemMeta(m=m, n=n, r=r, s=s, t=t, U=U, V=V, p=p, q=q))


def compile_take2(M: ExactMatrix, r: int, s: int, t: int, U: IndexSet, V: IndexSet) -> PolySystem:
    """System over the entries of `A^U` (s×r) and `W_V` (r×t).

    Candidates are cleared of their denominators: for a subset `S_k` the
    column candidate is `numA[i,k,·] / detA[k]` placed on the rows `S_k`,
    symmetric for rows with `numW` and `detW`.
    """
    U, V = _check_guess(M, r, s, t, U, V)
    m, n = M.shape

    variables = [Variable(Role.A_U, (a, c)) for a in range(s) for c in range(r)]
    variables += [Variable(Role.W_V, (c, b)) for c in range(r) for b in range(t)]
    assert len(variables) == r * s + r * t <= 2 * r * r
    builder = _Builder(variables)

    A_U = builder.matrix(s, r, 0)
    W_V = builder.matrix(r, t, r * s)
    column_sets = column_subsets(r, s)
    row_sets = column_subsets(r, t)
    if max(len(column_sets), len(row_sets)) > MAX_ENSEMBLE_SIZE:
        raise CapExceededError(f"C(r,s)={len(column_sets)} or C(r,t)={len(row_sets)} exceeds the cap")

    polynomials = []
    det_a, num_a = [], {}
    for k, subset in enumerate(column_sets):
        block = A_U.extract(list(range(s)), list(subset))
        det_a.append(builder.poly(block.det(method="berkowitz")))
        adjugate = block.adjugate(method="berkowitz")
        polynomials.append(builder.polynomial("detA", (k,), det_a[k]))
        for i in range(n):
            anchor = sympy.Matrix([builder.constant(M[j, i]).as_expr() for j in U])
            num_a[(i, k)] = [builder.poly(value) for value in adjugate * anchor]

    det_w, num_w = [], {}
    for l, subset in enumerate(row_sets):
        block = W_V.extract(list(subset), list(range(t)))
        det_w.append(builder.poly(block.det(method="berkowitz")))
        adjugate = block.adjugate(method="berkowitz")
        polynomials.append(builder.polynomial("detW", (l,), det_w[l]))
        for j in range(m):
            anchor = sympy.Matrix([[builder.constant(M[j, i]).as_expr() for i in V]])
            num_w[(j, l)] = [builder.poly(value) for value in anchor * adjugate]

    for (i, k), image in num_a.items():
        polynomials += [builder.polynomial("numA", (i, k, pos), value) for pos, value in enumerate(image)]
    for (j, l), image in num_w.items():
        polynomials += [builder.polynomial("numW", (j, l, pos), value) for pos, value in enumerate(image)]

    for i in range(n):
        for j in range(m):
            for k, column_set in enumerate(column_sets):
                for l, row_set in enumerate(row_sets):
                    value = builder.poly(0)
                    for position_a, inner in enumerate(column_set):
                        if inner in row_set:
                            value = value + num_w[(j, l)][row_set.index(inner)] * num_a[(i, k)][position_a]
                    value = value - builder.constant(M[j, i]) * det_a[k] * det_w[l]
                    polynomials.append(builder.polynomial("prod", (i, j, k, l), value))

    system = PolySystem(mode=Mode.TAKE2,
                        variables=tuple(variables),
                        polynomials=tuple(polynomials),
                        meta=SystemMeta(m=m, n=n, r=r, s=s, t=t, U=U, V=V,
                                        p=len(column_sets), q=len(row_sets)))
    assert system.max_degree <= 2 * r * r
    return system


def polynomial_counts(system: PolySystem) -> typing.Dict[str, int]:
    """Per-family counts plus the closed-form tallies of the two constructions"""
    meta = system.meta
    counts = system.counts()
    counts["total"] = len(system.polynomials)
    if system.mode is Mode.TAKE1:
        counts["tally"] = meta.r * (meta.p + meta.q) + meta.m * meta.n * meta.p * meta.q
    else:
        counts["tally"] = meta.r * (meta.p + meta.q) + (meta.p + meta.q) + meta.m * meta.n * meta.p * meta.q
    return counts
