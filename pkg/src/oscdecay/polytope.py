"""Exact Newton polyhedron: facets, compact face lattice, floor functional.

The polyhedron of a phase is conv(support) + R_>=0^d.  Facet normals w are the
parametrizations of supporting hyperplanes {xi : xi.w = 1} not containing the
origin; they are generated by solving A w = 1 on subsets of support points,
optionally augmented with zero-component constraints for unbounded facets, and
validated exactly.  Everything here is fractions.Fraction; no floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .lp import lp_feasible
from .phase import Multidegree, Phase

RationalVec = tuple[Fraction, ...]


class DegeneratePolyhedronError(ValueError):
    """No facet normals exist (the floor functional is undefined)."""


@dataclass(frozen=True)
class FacetNormal:
    """Normal w of a facet hyperplane {xi : xi.w = 1}, componentwise >= 0."""

    w: RationalVec

    def dot(self, xi: Sequence[Fraction | int]) -> Fraction:
        return sum((Fraction(x) * wi for x, wi in zip(xi, self.w)), Fraction(0))


@dataclass(frozen=True)
class Face:
    """A compact face: the convex hull of its vertex set.

    containing_facets indexes into the polyhedron's facet_normals; zero_axes
    lists the coordinate hyperplanes containing the face.  A support point
    lies on the face iff it satisfies all those equalities.
    """

    vertices: tuple[Multidegree, ...]
    dimension: int
    containing_facets: frozenset[int]
    zero_axes: frozenset[int]
    support_points: tuple[Multidegree, ...]


@dataclass(frozen=True)
class NewtonPolyhedron:
    dimension: int
    support: tuple[Multidegree, ...]
    extreme_points: tuple[Multidegree, ...]
    facet_normals: tuple[FacetNormal, ...]
    compact_faces: tuple[Face, ...]
    newton_distance: Fraction
    convenient: bool


# ---------------------------------------------------------------------------
# Exact linear algebra helpers.


def _solve_square(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve a square rational system by Gaussian elimination; None if singular."""
    n = len(rows)
    aug = [list(r) + [v] for r, v in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * p for v, p in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def rational_rank(vectors: Sequence[Sequence[Fraction | int]]) -> int:
    """Rank over Q of a list of vectors."""
    mat = [[Fraction(v) for v in vec] for vec in vectors]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        inv = Fraction(1) / mat[row][col]
        mat[row] = [v * inv for v in mat[row]]
        for r in range(len(mat)):
            if r != row and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [v - f * p for v, p in zip(mat[r], mat[row])]
        row += 1
        rank += 1
        if row == len(mat):
            break
    return rank


def _affine_dimension(points: Sequence[Sequence[Fraction | int]], extra_dirs=()) -> int:
    """Dimension of the affine hull of points together with ray directions."""
    pts = [tuple(Fraction(v) for v in p) for p in points]
    base = pts[0]
    dirs = [tuple(v - b for v, b in zip(p, base)) for p in pts[1:]]
    dirs += [tuple(Fraction(v) for v in e) for e in extra_dirs]
    if not dirs:
        return 0
    return rational_rank(dirs)


# ---------------------------------------------------------------------------
# Construction.


def _facet_candidates(support: Sequence[Multidegree], d: int) -> set[RationalVec]:
    """Solve A w = 1 on point subsets, with zero components for unbounded facets."""
    candidates: set[RationalVec] = set()
    axes = range(d)
    for nzeros in range(d):
        k = d - nzeros
        if k > len(support):
            continue
        for zero_set in combinations(axes, nzeros):
            for pts in combinations(support, k):
                rows = [[Fraction(p[i]) for i in range(d)] for p in pts]
                rows += [
                    [Fraction(1) if i == z else Fraction(0) for i in range(d)]
                    for z in zero_set
                ]
                rhs = [Fraction(1)] * k + [Fraction(0)] * nzeros
                w = _solve_square(rows, rhs)
                if w is not None and all(v >= 0 for v in w) and any(v > 0 for v in w):
                    candidates.add(tuple(w))
    return candidates


def _is_facet(w: RationalVec, support: Sequence[Multidegree], d: int) -> bool:
    """Keep w iff it supports the hull and its equality set has dimension d-1.

    The dimension counts the recession directions e_i with w_i = 0: an
    unbounded facet can have few support points on it but still be full rank
    on the hull boundary.
    """
    equality = []
    for a in support:
        dot = sum(Fraction(ai) * wi for ai, wi in zip(a, w))
        if dot < 1:
            return False
        if dot == 1:
            equality.append(a)
    if not equality:
        return False
    rays = [
        tuple(Fraction(1) if j == i else Fraction(0) for j in range(d))
        for i in range(d)
        if w[i] == 0
    ]
    return _affine_dimension(equality, rays) == d - 1


def _extreme_points(support: Sequence[Multidegree], d: int) -> list[Multidegree]:
    """Support points not expressible as convex-plus-nonnegative combinations.

    Membership is decided by exact LP feasibility of
    alpha = sum(lambda_i beta_i) + gamma, lambda in the simplex, gamma >= 0.
    """
    extreme = []
    for alpha in support:
        others = [b for b in support if b != alpha]
        if not others:
            extreme.append(alpha)
            continue
        # Cheap domination prefilter: beta <= alpha componentwise.
        if any(all(b[i] <= alpha[i] for i in range(d)) for b in others):
            continue
        nvars = len(others) + d  # lambdas then gamma slacks
        A = []
        for i in range(d):
            A.append(
                [Fraction(b[i]) for b in others]
                + [Fraction(1) if j == i else Fraction(0) for j in range(d)]
            )
        A.append([Fraction(1)] * len(others) + [Fraction(0)] * d)
        b_rhs = [Fraction(alpha[i]) for i in range(d)] + [Fraction(1)]
        assert len(A[0]) == nvars
        if not lp_feasible(A, b_rhs):
            extreme.append(alpha)
    return extreme


def _compact_faces(
    support: Sequence[Multidegree],
    extreme: Sequence[Multidegree],
    normals: Sequence[FacetNormal],
    d: int,
) -> list[Face]:
    """Face lattice by intersection closure of facet vertex sets.

    Faces are identified by (vertex set, recession axes); both intersect
    componentwise when faces intersect, and a face is compact iff its
    recession set is empty.
    """
    vindex = {v: i for i, v in enumerate(extreme)}
    seeds: set[tuple[frozenset[int], frozenset[int]]] = set()
    for fi, fn in enumerate(normals):
        verts = frozenset(vindex[v] for v in extreme if fn.dot(v) == 1)
        rec = frozenset(i for i in range(d) if fn.w[i] == 0)
        if verts:
            seeds.add((verts, rec))
    for axis in range(d):
        verts = frozenset(vindex[v] for v in extreme if v[axis] == 0)
        rec = frozenset(i for i in range(d) if i != axis)
        if verts:
            seeds.add((verts, rec))

    closed = set(seeds)
    frontier = set(seeds)
    while frontier:
        new = set()
        for f1 in frontier:
            for f2 in closed:
                inter = (f1[0] & f2[0], f1[1] & f2[1])
                if inter[0] and inter not in closed:
                    new.add(inter)
        closed |= new
        frontier = new

    faces = []
    for verts, rec in sorted(closed, key=lambda fr: (sorted(fr[0]), sorted(fr[1]))):
        if rec:
            continue
        vlist = tuple(sorted(extreme[i] for i in verts))
        containing = frozenset(
            fi for fi, fn in enumerate(normals) if all(fn.dot(v) == 1 for v in vlist)
        )
        zero_axes = frozenset(i for i in range(d) if all(v[i] == 0 for v in vlist))
        on_face = tuple(
            a
            for a in support
            if all(normals[fi].dot(a) == 1 for fi in containing)
            and all(a[i] == 0 for i in zero_axes)
        )
        faces.append(
            Face(
                vertices=vlist,
                dimension=_affine_dimension(vlist),
                containing_facets=containing,
                zero_axes=zero_axes,
                support_points=on_face,
            )
        )
    faces.sort(key=lambda f: (f.dimension, f.vertices))
    return faces


def build_polyhedron(phase: Phase) -> NewtonPolyhedron:
    """Exact construction of the Newton polyhedron of a phase."""
    d = phase.dimension
    support = phase.support
    normals = tuple(
        FacetNormal(w)
        for w in sorted(w for w in _facet_candidates(support, d) if _is_facet(w, support, d))
    )
    extreme = tuple(sorted(_extreme_points(support, d)))
    faces = tuple(_compact_faces(support, extreme, normals, d))
    ones = (1,) * d
    if normals:
        floor_one = min(fn.dot(ones) for fn in normals)
        t = Fraction(1) / floor_one
    else:
        t = Fraction(0)  # degenerate; newton_distance() raises on use
    convenient = all(
        any(a[i] > 0 and all(a[j] == 0 for j in range(d) if j != i) for a in support)
        for i in range(d)
    )
    return NewtonPolyhedron(
        dimension=d,
        support=support,
        extreme_points=extreme,
        facet_normals=normals,
        compact_faces=faces,
        newton_distance=t,
        convenient=convenient,
    )


# ---------------------------------------------------------------------------
# Queries.


def supporting_check(
    poly: NewtonPolyhedron, w: Sequence[Fraction | int], xi: Sequence[Fraction | int]
) -> bool:
    """True iff H_w = {xi.w = 1} supports the polyhedron at the point xi."""
    if len(w) != poly.dimension or len(xi) != poly.dimension:
        raise ValueError("dimension mismatch")
    wf = [Fraction(v) for v in w]
    if any(v < 0 for v in wf) or all(v == 0 for v in wf):
        raise ValueError("w must be nonzero with nonnegative components")
    if sum(Fraction(x) * v for x, v in zip(xi, wf)) != 1:
        return False
    return all(sum(Fraction(a) * v for a, v in zip(alpha, wf)) >= 1 for alpha in poly.support)


def floor_functional(
    poly: NewtonPolyhedron, alpha: Sequence[Fraction | int]
) -> tuple[Fraction, tuple[FacetNormal, ...]]:
    """min over facet normals of alpha.w, with the full argmin set n(alpha).

    Value 0 is legal when some normal has zero components and alpha lies in
    the matching coordinate hyperplane.
    """
    if len(alpha) != poly.dimension:
        raise ValueError("dimension mismatch")
    if any(Fraction(v) < 0 for v in alpha):
        raise ValueError("alpha must be componentwise nonnegative")
    if not poly.facet_normals:
        raise DegeneratePolyhedronError("polyhedron has no facet normals")
    dots = [fn.dot(alpha) for fn in poly.facet_normals]
    value = min(dots)
    argmin = tuple(fn for fn, v in zip(poly.facet_normals, dots) if v == value)
    return value, argmin


def floor_value(poly: NewtonPolyhedron, alpha: Sequence[Fraction | int]) -> Fraction:
    return floor_functional(poly, alpha)[0]


def newton_distance(poly: NewtonPolyhedron) -> Fraction:
    """t = 1 / floor(1), the scalar with t*(1,...,1) on the boundary."""
    ones = (1,) * poly.dimension
    value, _ = floor_functional(poly, ones)
    if value == 0:
        raise DegeneratePolyhedronError("floor(1,...,1) = 0; Newton distance undefined")
    return Fraction(1) / value


def is_convenient(poly: NewtonPolyhedron) -> bool:
    """True iff every coordinate axis carries a support point c*e_i."""
    return poly.convenient


def codim_of_point(poly: NewtonPolyhedron, beta: Sequence[int]) -> int:
    """min(d, |n(beta+1)|): the greatest codimension over faces containing
    the boundary rescaling of beta+1."""
    ones_shift = tuple(int(b) + 1 for b in beta)
    value, argmin = floor_functional(poly, ones_shift)
    if value == 0:
        raise ValueError("floor(beta+1) = 0; codimension undefined")
    return min(poly.dimension, len(argmin))


def contains_point(poly: NewtonPolyhedron, q: Sequence[Fraction | int]) -> bool:
    """Membership by the facet inequalities: q >= 0 and min_w q.w >= 1."""
    qf = [Fraction(v) for v in q]
    if any(v < 0 for v in qf):
        return False
    if not poly.facet_normals:
        raise DegeneratePolyhedronError("polyhedron has no facet normals")
    return all(fn.dot(qf) >= 1 for fn in poly.facet_normals)


def contains_point_lp(poly: NewtonPolyhedron, q: Sequence[Fraction | int]) -> bool:
    """Membership by exact LP: q = sum(lambda_i alpha_i) + gamma, gamma >= 0.

    Independent of the facet enumeration; used as a cross-check oracle.
    """
    d = poly.dimension
    pts = poly.support
    qf = [Fraction(v) for v in q]
    if any(v < 0 for v in qf):
        return False
    A = []
    for i in range(d):
        A.append(
            [Fraction(p[i]) for p in pts]
            + [Fraction(1) if j == i else Fraction(0) for j in range(d)]
        )
    A.append([Fraction(1)] * len(pts) + [Fraction(0)] * d)
    return lp_feasible(A, qf + [Fraction(1)])


def polyhedron_report(poly: NewtonPolyhedron) -> dict:
    """JSON-shaped summary of the polyhedron."""
    return {
        "extreme_points": [list(v) for v in poly.extreme_points],
        "facet_normals": [[str(c) for c in fn.w] for fn in poly.facet_normals],
        "newton_distance": str(poly.newton_distance) if poly.facet_normals else None,
        "convenient": poly.convenient,
        "compact_faces": [
            {
                "dim": f.dimension,
                "vertices": [list(v) for v in f.vertices],
                "facets": sorted(f.containing_facets),
            }
            for f in poly.compact_faces
        ],
    }
