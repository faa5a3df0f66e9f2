"""Face polynomials and a numerical nondegeneracy verdict.

The condition being probed: for every compact face F of the Newton
polyhedron, the vector (x_j d_j phi_F)_j has no zero off the coordinate
hyperplanes.  There is no exact decision procedure here; the verdict is
three-valued (Nondegenerate / Degenerate / Inconclusive) with recorded
evidence, and a Degenerate claim always carries a checkable witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .phase import Phase, make_phase, scaled_gradient_many
from .polytope import Face, NewtonPolyhedron, build_polyhedron

NONDEGENERATE = "Nondegenerate"
DEGENERATE = "Degenerate"
INCONCLUSIVE = "Inconclusive"

# A Degenerate witness must keep every coordinate at least this large, so the
# reported zero is genuinely off the coordinate hyperplanes.
WITNESS_MIN_COORD = 0.1


@dataclass(frozen=True)
class FacePolynomial:
    """Restriction of the phase to the support points lying on one face."""

    face: Face
    restriction: Phase


@dataclass(frozen=True)
class FaceRecord:
    face_index: int
    min_norm: float
    witness: tuple[float, ...] | None = None
    analytic: bool = False  # vertex monomials are certified without sampling


@dataclass(frozen=True)
class NondegeneracyVerdict:
    status: str
    records: tuple[FaceRecord, ...]
    grid_per_axis: int
    refine_depth: int
    degeneracy_tol: float
    reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "reason": self.reason,
            "params": {
                "grid_per_axis": self.grid_per_axis,
                "refine_depth": self.refine_depth,
                "degeneracy_tol": self.degeneracy_tol,
            },
            "faces": [
                {
                    "face": r.face_index,
                    "min_norm": r.min_norm,
                    "witness": list(r.witness) if r.witness is not None else None,
                    "analytic": r.analytic,
                }
                for r in self.records
            ],
        }


def face_polynomial(phase: Phase, face: Face) -> FacePolynomial:
    """Exact restriction of the term list to the face's support points."""
    wanted = set(face.support_points)
    if not wanted:
        raise ValueError("face has no support points; not a face of this phase")
    terms = [(a, c) for a, c in phase.terms if a in wanted]
    if {a for a, _ in terms} != wanted:
        raise ValueError("face does not belong to this phase's polyhedron")
    return FacePolynomial(face=face, restriction=make_phase(phase.dimension, terms))


def _shell_grid(d: int, grid: int) -> np.ndarray:
    """Sample the shell max_i |x_i| = 1: both signs of each pinned axis, a
    uniform grid over the free coordinates."""
    if d == 1:
        return np.array([[-1.0], [1.0]])
    free = np.linspace(-1.0, 1.0, grid)
    blocks = []
    for axis in range(d):
        for sign in (-1.0, 1.0):
            mesh = np.meshgrid(*([free] * (d - 1)), indexing="ij")
            pts = np.stack([m.ravel() for m in mesh], axis=1)
            full = np.insert(pts, axis, sign, axis=1)
            blocks.append(full)
    return np.vstack(blocks)


def _inf_norms(poly: Phase, pts: np.ndarray) -> np.ndarray:
    return np.max(np.abs(scaled_gradient_many(poly, pts)), axis=1)


def _sq_norm_and_grad(poly: Phase, x: np.ndarray) -> tuple[float, np.ndarray]:
    """h(x) = sum_j g_j^2 for g = x grad(phi_F), with its analytic gradient."""
    d = len(x)
    g = np.zeros(d)
    jac = np.zeros((d, d))  # jac[j, i] = d_i g_j
    for a, c in poly.terms:
        mono = float(c)
        for xi, e in zip(x, a):
            if e:
                mono *= xi**e
        for j, ej in enumerate(a):
            if not ej:
                continue
            g[j] += ej * mono
            for i, ei in enumerate(a):
                if ei and x[i] != 0:
                    jac[j, i] += ej * ei * mono / x[i]
    h = float(np.dot(g, g))
    grad = 2.0 * jac.T @ g
    return h, grad


def _clamped_descent(
    poly: Phase, start: np.ndarray, pinned_axis: int, rounds: int
) -> tuple[float, np.ndarray]:
    """Damped gradient descent on the shell, clamped to |x_i| >= 0.1.

    The pinned coordinate stays at +-1; free coordinates stay inside [-1, 1]
    and outside the witness exclusion band, so any zero found qualifies as a
    Degenerate witness.
    """
    x = start.astype(float).copy()
    d = len(x)

    def clamp(v: np.ndarray) -> np.ndarray:
        v = np.clip(v, -1.0, 1.0)
        for i in range(d):
            if i == pinned_axis:
                continue
            if abs(v[i]) < WITNESS_MIN_COORD:
                v[i] = WITNESS_MIN_COORD if v[i] >= 0 else -WITNESS_MIN_COORD
        return v

    x = clamp(x)
    h, grad = _sq_norm_and_grad(poly, x)
    step = 0.1
    for _ in range(rounds):
        for _ in range(40):
            if h == 0.0:
                return 0.0, x
            direction = grad.copy()
            direction[pinned_axis] = 0.0
            norm = np.linalg.norm(direction)
            if norm == 0.0:
                break
            direction /= norm
            improved = False
            trial_step = step
            for _ in range(25):
                cand = clamp(x - trial_step * direction)
                hc, gc = _sq_norm_and_grad(poly, cand)
                if hc < h:
                    x, h, grad = cand, hc, gc
                    improved = True
                    break
                trial_step /= 2.0
            if improved:
                step = min(max(trial_step * 2.0, 1e-12), 0.25)
            else:
                break
        step /= 4.0
    return h, x


def _vertex_region_min(poly: Phase) -> float:
    """Analytic lower bound for a monomial face over the probed shell region."""
    (alpha, coeff), = poly.terms
    return abs(float(coeff)) * max(alpha) * WITNESS_MIN_COORD ** sum(alpha)


def check_nondegenerate(
    phase: Phase,
    poly: NewtonPolyhedron | None = None,
    grid_per_axis: int = 64,
    refine_depth: int = 3,
    degeneracy_tol: float = 1e-9,
) -> NondegeneracyVerdict:
    """Probe every compact face polynomial for zeros off the hyperplanes.

    Quasi-homogeneity (phi_F(s^w x) = s phi_F(x) for any facet normal w
    containing F) lets the search restrict to the compact shell
    max_i |x_i| = 1 across all sign orthants.  Each face gets a grid scan
    followed by damped descent from the best grid point; descent iterates are
    kept off the hyperplanes so a converged zero is a valid witness.
    """
    if poly is None:
        poly = build_polyhedron(phase)
    records: list[FaceRecord] = []
    degenerate_witness_found = False
    all_clearly_positive = True
    for idx, face in enumerate(poly.compact_faces):
        fp = face_polynomial(phase, face)
        if len(fp.restriction.terms) == 1:
            # A single monomial c x^a never vanishes off the hyperplanes.
            records.append(
                FaceRecord(idx, min_norm=_vertex_region_min(fp.restriction), analytic=True)
            )
            continue
        pts = _shell_grid(phase.dimension, grid_per_axis)
        norms = _inf_norms(fp.restriction, pts)
        best = int(np.argmin(norms))
        grid_min = float(norms[best])
        start = pts[best]
        pinned = int(np.argmax(np.abs(start)))
        h, xstar = _clamped_descent(fp.restriction, start, pinned, refine_depth)
        descent_inf = float(np.max(np.abs(np.array(fp.restriction.scaled_gradient(xstar)))))
        face_min = min(grid_min, descent_inf)
        witness = None
        if (
            descent_inf < degeneracy_tol
            and min(abs(v) for v in xstar) >= WITNESS_MIN_COORD
            and h < degeneracy_tol**2
        ):
            witness = tuple(float(v) for v in xstar)
            degenerate_witness_found = True
        elif grid_min < degeneracy_tol:
            gp = pts[best]
            if min(abs(v) for v in gp) >= WITNESS_MIN_COORD:
                witness = tuple(float(v) for v in gp)
                degenerate_witness_found = True
        if face_min <= 1e3 * degeneracy_tol:
            all_clearly_positive = False
        records.append(FaceRecord(idx, min_norm=face_min, witness=witness))
    if degenerate_witness_found:
        status = DEGENERATE
    elif all_clearly_positive:
        status = NONDEGENERATE
    else:
        status = INCONCLUSIVE
    return NondegeneracyVerdict(
        status=status,
        records=tuple(records),
        grid_per_axis=grid_per_axis,
        refine_depth=refine_depth,
        degeneracy_tol=degeneracy_tol,
    )


def check_k_nondegenerate(
    phase: Phase,
    k: int,
    grid_per_axis: int = 64,
    refine_depth: int = 3,
    degeneracy_tol: float = 1e-9,
) -> NondegeneracyVerdict:
    """Nondegeneracy of the degree-k truncation, requiring convenience.

    The truncation keeps terms with total degree <= k; if its polyhedron
    misses a coordinate axis the verdict is Degenerate with reason
    'not convenient'.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    kept = [(a, c) for a, c in phase.terms if sum(a) <= k]
    if not kept:
        raise ValueError(f"truncation at degree {k} is empty")
    truncated = make_phase(phase.dimension, kept)
    poly = build_polyhedron(truncated)
    if not poly.convenient:
        return NondegeneracyVerdict(
            status=DEGENERATE,
            records=(),
            grid_per_axis=grid_per_axis,
            refine_depth=refine_depth,
            degeneracy_tol=degeneracy_tol,
            reason="not convenient",
        )
    return check_nondegenerate(
        truncated,
        poly,
        grid_per_axis=grid_per_axis,
        refine_depth=refine_depth,
        degeneracy_tol=degeneracy_tol,
    )
