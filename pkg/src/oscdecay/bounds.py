"""Quantitative checks: gradient lower bounds on dyadic boxes, the explicit
constants ladder with its smallness radius, per-box oscillatory bounds, and
the dyadic optimization sum that reproduces the predicted decay exponent.

These operations produce tables and reports meant to be verified for
boundedness and stability rather than proved: each one implements a formula
whose uniform-constant claim is checked empirically downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

import numpy as np

from .lp import lp_solve
from .nondegeneracy import _sq_norm_and_grad, face_polynomial
from .phase import Phase, scaled_gradient_many
from .polytope import (
    NewtonPolyhedron,
    codim_of_point,
    floor_functional,
    rational_rank,
)
from .quadrature import tensor_oscillatory_integral


class DegeneratePhaseError(ValueError):
    """A face polynomial's infimum vanished; the constants are undefined."""


# ---------------------------------------------------------------------------
# Box infima of ||x grad phi_F||_inf.


def _box_descent(poly: Phase, start: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    """One damped descent pass on the squared 2-norm, clamped to the box."""
    x = start.astype(float).copy()
    h, grad = _sq_norm_and_grad(poly, x)
    step = float(np.min(hi - lo)) / 8.0
    for _ in range(60):
        norm = np.linalg.norm(grad)
        if norm == 0.0 or h == 0.0:
            break
        direction = grad / norm
        improved = False
        trial = step
        for _ in range(30):
            cand = np.clip(x - trial * direction, lo, hi)
            hc, gc = _sq_norm_and_grad(poly, cand)
            if hc < h:
                x, h, grad = cand, hc, gc
                improved = True
                break
            trial /= 2.0
        if not improved:
            break
        step = min(trial * 2.0, float(np.min(hi - lo)) / 4.0)
    return float(np.max(np.abs(np.array(poly.scaled_gradient(x)))))


def box_infimum(poly: Phase, lo: Sequence[float], hi: Sequence[float], grid: int = 64) -> float:
    """inf over the box of ||x grad phi||_inf: grid scan plus one local
    refinement around the argmin plus a clamped descent pass."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = poly.dimension
    axes = [np.linspace(lo[i], hi[i], grid) for i in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    norms = np.max(np.abs(scaled_gradient_many(poly, pts)), axis=1)
    best_idx = int(np.argmin(norms))
    best = float(norms[best_idx])
    center = pts[best_idx]

    cell = (hi - lo) / (grid - 1) if grid > 1 else (hi - lo)
    ref_lo = np.clip(center - cell, lo, hi)
    ref_hi = np.clip(center + cell, lo, hi)
    axes = [np.linspace(ref_lo[i], ref_hi[i], grid) for i in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts2 = np.stack([m.ravel() for m in mesh], axis=1)
    norms2 = np.max(np.abs(scaled_gradient_many(poly, pts2)), axis=1)
    best2_idx = int(np.argmin(norms2))
    best = min(best, float(norms2[best2_idx]))

    best = min(best, _box_descent(poly, pts2[best2_idx], lo, hi))
    return best


# ---------------------------------------------------------------------------
# Lemma-style dyadic gradient ratio table.


@dataclass(frozen=True)
class RatioRow:
    level: int | tuple[int, ...]
    epsilon: tuple[float, ...]
    box_min: float
    envelope: float
    ratio: float


@dataclass(frozen=True)
class DyadicRatioTable:
    rows: tuple[RatioRow, ...]

    def ratios(self) -> list[float]:
        return [r.ratio for r in self.rows]


def _envelope(poly: NewtonPolyhedron, eps: Sequence[float]) -> float:
    best = 0.0
    for alpha in poly.extreme_points:
        val = 1.0
        for e, a in zip(eps, alpha):
            val *= e**a
        best = max(best, val)
    return best


def gradient_ratio_table(
    phase: Phase,
    poly: NewtonPolyhedron,
    j_max: int,
    grid: int = 64,
    extra_levels: Sequence[tuple[int, ...]] = (),
) -> DyadicRatioTable:
    """Ratio of min ||x grad phi||_inf over [eps, 4 eps] to the extreme-point
    envelope max eps^alpha, on isotropic levels eps = 2^-j (plus optional
    anisotropic spot checks).  For nondegenerate phases the ratio should show
    no decay trend in j."""
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    d = phase.dimension
    rows = []
    levels: list[int | tuple[int, ...]] = list(range(j_max + 1))
    levels += [tuple(lv) for lv in extra_levels]
    for level in levels:
        if isinstance(level, tuple):
            eps = tuple(2.0 ** (-ji) for ji in level)
        else:
            eps = tuple(2.0**-level for _ in range(d))
        lo = np.array(eps)
        hi = 4.0 * np.array(eps)
        box_min = box_infimum(phase, lo, hi, grid=grid)
        env = _envelope(poly, eps)
        rows.append(
            RatioRow(
                level=level,
                epsilon=eps,
                box_min=box_min,
                envelope=env,
                ratio=box_min / env,
            )
        )
    return DyadicRatioTable(rows=tuple(rows))


# ---------------------------------------------------------------------------
# The explicit constants ladder.


@dataclass(frozen=True)
class ConstantsReport:
    a: float
    rho: float
    C: tuple[float, ...]  # C_0 .. C_d
    b: tuple[float, ...]  # b_1 .. b_d
    p: float
    delta_prime: float
    delta: float
    s: float
    log10_s: float  # finite even when s underflows double precision
    taylor_order: int
    grid: int

    def to_dict(self) -> dict:
        out = {
            "a": self.a,
            "rho": self.rho,
            "p": self.p,
            "delta_prime": self.delta_prime,
            "delta": self.delta,
            "s": self.s,
            "log10_s": self.log10_s,
            "taylor_order": self.taylor_order,
            "grid": self.grid,
        }
        for m, c in enumerate(self.C):
            out[f"C{m}"] = c
        for m, bm in enumerate(self.b, start=1):
            out[f"b{m}"] = bm
        return out


def _rho_constant(phase: Phase, poly: NewtonPolyhedron) -> Fraction:
    """max over facets, over linearly independent support subsets on the
    facet, over full-rank square submatrices, of the inverse inf-norm."""
    d = phase.dimension
    best = Fraction(0)
    for fn in poly.facet_normals:
        on_facet = [a for a in phase.support if fn.dot(a) == 1]
        for n in range(1, min(d, len(on_facet)) + 1):
            for rows in combinations(on_facet, n):
                mat = [[Fraction(v) for v in r] for r in rows]
                if rational_rank(mat) < n:
                    continue
                for cols in combinations(range(d), n):
                    sub = [[row[c] for c in cols] for row in mat]
                    inv = _invert(sub)
                    if inv is None:
                        continue
                    norm = max(sum(abs(v) for v in row) for row in inv)
                    best = max(best, norm)
    return best


def _invert(mat: list[list[Fraction]]) -> list[list[Fraction]] | None:
    n = len(mat)
    aug = [list(row) + [Fraction(1) if j == i else Fraction(0) for j in range(n)] for i, row in enumerate(mat)]
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
    return [row[n:] for row in aug]


def _min_gamma_norm(u: tuple[int, ...], vertices: Sequence[tuple[int, ...]]) -> Fraction | None:
    """Exact LP: minimal inf-norm of gamma >= 0 with u - gamma in conv(vertices)."""
    d = len(u)
    m = len(vertices)
    nvars = m + 1 + 2 * d  # lambdas, t, gamma slacks, t-gamma slacks
    A: list[list[Fraction]] = []
    b: list[Fraction] = []
    for i in range(d):
        row = [Fraction(v[i]) for v in vertices] + [Fraction(0)]
        row += [Fraction(1) if j == i else Fraction(0) for j in range(d)]
        row += [Fraction(0)] * d
        A.append(row)
        b.append(Fraction(u[i]))
    for i in range(d):
        row = [Fraction(v[i]) for v in vertices] + [Fraction(1)]
        row += [Fraction(0)] * d
        row += [Fraction(-1) if j == i else Fraction(0) for j in range(d)]
        A.append(row)
        b.append(Fraction(u[i]))
    A.append([Fraction(1)] * m + [Fraction(0)] * (1 + 2 * d))
    b.append(Fraction(1))
    c = [Fraction(0)] * m + [Fraction(1)] + [Fraction(0)] * (2 * d)
    status, _, value = lp_solve(c, A, b)
    if status != "optimal":
        return None
    return value


def constants_report(
    phase: Phase,
    poly: NewtonPolyhedron,
    grid: int = 64,
    degenerate_tol: float = 1e-9,
) -> ConstantsReport:
    """The recursive constants defining the explicit smallness radius s.

    Raises DegeneratePhaseError (naming the face) when a face infimum is
    indistinguishable from zero, since then the whole ladder collapses.  For
    polynomial phases the remainder cutoff is infinite, so s is determined by
    (C_d / a)^(1/delta) alone.
    """
    d = phase.dimension
    k = phase.max_degree()
    a_const = 2.0 * max(
        sum(abs(float(c)) * alpha[j] * 4.0 ** sum(alpha) for alpha, c in phase.terms)
        for j in range(d)
    )
    rho = float(_rho_constant(phase, poly))

    face_polys = [face_polynomial(phase, f).restriction for f in poly.compact_faces]

    def faces_infimum(lo: float, hi: float, refuse: bool) -> float:
        # Degeneracy manifests as a zero of some x grad phi_F inside [1,4]^d;
        # the later boxes reach tiny coordinates where small positive infima
        # are legitimate, so only the first stage refuses.
        vals = []
        for idx, fp in enumerate(face_polys):
            v = box_infimum(fp, [lo] * d, [hi] * d, grid=grid)
            if refuse and v < degenerate_tol:
                raise DegeneratePhaseError(
                    f"face {idx} (vertices {poly.compact_faces[idx].vertices}) has "
                    f"gradient infimum {v:.3e}; phase looks degenerate"
                )
            vals.append(v)
        return min(vals)

    C = [faces_infimum(1.0, 4.0, refuse=True)]
    b: list[float] = []
    for _m in range(1, d + 1):
        bm = (C[-1] / a_const) ** (d * rho)
        b.append(bm)
        c_prime = faces_infimum(bm, 4.0 / bm, refuse=False)
        C.append(min(c_prime, C[-1] / a_const))

    on_any_face = set()
    for f in poly.compact_faces:
        on_any_face.update(f.support_points)
    p_frac = Fraction(1)
    for u in phase.support:
        if u in on_any_face:
            continue
        candidates = [
            _min_gamma_norm(u, f.vertices) for f in poly.compact_faces
        ]
        candidates = [c for c in candidates if c is not None]
        if candidates:
            p_frac = min(p_frac, min(candidates))
    p_const = float(p_frac)

    qualifying = []
    n_pts = len(phase.support)
    for i in range(n_pts):
        for j in range(i, n_pts):
            a1, a2 = phase.support[i], phase.support[j]
            shared = any(
                fn.dot(a1) == 1 and fn.dot(a2) == 1 for fn in poly.facet_normals
            )
            if not shared:
                mid = tuple(Fraction(x + y, 2) for x, y in zip(a1, a2))
                qualifying.append(floor_functional(poly, mid)[0])
    delta_prime = float(min(qualifying) - 1) if qualifying else 1.0
    delta = min(p_const, delta_prime * p_const)
    # The ladder can push s below double range; keep the exact log10.
    log10_s = math.log10(C[d] / a_const) / delta
    s = 10.0**log10_s if log10_s > -300 else 0.0
    return ConstantsReport(
        a=a_const,
        rho=rho,
        C=tuple(C),
        b=tuple(b),
        p=p_const,
        delta_prime=delta_prime,
        delta=delta,
        s=s,
        log10_s=log10_s,
        taylor_order=k,
        grid=grid,
    )


# ---------------------------------------------------------------------------
# Per-box oscillatory bound check.


@dataclass(frozen=True)
class BoxBoundRow:
    lam: float
    level: int
    value: float  # |J|: the box integral
    bound: float  # B: min over N and extreme alpha of lambda^-N eps^(beta+1-N alpha)
    ratio: float
    reliable: bool


def _eta_axis(t: np.ndarray) -> np.ndarray:
    """Smooth bump supported on [1, 4]."""
    u = (t - 2.5) / 1.5
    out = np.zeros_like(t)
    inside = np.abs(u) < 1.0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        vals = np.exp(-1.0 / (1.0 - u**2))
    out[inside] = vals[inside]
    return out


def box_bound_check(
    phase: Phase,
    poly: NewtonPolyhedron,
    beta: Sequence[int],
    lambdas: Sequence[float],
    levels: Sequence[int],
    n_max: int | None = None,
    quality: int = 2,
    panel_scale: float = 1.0,
) -> list[BoxBoundRow]:
    """Measure |int exp(i lam phi) x^beta eta(x / eps) dx| against the
    stationary-phase envelope on dyadic boxes eps = 2^-level.

    The integral is rescaled to [1, 4]^d where the bump eta lives; the bound
    is min over N <= n_max and extreme points alpha of
    lam^-N eps^(beta + 1 - N alpha).  panel_scale > 1 refines the quadrature
    (used for the stability check).
    """
    d = phase.dimension
    fl, _ = floor_functional(poly, tuple(b + 1 for b in beta))
    if n_max is None:
        if fl <= 0:
            raise ValueError("floor(beta+1) = 0; no default n_max")
        n_max = math.ceil(fl) + 1
    theta = 10.0 / panel_scale
    rows = []
    for level in levels:
        eps = 2.0**-level
        scaled_terms = [(alpha, float(c) * eps ** sum(alpha)) for alpha, c in phase.terms]
        grads = []
        for i in range(d):
            grads.append(
                sum(abs(c) * alpha[i] * 4.0 ** (sum(alpha) - 1) for alpha, c in scaled_terms)
            )

        def amp(i: int):
            def f(t: np.ndarray) -> np.ndarray:
                vals = _eta_axis(t)
                if beta[i]:
                    vals = vals * t ** beta[i]
                return vals

            return f

        amplitudes = [amp(i) for i in range(d)]
        prefactor = eps ** (sum(beta) + d)
        for lam in lambdas:
            panels = [
                max(8 * quality, math.ceil(abs(lam) * g * 3.0 / theta)) for g in grads
            ]
            val = tensor_oscillatory_integral(
                scaled_terms, lam, [1.0] * d, [4.0] * d, panels, amplitudes
            )
            val2 = tensor_oscillatory_integral(
                scaled_terms,
                lam,
                [1.0] * d,
                [4.0] * d,
                [max(1, n // 2) for n in panels],
                amplitudes,
            )
            J = prefactor * abs(val)
            err = prefactor * abs(val - val2)
            log_eps = -level * math.log(2.0)
            best = math.inf
            for N in range(n_max + 1):
                for alpha in poly.extreme_points:
                    expo = sum(beta) + d - N * sum(alpha)
                    log_b = -N * math.log(lam) + expo * log_eps
                    best = min(best, log_b)
            B = math.exp(best)
            reliable = err <= 0.1 * max(J, 1e-300)
            rows.append(
                BoxBoundRow(
                    lam=float(lam),
                    level=int(level),
                    value=J,
                    bound=B,
                    ratio=J / B,
                    reliable=bool(reliable),
                )
            )
    return rows


# ---------------------------------------------------------------------------
# Dyadic optimization sum.


def dyadic_bound_sum(
    poly: NewtonPolyhedron,
    beta: Sequence[int],
    lam: float,
    n_max: int | None = None,
    margin: int = 4,
) -> float:
    """S(lam) = sum over dyadic boxes of the optimized stationary-phase bound
    min over N and extreme alpha of lam^-N 2^((N alpha - beta - 1) . j),
    truncated at ceil(log2(lam)/v_i) + margin per axis with the geometric
    N = 0 tails summed in closed form."""
    if lam <= 2:
        raise ValueError("lambda must exceed 2")
    d = poly.dimension
    shifted = tuple(b + 1 for b in beta)
    fl, _ = floor_functional(poly, shifted)
    if fl <= 0:
        raise ValueError("floor(beta+1) = 0; sum undefined")
    if n_max is None:
        n_max = math.ceil(fl) + 1
    if n_max <= fl:
        raise ValueError(
            f"n_max = {n_max} does not exceed floor(beta+1) = {fl}; "
            "the optimization has no decay to work with"
        )
    v = [float(Fraction(bi) / fl) for bi in shifted]
    caps = [math.ceil(math.log2(lam) / vi) + margin for vi in v]
    log_lam = math.log(lam)
    log2 = math.log(2.0)
    extremes = [tuple(alpha) for alpha in poly.extreme_points]
    total = 0.0
    for j in product(*(range(c + 1) for c in caps)):
        best = math.inf
        for N in range(n_max + 1):
            for alpha in extremes:
                e = sum((N * a - s) * ji for a, s, ji in zip(alpha, shifted, j))
                log_term = -N * log_lam + e * log2
                if log_term < best:
                    best = log_term
        total += math.exp(best)
    # Closed-form N = 0 tails outside the truncated box (union bound).
    full = [1.0 / (1.0 - 2.0**-s) for s in shifted]
    for i in range(d):
        tail_i = 2.0 ** (-shifted[i] * (caps[i] + 1)) / (1.0 - 2.0**-shifted[i])
        rest = 1.0
        for l in range(d):
            if l != i:
                rest *= full[l]
        total += tail_i * rest
    return total


def theoretical_bound(poly: NewtonPolyhedron, beta: Sequence[int]) -> tuple[Fraction, int]:
    """(floor(beta+1), d_beta - 1): the predicted decay exponent and log power."""
    shifted = tuple(b + 1 for b in beta)
    fl, _ = floor_functional(poly, shifted)
    if fl <= 0:
        raise ValueError("floor(beta+1) = 0; no decay prediction")
    return fl, codim_of_point(poly, beta) - 1
