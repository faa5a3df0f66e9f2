"""Oscillatory integrals I(lambda) = int exp(i lambda phi) x^beta psi dx,
lambda sweeps, and decay-model fitting.

The integrator is direct tensor-product panel quadrature with fixed-order
Gauss-Legendre panels.  Panel counts scale with the resolved oscillation
(radians per panel capped by a quality-dependent threshold), and every value
carries an error estimate from a half-resolution re-run.  Rows whose estimate
exceeds 10% of the value are flagged and excluded from fits; when the panel
budget cannot cover the requested lambda the call refuses instead of
returning a silently wrong number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .ladder import ExponentLadder
from .phase import CutoffSpec, Phase, cutoff_profile

GL_ORDER = 12
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)

# Radians of phase swing allowed per panel, by quality level.  GL-12 resolves
# ~10 radians per panel at ~1e-8 relative accuracy.
_THETA = {1: 14.0, 2: 10.0, 3: 8.0, 4: 6.0, 5: 4.0}

_CHUNK_TARGET = 1 << 22  # grid points per block in the tensor sweep


class PanelBudgetError(RuntimeError):
    """The requested lambda needs more quadrature points than the budget."""


class SweepFailureError(RuntimeError):
    """Every row of a lambda sweep was flagged unreliable."""


class FitWindowError(ValueError):
    """Too few rows or too narrow a lambda window to fit."""


class CollinearBasisError(ValueError):
    """Expansion basis is numerically collinear on the given window."""


# ---------------------------------------------------------------------------
# Core tensor-product panel integrator.


def _axis_nodes(lo: float, hi: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    pts = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    wts = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return pts, wts


def tensor_oscillatory_integral(
    terms: Sequence[tuple[tuple[int, ...], float]],
    lam: float,
    lo: Sequence[float],
    hi: Sequence[float],
    panels: Sequence[int],
    axis_amplitudes: Sequence[Callable[[np.ndarray], np.ndarray]],
) -> complex:
    """int over the box of exp(i lam P(x)) * prod_i amp_i(x_i) dx.

    P is given as float monomial terms; the amplitude must factor across
    axes (cutoffs and monomial weights do).  Deterministic: fixed panel
    decomposition, fixed chunking, fixed summation order.
    """
    d = len(lo)
    axes = [_axis_nodes(lo[i], hi[i], panels[i]) for i in range(d)]
    weights = [axis_amplitudes[i](axes[i][0]) * axes[i][1] for i in range(d)]
    points = [ax[0] for ax in axes]

    if d == 1:
        x = points[0]
        ph = np.zeros_like(x)
        for a, c in terms:
            ph += c * x ** a[0] if a[0] else c
        return complex(np.sum(np.exp(1j * lam * ph) * weights[0]))

    # Cache the per-axis powers each term needs.
    pow_cache: list[dict[int, np.ndarray]] = []
    for i in range(d):
        needed = {a[i] for a, _ in terms}
        pow_cache.append({e: points[i] ** e for e in needed})

    rest_shape = tuple(len(points[i]) for i in range(1, d))
    rest_size = int(np.prod(rest_shape))
    chunk = max(1, _CHUNK_TARGET // max(rest_size, 1))
    n0 = len(points[0])

    def _shape(i: int) -> tuple[int, ...]:
        s = [1] * d
        s[i] = -1
        return tuple(s)

    rest_weight = np.ones(rest_shape)
    for i in range(1, d):
        rest_weight = rest_weight * weights[i].reshape(_shape(i)[1:])

    total = 0.0 + 0.0j
    for start in range(0, n0, chunk):
        stop = min(start + chunk, n0)
        block = np.zeros((stop - start, *rest_shape))
        for a, c in terms:
            term_val = np.full((stop - start, *rest_shape), c)
            term_val = term_val * pow_cache[0][a[0]][start:stop].reshape(_shape(0))
            for i in range(1, d):
                term_val = term_val * pow_cache[i][a[i]].reshape(_shape(i))
            block += term_val
        osc = np.exp(1j * lam * block)
        osc *= weights[0][start:stop].reshape(_shape(0))
        osc *= rest_weight
        total += osc.sum()
    return complex(total)


# ---------------------------------------------------------------------------
# I(lambda) for a phase with cutoff and monomial weight.


def _gradient_bounds(phase: Phase, radius: float) -> list[float]:
    """Per-axis bound on |d_i phi| over the cutoff box [-a, a]^d."""
    d = phase.dimension
    out = []
    for i in range(d):
        total = 0.0
        for a, c in phase.terms:
            if a[i]:
                total += abs(float(c)) * a[i] * radius ** (sum(a) - 1)
        out.append(total)
    return out


def _panel_counts(
    grad_bounds: Sequence[float],
    widths: Sequence[float],
    lam: float,
    quality: int,
) -> list[int]:
    theta = _THETA[quality]
    floor = 8 * quality
    return [
        max(floor, math.ceil(abs(lam) * g * w / theta))
        for g, w in zip(grad_bounds, widths)
    ]


def _budget_points(panels: Sequence[int]) -> float:
    pts = 1.0
    for n in panels:
        pts *= n * GL_ORDER
    return pts


def evaluate_integral(
    phase: Phase,
    cutoff: CutoffSpec,
    beta: Sequence[int],
    lam: float,
    quality: int = 2,
    max_points: float = 3e8,
) -> tuple[complex, float]:
    """One oscillatory integral with monomial weight x^beta.

    Returns (value, est_error) where est_error is the difference against a
    half-resolution re-run.  Raises PanelBudgetError when the resolved panel
    grid would exceed max_points.
    """
    if not 1 <= quality <= 5:
        raise ValueError("quality must be in [1, 5]")
    d = phase.dimension
    if len(beta) != d:
        raise ValueError("beta has wrong length")
    a = cutoff.radius
    grads = _gradient_bounds(phase, a)
    panels = _panel_counts(grads, [2 * a] * d, lam, quality)
    need = _budget_points(panels) * (1 + 0.5**d)
    if need > max_points:
        raise PanelBudgetError(
            f"lambda={lam:g} needs ~{need:.3g} quadrature points at quality "
            f"{quality}, over the budget {max_points:.3g}"
        )
    terms = [(alpha, float(c)) for alpha, c in phase.terms]

    def amp(i: int) -> Callable[[np.ndarray], np.ndarray]:
        def f(t: np.ndarray) -> np.ndarray:
            vals = cutoff_profile(cutoff, t)
            if beta[i]:
                vals = vals * t ** beta[i]
            return vals

        return f

    amplitudes = [amp(i) for i in range(d)]
    lo, hi = [-a] * d, [a] * d
    value = tensor_oscillatory_integral(terms, lam, lo, hi, panels, amplitudes)
    coarse = tensor_oscillatory_integral(
        terms, lam, lo, hi, [max(1, n // 2) for n in panels], amplitudes
    )
    return value, abs(value - coarse)


def cutoff_mass(cutoff: CutoffSpec, dimension: int, nodes: int = 32769) -> float:
    """prod of the 1-D profile integrals, by fine trapezoid quadrature."""
    a = cutoff.radius
    t = np.linspace(-a, a, nodes)
    one_d = float(np.trapezoid(cutoff_profile(cutoff, t), t))
    return one_d**dimension


# ---------------------------------------------------------------------------
# Sweeps.


@dataclass(frozen=True)
class SweepRow:
    lam: float
    value: complex
    est_error: float
    panels: int
    flagged: bool


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def unflagged(self) -> list[SweepRow]:
        return [r for r in self.rows if not r.flagged]

    def lambdas(self) -> np.ndarray:
        return np.array([r.lam for r in self.rows])


def synthetic_sweep(lambdas: Sequence[float], values: Sequence[complex]) -> SweepResult:
    """Wrap exact model data as a sweep (est_error 0, nothing flagged)."""
    rows = tuple(
        SweepRow(lam=float(l), value=complex(v), est_error=0.0, panels=0, flagged=False)
        for l, v in zip(lambdas, values)
    )
    return SweepResult(rows=rows)


def lambda_sweep(
    phase: Phase,
    cutoff: CutoffSpec,
    beta: Sequence[int],
    lam_min: float,
    lam_max: float,
    points: int,
    quality: int = 2,
    max_points: float = 3e8,
) -> SweepResult:
    """I(lambda) over a geometric grid; unreliable rows are flagged.

    Requires 2 < lam_min < lam_max and points >= 8 (the decay estimates only
    apply beyond lambda = 2).  Raises SweepFailureError if every row flags.
    """
    if not (2 < lam_min < lam_max):
        raise ValueError("need 2 < lam_min < lam_max")
    if points < 8:
        raise ValueError("points must be >= 8")
    lams = np.geomspace(lam_min, lam_max, points)
    rows = []
    for lam in lams:
        value, err = evaluate_integral(
            phase, cutoff, beta, float(lam), quality=quality, max_points=max_points
        )
        flagged = err > 0.1 * abs(value)
        rows.append(
            SweepRow(
                lam=float(lam),
                value=value,
                est_error=err,
                panels=0,
                flagged=bool(flagged),
            )
        )
    result = SweepResult(rows=tuple(rows))
    if not result.unflagged():
        raise SweepFailureError("all sweep rows flagged unreliable")
    return result


# ---------------------------------------------------------------------------
# Decay-model fitting.


@dataclass(frozen=True)
class DecayFit:
    p_hat: float
    q_hat: int
    C_hat: float
    rms_residual: float
    window: tuple[float, float]
    n_points: int

    def to_dict(self) -> dict:
        return {
            "p_hat": self.p_hat,
            "q_hat": self.q_hat,
            "C_hat": self.C_hat,
            "rms_residual": self.rms_residual,
            "window": list(self.window),
            "n_points": self.n_points,
        }


def _fit_rows(sweep: SweepResult, drop_first_decade: bool) -> list[SweepRow]:
    rows = [r for r in sweep.unflagged() if abs(r.value) > 0.0]
    if not rows:
        return rows
    if drop_first_decade:
        lam0 = min(r.lam for r in sweep.rows)
        rows = [r for r in rows if r.lam >= 10.0 * lam0 * (1 - 1e-12)]
    return rows


def decay_fit(sweep: SweepResult, dimension: int, drop_first_decade: bool = True) -> DecayFit:
    """Fit |I| = C lambda^-p log^q lambda, selecting the integer log power.

    q ranges over 0..d-1 (the expansion permits no higher power); for each q
    a least-squares line in log-log space gives (p, C), and the q with the
    smallest RMS residual wins.  The lowest decade of the sweep is dropped by
    default as preasymptotic.
    """
    rows = _fit_rows(sweep, drop_first_decade)
    if len(rows) < 8:
        raise FitWindowError(f"only {len(rows)} usable rows; need at least 8")
    lams = np.array([r.lam for r in rows])
    if lams.max() / lams.min() < 100.0 * (1 - 1e-12):
        raise FitWindowError("lambda window narrower than 2 decades; refusing to fit")
    logl = np.log(lams)
    logy = np.log(np.array([abs(r.value) for r in rows]))
    loglog = np.log(logl)
    design = np.column_stack([np.ones_like(logl), -logl])
    best = None
    for q in range(max(1, dimension)):
        target = logy - q * loglog
        params, _, _, _ = np.linalg.lstsq(design, target, rcond=None)
        resid = design @ params - target
        rms = float(np.sqrt(np.mean(resid**2)))
        if best is None or rms < best[0]:
            best = (rms, q, params)
    rms, q, params = best
    return DecayFit(
        p_hat=float(params[1]),
        q_hat=int(q),
        C_hat=float(np.exp(params[0])),
        rms_residual=rms,
        window=(float(lams.min()), float(lams.max())),
        n_points=len(rows),
    )


@dataclass(frozen=True)
class ExpansionFit:
    terms: tuple[tuple[Fraction, int, complex], ...]  # (p_j, r, coefficient)
    residual_exponent: float
    condition_number: float
    window: tuple[float, float]

    def coefficient(self, p: Fraction, r: int = 0) -> complex:
        for pj, rj, c in self.terms:
            if pj == p and rj == r:
                return c
        raise KeyError((p, r))


def expansion_fit(
    sweep: SweepResult,
    ladder: ExponentLadder,
    n_terms: int,
    drop_first_decade: bool = True,
    cond_limit: float = 1e10,
) -> ExpansionFit:
    """Fit complex I(lambda) against the ladder basis lambda^-p log^(d-1-r).

    Rows are weighted by lambda^(p_next), i.e. measured in units of the first
    ladder term NOT being fitted: this anchors the coefficients at the tail,
    so the residual |I - fit| genuinely decays at the next exponent instead
    of being polluted by window-averaged coefficient error.  The residual is
    then fit with decay_fit; its exponent should not fall below p_next.
    Refuses with the condition number when the basis is collinear on the
    window (exponents too close for the lambda range).
    """
    if len(ladder.terms) < n_terms + 1:
        raise ValueError("ladder must cover at least n_terms + 1 exponents")
    all_lams = sweep.lambdas()
    if all_lams.max() / all_lams.min() < 1000.0 * (1 - 1e-12):
        raise FitWindowError("expansion fit needs a sweep of at least 3 decades")
    rows = [r for r in sweep.unflagged()]
    if drop_first_decade:
        lam0 = min(r.lam for r in sweep.rows)
        rows = [r for r in rows if r.lam >= 10.0 * lam0 * (1 - 1e-12)]
    if len(rows) < 8:
        raise FitWindowError(f"only {len(rows)} usable rows; need at least 8")
    lams = np.array([r.lam for r in rows])
    vals = np.array([r.value for r in rows], dtype=complex)

    basis: list[tuple[Fraction, int]] = []
    for term in ladder.terms[:n_terms]:
        for r in range(term.multiplicity):
            basis.append((term.p, r))
    logl = np.log(lams)
    cols = []
    for p, r in basis:
        d_j = next(t.multiplicity for t in ladder.terms if t.p == p)
        cols.append(lams ** (-float(p)) * logl ** (d_j - 1 - r))
    M = np.column_stack(cols)

    scale = np.abs(vals).max()
    p_next = float(ladder.terms[n_terms].p)
    w = lams**p_next
    w /= w.max()
    Mw = M * w[:, None]
    norms = np.linalg.norm(Mw, axis=0)
    cond = float(np.linalg.cond(Mw / norms))
    if cond > cond_limit:
        raise CollinearBasisError(
            f"basis condition number {cond:.3g} exceeds {cond_limit:.3g} on this window"
        )
    coeffs, _, _, _ = np.linalg.lstsq(Mw.astype(complex), vals * w, rcond=None)

    fit_vals = M @ coeffs
    resid = np.abs(vals - fit_vals)
    if resid.max() <= 1e-12 * max(scale, 1e-300):
        residual_exponent = math.inf
    else:
        resid_sweep = synthetic_sweep(lams, resid.astype(complex))
        dim_for_q = max(t.multiplicity for t in ladder.terms)
        rfit = decay_fit(resid_sweep, dim_for_q, drop_first_decade=False)
        residual_exponent = rfit.p_hat
    return ExpansionFit(
        terms=tuple((p, r, complex(c)) for (p, r), c in zip(basis, coeffs)),
        residual_exponent=residual_exponent,
        condition_number=cond,
        window=(float(lams.min()), float(lams.max())),
    )
