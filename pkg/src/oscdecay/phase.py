"""Polynomial phases with exact rational coefficients, plus cutoff amplitudes.

The phase is the object everything else derives from: a multivariate
polynomial sum(c_a * x^a) stored as an exact monomial list.  Coefficients stay
rational so that the polytope layer can work exactly; numerical evaluation
converts to double precision at the call site.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Multidegree = tuple[int, ...]


class PhaseFormatError(ValueError):
    """A phase or cutoff document violates the input schema."""


def parse_rational(value, where: str = "coefficient") -> Fraction:
    """Parse an exact rational from an int or a 'p/q' string."""
    if isinstance(value, bool):
        raise PhaseFormatError(f"{where}: malformed rational {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise PhaseFormatError(f"{where}: malformed rational {value!r}") from exc
    raise PhaseFormatError(
        f"{where}: malformed rational {value!r} (use an integer or a 'p/q' string)"
    )


@dataclass(frozen=True)
class Phase:
    """A polynomial with exact rational coefficients and no terms of degree <= 1.

    Terms are sorted lexicographically by multidegree, duplicates merged and
    zero coefficients dropped, so equal polynomials compare equal.  Rejecting
    constant and linear terms enforces phi(0) = 0 and grad phi(0) = 0.
    """

    dimension: int
    terms: tuple[tuple[Multidegree, Fraction], ...]

    @property
    def support(self) -> tuple[Multidegree, ...]:
        return tuple(a for a, _ in self.terms)

    def max_degree(self) -> int:
        return max(sum(a) for a in self.support)

    def coefficient(self, alpha: Multidegree) -> Fraction:
        for a, c in self.terms:
            if a == tuple(alpha):
                return c
        return Fraction(0)

    def evaluate(self, x: Sequence[float]) -> float:
        """Evaluate at a point, accumulating with compensated summation."""
        if len(x) != self.dimension:
            raise ValueError(f"point has length {len(x)}, expected {self.dimension}")
        vals = []
        for a, c in self.terms:
            m = float(c)
            for xi, e in zip(x, a):
                if e:
                    m *= xi**e
            vals.append(m)
        return math.fsum(vals)

    def scaled_gradient(self, x: Sequence[float]) -> tuple[float, ...]:
        """Return the vector (x_1 d_1 phi, ..., x_d d_d phi) at x.

        Differentiation is symbolic on the term list: x_j d_j (c x^a) is
        a_j c x^a, so each monomial value is shared across components.
        """
        if len(x) != self.dimension:
            raise ValueError(f"point has length {len(x)}, expected {self.dimension}")
        comps: list[list[float]] = [[] for _ in range(self.dimension)]
        for a, c in self.terms:
            m = float(c)
            for xi, e in zip(x, a):
                if e:
                    m *= xi**e
            for j, e in enumerate(a):
                if e:
                    comps[j].append(e * m)
        return tuple(math.fsum(col) for col in comps)


def make_phase(dimension: int, terms: Iterable[tuple[Sequence[int], Fraction | int | str]]) -> Phase:
    """Build a normalized Phase, merging duplicate multidegrees.

    Raises PhaseFormatError on constant/linear terms, bad exponents, dimension
    mismatches, or an empty term list after normalization.
    """
    if not isinstance(dimension, int) or dimension < 1:
        raise PhaseFormatError(f"dimension: must be a positive integer, got {dimension!r}")
    merged: dict[Multidegree, Fraction] = {}
    for idx, (alpha, coeff) in enumerate(terms):
        alpha = tuple(alpha)
        where = f"terms[{idx}]"
        if len(alpha) != dimension:
            raise PhaseFormatError(
                f"{where}.exponents: length {len(alpha)} does not match dimension {dimension}"
            )
        if any((not isinstance(e, int)) or e < 0 for e in alpha):
            raise PhaseFormatError(f"{where}.exponents: entries must be nonnegative integers")
        c = coeff if isinstance(coeff, Fraction) else parse_rational(coeff, f"{where}.coefficient")
        merged[alpha] = merged.get(alpha, Fraction(0)) + c
    cleaned = {a: c for a, c in merged.items() if c != 0}
    for a in cleaned:
        if sum(a) == 0:
            raise PhaseFormatError("constant term forbidden (phase must vanish at the origin)")
        if sum(a) == 1:
            raise PhaseFormatError("linear term forbidden (gradient must vanish at the origin)")
    if not cleaned:
        raise PhaseFormatError("terms: empty after merging duplicates and dropping zeros")
    ordered = tuple(sorted(cleaned.items(), key=lambda t: t[0]))
    return Phase(dimension=dimension, terms=ordered)


def parse_phase(document: str | dict) -> Phase:
    """Parse a phase from its JSON document (a string or a decoded dict)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise PhaseFormatError(f"document is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise PhaseFormatError("document must be a JSON object")
    if "dimension" not in document:
        raise PhaseFormatError("dimension: missing")
    if "terms" not in document or not isinstance(document["terms"], list):
        raise PhaseFormatError("terms: missing or not a list")
    dim = document["dimension"]
    if not isinstance(dim, int):
        raise PhaseFormatError(f"dimension: must be an integer, got {dim!r}")
    raw = []
    for idx, item in enumerate(document["terms"]):
        if not isinstance(item, dict) or "exponents" not in item or "coefficient" not in item:
            raise PhaseFormatError(f"terms[{idx}]: need 'exponents' and 'coefficient'")
        raw.append((item["exponents"], item["coefficient"]))
    return make_phase(dim, raw)


def phase_to_dict(phase: Phase) -> dict:
    """Serialize to the canonical input schema; parse_phase round-trips it."""
    return {
        "dimension": phase.dimension,
        "terms": [
            {"exponents": list(a), "coefficient": str(c)} for a, c in phase.terms
        ],
    }


def phase_to_json(phase: Phase) -> str:
    return json.dumps(phase_to_dict(phase), sort_keys=True)


# ---------------------------------------------------------------------------
# Vectorized evaluation used by the samplers and the quadrature engine.


def evaluate_many(phase: Phase, pts: np.ndarray) -> np.ndarray:
    """Evaluate the phase at an (m, d) array of points."""
    pts = np.asarray(pts, dtype=float)
    out = np.zeros(pts.shape[0])
    for a, c in phase.terms:
        mono = np.full(pts.shape[0], float(c))
        for i, e in enumerate(a):
            if e:
                mono *= pts[:, i] ** e
        out += mono
    return out


def scaled_gradient_many(phase: Phase, pts: np.ndarray) -> np.ndarray:
    """Evaluate (x_j d_j phi)_j at an (m, d) array of points, returning (m, d)."""
    pts = np.asarray(pts, dtype=float)
    out = np.zeros_like(pts)
    for a, c in phase.terms:
        mono = np.full(pts.shape[0], float(c))
        for i, e in enumerate(a):
            if e:
                mono *= pts[:, i] ** e
        for j, e in enumerate(a):
            if e:
                out[:, j] += e * mono
    return out


# ---------------------------------------------------------------------------
# Cutoff amplitudes.


@dataclass(frozen=True)
class CutoffSpec:
    """A compactly supported amplitude: product of identical 1-D profiles.

    kind 'bump' is the smooth profile exp(-1/(1-(t/a)^2)) on |t| < a; kind
    'smoothstep' is the polynomial profile (1-(t/a)^2)^order, which is only
    C^(order-1) at the support boundary and emulates finitely-smooth
    amplitudes.
    """

    radius: float
    kind: str = "bump"
    order: int | None = None

    def __post_init__(self):
        if not (self.radius > 0):
            raise PhaseFormatError(f"cutoff.radius: must be positive, got {self.radius!r}")
        if self.kind not in ("bump", "smoothstep"):
            raise PhaseFormatError(f"cutoff.kind: unknown kind {self.kind!r}")
        if self.kind == "smoothstep":
            if not isinstance(self.order, int) or self.order < 2:
                raise PhaseFormatError("cutoff.kind.smoothstep: order must be an integer >= 2")
        elif self.order is not None:
            raise PhaseFormatError("cutoff.order: only meaningful for smoothstep")


def parse_cutoff(document: dict) -> CutoffSpec:
    if not isinstance(document, dict) or "radius" not in document or "kind" not in document:
        raise PhaseFormatError("cutoff: need 'radius' and 'kind'")
    radius = document["radius"]
    if not isinstance(radius, (int, float)) or isinstance(radius, bool):
        raise PhaseFormatError(f"cutoff.radius: must be a number, got {radius!r}")
    kind = document["kind"]
    if kind == "bump":
        return CutoffSpec(radius=float(radius), kind="bump")
    if isinstance(kind, dict) and set(kind) == {"smoothstep"}:
        return CutoffSpec(radius=float(radius), kind="smoothstep", order=kind["smoothstep"])
    raise PhaseFormatError(f"cutoff.kind: expected 'bump' or {{'smoothstep': m}}, got {kind!r}")


def cutoff_to_dict(spec: CutoffSpec) -> dict:
    kind = "bump" if spec.kind == "bump" else {"smoothstep": spec.order}
    return {"radius": spec.radius, "kind": kind}


def cutoff_profile(spec: CutoffSpec, t: np.ndarray) -> np.ndarray:
    """Evaluate the 1-D cutoff profile on an array of coordinates."""
    t = np.asarray(t, dtype=float)
    u = t / spec.radius
    inside = np.abs(u) < 1.0
    out = np.zeros_like(u)
    if spec.kind == "bump":
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            vals = np.exp(-1.0 / (1.0 - u**2))
        out[inside] = vals[inside]
    else:
        out[inside] = (1.0 - u[inside] ** 2) ** spec.order
    return out


def cutoff_value(spec: CutoffSpec, x: Sequence[float]) -> float:
    """The product cutoff at one point."""
    return float(np.prod(cutoff_profile(spec, np.asarray(x, dtype=float))))
