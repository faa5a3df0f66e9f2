"""The ordered exponent set of the asymptotic expansion, with multiplicities.

Every exponent of the expansion of the oscillatory integral is of the form
floor(beta+1) - n for beta in N^d and a bounded n in N, where floor() is the
polyhedron's minimum over facet normals.  The ladder enumerates these values
up to a cap, keeps witnesses (beta, n), and attaches to each value the
multiplicity max over witnesses of min(d, |n(beta+1)|), which bounds the
power of log attached to that exponent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm

from .polytope import (
    FacetNormal,
    NewtonPolyhedron,
    contains_point,
    floor_functional,
)


class UnboundedEnumerationError(ValueError):
    """Non-convenient polyhedron without an explicit beta bound."""


@dataclass(frozen=True)
class ExponentTerm:
    p: Fraction
    multiplicity: int
    witnesses: tuple[tuple[tuple[int, ...], int], ...]


@dataclass(frozen=True)
class ExponentLadder:
    terms: tuple[ExponentTerm, ...]
    p_max: Fraction
    n_max: int
    beta_bound: tuple[int, ...]
    decomposition_filter: bool

    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(t.p for t in self.terms)

    def to_report(self) -> list[dict]:
        return [
            {
                "p": str(t.p),
                "d": t.multiplicity,
                "witnesses": [{"beta": list(b), "n": n} for b, n in t.witnesses],
            }
            for t in self.terms
        ]


def _lattice_points(poly: NewtonPolyhedron, beta: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Integer points of the polyhedron componentwise <= beta."""
    ranges = [range(b + 1) for b in beta]
    return [pt for pt in product(*ranges) if contains_point(poly, pt)]


def _decomposes(poly: NewtonPolyhedron, beta: tuple[int, ...], n: int) -> bool:
    """Can beta be written as a sum of n lattice points of the polyhedron?

    Dynamic programming over partial sums, pruned componentwise by beta.
    """
    if n == 0:
        return all(b == 0 for b in beta)
    parts = _lattice_points(poly, beta)
    if not parts:
        return False
    reachable: set[tuple[int, ...]] = {(0,) * len(beta)}
    for _ in range(n):
        nxt: set[tuple[int, ...]] = set()
        for base in reachable:
            for part in parts:
                cand = tuple(b + q for b, q in zip(base, part))
                if all(c <= bb for c, bb in zip(cand, beta)):
                    nxt.add(cand)
        reachable = nxt
        if not reachable:
            return False
    return beta in reachable


def exponent_ladder(
    poly: NewtonPolyhedron,
    p_max: Fraction | int | str,
    n_max: int | None = None,
    decomposition_filter: bool = True,
    beta_bound: int | None = None,
) -> ExponentLadder:
    """Enumerate ladder values floor(beta+1) - n in [1/t, p_max].

    For a convenient polyhedron all facet normals have positive components,
    which bounds the beta enumeration componentwise; otherwise the caller
    must supply beta_bound (the ladder is then complete only up to it).
    n_max defaults to d + 1; the optional decomposition filter keeps a
    witness (beta, n >= 1) only when beta splits into n lattice points of
    the polyhedron.
    """
    d = poly.dimension
    p_max = Fraction(p_max)
    if n_max is None:
        n_max = d + 1
    ones = (1,) * d
    floor_one, _ = floor_functional(poly, ones)
    if floor_one == 0:
        raise ValueError("floor(1,...,1) = 0; ladder undefined")
    p0 = floor_one  # = 1/t
    if p_max < p0:
        raise ValueError(f"p_max {p_max} is below the leading exponent {p0}")

    cap = p_max + n_max
    if beta_bound is not None:
        bounds = tuple(int(beta_bound) for _ in range(d))
    elif poly.convenient:
        bounds = []
        for i in range(d):
            m = min(fn.w[i] for fn in poly.facet_normals)
            bounds.append(int(cap / m))  # (beta_i + 1) * m <= cap
        bounds = tuple(bounds)
    else:
        raise UnboundedEnumerationError(
            "polyhedron is not convenient; supply beta_bound to bound the enumeration"
        )

    found: dict[Fraction, dict[tuple[int, ...], int]] = {}
    for beta in product(*(range(b + 1) for b in bounds)):
        shifted = tuple(b + 1 for b in beta)
        fl, _ = floor_functional(poly, shifted)
        if fl > cap:
            continue
        for n in range(n_max + 1):
            p = fl - n
            if p < p0 or p > p_max:
                continue
            if decomposition_filter and n >= 1 and not _decomposes(poly, beta, n):
                continue
            # (p, beta) fixes n = floor(beta+1) - p, so no collisions here.
            found.setdefault(p, {})[beta] = n

    terms = []
    for p in sorted(found):
        witnesses = tuple(sorted(found[p].items()))
        mult = max(
            min(d, len(floor_functional(poly, tuple(b + 1 for b in beta))[1]))
            for beta, _ in witnesses
        )
        terms.append(ExponentTerm(p=p, multiplicity=mult, witnesses=witnesses))
    return ExponentLadder(
        terms=tuple(terms),
        p_max=p_max,
        n_max=n_max,
        beta_bound=bounds,
        decomposition_filter=decomposition_filter,
    )


def arithmetic_progressions(poly: NewtonPolyhedron) -> dict[FacetNormal, int]:
    """For each facet normal w with components r_j/q_j in lowest terms, the
    lcm of the q_j; ladder values fall in progressions of step 1/q_w."""
    out = {}
    for fn in poly.facet_normals:
        out[fn] = lcm(*(c.denominator for c in fn.w))
    return out


def leading_term(poly: NewtonPolyhedron) -> tuple[Fraction, int]:
    """(1/t, min(d, |n(1)|)): the first expansion exponent and its multiplicity."""
    ones = (1,) * poly.dimension
    fl, argmin = floor_functional(poly, ones)
    if fl == 0:
        raise ValueError("floor(1,...,1) = 0; leading term undefined")
    return fl, min(poly.dimension, len(argmin))
