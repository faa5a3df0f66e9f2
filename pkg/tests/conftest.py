"""Shared fixtures: the standard test phases and random-support generators."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from oscdecay import Phase, build_polyhedron, make_phase


@pytest.fixture(scope="session")
def phase_x2() -> Phase:
    return make_phase(1, [((2,), 1)])


@pytest.fixture(scope="session")
def phase_circle() -> Phase:
    return make_phase(2, [((2, 0), 1), ((0, 2), 1)])


@pytest.fixture(scope="session")
def phase_diag_square() -> Phase:
    # (x - y)^2, the standard degenerate example
    return make_phase(2, [((2, 0), 1), ((1, 1), -2), ((0, 2), 1)])


@pytest.fixture(scope="session")
def phase_corner() -> Phase:
    # x^2 y^2 + x y^3 - x^4 y^5: leading vertex on two facets
    return make_phase(2, [((2, 2), 1), ((1, 3), 1), ((4, 5), -1)])


@pytest.fixture(scope="session")
def phase_axes() -> Phase:
    # x^5 + y^4 + x^4 y: single facet touching both axes
    return make_phase(2, [((5, 0), 1), ((0, 4), 1), ((4, 1), 1)])


@pytest.fixture(scope="session")
def phase_mixed() -> Phase:
    return make_phase(2, [((2, 2), 1), ((5, 0), 1), ((0, 5), 1)])


def random_support(rng: random.Random, d: int, max_points: int = 8, max_exp: int = 9):
    """A random Taylor support: <= max_points multidegrees with |alpha| >= 2."""
    n = rng.randint(1, max_points)
    pts = set()
    attempts = 0
    while len(pts) < n and attempts < 200:
        attempts += 1
        alpha = tuple(rng.randint(0, max_exp) for _ in range(d))
        if sum(alpha) >= 2:
            pts.add(alpha)
    if not pts:
        pts = {tuple(2 if i == 0 else 0 for i in range(d))}
    return sorted(pts)


def random_phase(rng: random.Random, d: int, **kw) -> Phase:
    support = random_support(rng, d, **kw)
    terms = [(a, Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))) for a in support]
    return make_phase(d, terms)


def random_polyhedron(rng: random.Random, d: int, **kw):
    return build_polyhedron(random_phase(rng, d, **kw))
