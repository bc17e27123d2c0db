"""Shipped example schemes, windows and fixtures.

The quadratic-field schemes use exact rational-pair bases so boundary
membership and injectivity are decidable.  Window offsets are rational and
chosen so that no lattice star lies on a window endpoint (the generated sets
are generic); the offset 1/3 cannot collide with the integer-denominator
star values of the shipped bases.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exactmath import QuadExact
from .pointset import Box, IndexedPointSet
from .scheme import LatticeScheme, make_scheme
from .window import ConvexPolygon, Interval, IntervalUnion

GOLDEN_OFFSET = Fraction(1, 3)


def fibonacci_scheme() -> LatticeScheme:
    """Golden-mean scheme: lattice columns (1, 1) and (tau, tau')."""
    half = Fraction(1, 2)
    tau = (half, half)          # (1+sqrt5)/2
    tau_c = (half, -half)       # (1-sqrt5)/2
    return make_scheme(1, 1, [[1, tau], [1, tau_c]], mode="quadratic", radicand=5)


def fibonacci_window(offset: Fraction = GOLDEN_OFFSET) -> IntervalUnion:
    """Half-open window of length tau, offset to avoid lattice stars on the rim."""
    lo = QuadExact(offset - 1, 0, 5)
    hi = QuadExact(offset - Fraction(1, 2), Fraction(1, 2), 5)  # offset - 1 + tau
    return IntervalUnion([Interval(float(lo), float(hi), False, True, lo, hi)])


def silver_scheme() -> LatticeScheme:
    """Silver-mean scheme: columns (1, 1) and (1+sqrt2, 1-sqrt2)."""
    lam = (1, 1)
    lam_c = (1, -1)
    return make_scheme(1, 1, [[1, lam], [1, lam_c]], mode="quadratic", radicand=2)


def silver_window(offset: Fraction = GOLDEN_OFFSET) -> IntervalUnion:
    lo = QuadExact(offset - 1, 0, 2)
    hi = QuadExact(offset + 1, 0, 2)
    return IntervalUnion([Interval(float(lo), float(hi), False, True, lo, hi)])


def ammann_beenker_scheme() -> LatticeScheme:
    """Eightfold scheme: Z^4 embedded by 8th roots of unity and their cubes."""
    h = Fraction(1, 2)
    r = (0, h)    # sqrt(2)/2
    basis = [
        # physical rows: cos(k pi/4), sin(k pi/4), k = 0..3
        [1, r, 0, (0, -h)],
        [0, r, 1, r],
        # internal rows: cos(3k pi/4), sin(3k pi/4)
        [1, (0, -h), 0, r],
        [0, r, -1, r],
    ]
    return make_scheme(2, 2, basis, mode="quadratic", radicand=2)


def ammann_beenker_window(scale: Fraction = Fraction(1, 2)) -> ConvexPolygon:
    """Regular octagon with vertices on coordinate axes mirrors, in Q(sqrt2)^2."""
    b = QuadExact(scale, 0, 2)
    a = QuadExact(scale, scale, 2)   # (1+sqrt2) * scale
    zero = QuadExact(0, 0, 2)
    exact = [
        (a, b), (b, a), (-b, a), (-a, b),
        (-a, -b), (-b, -a), (b, -a), (a, -b),
    ]
    verts = [(float(x), float(y)) for x, y in exact]
    return ConvexPolygon(verts, boundary_included=True, exact_vertices=exact)


def integer_crystal(d: int = 1) -> LatticeScheme:
    """Degenerate scheme with trivial internal space: the integer lattice Z^d."""
    return make_scheme(d, 0, np.eye(d), mode="float")


def random_fixture(region: Box, density: float, seed: int) -> IndexedPointSet:
    """Seeded uniform point cloud, the non-Meyer control for every diagnostic."""
    rng = np.random.Generator(np.random.PCG64(seed))
    n = int(round(density * region.volume()))
    pts = rng.uniform(region.lo, region.hi, size=(n, region.dim))
    return IndexedPointSet(np.unique(np.round(pts, 12), axis=0), region)


SCHEME_REGISTRY = {
    "fibonacci": lambda: (fibonacci_scheme(), fibonacci_window()),
    "silver": lambda: (silver_scheme(), silver_window()),
    "ammann_beenker": lambda: (ammann_beenker_scheme(), ammann_beenker_window()),
    "crystal_z": lambda: (integer_crystal(1), None),
    "crystal_z2": lambda: (integer_crystal(2), None),
}


def named_scheme(name: str):
    try:
        return SCHEME_REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown scheme name {name!r}; "
                       f"known: {sorted(SCHEME_REGISTRY)}") from None
