"""Cut-and-project schemes over Euclidean physical and internal spaces.

A scheme is a full-rank lattice in R^(d+m) whose first d coordinates project
injectively (physical space) and whose last m coordinates are treated as
internal space.  Points of a model set are enumerated exactly as integer
lattice indices; physical and star coordinates are derived columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InjectivityViolation,
    NotInL,
    RegionTooLarge,
    SingularBasis,
)
from .exactmath import QuadExact, as_quad, exact_det, rational_kernel_vector
from .pointset import Box, IndexedPointSet

DEFAULT_FLOAT_TOL = 1e-9
ENUM_BUDGET = 100_000_000
BOUNDARY_BAND = 1e-6  # float prefilter margin before exact boundary resolution


@dataclass(frozen=True)
class LatticeScheme:
    """Lattice data for one cut-and-project scheme."""

    d: int
    m: int
    basis: np.ndarray              # (d+m, d+m), columns generate the lattice
    basis_inverse: np.ndarray
    covolume: float
    mode: str                      # "float" | "quadratic"
    tol: float = DEFAULT_FLOAT_TOL
    radicand: int | None = None
    basis_exact: tuple | None = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return self.d + self.m

    @property
    def lattice_density(self) -> float:
        return 1.0 / self.covolume

    @property
    def is_exact(self) -> bool:
        return self.mode == "quadratic"

    # -- coordinate maps ------------------------------------------------------
    def lift(self, indices) -> np.ndarray:
        idx = np.atleast_2d(np.asarray(indices, dtype=np.float64))
        return idx @ self.basis.T

    def physical_of(self, indices) -> np.ndarray:
        return self.lift(indices)[:, :self.d]

    def star_of(self, indices) -> np.ndarray:
        return self.lift(indices)[:, self.d:]

    def lift_exact(self, index):
        if not self.is_exact:
            raise ValueError("exact coordinates require quadratic mode")
        out = []
        for row in self.basis_exact:
            acc = QuadExact(0, 0, self.radicand)
            for entry, n in zip(row, index):
                acc = acc + entry * int(n)
            out.append(acc)
        return tuple(out)

    def star_exact(self, index):
        return self.lift_exact(index)[self.d:]

    def physical_exact(self, index):
        return self.lift_exact(index)[:self.d]

    def point(self, index) -> "LatticePoint":
        index = tuple(int(v) for v in index)
        row = self.lift([index])[0]
        return LatticePoint(index, row[:self.d].copy(), row[self.d:].copy())

    def to_json(self):
        out = {"d": self.d, "m": self.m}
        if self.is_exact:
            out["basis"] = [[[str(e.a), str(e.b)] for e in row] for row in self.basis_exact]
            out["arithmetic"] = {"mode": "quadratic", "D": self.radicand}
        else:
            out["basis"] = self.basis.tolist()
            out["arithmetic"] = {"mode": "float", "tol": self.tol}
        return out


@dataclass(frozen=True)
class LatticePoint:
    """One lattice point; equality is equality of integer indices."""

    index: tuple
    physical: np.ndarray
    star: np.ndarray

    def __eq__(self, other):
        return isinstance(other, LatticePoint) and self.index == other.index

    def __hash__(self):
        return hash(self.index)


def make_scheme(d, m, basis, mode="float", tol=DEFAULT_FLOAT_TOL, radicand=None) -> LatticeScheme:
    """Build and sanity-check a scheme.

    In quadratic mode every basis entry must be rational-pair data
    ``(a, b)`` (meaning a + b*sqrt(radicand)), a Fraction, an int or a
    QuadExact.  Raises SingularBasis when the columns do not span.
    """
    d, m = int(d), int(m)
    k = d + m
    if d < 1 or m < 0 or d > 3 or m > 3:
        raise ValueError("supported dimensions: 1 <= d <= 3, 0 <= m <= 3")
    if mode == "quadratic":
        if radicand is None:
            raise ValueError("quadratic mode requires a radicand D")
        exact = tuple(
            tuple(as_quad(entry, radicand) for entry in row) for row in basis
        )
        if len(exact) != k or any(len(row) != k for row in exact):
            raise ValueError(f"basis must be {k}x{k}")
        det = exact_det(exact)
        if det.is_zero():
            raise SingularBasis("exact determinant is zero")
        fbasis = np.array([[float(e) for e in row] for row in exact])
        covolume = abs(float(det))
        return LatticeScheme(d, m, fbasis, np.linalg.inv(fbasis), covolume,
                             "quadratic", tol, int(radicand), exact)
    fbasis = np.asarray(basis, dtype=np.float64)
    if fbasis.shape != (k, k):
        raise ValueError(f"basis must be {k}x{k}")
    det = float(np.linalg.det(fbasis))
    if abs(det) < 1e-12:
        raise SingularBasis(f"determinant {det:g} below tolerance")
    return LatticeScheme(d, m, fbasis, np.linalg.inv(fbasis), abs(det),
                         "float", tol, None, None)


@dataclass
class ValidationReport:
    covolume: float
    lattice_density: float
    injectivity: str                 # "exact" or "scanned"
    injectivity_radius: int | None
    denseness: list                  # [(sample size, min star gap)]
    warnings: list


def validate_scheme(scheme: LatticeScheme, scan_radius: int = 8,
                    denseness_samples=(100, 1000, 10000)) -> ValidationReport:
    """Check scheme invariants; raises on violations, else returns diagnostics.

    Physical-projection injectivity is decided exactly in quadratic mode by a
    rational rank computation.  In float mode all integer vectors with sup
    norm <= scan_radius are scanned and larger indices are advisory only.
    Denseness of the internal projection has no finite certificate; the
    report gives the shrinking minimum gap of star-image samples instead.
    """
    warnings = []
    if scheme.is_exact:
        rows = []
        for i in range(scheme.d):
            rows.append([scheme.basis_exact[i][j].a for j in range(scheme.k)])
        for i in range(scheme.d):
            rows.append([scheme.basis_exact[i][j].b for j in range(scheme.k)])
        kernel = rational_kernel_vector(rows)
        if kernel is not None:
            raise InjectivityViolation(kernel)
        injectivity, radius = "exact", None
    else:
        witness = _scan_injectivity(scheme, scan_radius)
        if witness is not None:
            raise InjectivityViolation(witness)
        injectivity, radius = "scanned", scan_radius
        warnings.append(
            f"injectivity scanned only for |n|_inf <= {scan_radius} (float mode)")
    denseness = _denseness_diagnostic(scheme, denseness_samples) if scheme.m else []
    if scheme.m and len(denseness) >= 2 and not denseness[-1][1] < denseness[0][1]:
        warnings.append("star-image gaps are not shrinking; "
                        "internal projection may not be dense")
    return ValidationReport(scheme.covolume, scheme.lattice_density,
                            injectivity, radius, denseness, warnings)


def _scan_injectivity(scheme: LatticeScheme, radius: int):
    rng = np.arange(-radius, radius + 1)
    phys_rows = scheme.basis[:scheme.d]
    for chunk in _index_chunks([rng] * scheme.k, 500_000):
        phys = chunk @ phys_rows.T
        small = np.all(np.abs(phys) <= scheme.tol, axis=1)
        nonzero = np.any(chunk != 0, axis=1)
        bad = np.flatnonzero(small & nonzero)
        if len(bad):
            return chunk[bad[0]]
    return None


def _denseness_diagnostic(scheme: LatticeScheme, sample_sizes):
    out = []
    for size in sample_sizes:
        radius = max(1, int(round((size ** (1.0 / scheme.k)) / 2)))
        rng = np.arange(-radius, radius + 1)
        grid = np.stack(np.meshgrid(*[rng] * scheme.k, indexing="ij"),
                        axis=-1).reshape(-1, scheme.k)
        stars = scheme.star_of(grid)
        if scheme.m == 1:
            vals = np.sort(stars[:, 0])
            gap = float(np.diff(vals).min()) if len(vals) > 1 else float("inf")
        else:
            gap = _min_nn_distance(stars)
        out.append((len(grid), gap))
    return out


def _min_nn_distance(points: np.ndarray) -> float:
    order = np.lexsort(points.T[::-1])
    pts = points[order]
    x = pts[:, 0]
    best = np.inf
    for i in range(len(pts)):
        hi = np.searchsorted(x, x[i] + best, side="right")
        for j in range(i + 1, hi):
            dist = float(np.linalg.norm(pts[j] - pts[i]))
            if dist < best and dist > 0:
                best = dist
                hi = np.searchsorted(x, x[i] + best, side="right")
    return best


def _index_chunks(ranges, chunk_cells):
    """Yield (n, k) integer index blocks covering the product of ranges."""
    sizes = [len(r) for r in ranges]
    total = 1
    for s in sizes:
        total *= s
    first = ranges[0]
    rest = ranges[1:]
    cells_per_row = total // sizes[0] if sizes[0] else 0
    rows_per_chunk = max(1, int(chunk_cells // max(cells_per_row, 1)))
    if rest:
        tail = np.stack(np.meshgrid(*rest, indexing="ij"), axis=-1).reshape(-1, len(rest))
    else:
        tail = np.zeros((1, 0), dtype=np.int64)
    for start in range(0, sizes[0], rows_per_chunk):
        head = np.asarray(first[start:start + rows_per_chunk], dtype=np.int64)
        block = np.empty((len(head) * len(tail), len(sizes)), dtype=np.int64)
        block[:, 0] = np.repeat(head, len(tail))
        block[:, 1:] = np.tile(tail, (len(head), 1))
        yield block


def model_density(scheme: LatticeScheme, window) -> float:
    """Density of the model set: window measure divided by lattice covolume."""
    measure = 1.0 if scheme.m == 0 else window.measure()
    return measure / scheme.covolume


def enumerate_cut(scheme: LatticeScheme, window, region: Box,
                  budget: int = ENUM_BUDGET) -> IndexedPointSet:
    """All lattice points with physical part in ``region`` and star in the window.

    Enumeration maps the region x window bounding box through the inverse
    basis, scans the resulting integer box exhaustively, and filters.  In
    quadratic mode, star images within a float band of the window boundary
    are resolved by exact arithmetic, so endpoint policy is decided exactly.
    """
    if scheme.m and window is None:
        raise ValueError("scheme with internal space needs a window")
    if region.dim != scheme.d:
        raise ValueError("region dimension must equal physical dimension")
    if scheme.m:
        wlo, whi = window.bbox()
        lo = np.concatenate([region.lo, wlo - BOUNDARY_BAND])
        hi = np.concatenate([region.hi, whi + BOUNDARY_BAND])
    else:
        lo, hi = region.lo, region.hi
    target = Box(lo, hi)
    corners_idx = target.corners() @ scheme.basis_inverse.T
    nlo = np.floor(corners_idx.min(axis=0)).astype(np.int64) - 1
    nhi = np.ceil(corners_idx.max(axis=0)).astype(np.int64) + 1
    sizes = (nhi - nlo + 1).astype(np.float64)
    if float(np.prod(sizes)) > budget:
        raise RegionTooLarge(
            f"candidate index box {sizes.astype(np.int64).tolist()} exceeds budget {budget}")
    ranges = [np.arange(nlo[i], nhi[i] + 1) for i in range(scheme.k)]
    idx_parts, phys_parts, star_parts = [], [], []
    for chunk in _index_chunks(ranges, 2_000_000):
        lifted = chunk @ scheme.basis.T
        phys = lifted[:, :scheme.d]
        mask = np.all((phys >= region.lo - scheme.tol)
                      & (phys <= region.hi + scheme.tol), axis=1)
        if scheme.m:
            star = lifted[:, scheme.d:]
            accept = _window_accept(scheme, window, chunk, star, mask)
            mask &= accept
        sel = np.flatnonzero(mask)
        if len(sel):
            idx_parts.append(chunk[sel])
            phys_parts.append(phys[sel])
            star_parts.append(lifted[sel, scheme.d:])
    if not idx_parts:
        empty = np.zeros((0, scheme.d))
        return IndexedPointSet(empty, region, np.zeros((0, scheme.k), dtype=np.int64),
                               np.zeros((0, scheme.m)), scheme)
    return IndexedPointSet(np.concatenate(phys_parts), region,
                           np.concatenate(idx_parts),
                           np.concatenate(star_parts), scheme)


def _window_accept(scheme, window, chunk, star, pre_mask) -> np.ndarray:
    """Vectorized window membership with exact resolution near the boundary."""
    accept = np.zeros(len(star), dtype=bool)
    near = np.zeros(len(star), dtype=bool)
    if window.dim == 1:
        s = star[:, 0]
        for c in window.components:
            accept |= (s > c.lo + BOUNDARY_BAND) & (s < c.hi - BOUNDARY_BAND)
            near |= (np.abs(s - c.lo) <= BOUNDARY_BAND) | (np.abs(s - c.hi) <= BOUNDARY_BAND)
    else:
        verts = window.vertices
        n = len(verts)
        min_signed = np.full(len(star), np.inf)
        for i in range(n):
            a, b = verts[i], verts[(i + 1) % n]
            e = b - a
            elen = np.hypot(*e)
            signed = (e[0] * (star[:, 1] - a[1]) - e[1] * (star[:, 0] - a[0])) / elen
            min_signed = np.minimum(min_signed, signed)
        accept = min_signed > BOUNDARY_BAND
        near = np.abs(min_signed) <= BOUNDARY_BAND
    undecided = np.flatnonzero(near & pre_mask & ~accept)
    for i in undecided:
        if scheme.is_exact:
            h = scheme.star_exact(chunk[i])
            accept[i] = window.accepts(h[0] if window.dim == 1 else h)
        else:
            accept[i] = window.accepts(star[i, 0] if window.dim == 1 else star[i])
    return accept


@dataclass
class DualCandidates:
    """Physical projections of dual-lattice vectors, the Bragg/eigenvalue candidates."""

    k: np.ndarray              # (N, d) physical components, sorted by norm
    k_internal: np.ndarray     # (N, m)
    z: np.ndarray              # (N, d+m) integer dual indices


def dual_candidates(scheme: LatticeScheme, k_max: float,
                    k_internal_max: float | None = None) -> DualCandidates:
    """Dual-lattice vectors with |k| <= k_max and bounded internal norm.

    The dual basis is the inverse-transpose of the scheme basis (rows of the
    inverse).  The physical projections of dual vectors are dense for m > 0,
    so a finite candidate list requires an internal cutoff as well; it
    defaults to the physical one.
    """
    if k_internal_max is None:
        k_internal_max = k_max
    lo = np.concatenate([np.full(scheme.d, -k_max), np.full(scheme.m, -k_internal_max)])
    dual_box = Box(lo - 1e-9, -lo + 1e-9)
    corners = dual_box.corners() @ scheme.basis  # z = B^T y
    zlo = np.floor(corners.min(axis=0)).astype(np.int64) - 1
    zhi = np.ceil(corners.max(axis=0)).astype(np.int64) + 1
    ranges = [np.arange(zlo[i], zhi[i] + 1) for i in range(scheme.k)]
    zs, ks, kints = [], [], []
    for chunk in _index_chunks(ranges, 2_000_000):
        y = chunk @ scheme.basis_inverse
        k = y[:, :scheme.d]
        kint = y[:, scheme.d:]
        ok = np.einsum("ij,ij->i", k, k) <= k_max ** 2 + 1e-12
        if scheme.m:
            ok &= np.einsum("ij,ij->i", kint, kint) <= k_internal_max ** 2 + 1e-12
        sel = np.flatnonzero(ok)
        if len(sel):
            zs.append(chunk[sel]); ks.append(k[sel]); kints.append(kint[sel])
    z = np.concatenate(zs) if zs else np.zeros((0, scheme.k), dtype=np.int64)
    k = np.concatenate(ks) if ks else np.zeros((0, scheme.d))
    kint = np.concatenate(kints) if kints else np.zeros((0, scheme.m))
    norms = np.linalg.norm(k, axis=1)
    order = np.lexsort(np.vstack([k.T[::-1], norms]))
    return DualCandidates(k[order], kint[order], z[order])


def resolve_index(scheme: LatticeScheme, t, star_lo=None, star_hi=None):
    """Lattice index whose physical part equals t, or raise NotInL.

    The search is confined to star values in [star_lo, star_hi] (defaults to
    a generous multiple of the covolume scale), which covers every
    translation arising from differences of model-set points.
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if scheme.m == 0:
        idx = scheme.basis_inverse @ t
        rounded = np.round(idx).astype(np.int64)
        if np.max(np.abs(scheme.physical_of([rounded])[0] - t)) <= 1e-7:
            return rounded
        raise NotInL(f"{t} is not a lattice projection")
    if star_lo is None or star_hi is None:
        half = 4.0 * scheme.covolume
        star_lo = np.full(scheme.m, -half)
        star_hi = np.full(scheme.m, half)
    lo = np.concatenate([t - 1e-7, np.asarray(star_lo, dtype=np.float64)])
    hi = np.concatenate([t + 1e-7, np.asarray(star_hi, dtype=np.float64)])
    corners = Box(lo, hi).corners() @ scheme.basis_inverse.T
    nlo = np.floor(corners.min(axis=0)).astype(np.int64) - 1
    nhi = np.ceil(corners.max(axis=0)).astype(np.int64) + 1
    ranges = [np.arange(nlo[i], nhi[i] + 1) for i in range(scheme.k)]
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, scheme.k)
    phys = scheme.physical_of(grid)
    hits = np.flatnonzero(np.all(np.abs(phys - t) <= 1e-7, axis=1))
    if len(hits) == 0:
        raise NotInL(f"{t} is not a lattice projection within the star search range")
    return grid[hits[0]]
