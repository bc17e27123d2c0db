"""Finite patches of point sets and their local-order diagnostics.

A patch is stored with the axis-aligned box on which it is exhaustive, so
every statistic can restrict its anchors to a core that avoids edge
artifacts.  Scheme-backed patches additionally carry exact integer lattice
indices, which makes translation matching an integer comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import (
    DuplicatePoint,
    RegionTooSmall,
    UndefinedStatistic,
)

MATCH_TOL = 1e-7  # absolute coordinate matching window (coarser than float error)
QUANT = 1e-7     # quantization grid for cluster canonicalization


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lo_1, hi_1] x ... x [lo_d, hi_d]."""

    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def make(cls, lo, hi) -> "Box":
        lo = np.atleast_1d(np.asarray(lo, dtype=np.float64))
        hi = np.atleast_1d(np.asarray(hi, dtype=np.float64))
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise ValueError(f"invalid box lo={lo}, hi={hi}")
        return cls(lo, hi)

    @classmethod
    def centered(cls, half_width, dim=1) -> "Box":
        h = float(half_width)
        return cls.make([-h] * dim, [h] * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def span(self) -> np.ndarray:
        return self.hi - self.lo

    def shrink(self, r) -> "Box":
        lo = self.lo + r
        hi = self.hi - r
        if np.any(hi <= lo):
            raise RegionTooSmall(f"box {self} cannot shrink by {r}")
        return Box(lo, hi)

    def contains(self, points, tol=0.0):
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.all((pts >= self.lo - tol) & (pts <= self.hi + tol), axis=1)

    def covers(self, other: "Box", tol=1e-9) -> bool:
        return bool(np.all(self.lo <= other.lo + tol) and np.all(self.hi >= other.hi - tol))

    def corners(self) -> np.ndarray:
        grids = np.meshgrid(*[(self.lo[i], self.hi[i]) for i in range(self.dim)],
                            indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def to_json(self):
        return {"lo": self.lo.tolist(), "hi": self.hi.tolist()}

    def __repr__(self):
        return f"Box({self.lo.tolist()}, {self.hi.tolist()})"


class IndexedPointSet:
    """Points sorted lexicographically by physical coordinates.

    ``index`` (integer lattice coordinates) and ``star`` (internal images)
    are present for scheme-generated patches and for their difference sets;
    ingested raw clouds carry physical coordinates only.
    """

    def __init__(self, physical, region: Box, index=None, star=None, scheme=None,
                 _presorted=False):
        phys = np.atleast_2d(np.asarray(physical, dtype=np.float64))
        if phys.size == 0:
            phys = phys.reshape(0, region.dim)
        if phys.shape[1] != region.dim:
            raise ValueError("point dimension does not match region")
        if not _presorted and len(phys) > 1:
            order = np.lexsort(phys.T[::-1])
            phys = phys[order]
            if index is not None:
                index = np.asarray(index, dtype=np.int64)[order]
            if star is not None:
                star = np.asarray(star, dtype=np.float64)[order]
        self.physical = phys
        self.region = region
        self.index = None if index is None else np.asarray(index, dtype=np.int64)
        self.star = None if star is None else np.atleast_2d(np.asarray(star, dtype=np.float64))
        if self.star is not None and self.star.size == 0:
            self.star = self.star.reshape(len(phys), 0)
        self.scheme = scheme
        if len(phys) > 1:
            same = np.all(np.abs(np.diff(phys, axis=0)) <= 1e-12, axis=1)
            if np.any(same):
                raise DuplicatePoint("point set contains coincident points")

    # -- basics -----------------------------------------------------------
    def __len__(self):
        return len(self.physical)

    @property
    def dim(self) -> int:
        return self.region.dim

    @property
    def is_scheme_backed(self) -> bool:
        return self.scheme is not None and self.index is not None

    def positions_1d(self) -> np.ndarray:
        if self.dim != 1:
            raise ValueError("positions_1d requires dimension 1")
        return self.physical[:, 0]

    def restrict(self, box: Box) -> "IndexedPointSet":
        mask = self.contains_mask(box)
        return IndexedPointSet(
            self.physical[mask], box,
            None if self.index is None else self.index[mask],
            None if self.star is None else self.star[mask],
            self.scheme, _presorted=True)

    def contains_mask(self, box: Box, tol=MATCH_TOL):
        return box.contains(self.physical, tol=tol)

    def translate(self, v) -> "IndexedPointSet":
        """Shifted copy; lattice indices are dropped (the shift is arbitrary)."""
        v = np.atleast_1d(np.asarray(v, dtype=np.float64))
        return IndexedPointSet(
            self.physical + v,
            Box(self.region.lo + v, self.region.hi + v),
            None, None, None, _presorted=True)

    def density(self, box: Box | None = None) -> float:
        box = box or self.region
        return float(np.count_nonzero(self.contains_mask(box))) / box.volume()

    def quantized_keys(self, quant=QUANT):
        """Integer-grid view of the coordinates for exact set algebra."""
        return np.round(self.physical / quant).astype(np.int64)


def _dedupe_rows(rows: np.ndarray) -> np.ndarray:
    if len(rows) == 0:
        return rows
    return np.unique(rows, axis=0)


def difference_set(pset: IndexedPointSet, radius: float) -> IndexedPointSet:
    """All pairwise differences with Euclidean norm <= radius.

    Anchors are restricted to the region core at depth ``radius`` so every
    reported difference type is supported by a fully observed neighborhood.
    Scheme-backed input yields a scheme-backed difference patch (index and
    star columns are differenced too).
    """
    r = float(radius)
    core = pset.region.shrink(r)  # raises RegionTooSmall
    out_region = Box.centered(r, pset.dim)
    if pset.dim == 1:
        pos = pset.positions_1d()
        ii, jj = kernels.pairs_within_1d(pos, float(core.lo[0]), float(core.hi[0]), r)
    else:
        ii, jj = _pairs_within_nd(pset, core, r)
    diffs = pset.physical[jj] - pset.physical[ii]
    keep = np.einsum("ij,ij->i", diffs, diffs) <= r * r + 1e-12
    ii, jj = ii[keep], jj[keep]
    if pset.is_scheme_backed:
        didx = pset.index[jj] - pset.index[ii]
        didx = _dedupe_rows(didx)
        basis = pset.scheme.basis
        full = didx @ basis.T
        phys = full[:, :pset.scheme.d]
        star = full[:, pset.scheme.d:]
        return IndexedPointSet(phys, out_region, didx, star, pset.scheme)
    diffs = pset.physical[jj] - pset.physical[ii]
    quant = np.round(diffs / QUANT).astype(np.int64)
    _, first = np.unique(quant, axis=0, return_index=True)
    return IndexedPointSet(diffs[np.sort(first)], out_region)


def _pairs_within_nd(pset, core: Box, r: float):
    pos = pset.physical
    anchor_ids = np.flatnonzero(core.contains(pos))
    x = pos[:, 0]
    out_i, out_j = [], []
    for i in anchor_ids:
        lo = np.searchsorted(x, pos[i, 0] - r, side="left")
        hi = np.searchsorted(x, pos[i, 0] + r, side="right")
        cand = np.arange(lo, hi)
        d2 = np.sum((pos[cand] - pos[i]) ** 2, axis=1)
        sel = cand[d2 <= r * r + 1e-12]
        out_i.append(np.full(len(sel), i, dtype=np.int64))
        out_j.append(sel)
    if not out_i:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(out_i), np.concatenate(out_j)


def packing_radius(pset: IndexedPointSet) -> float:
    """Half the minimum pairwise distance."""
    n = len(pset)
    if n < 2:
        raise UndefinedStatistic("packing radius needs at least two points")
    if pset.dim == 1:
        gaps = np.diff(pset.positions_1d())
        return float(gaps.min()) / 2.0
    pos = pset.physical
    x = pos[:, 0]
    best = np.inf
    for i in range(n):
        hi = np.searchsorted(x, x[i] + best, side="right")
        for j in range(i + 1, hi):
            d = float(np.hypot(*(pos[j] - pos[i]))) if pos.shape[1] == 2 else \
                float(np.linalg.norm(pos[j] - pos[i]))
            if d < best:
                best = d
                hi = np.searchsorted(x, x[i] + best, side="right")
    return best / 2.0


@dataclass
class ClusterReport:
    radius: float
    clusters: list            # list of (offsets ndarray, multiplicity)
    anchor_count: int

    @property
    def count(self) -> int:
        return len(self.clusters)


def flc_clusters(pset: IndexedPointSet, radius: float, quant=QUANT) -> ClusterReport:
    """Distinct radius-R neighborhoods up to translation, with multiplicities."""
    r = float(radius)
    core = pset.region.shrink(r)
    pos = pset.physical
    anchor_ids = np.flatnonzero(core.contains(pos))
    x = pos[:, 0]
    seen = {}
    for i in anchor_ids:
        lo = np.searchsorted(x, pos[i, 0] - r, side="left")
        hi = np.searchsorted(x, pos[i, 0] + r, side="right")
        cand = np.arange(lo, hi)
        offs = pos[cand] - pos[i]
        d2 = np.sum(offs ** 2, axis=1)
        offs = offs[d2 <= r * r + 1e-12]
        key = tuple(map(tuple, np.round(offs / quant).astype(np.int64)))
        if key in seen:
            seen[key][1] += 1
        else:
            seen[key] = [offs, 1]
    clusters = sorted(((v[0], v[1]) for v in seen.values()),
                      key=lambda c: (-c[1], c[0].tobytes()))
    return ClusterReport(r, clusters, len(anchor_ids))


@dataclass
class RepetitionReport:
    radius: float
    matches: np.ndarray       # (n, d) translations with exact patch match
    max_gap: float


def repetition_set(pset: IndexedPointSet, radius: float) -> RepetitionReport:
    """Translations t with (-t + P) agreeing with P on the centered radius box."""
    r = float(radius)
    ref_box = Box.centered(r, pset.dim)
    if not pset.region.covers(ref_box):
        raise RegionTooSmall("patch does not contain the reference box")
    ref_mask = pset.contains_mask(ref_box)
    if not np.any(ref_mask):
        raise UndefinedStatistic("reference patch is empty")
    ref_points = pset.physical[ref_mask]
    q0 = ref_points[np.argmin(np.linalg.norm(ref_points, axis=1))]
    # a matching translation must map q0 to another point of the patch
    ts = pset.physical - q0
    valid = Box(pset.region.lo - ref_box.lo, pset.region.hi - ref_box.hi)
    tmask = valid.contains(ts)
    ts = ts[tmask]
    if pset.dim == 1:
        ok = kernels.translate_match_1d(
            pset.positions_1d(), np.ascontiguousarray(ts[:, 0]),
            float(ref_box.lo[0]), float(ref_box.hi[0]), MATCH_TOL).astype(bool)
    else:
        ok = np.array([_translate_match_nd(pset, t, ref_box) for t in ts])
    matches = ts[ok]
    return RepetitionReport(r, matches, _coverage_gap(matches, valid))


def _sorted_rows(arr: np.ndarray) -> np.ndarray:
    if len(arr) < 2:
        return arr
    return arr[np.lexsort(arr.T[::-1])]


def _translate_match_nd(pset, t, box: Box) -> bool:
    ref = pset.quantized_keys()[pset.contains_mask(box)]
    shifted_box = Box(box.lo - t, box.hi - t)
    other = pset.physical[pset.contains_mask(shifted_box)] + t
    if len(other) != len(ref):
        return False
    other_q = np.round(other / QUANT).astype(np.int64)
    return bool(np.array_equal(_sorted_rows(ref), _sorted_rows(other_q)))


def _coverage_gap(matches: np.ndarray, valid: Box) -> float:
    """Largest hole between matches: consecutive gap in 1d, grid covering radius else."""
    if len(matches) == 0:
        return float("inf")
    if valid.dim == 1:
        vals = np.sort(matches[:, 0])
        vals = np.concatenate([[valid.lo[0]], vals, [valid.hi[0]]])
        return float(np.diff(vals).max())
    probes = np.stack(np.meshgrid(
        *[np.linspace(valid.lo[i], valid.hi[i], 33) for i in range(valid.dim)],
        indexing="ij"), axis=-1).reshape(-1, valid.dim)
    best = np.full(len(probes), np.inf)
    for t in matches:
        best = np.minimum(best, np.linalg.norm(probes - t, axis=1))
    return float(best.max())


@dataclass
class FrequencyReport:
    offsets: np.ndarray
    anchors: np.ndarray
    box_volumes: np.ndarray
    counts: np.ndarray        # (n_anchor, n_box)
    freqs: np.ndarray         # counts / volume
    spread: float             # relative anchor spread at the largest box


def patch_frequency(pset: IndexedPointSet, offsets, boxes: Sequence[Box],
                    anchors) -> FrequencyReport:
    """Occurrence frequency of a finite motif inside anchored counting boxes."""
    offsets = np.atleast_2d(np.asarray(offsets, dtype=np.float64))
    anchors = np.atleast_2d(np.asarray(anchors, dtype=np.float64))
    counts = np.zeros((len(anchors), len(boxes)), dtype=np.int64)
    base = pset.physical - offsets[0]
    present = np.ones(len(base), dtype=bool)
    for off in offsets[1:]:
        present &= _members(pset, base + off)
    ts = base[present]
    for ia, a in enumerate(anchors):
        for ib, box in enumerate(boxes):
            shifted = Box(box.lo + a, box.hi + a)
            if not pset.region.covers(shifted):
                raise RegionTooSmall(f"patch does not cover anchored box {shifted}")
            inside = np.ones(len(ts), dtype=bool)
            for off in offsets:
                inside &= shifted.contains(ts + off, tol=MATCH_TOL)
            counts[ia, ib] = int(np.count_nonzero(inside))
    vols = np.array([b.volume() for b in boxes])
    freqs = counts / vols
    last = freqs[:, -1]
    spread = 0.0 if last.mean() == 0 else float((last.max() - last.min()) / last.mean())
    return FrequencyReport(offsets, anchors, vols, counts, freqs, spread)


def _members(pset: IndexedPointSet, queries: np.ndarray) -> np.ndarray:
    """Boolean membership of query points in the patch (tolerance MATCH_TOL)."""
    pos = pset.physical
    if pset.dim == 1:
        p = pos[:, 0]
        q = queries[:, 0]
        idx = np.searchsorted(p, q - MATCH_TOL, side="left")
        ok = idx < len(p)
        vals = np.where(ok, p[np.minimum(idx, len(p) - 1)], np.inf)
        return np.abs(vals - q) <= MATCH_TOL
    keys = {tuple(row) for row in pset.quantized_keys()}
    qk = np.round(queries / QUANT).astype(np.int64)
    return np.array([tuple(row) in keys for row in qk])


@dataclass
class PeriodReport:
    periods: np.ndarray       # (n, d) exact-match translations, 0 included
    scan_radius: float
    lattice_rank: int         # rank of the period sample (full rank => crystallographic)


def period_candidates(pset: IndexedPointSet, scan_radius=None) -> PeriodReport:
    """Translations that map the patch onto itself on the co-shrunk core."""
    span = pset.region.span().min()
    r = float(scan_radius) if scan_radius is not None else span / 4.0
    diffs = difference_set(pset, r)
    cands = diffs.physical
    found = []
    for t in cands:
        depth = float(np.max(np.abs(t)))
        try:
            core = pset.region.shrink(depth + 1e-9)
        except RegionTooSmall:
            continue
        if pset.dim == 1:
            ok = bool(kernels.translate_match_1d(
                pset.positions_1d(), np.array([t[0]]),
                float(core.lo[0]), float(core.hi[0]), MATCH_TOL)[0])
        else:
            ok = _translate_match_nd(pset, t, core)
        if ok:
            found.append(t)
    periods = np.array(found) if found else np.zeros((0, pset.dim))
    nonzero = periods[np.linalg.norm(periods, axis=1) > MATCH_TOL] if len(periods) else periods
    rank = 0 if len(nonzero) == 0 else int(np.linalg.matrix_rank(nonzero, tol=1e-6))
    return PeriodReport(periods, r, rank)


def lt_close(pset: IndexedPointSet, other: IndexedPointSet, match_radius: float,
             shift_radius: float, levels: int = 3):
    """Local-topology closeness: do P and Q agree on the centered match box
    after some shift v with |v| <= shift_radius?

    Returns (matched, v).  The search is a coarse-to-fine grid (step
    shift_radius/10, three refinement levels) followed by a snap to the mean
    offset of paired nearest points; the final verdict requires an exact
    match at tolerance 1e-7.
    """
    box = Box.centered(match_radius, pset.dim)
    v = np.zeros(pset.dim)
    step = shift_radius / 10.0
    grid = np.arange(-10, 11, dtype=np.float64)
    for _ in range(levels):
        best_v, best_score = v, _lt_mismatch(pset, other, box, v, max(step, MATCH_TOL))
        offsets = (np.stack(np.meshgrid(*[grid] * pset.dim, indexing="ij"), axis=-1)
                   .reshape(-1, pset.dim) * step)
        for off in offsets:
            cand = v + off
            if np.max(np.abs(cand)) > shift_radius + 1e-12:
                continue
            score = _lt_mismatch(pset, other, box, cand, max(step, MATCH_TOL))
            if score < best_score or (score == best_score and
                                      np.linalg.norm(cand) < np.linalg.norm(best_v)):
                best_v, best_score = cand, score
        v = best_v
        step /= 10.0
    v = _snap_shift(pset, other, box, v, match_radius / 10.0)
    matched = _lt_mismatch(pset, other, box, v, MATCH_TOL) == 0
    return matched, v


def _lt_mismatch(pset, other, box, v, tol) -> int:
    a = pset.physical + v
    amask = box.contains(a, tol=MATCH_TOL)
    b = other.physical[other.contains_mask(box)]
    a = a[amask]
    if pset.dim == 1:
        m = kernels.count_matches_1d(
            np.ascontiguousarray(a[:, 0]), np.ascontiguousarray(b[:, 0]), tol)
    else:
        m = _match_count_nd(a, b, tol)
    return len(a) + len(b) - 2 * int(m)


def _match_count_nd(a, b, tol) -> int:
    if len(a) == 0 or len(b) == 0:
        return 0
    used = np.zeros(len(b), dtype=bool)
    bx = b[:, 0]
    count = 0
    for p in a:
        lo = np.searchsorted(bx, p[0] - tol, side="left")
        hi = np.searchsorted(bx, p[0] + tol, side="right")
        for j in range(lo, hi):
            if not used[j] and np.all(np.abs(b[j] - p) <= tol):
                used[j] = True
                count += 1
                break
    return count


def _snap_shift(pset, other, box, v, pair_tol):
    a = pset.physical + v
    amask = box.contains(a, tol=MATCH_TOL)
    a = a[amask]
    b = other.physical[other.contains_mask(box)]
    if len(a) == 0 or len(b) == 0:
        return v
    deltas = []
    bx = b[:, 0]
    for p in a:
        lo = np.searchsorted(bx, p[0] - pair_tol, side="left")
        hi = np.searchsorted(bx, p[0] + pair_tol, side="right")
        if hi > lo:
            cand = b[lo:hi]
            j = np.argmin(np.linalg.norm(cand - p, axis=1))
            if np.all(np.abs(cand[j] - p) <= pair_tol):
                deltas.append(cand[j] - p)
    if not deltas:
        return v
    return v + np.mean(deltas, axis=0)
