import math

import numpy as np
import pytest

import aperiodic as ap
from aperiodic.errors import (
    DuplicatePoint,
    RegionTooSmall,
    UndefinedStatistic,
)
from aperiodic.pointset import Box, IndexedPointSet

TAU = (1 + math.sqrt(5)) / 2


def integer_patch(lo=-110, hi=110):
    pts = np.arange(lo, hi + 1, dtype=np.float64)[:, None]
    return IndexedPointSet(pts, Box.make([lo], [hi]))


class TestBasics:
    def test_sorted_and_deduped(self):
        pts = np.array([[3.0], [1.0], [2.0]])
        ps = IndexedPointSet(pts, Box.make([0], [5]))
        assert ps.positions_1d().tolist() == [1.0, 2.0, 3.0]
        with pytest.raises(DuplicatePoint):
            IndexedPointSet(np.array([[1.0], [1.0]]), Box.make([0], [5]))

    def test_restrict_and_density(self):
        ps = integer_patch(0, 100)
        sub = ps.restrict(Box.make([10], [20]))
        assert len(sub) == 11
        assert ps.density(Box.make([0], [100])) == pytest.approx(1.01)

    def test_box_validation(self):
        with pytest.raises(ValueError):
            Box.make([1.0], [1.0])
        with pytest.raises(RegionTooSmall):
            Box.make([0], [4]).shrink(3)


class TestDifferenceSet:
    def test_single_point(self):
        ps = IndexedPointSet(np.array([[0.0]]), Box.make([-10], [10]))
        diffs = ap.difference_set(ps, 5.0)
        assert diffs.physical.tolist() == [[0.0]]

    def test_integers(self):
        diffs = ap.difference_set(integer_patch(0, 100), 5.0)
        assert sorted(diffs.positions_1d().tolist()) == list(range(-5, 6))

    def test_symmetry(self, fib_patch_small):
        diffs = ap.difference_set(fib_patch_small, 20.0)
        vals = set(np.round(diffs.positions_1d(), 7).tolist())
        assert vals == {-v for v in vals}

    def test_matches_window_difference_cut(self, fib):
        scheme, window = fib
        patch = ap.enumerate_cut(scheme, window, ap.Box.make([-60], [60]))
        diffs = ap.difference_set(patch, 10.0)
        cut = ap.enumerate_cut(scheme, window.minkowski_difference(),
                               ap.Box.make([-10], [10]))
        observed = {tuple(r) for r in diffs.index}
        allowed = {tuple(r) for r in cut.index}
        assert observed <= allowed
        # at this scale every short difference type is realized
        short = {t for t in allowed
                 if abs(scheme.physical_of([t])[0][0]) <= 5.0}
        assert short <= observed

    def test_region_too_small(self):
        ps = integer_patch(0, 10)
        with pytest.raises(RegionTooSmall):
            ap.difference_set(ps, 20.0)

    def test_scheme_backed_indices(self, fib_patch_small, fib):
        scheme, _ = fib
        diffs = ap.difference_set(fib_patch_small, 10.0)
        assert diffs.index is not None
        recon = scheme.physical_of(diffs.index)[:, 0]
        assert np.allclose(np.sort(recon), diffs.positions_1d())


class TestPackingRadius:
    def test_integers(self):
        assert ap.packing_radius(integer_patch()) == pytest.approx(0.5)

    def test_fibonacci(self, fib_patch_small):
        assert ap.packing_radius(fib_patch_small) == pytest.approx(0.5)

    def test_single_point_undefined(self):
        ps = IndexedPointSet(np.array([[0.0]]), Box.make([-1], [1]))
        with pytest.raises(UndefinedStatistic):
            ap.packing_radius(ps)

    def test_2d(self, ab_patch):
        assert ap.packing_radius(ab_patch) > 0.2


class TestFlcClusters:
    def test_integers_single_cluster(self):
        rep = ap.flc_clusters(integer_patch(), 3.0)
        assert rep.count == 1

    def test_fibonacci_finite_and_stable(self, fib, fib_patch_small):
        scheme, window = fib
        rep1 = ap.flc_clusters(fib_patch_small, 1.2)
        big = ap.enumerate_cut(scheme, window, ap.Box.make([-240], [240]))
        rep2 = ap.flc_clusters(big, 1.2)
        assert 1 <= rep1.count <= 4
        assert rep1.count == rep2.count

    def test_random_cloud_grows(self):
        small = ap.random_fixture(ap.Box.make([-100], [100]), 1.0, seed=5)
        big = ap.random_fixture(ap.Box.make([-400], [400]), 1.0, seed=5)
        r_small = ap.flc_clusters(small, 1.2)
        r_big = ap.flc_clusters(big, 1.2)
        assert r_big.count > r_small.count


class TestRepetition:
    def test_integers(self):
        rep = ap.repetition_set(integer_patch(), 3.0)
        assert rep.max_gap == pytest.approx(1.0)

    def test_fibonacci_two_scale(self, fib, fib_patch_small):
        scheme, window = fib
        rep1 = ap.repetition_set(fib_patch_small, 5.0)
        big = ap.enumerate_cut(scheme, window, ap.Box.make([-240], [240]))
        rep2 = ap.repetition_set(big, 5.0)
        assert len(rep1.matches) > 0
        assert rep1.max_gap < 40
        assert rep2.max_gap <= rep1.max_gap * 1.5

    def test_defect_breaks_matches_nearby(self, fib_patch_small):
        pts = fib_patch_small.physical.copy()
        spurious = np.vstack([pts, [[17.17]]])
        broken = IndexedPointSet(spurious, fib_patch_small.region)
        rep = ap.repetition_set(broken, 5.0)
        good = ap.repetition_set(fib_patch_small, 5.0)
        # translations moving the reference patch onto the defect zone fail
        assert len(rep.matches) < len(good.matches)


class TestPatchFrequency:
    def test_single_point_motif_gives_density(self, fib_patch_2k, fib, boxes_2k):
        scheme, window = fib
        rep = ap.patch_frequency(fib_patch_2k, [[0.0]], boxes_2k, [[0.0]])
        assert rep.freqs[0, -1] == pytest.approx(
            ap.model_density(scheme, window), rel=0.01)

    def test_pair_motif_matches_intersected_window(self, fib_patch_2k, fib, boxes_2k):
        scheme, window = fib
        # motif {0, 1}: the second point forces the star into W and W - 1*
        rep = ap.patch_frequency(fib_patch_2k, [[0.0], [1.0]], boxes_2k, [[0.0]])
        shifted = window.translate(-scheme.star_of([(1, 0)])[0][0])
        sub = window.intersect(shifted)
        expected = ap.model_density(scheme, sub)
        assert rep.freqs[0, -1] == pytest.approx(expected, rel=0.02)

    def test_anchor_spread_small(self, fib_patch_2k, fib, boxes_2k):
        boxes = boxes_2k[:4]  # anchors shift the boxes, keep them in range
        rep = ap.patch_frequency(fib_patch_2k, [[0.0], [1.0]], boxes,
                                 [[0.0], [1000.0]])
        assert rep.spread < 0.02


class TestPeriods:
    def test_integers(self):
        rep = ap.period_candidates(integer_patch(), scan_radius=10.0)
        vals = sorted(rep.periods[:, 0].tolist())
        assert vals == list(range(-10, 11))
        assert rep.lattice_rank == 1

    def test_fibonacci_aperiodic(self, fib_patch_small):
        rep = ap.period_candidates(fib_patch_small, scan_radius=30.0)
        assert rep.periods.tolist() == [[0.0]]
        assert rep.lattice_rank == 0

    def test_square_crystal(self):
        scheme = ap.integer_crystal(2)
        patch = ap.enumerate_cut(scheme, None, ap.Box.make([-20, -20], [20, 20]))
        rep = ap.period_candidates(patch, scan_radius=5.0)
        assert rep.lattice_rank == 2
        assert any(tuple(p) == (1.0, 0.0) for p in rep.periods)
        assert any(tuple(p) == (0.0, 1.0) for p in rep.periods)


class TestLtClose:
    def test_identical(self, fib_patch_small):
        ok, v = ap.lt_close(fib_patch_small, fib_patch_small, 10.0, 0.5)
        assert ok and abs(v[0]) < 1e-9

    def test_shifted_recovered(self, fib_patch_small):
        v0 = 0.037
        shifted = fib_patch_small.translate([v0])
        ok, v = ap.lt_close(shifted, fib_patch_small, 10.0, 0.5)
        assert ok
        assert v[0] == pytest.approx(-v0, abs=1e-6)

    def test_difference_translate_snaps_exact(self, fib, fib_patch_small):
        # for sets with uniformly discrete differences, a near-match on a big
        # box by a difference translation is an exact match with zero shift
        scheme, window = fib
        diffs = ap.difference_set(fib_patch_small, 30.0)
        x = diffs.positions_1d()[np.argmin(np.abs(np.abs(diffs.positions_1d()) - 20))]
        big = ap.enumerate_cut(scheme, window, ap.Box.make([-400], [400]))
        shifted = big.translate([-x])
        ok, v = ap.lt_close(shifted, big, 10.0, 0.12)
        if ok:
            assert abs(v[0]) < 1e-7
