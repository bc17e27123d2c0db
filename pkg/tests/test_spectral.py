import math

import numpy as np
import pytest
from fractions import Fraction

import aperiodic as ap
from aperiodic.errors import UnsupportedDimension

TAU = (1 + math.sqrt(5)) / 2


@pytest.fixture(scope="module")
def boxes():
    return ap.default_boxes((250, 500, 1000), dim=1, anchored=True)


class TestWeylSum:
    def test_zero_frequency_is_density(self, fib_patch_2k, boxes, fib):
        scheme, window = fib
        amps = ap.weyl_sum(fib_patch_2k, [0.0], boxes)
        assert amps[-1].real == pytest.approx(ap.model_density(scheme, window),
                                              rel=0.01)
        assert amps[-1].imag == 0.0

    def test_crystal_bragg(self, z_patch, boxes):
        amps = ap.weyl_sum(z_patch, [1.0], boxes)
        assert abs(amps[-1]) == pytest.approx(1.0, rel=0.01)

    def test_conjugate_symmetry(self, fib_patch_2k, boxes):
        a = ap.weyl_sum(fib_patch_2k, [0.7236], boxes)
        b = ap.weyl_sum(fib_patch_2k, [-0.7236], boxes)
        assert np.allclose(a, np.conj(b), atol=1e-12)

    def test_candidate_converges(self, fib, fib_patch_4k, boxes_4k):
        scheme, _ = fib
        cands = ap.dual_candidates(scheme, 1.0, 0.5)
        norms = np.linalg.norm(cands.k, axis=1)
        k = cands.k[np.argsort(norms)[1]]  # smallest nonzero
        amps = ap.weyl_sum(fib_patch_4k, k, boxes_4k)
        mags = np.abs(amps)
        assert abs(mags[-1] - mags[-2]) / mags[-1] < 0.05

    def test_translation_covariance(self, fib, fib_patch_2k, boxes):
        t = 7.33
        k = 0.7236
        moved = fib_patch_2k.translate([t])
        usable = [b for b in boxes if moved.region.covers(b)]
        lhs = ap.weyl_sum(moved, [k], usable)[-1]
        rhs = np.exp(-2j * np.pi * k * t) * ap.weyl_sum(fib_patch_2k, [k], usable)[-1]
        assert abs(lhs - rhs) <= 0.02 * abs(rhs) + 0.02


class TestDiffraction:
    def test_crystal_peaks_at_integers(self, z_patch, boxes):
        table = ap.diffraction_table(z_patch, ap.integer_crystal(1), 3.2, 8,
                                     seed=2024, boxes=boxes)
        for e in table.entries:
            assert abs(e.k[0] - round(e.k[0])) < 1e-9
            assert e.intensity == pytest.approx(1.0, rel=0.05)
        assert table.purity < 0.05 * table.density

    def test_crystal_candidates_closed_under_addition(self, z_patch, boxes):
        table = ap.diffraction_table(z_patch, ap.integer_crystal(1), 3.2, 0,
                                     seed=1, boxes=boxes)
        hot = [round(float(e.k[0]), 6) for e in table.entries if e.intensity > 0.5]
        for a in hot:
            for b in hot:
                if abs(a + b) <= 3.2:
                    assert (a + b) in hot

    def test_zero_peak_is_density_squared(self, fib, fib_patch_2k, boxes):
        scheme, window = fib
        table = ap.diffraction_table(fib_patch_2k, scheme, 1.0, 0,
                                     seed=1, boxes=boxes)
        zero = table.entries[0]
        assert np.allclose(zero.k, 0.0)
        assert zero.intensity == pytest.approx(
            ap.model_density(scheme, window) ** 2, rel=0.02)

    def test_intensity_symmetric_in_k(self, fib, fib_patch_2k, boxes):
        scheme, _ = fib
        table = ap.diffraction_table(fib_patch_2k, scheme, 1.5, 0,
                                     seed=1, boxes=boxes)
        by_k = {round(float(e.k[0]), 9): e.intensity for e in table.entries}
        for k, inten in by_k.items():
            assert by_k[-k] == pytest.approx(inten, abs=1e-12)

    def test_fibonacci_stability_and_controls(self, fib, fib_patch_4k, boxes_4k):
        scheme, _ = fib
        table = ap.diffraction_table(fib_patch_4k, scheme, 2.5, 10,
                                     seed=12345, boxes=boxes_4k,
                                     k_internal_max=1.0)
        i1k = boxes_4k.index(next(b for b in boxes_4k if b.hi[0] == 1000))
        floor = 1e-4
        for e in table.entries:
            early = abs(e.amplitudes[i1k]) ** 2
            late = e.intensity
            if late >= floor:
                assert abs(early - late) / late < 0.05
        assert table.purity < 0.05 * table.density

    def test_random_no_stable_peaks(self, boxes):
        cloud = ap.random_fixture(ap.Box.make([0], [1200]), 0.7, seed=31)
        table = ap.diffraction_table(cloud, ap.fibonacci_scheme(), 2.0, 6,
                                     seed=7, boxes=boxes)
        for e in table.entries:
            if np.linalg.norm(e.k) > 1e-9:
                assert e.intensity < 0.01 * table.density ** 2 + 1e-4


class TestSeparation:
    def test_generic_exact_samples_nonsingular(self, fib):
        scheme, window = fib
        rep = ap.separation_fraction(scheme, window, 100, seed=5,
                                     patch_radius=200.0)
        assert rep.fraction == 0.0

    def test_constructed_singular_offset_detected(self, fib):
        scheme, window = fib
        # place the star of index (3, 2) exactly on the closed endpoint
        from aperiodic.exactmath import QuadExact
        star = scheme.star_exact((3, 2))[0]
        target = window.components[0].hi_exact
        h = target - star
        det = QuadExact(0, -1, 5)
        tau = QuadExact(Fraction(1, 2), Fraction(1, 2), 5)
        tauc = tau.conjugate()
        c1 = (QuadExact(0, 0, 5) - tau * h) / det
        c2 = h / det
        tp = ap.torus_point_from_frac(scheme, [float(c1) % 1.0, float(c2) % 1.0])
        hits = ap.singularity_test(scheme, window, tp, 50.0, band=1e-9)
        assert len(hits) >= 1

    def test_fat_boundary_band_scales(self, fib):
        scheme, window = fib
        thin = ap.separation_fraction(scheme, window, 300, seed=9,
                                      patch_radius=100.0, band=0.002)
        thick = ap.separation_fraction(scheme, window, 300, seed=9,
                                       patch_radius=100.0, band=0.02)
        assert thick.fraction > thin.fraction
        assert thick.fraction > 0
