"""Property battery over all shipped schemes (plus the random control).

Each shipped scheme runs the same checks: exhaustive enumeration matching the
density law, stable uniform discreteness, symmetric difference sets, additive
star map, trivial window stabilizer, conjugate-symmetric character sums, and
(in one physical dimension) symmetric relatively-dense almost periods.
"""

import math

import numpy as np
import pytest

import aperiodic as ap
from aperiodic.window import Region

SCHEME_NAMES = ["fibonacci", "silver", "ammann_beenker", "crystal_z"]


@pytest.fixture(scope="module", params=SCHEME_NAMES)
def shipped(request):
    scheme, window = ap.named_scheme(request.param)
    if scheme.d == 1:
        region = ap.Box.make([-400], [400])
    else:
        region = ap.Box.make([-30, -30], [30, 30])
    patch = ap.enumerate_cut(scheme, window, region)
    return request.param, scheme, window, patch


class TestCutInvariants:
    def test_empirical_density_converges(self, shipped):
        name, scheme, window, patch = shipped
        target = ap.model_density(scheme, window)
        if scheme.d == 1:
            big = ap.enumerate_cut(scheme, window, ap.Box.make([0], [15000]))
        else:
            big = ap.enumerate_cut(scheme, window, ap.Box.make([-50, -50], [50, 50]))
        count = len(big)
        assert count >= 10000
        assert abs(count / big.region.volume() - target) / target < 0.01

    def test_uniform_discreteness_stable(self, shipped):
        name, scheme, window, patch = shipped
        r1 = ap.packing_radius(patch)
        sub = patch.restrict(ap.Box(patch.region.lo / 2, patch.region.hi / 2))
        r2 = ap.packing_radius(sub)
        assert r1 > 0
        assert r1 == pytest.approx(r2, rel=1e-9) or r1 <= r2

    def test_star_additivity(self, shipped, rng):
        name, scheme, window, patch = shipped
        k = scheme.k
        for _ in range(30):
            n1 = rng.integers(-40, 40, size=k)
            n2 = rng.integers(-40, 40, size=k)
            lhs = scheme.star_of([n1 + n2])[0]
            rhs = scheme.star_of([n1])[0] + scheme.star_of([n2])[0]
            assert np.allclose(lhs, rhs, atol=1e-9)

    def test_difference_set_symmetric(self, shipped):
        name, scheme, window, patch = shipped
        radius = 10.0 if scheme.d == 1 else 6.0
        diffs = ap.difference_set(patch, radius)
        keys = {tuple(r) for r in np.round(diffs.physical, 7)}
        assert keys == {tuple(-v for v in key) for key in keys}

    def test_difference_inside_window_difference_cut(self, shipped):
        name, scheme, window, patch = shipped
        if scheme.m == 0:
            pytest.skip("no window for the crystal")
        radius = 10.0 if scheme.d == 1 else 6.0
        diffs = ap.difference_set(patch, radius)
        wd = window.minkowski_difference()
        for s in diffs.star:
            val = s[0] if scheme.m == 1 else s
            assert wd.classify(val) is not Region.EXTERIOR

    def test_window_stabilizer_trivial(self, shipped, rng):
        name, scheme, window, patch = shipped
        if window is None:
            pytest.skip("no window for the crystal")
        diffs = ap.difference_set(patch, 5.0)
        cands = diffs.star[:40, 0] if scheme.m == 1 else [tuple(r) for r in diffs.star[:40]]
        found = ap.stabilizer_check(window, list(cands))
        nonzero = [t for t in found
                   if np.max(np.abs(np.atleast_1d(t))) > 1e-9]
        assert nonzero == []

    def test_weyl_conjugate_symmetry(self, shipped):
        name, scheme, window, patch = shipped
        boxes = [ap.Box(patch.region.lo, patch.region.hi)]
        k = [0.377] * scheme.d
        a = ap.weyl_sum(patch, k, boxes)
        b = ap.weyl_sum(patch, [-v for v in k], boxes)
        assert np.allclose(a, np.conj(b), atol=1e-12)


@pytest.fixture(scope="module", params=["fibonacci", "silver", "crystal_z"])
def period_table(request):
    scheme, window = ap.named_scheme(request.param)
    patch = ap.enumerate_cut(scheme, window, ap.Box.make([-10], [1210]))
    boxes = ap.default_boxes((125, 250, 500, 1000), dim=1, anchored=True)
    if scheme.m:
        cand = ap.enumerate_cut(scheme, window.minkowski_difference(),
                                ap.Box.make([-200], [200]))
        table = ap.eta_table_for_deltas(patch, cand.physical, boxes, 200.0,
                                        delta_index=cand.index)
    else:
        cand = np.arange(-200.0, 201.0)[:, None]
        table = ap.eta_table_for_deltas(patch, cand, boxes, 200.0)
    return request.param, table


class TestAlmostPeriodInvariants:
    def test_p_eps_symmetric_contains_zero(self, period_table):
        name, t = period_table
        for frac in (0.1, 0.3):
            periods = ap.almost_periods(t, frac * 2 * t.eta0)
            vals = set(np.round(periods.members[:, 0], 7).tolist())
            assert 0.0 in vals
            assert vals == {-v for v in vals}

    def test_gap_finite_and_stable(self, period_table):
        name, t = period_table
        eps = 0.3 * 2 * t.eta0
        g_half = ap.almost_periods(t, eps, scan_radius=100.0).max_gap
        g_full = ap.almost_periods(t, eps, scan_radius=200.0).max_gap
        assert math.isfinite(g_full)
        assert g_full <= 1.1 * g_half

    def test_random_fixture_gap_grows(self, random_patch):
        boxes = ap.default_boxes((125, 250, 500, 1000), dim=1, anchored=True)
        t = ap.eta_table(random_patch, 50.0, boxes)
        eps = 0.3 * 2 * t.eta0
        g_half = ap.almost_periods(t, eps, scan_radius=25.0).max_gap
        g_full = ap.almost_periods(t, eps, scan_radius=50.0).max_gap
        assert g_full >= 2 * g_half


class TestMetricIdentity:
    @pytest.mark.parametrize("name", ["fibonacci", "silver"])
    def test_pairwise_vs_predicted(self, name):
        scheme, window = ap.named_scheme(name)
        patch = ap.enumerate_cut(scheme, window, ap.Box.make([-60], [4060]))
        boxes = ap.default_boxes((500, 1000, 2000, 4000), dim=1, anchored=True)
        t = ap.eta_table(patch, 30.0, boxes)
        rng = np.random.Generator(np.random.PCG64(17))
        rows = rng.choice(len(t.deltas), size=6, replace=False)
        for i in rows:
            pred = ap.predicted_d(scheme, window, index=t.delta_index[i])
            emp = float(t.d_values()[i])
            assert abs(emp - pred) <= 0.02 * max(pred, 0.1)


class TestClusterToleranceMonotone:
    @pytest.mark.parametrize("name", ["fibonacci", "silver"])
    def test_count_stable_as_quantization_refines(self, name):
        scheme, window = ap.named_scheme(name)
        patch = ap.enumerate_cut(scheme, window, ap.Box.make([-200], [200]))
        counts = [ap.flc_clusters(patch, 2.0, quant=q).count
                  for q in (1e-5, 1e-7, 1e-9)]
        assert counts[0] >= counts[1] >= counts[2]


class TestAperiodicityContrast:
    def test_model_sets_have_trivial_periods(self):
        for name in ("fibonacci", "silver"):
            scheme, window = ap.named_scheme(name)
            patch = ap.enumerate_cut(scheme, window, ap.Box.make([-150], [150]))
            rep = ap.period_candidates(patch, scan_radius=40.0)
            assert rep.periods.tolist() == [[0.0]]

    def test_crystal_periods_full_rank(self):
        scheme = ap.integer_crystal(2)
        patch = ap.enumerate_cut(scheme, None, ap.Box.make([-15, -15], [15, 15]))
        rep = ap.period_candidates(patch, scan_radius=4.0)
        assert rep.lattice_rank == 2


class TestReconstructionMonotone:
    @pytest.mark.parametrize("name", ["fibonacci", "silver"])
    def test_growing_region_grows_estimate(self, name):
        scheme, window = ap.named_scheme(name)
        prev = None
        for half in (200, 500, 1000):
            patch = ap.enumerate_cut(scheme, window, ap.Box.make([-half], [half]))
            est = ap.reconstruct_window(patch).estimate
            if prev is not None:
                assert est.components[0].lo <= prev.components[0].lo + 1e-12
                assert est.components[-1].hi >= prev.components[-1].hi - 1e-12
            prev = est


class TestCertificatesAcrossSchemes:
    @pytest.mark.parametrize("name", ["fibonacci", "silver"])
    def test_certificates_validate(self, name):
        scheme, window = ap.named_scheme(name)
        patch = ap.enumerate_cut(scheme, window, ap.Box.make([-260], [260]))
        rng = np.random.Generator(np.random.PCG64(8))
        pool = np.flatnonzero((patch.physical[:, 0] >= 0)
                              & (patch.physical[:, 0] <= 180))
        diffs = ap.difference_set(patch, 200.0)
        for _ in range(5):
            i, j = rng.choice(pool, size=2, replace=True)
            cert = ap.stepping_certificate(patch, scheme, patch.index[i],
                                           patch.index[j], shared_diffs=diffs)
            assert cert.valid
