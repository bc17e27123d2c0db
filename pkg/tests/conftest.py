"""Shared fixtures: schemes, patches and tables reused across the suite."""

from __future__ import annotations

import numpy as np
import pytest

import aperiodic as ap


@pytest.fixture(scope="session")
def fib():
    return ap.fibonacci_scheme(), ap.fibonacci_window()


@pytest.fixture(scope="session")
def silver():
    return ap.silver_scheme(), ap.silver_window()


@pytest.fixture(scope="session")
def ab():
    return ap.ammann_beenker_scheme(), ap.ammann_beenker_window()


@pytest.fixture(scope="session")
def crystal():
    return ap.integer_crystal(1), None


@pytest.fixture(scope="session")
def fib_patch_small(fib):
    scheme, window = fib
    return ap.enumerate_cut(scheme, window, ap.Box.make([-120], [120]))


@pytest.fixture(scope="session")
def fib_patch_centered(fib):
    scheme, window = fib
    return ap.enumerate_cut(scheme, window, ap.Box.make([-1100], [1100]))


@pytest.fixture(scope="session")
def fib_patch_2k(fib):
    scheme, window = fib
    return ap.enumerate_cut(scheme, window, ap.Box.make([-60], [2060]))


@pytest.fixture(scope="session")
def boxes_2k():
    return ap.default_boxes((125, 250, 500, 1000, 2000), dim=1, anchored=True)


@pytest.fixture(scope="session")
def fib_table50(fib_patch_2k, boxes_2k):
    return ap.eta_table(fib_patch_2k, 50.0, boxes_2k)


@pytest.fixture(scope="session")
def fib_patch_10k(fib):
    scheme, window = fib
    return ap.enumerate_cut(scheme, window, ap.Box.make([-60], [10060]))


@pytest.fixture(scope="session")
def boxes_10k():
    return ap.default_boxes((625, 1250, 2500, 5000, 10000), dim=1, anchored=True)


@pytest.fixture(scope="session")
def fib_table50_10k(fib_patch_10k, boxes_10k):
    return ap.eta_table(fib_patch_10k, 50.0, boxes_10k)


@pytest.fixture(scope="session")
def fib_table400(fib):
    scheme, window = fib
    patch = ap.enumerate_cut(scheme, window, ap.Box.make([-410], [4410]))
    boxes = ap.default_boxes((500, 1000, 2000, 4000), dim=1, anchored=True)
    return ap.eta_table(patch, 400.0, boxes)


@pytest.fixture(scope="session")
def z_patch(crystal):
    scheme, _ = crystal
    return ap.enumerate_cut(scheme, None, ap.Box.make([-60], [2060]))


@pytest.fixture(scope="session")
def z_table(z_patch, boxes_2k):
    return ap.eta_table(z_patch, 50.0, boxes_2k)


@pytest.fixture(scope="session")
def ab_patch(ab):
    scheme, window = ab
    return ap.enumerate_cut(scheme, window, ap.Box.make([-25, -25], [25, 25]))


@pytest.fixture(scope="session")
def fib_patch_4k(fib):
    scheme, window = fib
    return ap.enumerate_cut(scheme, window, ap.Box.make([0], [4000]))


@pytest.fixture(scope="session")
def boxes_4k():
    return ap.default_boxes((250, 500, 1000, 2000, 4000), dim=1, anchored=True)


@pytest.fixture(scope="session")
def random_patch():
    return ap.random_fixture(ap.Box.make([-1050], [2150]), density=0.72, seed=77)


@pytest.fixture(scope="session")
def rng():
    return np.random.Generator(np.random.PCG64(1234))
