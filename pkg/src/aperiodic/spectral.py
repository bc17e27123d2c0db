"""Diffraction numerics: exponential character sums over growing boxes.

Amplitudes are normalized by box volume, so the zero-frequency peak equals
the point density and peak intensities are |amplitude|^2 (density^2 at k=0).
Candidate frequencies come from the dual lattice; seeded random control
frequencies quantify how fast non-candidate amplitudes decay, which is the
finite-data diagnostic for pure-point spectra.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .pointset import Box, IndexedPointSet
from .scheme import LatticeScheme, dual_candidates
from .torus import TorusPoint, singularity_test, torus_point_from_frac


def weyl_sum(pset: IndexedPointSet, k, boxes) -> np.ndarray:
    """Volume-normalized amplitude S_n(k) = (1/vol A_n) sum exp(-2 pi i k.x)."""
    k = np.atleast_1d(np.asarray(k, dtype=np.float64))
    return _amplitudes(pset, k[None, :], boxes)[0]


def _amplitudes(pset: IndexedPointSet, ks: np.ndarray, boxes) -> np.ndarray:
    vols = np.array([b.volume() for b in boxes])
    if pset.dim == 1:
        pos = pset.positions_1d()
        lo = np.searchsorted(pos, np.array([b.lo[0] for b in boxes]) - 1e-9)
        hi = np.searchsorted(pos, np.array([b.hi[0] for b in boxes]) + 1e-9,
                             side="right")
        sums = kernels.weyl_sums_1d(pos, np.ascontiguousarray(ks[:, 0]),
                                    lo.astype(np.int64), hi.astype(np.int64))
        return sums / vols[None, :]
    out = np.zeros((len(ks), len(boxes)), dtype=np.complex128)
    for j, box in enumerate(boxes):
        pts = pset.physical[pset.contains_mask(box)]
        phases = pts @ ks.T
        out[:, j] = np.exp(-2j * np.pi * phases).sum(axis=0)
    return out / vols[None, :]


@dataclass
class PeakEntry:
    k: np.ndarray
    k_internal: np.ndarray | None
    amplitudes: np.ndarray       # complex, one per box
    is_control: bool

    @property
    def intensity(self) -> float:
        return float(np.abs(self.amplitudes[-1]) ** 2)

    def to_json(self):
        return {
            "k": self.k.tolist(),
            "k_internal": None if self.k_internal is None else self.k_internal.tolist(),
            "re": [float(a.real) for a in self.amplitudes],
            "im": [float(a.imag) for a in self.amplitudes],
            "intensity": self.intensity,
            "is_control": self.is_control,
        }


@dataclass
class PeakTable:
    entries: list                # candidate peaks sorted by |k|
    controls: list
    boxes: list
    density: float

    @property
    def purity(self) -> float:
        """Largest control amplitude at the biggest box; small means pure-point-like."""
        if not self.controls:
            return 0.0
        return max(abs(c.amplitudes[-1]) for c in self.controls)

    def to_json(self):
        return {
            "density": self.density,
            "purity": self.purity,
            "entries": [e.to_json() for e in self.entries],
            "controls": [c.to_json() for c in self.controls],
        }


def diffraction_table(pset: IndexedPointSet, scheme: LatticeScheme, k_max: float,
                      n_controls: int, seed: int, boxes,
                      k_internal_max: float | None = None,
                      control_gap: float = 1e-3) -> PeakTable:
    """Amplitudes at all dual candidates plus seeded control frequencies.

    Controls are drawn uniformly with magnitude in [k_max/4, k_max] and kept
    at least ``control_gap`` away from every candidate.
    """
    cands = dual_candidates(scheme, k_max, k_internal_max)
    ks = cands.k
    rng = np.random.Generator(np.random.PCG64(seed))
    controls = []
    guard = 0
    while len(controls) < n_controls and guard < 1000 * max(n_controls, 1):
        guard += 1
        mag = rng.uniform(k_max / 4.0, k_max)
        if pset.dim == 1:
            vec = np.array([mag * rng.choice([-1.0, 1.0])])
        else:
            ang = rng.uniform(0.0, 2.0 * np.pi)
            vec = mag * np.array([np.cos(ang), np.sin(ang)])[:pset.dim]
        if len(ks) and np.min(np.linalg.norm(ks - vec, axis=1)) < control_gap:
            continue
        controls.append(vec)
    control_ks = np.array(controls) if controls else np.zeros((0, pset.dim))
    amps = _amplitudes(pset, ks, boxes) if len(ks) else np.zeros((0, len(boxes)), dtype=complex)
    camps = _amplitudes(pset, control_ks, boxes) if len(control_ks) else \
        np.zeros((0, len(boxes)), dtype=complex)
    entries = [
        PeakEntry(ks[i], cands.k_internal[i] if scheme.m else None, amps[i], False)
        for i in range(len(ks))
    ]
    controls_out = [PeakEntry(control_ks[i], None, camps[i], True)
                    for i in range(len(control_ks))]
    return PeakTable(entries, controls_out, list(boxes), pset.density(boxes[-1]))


@dataclass
class SeparationReport:
    n_samples: int
    n_singular: int
    singular_samples: list       # (sample number, hit count)

    @property
    def fraction(self) -> float:
        return self.n_singular / self.n_samples if self.n_samples else 0.0


def separation_fraction(scheme: LatticeScheme, window, n_samples: int, seed: int,
                        patch_radius: float = 1000.0,
                        band: float | None = None) -> SeparationReport:
    """Fraction of uniformly sampled torus points whose fiber is singular.

    Sampling is uniform over the fundamental cell.  In quadratic mode the
    fractional coordinates are random rationals with a large prime
    denominator, so boundary coincidences are decided exactly (and are
    impossible for the shipped generic windows).  A nonzero ``band`` widens
    the boundary test, which turns the scan into the fat-boundary diagnostic
    fixture.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    q = 1_048_573  # prime denominator for generic rational sampling
    singular = []
    for s in range(n_samples):
        if scheme.is_exact:
            frac = [Fraction(int(v), q) for v in rng.integers(0, q, size=scheme.k)]
        else:
            frac = rng.uniform(0.0, 1.0, size=scheme.k)
        tp = torus_point_from_frac(scheme, frac)
        hits = singularity_test(scheme, window, tp, patch_radius, band=band)
        if hits:
            singular.append((s, len(hits)))
    return SeparationReport(n_samples, len(singular), singular)
