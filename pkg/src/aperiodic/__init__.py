"""Cut-and-project model sets and numerical aperiodic-order diagnostics."""

__version__ = "0.1.0"

from .autocorr import (
    AutocorrelationTable,
    almost_periods,
    default_boxes,
    eta_table,
    eta_table_for_deltas,
    mact_close,
    pairwise_d,
    predicted_d,
    symdiff_density,
)
from .errors import AperiodicError
from .exactmath import QuadExact
from .meyer import (
    MeyerCertificate,
    generator_norm,
    m1_cover,
    stepping_certificate,
    weak_ud_bound,
)
from .pointset import (
    Box,
    IndexedPointSet,
    difference_set,
    flc_clusters,
    lt_close,
    packing_radius,
    patch_frequency,
    period_candidates,
    repetition_set,
)
from .scheme import (
    LatticePoint,
    LatticeScheme,
    dual_candidates,
    enumerate_cut,
    make_scheme,
    model_density,
    resolve_index,
    validate_scheme,
)
from .schemes import (
    ammann_beenker_scheme,
    ammann_beenker_window,
    fibonacci_scheme,
    fibonacci_window,
    integer_crystal,
    named_scheme,
    random_fixture,
    silver_scheme,
    silver_window,
)
from .spectral import PeakTable, diffraction_table, separation_fraction, weyl_sum
from .torus import (
    TorusPoint,
    beta_of_cut,
    continuity_epsilon,
    embed_translation,
    fiber_enumerate,
    interval_union_hausdorff,
    reconstruct_window,
    singularity_test,
    torus_point_from_frac,
)
from .window import ConvexPolygon, Interval, IntervalUnion, Region, stabilizer_check
