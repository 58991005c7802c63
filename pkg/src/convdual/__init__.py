"""convdual: exact polyhedral convex duality on interval cell complexes.

The package computes conjugates, recession functions, support functions and
subdifferentials of piecewise-affine convex functions exactly; manipulates
set-valued interval maps with exact one-sided limits and semicontinuity
checkers; pairs signed measures (densities plus atoms) with continuous
piecewise-linear functions in closed form; and runs discretized duality
experiments whose gaps close exactly when the map/domain regularity
conditions hold, complete with the counterexamples showing they are needed.
"""

from ._kernels import BACKEND as kernel_backend
from .convex import (
    INF,
    Interval,
    PolyConvexFn,
    abs_fn,
    add,
    affine_fn,
    canonicalize,
    conjugate,
    epsilon_regularize,
    eval_fn,
    fn_equal,
    indicator,
    normal_cone,
    recession,
    scale,
    subdifferential,
    support_function,
)
from .errors import (
    BudgetError,
    ConvdualError,
    InfeasibleError,
    SchemaError,
    ToleranceError,
)
from .functionals import (
    CellIntegrand,
    DualityReport,
    IntegrandField,
    Properness,
    SdReport,
    brute_force_primal,
    check_proper,
    check_sd,
    domain_map,
    duality_gap,
    eval_Ih,
    eval_J,
    primal_conjugate,
    sigma_CS,
)
from .measures import (
    BaseMeasure,
    SignedMeasure,
    lebesgue_decompose,
    pair,
    rn_derivative,
    total_variation,
)
from .plfun import PLFunction
from .regularity import (
    RegularityReport,
    analyze_map,
    check_closure_condition,
    check_ic_condition,
    is_full_lsc,
    is_mu_continuous,
    is_outer_mu_regular,
    is_tau_full,
    mli_at,
    mu_selection_check,
)
from .setmap import (
    BoxMap,
    CellBand,
    CellComplex,
    IntervalMap,
    IntervalUnion,
    UnionMap,
    affine_map,
    box_is_isc,
    hull_map,
    image_closure,
    intersect_map,
    is_isc,
    is_osc,
    kuratowski_limits,
    map_op,
    michael_selection,
    one_sided_limit,
    product_map,
    sum_map,
    union_map,
)

__version__ = "0.1.0"
