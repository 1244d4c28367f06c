"""Order relations between finite-dimensional contractions.

Defect spaces, unitary/c.n.u. splits, sampled characteristic functions,
factorizations, the preorders A ≼ B and A ≺ B with witnesses or certified
refutations, truncated unitary dilations and seeded fixtures.
"""

from .charfn import (
    DEFAULT_GRID,
    CharFnSample,
    GridSpec,
    PureSplit,
    analytic_range_span,
    coincide,
    eval_charfn,
    pure_split,
    sample_charfn,
    sample_function,
)
from .config import Config
from .contraction import (
    Contraction,
    Decomposition,
    check_defect_inequalities,
    defect_dims,
    defect_operator,
    largest_reducing_subspace_in_kernel,
    unitary_cnu_split,
    unitary_multiplicity,
    validate,
)
from .dilation import TruncatedDilation, schaffer_dilation, verify_order_extends_to_dilations
from .errors import *  # noqa: F401,F403
from .factorization import (
    Triangulation,
    factor_samples,
    is_regular_factorization,
    is_regular_pair,
    triangulate,
    verify_factorization_theorem,
)
from .fixtures import (
    FixtureSpec,
    approx_pair,
    cyclic_shift,
    jordan_block,
    jordan_sum_pair,
    random_contraction,
    shift_pair,
    sim_pair,
)
from .numerics import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    complement,
    contains,
    intersect,
    kernel_basis,
    range_basis,
    sum_spaces,
)
from .order import (
    cantor_bernstein,
    decide_relations,
    find_isometric_intertwiner,
    invariant_unitary_implies_reducing_check,
    recheck_certificate,
    sylvester_kernel,
    unitarily_equivalent,
    verify_theorem_general_n_finite,
    verify_unit_cnu_corollary,
)
from .singular_values import (
    contraction_corollary_check,
    equal_sv_range_lemma,
    horn_holds,
    horn_products,
)
from .suites import SUITES, run_suite
from .verdict import HOLDS, REFUTED, UNKNOWN, Budget, Certificate, OrderVerdict, Report

__version__ = "0.1.0"
