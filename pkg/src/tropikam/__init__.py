"""Critical values, barriers, Aubry sets, weak KAM pairs, transport and
minimizing measures for finite cost kernels.

The core pipeline: normalize a kernel to zero cycle mean, compute the
Peierls barrier and the Aubry structure, build admissible potential
pairs, solve the primal/dual transport problems for the barrier cost,
minimize over stationary couplings, and realize the minimizers as
Markov chains whose orbit averages verify the theory empirically.
"""

from .config import Tolerances, DEFAULT_TOLERANCES
from .errors import (
    DimensionError,
    InconsistencyError,
    KernelFormatError,
    LipschitzError,
    NormalizationError,
    TropikamError,
)
from .minplus import (
    CostKernel,
    min_mean_cycle,
    normalize,
    oscillation,
    power_bound,
    shortest_walk_closure,
    tropical_power,
    tropical_product,
)
from .barrier import (
    BarrierData,
    check_barrier_composition,
    check_cost_axioms,
    peierls_barrier,
    peierls_barrier_oracle,
)
from .weakkam import (
    KamPair,
    barrier_row,
    c_lipschitz_violation,
    check_pair_characterization,
    complete_pair,
    is_a_lipschitz,
    is_admissible_pair,
    lax_oleinik_minus,
    lax_oleinik_plus,
    pair_from_lipschitz,
    random_c_lipschitz,
)
from .transport import (
    Coupling,
    check_duality,
    check_support,
    converse_measure,
    dirac,
    dual_value,
    factor_through_aubry,
    glue_couplings,
    kantorovich_rubinstein,
    solve_primal,
    uniform,
    validate_measure,
    var_char_pair,
)
from .mather import (
    StationaryCoupling,
    cycle_coupling,
    generating_family,
    recurrent_edge_core,
    solve_mather,
    stationary_minimum,
    tight_edges,
    verify_minimizer_characterization,
)
from .ergodic import (
    MarkovRealization,
    OrbitSample,
    birkhoff_average,
    birkhoff_deviation,
    empirical_two_step,
    markov_from_coupling,
    occupation_frequencies,
    orbit_in_d,
    recurrent_classes,
    sample_orbit,
    total_variation,
    two_step_frequencies,
)
from .lagrangian import (
    LagrangianSpec,
    action_kernel,
    free_particle_closed_form,
    parse_lagrangian,
)
from .costfile import load_cost, save_cost

__version__ = "0.1.0"

__all__ = [
    "BarrierData",
    "CostKernel",
    "Coupling",
    "DEFAULT_TOLERANCES",
    "DimensionError",
    "InconsistencyError",
    "KamPair",
    "KernelFormatError",
    "LagrangianSpec",
    "LipschitzError",
    "MarkovRealization",
    "NormalizationError",
    "OrbitSample",
    "StationaryCoupling",
    "Tolerances",
    "TropikamError",
    "action_kernel",
    "barrier_row",
    "birkhoff_average",
    "birkhoff_deviation",
    "c_lipschitz_violation",
    "check_barrier_composition",
    "check_cost_axioms",
    "check_duality",
    "check_pair_characterization",
    "check_support",
    "complete_pair",
    "converse_measure",
    "cycle_coupling",
    "dirac",
    "dual_value",
    "empirical_two_step",
    "factor_through_aubry",
    "free_particle_closed_form",
    "generating_family",
    "glue_couplings",
    "is_a_lipschitz",
    "is_admissible_pair",
    "kantorovich_rubinstein",
    "lax_oleinik_minus",
    "lax_oleinik_plus",
    "load_cost",
    "markov_from_coupling",
    "min_mean_cycle",
    "normalize",
    "occupation_frequencies",
    "orbit_in_d",
    "oscillation",
    "pair_from_lipschitz",
    "parse_lagrangian",
    "peierls_barrier",
    "peierls_barrier_oracle",
    "power_bound",
    "random_c_lipschitz",
    "recurrent_classes",
    "recurrent_edge_core",
    "sample_orbit",
    "save_cost",
    "shortest_walk_closure",
    "solve_mather",
    "solve_primal",
    "stationary_minimum",
    "tight_edges",
    "total_variation",
    "tropical_power",
    "tropical_product",
    "two_step_frequencies",
    "uniform",
    "validate_measure",
    "var_char_pair",
    "verify_minimizer_characterization",
]
