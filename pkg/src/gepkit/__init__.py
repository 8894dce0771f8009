"""Generation expansion planning with hourly variation limits.

Estimation from hourly records, sparse LP assembly for the chronological
and load-duration-block model families, desk-scale exact solving with
duals, free-MPS export/import, and the ablation/binding-dual experiments.
"""

from .core import (
    ALL_TECHS,
    GepError,
    IndexSets,
    ModelVariant,
    ParameterSet,
    TechKind,
    VARIATION_TECHS,
    ValidationReport,
    load_parameters,
    save_parameters,
    validate,
)
from .lp import LPModel
from .model import (
    build_conventional,
    build_iso_gep,
    build_cost_schedule,
    capacity_plan,
    depreciated_capacity_coeffs,
    load_duration_blocks,
    model_size,
    prorate_investment_cost,
)
from .mps import export_standard, export_chronological_stream, import_standard
from .solve import (
    ModelTooLargeError,
    Solution,
    check_feasibility,
    read_external_solution,
    solve_desk,
)
from .estimate import (
    EstimationConfig,
    EstimationError,
    average_daily_demand,
    capability_factor,
    demand_scenarios,
    enumerate_scenarios,
    estimate_parameters,
    growth_factor,
    initial_generation_bins,
    variation_limits,
)
from .experiments import (
    binding_report,
    compare_plans,
    drop_nonbinding_and_resolve,
    run_ablations,
)

__version__ = "0.1.0"
