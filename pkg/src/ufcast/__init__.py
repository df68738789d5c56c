"""Time-series forecasting based on universal measures.

The finite-alphabet mixture of Krichevsky measures is extended to real
values through nested binary partitions; forecasts are the grid points of
highest conditional density.
"""
from .density import (
    AdaptiveDensity,
    ConditionalDensity,
    DensityConfig,
    Interval,
    Quantizer,
    RealSeries,
    WindowSpec,
    adaptive_density_log,
    adaptive_weights,
    lebesgue_log,
    quantize,
    r_density_conditional,
    r_density_log,
    resolution_level,
)
from .evaluation import (
    EvaluationReport,
    ExperimentPlan,
    SyntheticSource,
    entropy_rate,
    generate,
    inertial_forecast,
    mae,
    random_walk,
    run_evaluation,
)
from .forecast import (
    Forecast,
    ForecastConfig,
    candidate_grid,
    difference_transform,
    forecast_multi,
    forecast_one,
    forecast_path,
    integrate_differences,
    invert_difference,
)
from .kernel import BACKEND
from .measure import (
    Alphabet,
    ContextTree,
    MixtureConfig,
    SymbolSequence,
    empirical_log_loss,
    kt_block_log,
    kt_conditional,
    kt_sequential_log,
    omega_tail,
    omega_weight,
    r_conditional,
    r_measure_log,
)

__version__ = "0.1.0"
