"""Robust transceiver and IRS phase design minimizing average MSE under
imperfect channel state information, plus a Monte Carlo sweep harness."""

from .ao import (
    AoConfig,
    AoTrace,
    SchemeKind,
    SchemeResult,
    discretize_design,
    initial_beamformer,
    run_ao,
    run_scheme,
    run_transceiver_only,
)
from .channel import (
    ChannelEstimate,
    ErrorStats,
    FadingParams,
    Geometry,
    LinkGains,
    SystemDims,
    draw_channels,
    draw_errors,
    los_components,
    path_loss,
    ula_response,
)
from .harness import (
    CSV_HEADER,
    ConfigError,
    ExperimentConfig,
    SummaryRow,
    SweepRecord,
    config_from_dict,
    dbm_to_watts,
    load_config,
    read_results,
    run_element_sweep,
    run_power_sweep,
    summarize,
    validate_config,
    watts_to_dbm,
    write_results,
)
from .objective import (
    Design,
    MseQuadratic,
    PhaseVector,
    build_quadratic,
    evaluate_mse,
    mc_mse_oracle,
    mc_mse_stats,
)
from .phases import (
    MmResult,
    PhaseSubproblem,
    build_subproblem,
    lambda_max_rank1,
    majorizer,
    mm_iterate,
)
from .transceiver import (
    BeamformerResult,
    BisectionConfig,
    update_beamformer,
    wiener_equalizer,
)

__all__ = [name for name in dir() if not name.startswith("_")]
