"""Multi-band optical link quality-of-transmission engine.

Closed-form ISRS-aware Gaussian-noise modelling of per-channel ASE and
nonlinear interference, launch-power optimisation and per-band maximum-reach
and net-bit-rate planning for elastic optical networks.
"""

from .configio import ConfigError, LinkConfig, build_grid, load_config, parse_config
from .linkmodel import (
    AmplifierSpec,
    Channel,
    ChannelGrid,
    EtaCoefficients,
    FiberSpec,
    LaunchPlan,
    ModelError,
    NoiseBreakdown,
    NoiseTables,
    ase_power,
    db_to_linear,
    dbm_to_watts,
    dispersion_coefficients,
    eta_polynomial,
    eta_spm,
    eta_total,
    eta_xpm,
    grid_ase_power,
    interpolate_attenuation,
    linear_to_db,
    raman_gain_slope_profile,
    snr,
    watts_to_dbm,
)
from .planner import (
    Band,
    BandResult,
    BerThreshold,
    ModulationFormat,
    NumericError,
    ReachEntry,
    ReachReport,
    band_worst_snr,
    ber_psk,
    ber_qam,
    build_reach_report,
    catalog,
    default_thresholds,
    format_ber,
    get_format,
    max_reach,
    net_bit_rate,
    optimize_launch,
    snr_threshold,
    spans_from_snr,
)

__version__ = "0.1.0"

__all__ = [
    "AmplifierSpec",
    "Band",
    "BandResult",
    "BerThreshold",
    "Channel",
    "ChannelGrid",
    "ConfigError",
    "EtaCoefficients",
    "FiberSpec",
    "LaunchPlan",
    "LinkConfig",
    "ModelError",
    "ModulationFormat",
    "NoiseBreakdown",
    "NoiseTables",
    "NumericError",
    "ReachEntry",
    "ReachReport",
    "ase_power",
    "band_worst_snr",
    "ber_psk",
    "ber_qam",
    "build_grid",
    "build_reach_report",
    "catalog",
    "db_to_linear",
    "dbm_to_watts",
    "default_thresholds",
    "dispersion_coefficients",
    "eta_polynomial",
    "eta_spm",
    "eta_total",
    "eta_xpm",
    "format_ber",
    "get_format",
    "grid_ase_power",
    "interpolate_attenuation",
    "linear_to_db",
    "load_config",
    "max_reach",
    "net_bit_rate",
    "optimize_launch",
    "parse_config",
    "raman_gain_slope_profile",
    "snr",
    "snr_threshold",
    "spans_from_snr",
    "watts_to_dbm",
]
