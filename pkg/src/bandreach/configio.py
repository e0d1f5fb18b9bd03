"""Link-description configuration: parsing, validation and grid construction.

The configuration is flat structured text, one ``section.key = value`` pair
per line, `#` comments allowed.  Key names carry explicit unit suffixes
(``fiber.span_length_km``, ``amplifier.noise_figure_db``).  Unknown keys are
rejected, and a key whose stem matches a known key but whose unit suffix does
not raises an error naming the expected unit.  An empty configuration yields
the built-in defaults (standard single-mode fiber, 2720 slots of 12.5 GHz
around 200.67 THz, E/S/C/L band split).

Schema (defaults in parentheses):

    fiber.attenuation_anchors_nm_db_per_km   (1410:0.217, 1495:0.177, 1550:0.165, 1590:0.171)
    fiber.dispersion_ps_nm_km                (21.3)
    fiber.dispersion_slope_ps_nm2_km         (0.067)
    fiber.raman_peak_gain_per_w_km           (0.028)
    fiber.raman_peak_shift_thz               (13.0)
    fiber.gamma_per_w_km                     (1.2)
    fiber.span_length_km                     (100.0)
    fiber.reference_wavelength_nm            (1550.0)
    amplifier.noise_figure_db                (5.0)
    signal.center_frequency_thz              (200.67; exclusive with next)
    signal.center_wavelength_nm              (unset)
    signal.symbol_rate_gbaud                 (12.5)
    signal.channel_spacing_ghz               (12.5)
    signal.fsu_count                         (2720)
    signal.reference_bandwidth_ghz           (12.5)
    bands.e_nm / bands.s_nm / bands.c_nm / bands.l_nm
                                             (1365:1460 / 1460:1530 / 1530:1565 / 1565:1615)
    sweep.min_dbm / sweep.max_dbm / sweep.step_db
                                             (-25 / 10 / 0.25)
    reach.fixed_power_dbm                    (-7.5)
    thresholds.ber                           (4.7e-3, 1e-6, 1e-9)
    formats.names                            (BPSK, QPSK, 8QAM, 16QAM, 32QAM, 64QAM, 256QAM)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

from .linkmodel import (
    AmplifierSpec,
    Channel,
    ChannelGrid,
    FiberSpec,
    dispersion_coefficients,
    interpolate_attenuation,
)
from .planner import Band, catalog_names

BAND_ORDER = ("E", "S", "C", "L")

DEFAULT_ATTENUATION_ANCHORS = ((1410.0, 0.217), (1495.0, 0.177), (1550.0, 0.165), (1590.0, 0.171))
DEFAULT_BAND_RANGES_NM = {
    "E": (1365.0, 1460.0),
    "S": (1460.0, 1530.0),
    "C": (1530.0, 1565.0),
    "L": (1565.0, 1615.0),
}
DEFAULT_CENTER_FREQUENCY_THZ = 200.67
DEFAULT_FSU_COUNT = 2720
DEFAULT_THRESHOLDS = (4.7e-3, 1e-6, 1e-9)


class ConfigError(ValueError):
    """Malformed or invalid configuration text."""


@dataclass(frozen=True)
class LinkConfig:
    """Fully validated link description."""

    fiber: FiberSpec
    amplifier: AmplifierSpec
    center_frequency_hz: float
    symbol_rate_hz: float
    channel_spacing_hz: float
    fsu_count: int
    reference_bandwidth_hz: float
    band_ranges_nm: dict[str, tuple[float, float]]
    sweep_min_dbm: float
    sweep_max_dbm: float
    sweep_step_db: float
    fixed_power_dbm: float
    ber_thresholds: tuple[float, ...]
    format_names: tuple[str, ...]

    def sweep_powers_dbm(self) -> np.ndarray:
        """Launch-power grid [dBm]; the last point never exceeds the maximum."""
        n = int(math.floor((self.sweep_max_dbm - self.sweep_min_dbm)
                           / self.sweep_step_db + 1e-9))
        return self.sweep_min_dbm + self.sweep_step_db * np.arange(n + 1)


def _parse_float(raw: str, path: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{path}: expected a number, got {raw!r}") from None


def _parse_int(raw: str, path: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{path}: expected an integer, got {raw!r}") from None


def _parse_pair_list(raw: str, path: str) -> tuple[tuple[float, float], ...]:
    pairs = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" not in item:
            raise ConfigError(f"{path}: expected 'x:y' pairs, got {item!r}")
        a, b = item.split(":", 1)
        pairs.append((_parse_float(a, path), _parse_float(b, path)))
    if not pairs:
        raise ConfigError(f"{path}: empty list")
    return tuple(pairs)


def _parse_range(raw: str, path: str) -> tuple[float, float]:
    pairs = _parse_pair_list(raw, path)
    if len(pairs) != 1:
        raise ConfigError(f"{path}: expected a single 'lo:hi' range")
    lo, hi = pairs[0]
    if not lo < hi:
        raise ConfigError(f"{path}: range must satisfy lo < hi, got {lo}:{hi}")
    return lo, hi


def _parse_float_list(raw: str, path: str) -> tuple[float, ...]:
    values = tuple(_parse_float(v.strip(), path) for v in raw.split(",") if v.strip())
    if not values:
        raise ConfigError(f"{path}: empty list")
    return values


def _parse_name_list(raw: str, path: str) -> tuple[str, ...]:
    names = tuple(v.strip() for v in raw.split(",") if v.strip())
    if not names:
        raise ConfigError(f"{path}: empty list")
    return names


# key -> (stem, unit suffix); the stem is used to diagnose wrong-unit keys.
_KNOWN_KEYS = {
    "fiber.attenuation_anchors_nm_db_per_km": ("fiber.attenuation_anchors", "nm_db_per_km"),
    "fiber.dispersion_ps_nm_km": ("fiber.dispersion", "ps_nm_km"),
    "fiber.dispersion_slope_ps_nm2_km": ("fiber.dispersion_slope", "ps_nm2_km"),
    "fiber.raman_peak_gain_per_w_km": ("fiber.raman_peak_gain", "per_w_km"),
    "fiber.raman_peak_shift_thz": ("fiber.raman_peak_shift", "thz"),
    "fiber.gamma_per_w_km": ("fiber.gamma", "per_w_km"),
    "fiber.span_length_km": ("fiber.span_length", "km"),
    "fiber.reference_wavelength_nm": ("fiber.reference_wavelength", "nm"),
    "amplifier.noise_figure_db": ("amplifier.noise_figure", "db"),
    "signal.center_frequency_thz": ("signal.center_frequency", "thz"),
    "signal.center_wavelength_nm": ("signal.center_wavelength", "nm"),
    "signal.symbol_rate_gbaud": ("signal.symbol_rate", "gbaud"),
    "signal.channel_spacing_ghz": ("signal.channel_spacing", "ghz"),
    "signal.fsu_count": ("signal.fsu_count", ""),
    "signal.reference_bandwidth_ghz": ("signal.reference_bandwidth", "ghz"),
    "bands.e_nm": ("bands.e", "nm"),
    "bands.s_nm": ("bands.s", "nm"),
    "bands.c_nm": ("bands.c", "nm"),
    "bands.l_nm": ("bands.l", "nm"),
    "sweep.min_dbm": ("sweep.min", "dbm"),
    "sweep.max_dbm": ("sweep.max", "dbm"),
    "sweep.step_db": ("sweep.step", "db"),
    "reach.fixed_power_dbm": ("reach.fixed_power", "dbm"),
    "thresholds.ber": ("thresholds.ber", ""),
    "formats.names": ("formats.names", ""),
}


def _reject_unknown_key(key: str) -> None:
    for known, (stem, unit) in _KNOWN_KEYS.items():
        if key != known and (key == stem or key.startswith(stem + "_")) and unit:
            raise ConfigError(
                f"{key}: wrong or missing unit suffix, expected '{unit}' ({known})")
    raise ConfigError(f"unknown configuration key {key!r}")


def parse_config(text: str) -> LinkConfig:
    """Parse and fully validate configuration text; omitted keys default."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _KNOWN_KEYS:
            _reject_unknown_key(key)
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = raw

    def take(key, parser, default):
        if key in values:
            return parser(values[key], key)
        return default

    anchors = take("fiber.attenuation_anchors_nm_db_per_km", _parse_pair_list,
                   DEFAULT_ATTENUATION_ANCHORS)
    try:
        fiber = FiberSpec(
            attenuation_anchors=tuple(anchors),
            dispersion_ps_nm_km=take("fiber.dispersion_ps_nm_km", _parse_float, 21.3),
            dispersion_slope_ps_nm2_km=take("fiber.dispersion_slope_ps_nm2_km", _parse_float, 0.067),
            raman_peak_gain_per_w_km=take("fiber.raman_peak_gain_per_w_km", _parse_float, 0.028),
            raman_peak_shift_thz=take("fiber.raman_peak_shift_thz", _parse_float, 13.0),
            gamma_per_w_km=take("fiber.gamma_per_w_km", _parse_float, 1.2),
            span_length_km=take("fiber.span_length_km", _parse_float, 100.0),
            reference_wavelength_nm=take("fiber.reference_wavelength_nm", _parse_float, 1550.0),
        )
        amplifier = AmplifierSpec(
            noise_figure_db=take("amplifier.noise_figure_db", _parse_float, 5.0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    if "signal.center_frequency_thz" in values and "signal.center_wavelength_nm" in values:
        raise ConfigError(
            "signal.center_frequency_thz and signal.center_wavelength_nm are exclusive")
    if "signal.center_wavelength_nm" in values:
        wavelength = _parse_float(values["signal.center_wavelength_nm"],
                                  "signal.center_wavelength_nm")
        if wavelength <= 0:
            raise ConfigError("signal.center_wavelength_nm: must be > 0")
        center_frequency_hz = C_LIGHT / (wavelength * 1e-9)
    else:
        center_frequency_hz = take("signal.center_frequency_thz", _parse_float,
                                   DEFAULT_CENTER_FREQUENCY_THZ) * 1e12
    if center_frequency_hz <= 0:
        raise ConfigError("signal.center_frequency_thz: must be > 0")

    symbol_rate_hz = take("signal.symbol_rate_gbaud", _parse_float, 12.5) * 1e9
    channel_spacing_hz = take("signal.channel_spacing_ghz", _parse_float, 12.5) * 1e9
    fsu_count = take("signal.fsu_count", _parse_int, DEFAULT_FSU_COUNT)
    reference_bandwidth_hz = take("signal.reference_bandwidth_ghz", _parse_float, 12.5) * 1e9
    if fsu_count < 1:
        raise ConfigError(f"signal.fsu_count: must be >= 1, got {fsu_count}")
    if symbol_rate_hz <= 0 or channel_spacing_hz <= 0 or reference_bandwidth_hz <= 0:
        raise ConfigError("signal rates and bandwidths must be > 0")
    if channel_spacing_hz < symbol_rate_hz * (1 - 1e-12):
        raise ConfigError(
            f"signal.channel_spacing_ghz ({channel_spacing_hz / 1e9}) must be >= "
            f"signal.symbol_rate_gbaud ({symbol_rate_hz / 1e9})")

    band_ranges = {}
    for name in BAND_ORDER:
        band_ranges[name] = take(f"bands.{name.lower()}_nm", _parse_range,
                                 DEFAULT_BAND_RANGES_NM[name])
    for (a_name, b_name) in zip(BAND_ORDER, BAND_ORDER[1:]):
        if band_ranges[a_name][1] > band_ranges[b_name][0]:
            raise ConfigError(
                f"bands.{a_name.lower()}_nm overlaps bands.{b_name.lower()}_nm")

    sweep_min = take("sweep.min_dbm", _parse_float, -25.0)
    sweep_max = take("sweep.max_dbm", _parse_float, 10.0)
    sweep_step = take("sweep.step_db", _parse_float, 0.25)
    if not sweep_min < sweep_max:
        raise ConfigError(f"sweep.min_dbm ({sweep_min}) must be < sweep.max_dbm ({sweep_max})")
    if sweep_step <= 0:
        raise ConfigError(f"sweep.step_db must be > 0, got {sweep_step}")

    fixed_power_dbm = take("reach.fixed_power_dbm", _parse_float, -7.5)

    thresholds = take("thresholds.ber", _parse_float_list, DEFAULT_THRESHOLDS)
    for value in thresholds:
        if not 0.0 < value < 0.5:
            raise ConfigError(f"thresholds.ber: values must lie in (0, 0.5), got {value}")

    format_names = take("formats.names", _parse_name_list, catalog_names())
    known = set(catalog_names())
    for name in format_names:
        if name not in known:
            raise ConfigError(f"formats.names: unknown modulation format {name!r}")

    return LinkConfig(
        fiber=fiber,
        amplifier=amplifier,
        center_frequency_hz=center_frequency_hz,
        symbol_rate_hz=symbol_rate_hz,
        channel_spacing_hz=channel_spacing_hz,
        fsu_count=fsu_count,
        reference_bandwidth_hz=reference_bandwidth_hz,
        band_ranges_nm=band_ranges,
        sweep_min_dbm=sweep_min,
        sweep_max_dbm=sweep_max,
        sweep_step_db=sweep_step,
        fixed_power_dbm=fixed_power_dbm,
        ber_thresholds=tuple(thresholds),
        format_names=tuple(format_names),
    )


def load_config(path: str) -> LinkConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def build_grid(config: LinkConfig) -> tuple[ChannelGrid, tuple[Band, ...]]:
    """Construct the channel grid and its band partition.

    Channels sit at uniform spacing symmetric around the configured center
    frequency; each channel's attenuation is interpolated at its own
    wavelength.  Band membership follows the configured wavelength ranges: a
    channel exactly on an interior boundary goes to the shorter-wavelength
    band, and the outermost bands absorb any grid overhang beyond their
    nominal edges so that the bands always partition the grid.
    """
    n = config.fsu_count
    offsets = (np.arange(n) - (n - 1) / 2.0) * config.channel_spacing_hz
    frequencies = config.center_frequency_hz + offsets
    wavelengths = C_LIGHT / frequencies * 1e9

    beta2, beta3 = dispersion_coefficients(config.fiber, config.fiber.reference_wavelength_nm)
    cr_slope = config.fiber.raman_slope_per_w_km_thz / 1e3 / 1e12
    channels = tuple(
        Channel(
            index=i,
            center_frequency=float(frequencies[i]),
            bandwidth=config.symbol_rate_hz,
            alpha=interpolate_attenuation(config.fiber, float(wavelengths[i])) / 1e3,
        )
        for i in range(n)
    )
    grid = ChannelGrid(
        channels=channels,
        center_frequency=config.center_frequency_hz,
        beta2=beta2,
        beta3=beta3,
        cr_slope=cr_slope,
        gamma=config.fiber.gamma_per_w_km / 1e3,
    )

    # Channel index ascends with frequency, i.e. wavelength descends, so the
    # bands occupy contiguous index ranges in the order L, C, S, E.  A channel
    # exactly on an interior boundary stays on the shorter-wavelength side.
    bands = []
    start = 0
    for name in reversed(BAND_ORDER):
        if name == BAND_ORDER[0]:
            stop = n
        else:
            short_edge_nm = config.band_ranges_nm[name][0]
            # first index with wavelength <= the band's short-wavelength edge
            stop = int(np.searchsorted(-wavelengths, -short_edge_nm, side="left"))
        stop = max(stop, start)
        bands.append(Band(
            name=name,
            wavelength_range_nm=config.band_ranges_nm[name],
            member_channels=range(start, stop),
        ))
        start = stop
    bands_by_name = {band.name: band for band in bands}
    ordered = tuple(bands_by_name[name] for name in BAND_ORDER)

    covered = sum(len(band.member_channels) for band in ordered)
    if covered != n:
        raise ConfigError("band ranges do not partition the grid")
    return grid, ordered
