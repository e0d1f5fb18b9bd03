"""Operator-facing planning: BER/SNR conversion, per-band launch optimisation,
maximum reach and net bit rates.

BER curves follow the additive-white-Gaussian-noise expressions for PSK and
square QAM; the two rectangular constellations in the catalog (8QAM, 32QAM)
reuse the square-QAM expression with their irrational sqrt(cardinality).  SNR
thresholds are obtained by bisecting the monotone BER curve on the dB axis.

Reach follows the incoherent span-accumulation rule: a band sustains N spans
when its worst slot's single-span SNR exceeds the threshold by 10 log10(N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import erfc

from .linkmodel import NoiseTables, dbm_to_watts

SNR_BISECTION_BRACKET_DB = (-10.0, 50.0)
SNR_BISECTION_RESOLUTION_DB = 1e-3


class NumericError(RuntimeError):
    """A numeric procedure failed to converge or to bracket its target."""


@dataclass(frozen=True)
class Band:
    """A named wavelength band and its contiguous slice of the grid."""

    name: str
    wavelength_range_nm: tuple[float, float]
    member_channels: range

    def __post_init__(self):
        lo, hi = self.wavelength_range_nm
        if not lo < hi:
            raise ValueError(f"band {self.name}: wavelength range must satisfy lo < hi")


@dataclass(frozen=True)
class ModulationFormat:
    """Constellation description plus the FEC code rate used at the pre-FEC
    BER threshold (net rate = raw rate x code rate, floored to Gb/s)."""

    name: str
    family: str
    cardinality: int
    bits_per_symbol: int
    fec_code_rate: Fraction = Fraction(23, 25)

    def __post_init__(self):
        if self.family not in ("PSK", "QAM"):
            raise ValueError(f"unknown modulation family {self.family!r}")
        if self.cardinality != 2 ** self.bits_per_symbol:
            raise ValueError(
                f"{self.name}: cardinality {self.cardinality} is not "
                f"2^{self.bits_per_symbol}")
        if self.family == "QAM" and self.cardinality < 4:
            raise ValueError(f"{self.name}: QAM requires cardinality >= 4")


@dataclass(frozen=True)
class BerThreshold:
    """A BER target; the overhead factor is 1 when no FEC is assumed."""

    value: float
    fec_overhead_factor: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.value < 0.5:
            raise ValueError(f"BER threshold must lie in (0, 0.5), got {self.value}")
        if self.fec_overhead_factor < 1.0:
            raise ValueError("fec_overhead_factor must be >= 1")

    @property
    def needs_fec(self) -> bool:
        return self.fec_overhead_factor > 1.0


# Published single-slot net rates pin the code rates: 23/25 for BPSK through
# 32QAM, 14/15 for 64QAM and 93/100 for 256QAM.
_CATALOG = (
    ModulationFormat("BPSK", "PSK", 2, 1),
    ModulationFormat("QPSK", "PSK", 4, 2),
    ModulationFormat("8QAM", "QAM", 8, 3),
    ModulationFormat("16QAM", "QAM", 16, 4),
    ModulationFormat("32QAM", "QAM", 32, 5),
    ModulationFormat("64QAM", "QAM", 64, 6, Fraction(14, 15)),
    ModulationFormat("256QAM", "QAM", 256, 8, Fraction(93, 100)),
)
_CATALOG_BY_NAME = {fmt.name: fmt for fmt in _CATALOG}

PRE_FEC_OVERHEAD = float(Fraction(25, 23))


def catalog() -> tuple[ModulationFormat, ...]:
    """All supported formats, ascending bits per symbol."""
    return _CATALOG


def catalog_names() -> tuple[str, ...]:
    return tuple(fmt.name for fmt in _CATALOG)


def get_format(name: str) -> ModulationFormat:
    try:
        return _CATALOG_BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown modulation format {name!r}") from None


def default_thresholds() -> tuple[BerThreshold, ...]:
    """The three conventional planning thresholds."""
    return (
        BerThreshold(4.7e-3, PRE_FEC_OVERHEAD),
        BerThreshold(1e-6),
        BerThreshold(1e-9),
    )


def make_threshold(value: float) -> BerThreshold:
    """Threshold with the standard convention: FEC only at pre-FEC targets.

    Targets above 1e-4 are treated as pre-FEC operating points.
    """
    if value > 1e-4:
        return BerThreshold(value, PRE_FEC_OVERHEAD)
    return BerThreshold(value)


def ber_psk(snr_linear, bits_per_symbol: int,
            reference_bandwidth_hz: float = 12.5e9,
            channel_bandwidth_hz: float = 12.5e9):
    """PSK bit error rate: 0.5 erfc(sqrt(SNR / bits x Bref / Bch))."""
    if bits_per_symbol < 1:
        raise ValueError("bits_per_symbol must be >= 1")
    ratio = reference_bandwidth_hz / channel_bandwidth_hz
    return 0.5 * erfc(np.sqrt(np.asarray(snr_linear) / bits_per_symbol * ratio))


def ber_qam(snr_linear, cardinality: int,
            reference_bandwidth_hz: float = 12.5e9,
            channel_bandwidth_hz: float = 12.5e9):
    """QAM bit error rate:

    (1/bits)(1 - 1/sqrt(M)) erfc(sqrt(3 SNR / (2 (M - 1)) x Bref / Bch)).
    """
    if cardinality < 4 or cardinality & (cardinality - 1):
        raise ValueError(f"QAM cardinality must be a power of two >= 4, got {cardinality}")
    bits = int(math.log2(cardinality))
    ratio = reference_bandwidth_hz / channel_bandwidth_hz
    coeff = (1.0 / bits) * (1.0 - 1.0 / math.sqrt(cardinality))
    return coeff * erfc(np.sqrt(3.0 * np.asarray(snr_linear) / (2.0 * (cardinality - 1)) * ratio))


def format_ber(fmt: ModulationFormat, snr_linear,
               reference_bandwidth_hz: float = 12.5e9,
               channel_bandwidth_hz: float = 12.5e9):
    if fmt.family == "PSK":
        return ber_psk(snr_linear, fmt.bits_per_symbol,
                       reference_bandwidth_hz, channel_bandwidth_hz)
    return ber_qam(snr_linear, fmt.cardinality,
                   reference_bandwidth_hz, channel_bandwidth_hz)


def snr_threshold(fmt: ModulationFormat, threshold: BerThreshold,
                  reference_bandwidth_hz: float = 12.5e9,
                  channel_bandwidth_hz: float = 12.5e9) -> float:
    """SNR [dB] at which the format reaches the BER threshold.

    Bisection on the dB axis inside a -10..50 dB bracket, converged well
    below 0.01 dB; raises NumericError when the target is not bracketed
    (e.g. a BER target above the format's zero-SNR error rate).
    """
    lo, hi = SNR_BISECTION_BRACKET_DB

    def excess(snr_db: float) -> float:
        return float(format_ber(fmt, 10.0 ** (snr_db / 10.0),
                                reference_bandwidth_hz, channel_bandwidth_hz)) - threshold.value

    f_lo = excess(lo)
    f_hi = excess(hi)
    if not (f_lo > 0.0 > f_hi or f_lo == 0.0 or f_hi == 0.0):
        raise NumericError(
            f"BER target {threshold.value} not bracketed for {fmt.name} "
            f"within {lo}..{hi} dB")
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    while hi - lo > SNR_BISECTION_RESOLUTION_DB:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BandResult:
    """Outcome of a launch-power sweep for one band."""

    band: Band
    optimal_launch_dbm: float
    max_snr_db: float
    worst_channel_index: int


@dataclass(frozen=True)
class ReachEntry:
    band_name: str
    format_name: str
    ber_threshold: float
    snr_threshold_db: float
    reach_spans: int
    net_bit_rate_gbps: int


@dataclass(frozen=True)
class ReachReport:
    entries: tuple[ReachEntry, ...]

    def lookup(self, band_name: str, format_name: str, ber_threshold: float) -> ReachEntry:
        for entry in self.entries:
            if (entry.band_name == band_name and entry.format_name == format_name
                    and math.isclose(entry.ber_threshold, ber_threshold, rel_tol=1e-12)):
                return entry
        raise KeyError((band_name, format_name, ber_threshold))


def band_worst_snr(band: Band, tables: NoiseTables, per_channel_power_dbm: float,
                   span_count: int = 1) -> tuple[float, int]:
    """Minimum SNR [dB] over the band's slots and the index achieving it."""
    if len(band.member_channels) == 0:
        raise ValueError(f"band {band.name} has no member channels")
    snr_db = tables.snr_db(dbm_to_watts(per_channel_power_dbm), span_count)
    members = np.asarray(band.member_channels)
    local = np.argmin(snr_db[members])
    worst = int(members[local])
    return float(snr_db[worst]), worst


def optimize_launch(band: Band, tables: NoiseTables, sweep_dbm: np.ndarray) -> BandResult:
    """Launch power maximising the band's worst-slot SNR over the sweep.

    Ties break toward the lower power.
    """
    sweep = np.asarray(sweep_dbm, dtype=float)
    if sweep.size == 0:
        raise ValueError("sweep must be non-empty")
    best_snr = -math.inf
    best_power = sweep[0]
    best_idx = -1
    for power in sweep:
        snr_db, worst = band_worst_snr(band, tables, float(power))
        if snr_db > best_snr:
            best_snr = snr_db
            best_power = float(power)
            best_idx = worst
    return BandResult(band=band, optimal_launch_dbm=best_power,
                      max_snr_db=best_snr, worst_channel_index=best_idx)


def spans_from_snr(snr_single_span_db: float, snr_threshold_db: float) -> int:
    """Largest span count whose accumulated SNR still meets the threshold.

    Under incoherent accumulation SNR(N) = SNR(1) - 10 log10 N, so the reach
    is floor(10^((SNR1 - SNRth)/10)), zero when one span already fails.
    """
    margin_db = snr_single_span_db - snr_threshold_db
    if margin_db < 0.0:
        return 0
    spans = int(math.floor(10.0 ** (margin_db / 10.0)))
    # guard the floor against representation error at exact integer margins
    while snr_single_span_db - 10.0 * math.log10(spans + 1) >= snr_threshold_db:
        spans += 1
    while spans > 0 and snr_single_span_db - 10.0 * math.log10(spans) < snr_threshold_db:
        spans -= 1
    return spans


def max_reach(band: Band, tables: NoiseTables, snr_threshold_db: float,
              fixed_power_dbm: float) -> int:
    """Maximum span count for a band at a fixed per-channel launch power."""
    snr1_db, _ = band_worst_snr(band, tables, fixed_power_dbm, span_count=1)
    return spans_from_snr(snr1_db, snr_threshold_db)


def net_bit_rate(fmt: ModulationFormat, threshold: BerThreshold,
                 symbol_rate_baud: float = 12.5e9) -> int:
    """Net rate [Gb/s] in one slot over two polarisations, floored to integer.

    Raw rate is 2 x bits/symbol x symbol rate; at pre-FEC thresholds the
    format's code rate scales it down, otherwise it passes through.
    """
    raw_gbps = 2.0 * fmt.bits_per_symbol * symbol_rate_baud / 1e9
    if threshold.needs_fec:
        return int(math.floor(Fraction(raw_gbps) * fmt.fec_code_rate))
    return int(math.floor(raw_gbps))


def build_reach_report(tables: NoiseTables, bands: tuple[Band, ...],
                       formats: tuple[ModulationFormat, ...],
                       thresholds: tuple[BerThreshold, ...],
                       fixed_power_dbm: float,
                       per_band_optimum: bool = False,
                       sweep_dbm: np.ndarray | None = None,
                       reference_bandwidth_hz: float = 12.5e9,
                       channel_bandwidth_hz: float = 12.5e9,
                       symbol_rate_baud: float = 12.5e9) -> ReachReport:
    """Cartesian reach table over bands x formats x thresholds.

    Bands keep their given order, formats are sorted by ascending bits per
    symbol.  The single-span SNR per band is taken at the fixed launch power,
    or at each band's own sweep optimum when per_band_optimum is set.
    """
    formats = tuple(sorted(formats, key=lambda f: f.bits_per_symbol))
    basis_snr = {}
    for band in bands:
        if per_band_optimum:
            if sweep_dbm is None:
                raise ValueError("per-band optimum requires a sweep")
            result = optimize_launch(band, tables, sweep_dbm)
            basis_snr[band.name] = result.max_snr_db
        else:
            basis_snr[band.name], _ = band_worst_snr(band, tables, fixed_power_dbm)

    entries = []
    for threshold in thresholds:
        format_thresholds = {
            fmt.name: snr_threshold(fmt, threshold,
                                    reference_bandwidth_hz, channel_bandwidth_hz)
            for fmt in formats}
        for band in bands:
            for fmt in formats:
                th_db = format_thresholds[fmt.name]
                entries.append(ReachEntry(
                    band_name=band.name,
                    format_name=fmt.name,
                    ber_threshold=threshold.value,
                    snr_threshold_db=th_db,
                    reach_spans=spans_from_snr(basis_snr[band.name], th_db),
                    net_bit_rate_gbps=net_bit_rate(fmt, threshold, symbol_rate_baud),
                ))
    return ReachReport(entries=tuple(entries))
