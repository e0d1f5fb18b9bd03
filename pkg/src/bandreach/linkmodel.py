"""Physical-layer model of a multi-span, multi-band optical link.

Everything here is a pure function of its inputs.  Internally all physics is
done in SI units (Hz, W, m, s); the only non-SI surfaces are the fiber data
sheet (`FiberSpec`, which mirrors the usual nm / dB/km / ps/nm/km data-sheet
units) and the dB/dBm helpers.

The nonlinear-interference (NLI) coefficient of a channel is evaluated with a
closed-form Gaussian-noise (GN) model that accounts for the signal power tilt
caused by inter-channel stimulated Raman scattering (ISRS) through a linear
Raman gain slope.  Each channel sees a self-phase-modulation (SPM) term plus a
sum of cross-phase-modulation (XPM) terms, and noise from successive identical
spans adds incoherently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import h as PLANCK
from scipy.constants import pi

LN10 = math.log(10.0)

# Sanity window for attenuation lookups, generous enough for any E-to-L grid
# (the default grid spans roughly 1377-1632 nm); values far outside indicate
# a unit mistake rather than a fiber question.
ATTENUATION_DOMAIN_NM = (1360.0, 1640.0)


class ModelError(ValueError):
    """A physically meaningless operating point, e.g. unphysical span gain,
    zero dispersion inside the SPM closed form, inconsistent launch plan."""


def db_to_linear(value_db):
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)


def dbm_to_watts(power_dbm):
    return 10.0 ** (power_dbm / 10.0) * 1e-3


def watts_to_dbm(power_w):
    return 10.0 * np.log10(power_w / 1e-3)


@dataclass(frozen=True)
class FiberSpec:
    """Fiber data sheet in its native units.

    attenuation_anchors: ((wavelength nm, attenuation dB/km), ...) with
        strictly increasing wavelengths; between anchors the attenuation is
        linear in wavelength, outside it clamps to the nearest anchor.
    dispersion_ps_nm_km / dispersion_slope_ps_nm2_km: D and S at the
        reference wavelength.
    raman_peak_gain_per_w_km / raman_peak_shift_thz: Raman gain at the peak
        frequency shift; the gain profile is triangular below the peak shift
        and zero beyond it.
    gamma_per_w_km: nonlinear coefficient.
    span_length_km: length of one amplified span.
    reference_wavelength_nm: wavelength at which D and S are quoted.
    """

    attenuation_anchors: tuple[tuple[float, float], ...]
    dispersion_ps_nm_km: float
    dispersion_slope_ps_nm2_km: float
    raman_peak_gain_per_w_km: float
    raman_peak_shift_thz: float
    gamma_per_w_km: float
    span_length_km: float
    reference_wavelength_nm: float = 1550.0

    def __post_init__(self):
        if not self.attenuation_anchors:
            raise ValueError("attenuation_anchors must be non-empty")
        wavelengths = [w for w, _ in self.attenuation_anchors]
        if any(b <= a for a, b in zip(wavelengths, wavelengths[1:])):
            raise ValueError("attenuation anchor wavelengths must be strictly increasing")
        if any(a <= 0 for _, a in self.attenuation_anchors):
            raise ValueError("attenuation anchors must be positive")
        if self.span_length_km <= 0:
            raise ValueError(f"span_length_km must be > 0, got {self.span_length_km}")
        if self.gamma_per_w_km <= 0:
            raise ValueError(f"gamma_per_w_km must be > 0, got {self.gamma_per_w_km}")
        if self.raman_peak_shift_thz <= 0:
            raise ValueError(f"raman_peak_shift_thz must be > 0, got {self.raman_peak_shift_thz}")
        if self.reference_wavelength_nm <= 0:
            raise ValueError(
                f"reference_wavelength_nm must be > 0, got {self.reference_wavelength_nm}")

    @property
    def raman_slope_per_w_km_thz(self) -> float:
        """Raman gain slope in 1/(W km THz)."""
        return self.raman_peak_gain_per_w_km / self.raman_peak_shift_thz


@dataclass(frozen=True)
class AmplifierSpec:
    """Lumped amplifier, fully characterised by its noise figure."""

    noise_figure_db: float

    def __post_init__(self):
        if self.noise_figure_db <= 0:
            raise ValueError(f"noise_figure_db must be > 0, got {self.noise_figure_db}")

    @property
    def spontaneous_emission_factor(self) -> float:
        """n_sp from the high-gain relation NF = 2 n_sp; always >= 0.5."""
        return 10.0 ** (self.noise_figure_db / 10.0) / 2.0


@dataclass(frozen=True)
class Channel:
    """One frequency slot: absolute center frequency [Hz], bandwidth [Hz] and
    the fiber attenuation interpolated at its wavelength [1/m, linear]."""

    index: int
    center_frequency: float
    bandwidth: float
    alpha: float

    def __post_init__(self):
        if self.center_frequency <= 0:
            raise ValueError("channel center_frequency must be > 0")
        if self.bandwidth <= 0:
            raise ValueError("channel bandwidth must be > 0")
        if self.alpha <= 0:
            raise ValueError("channel alpha must be > 0")

    @property
    def wavelength_nm(self) -> float:
        return C_LIGHT / self.center_frequency * 1e9


@dataclass(frozen=True)
class ChannelGrid:
    """Immutable, gapless set of channels sorted by ascending frequency.

    center_frequency [Hz] is the f = 0 reference of the NLI formulas, beta2
    [s^2/m] and beta3 [s^3/m] the dispersion coefficients at the fiber
    reference wavelength, cr_slope [1/(W m Hz)] the Raman gain slope and
    gamma [1/(W m)] the nonlinear coefficient.
    """

    channels: tuple[Channel, ...]
    center_frequency: float
    beta2: float
    beta3: float
    cr_slope: float
    gamma: float

    def __post_init__(self):
        if not self.channels:
            raise ValueError("grid must contain at least one channel")
        if self.gamma < 0:
            raise ValueError("grid gamma must be >= 0")
        freqs = np.array([ch.center_frequency for ch in self.channels])
        bands = np.array([ch.bandwidth for ch in self.channels])
        alphas = np.array([ch.alpha for ch in self.channels])
        if len(freqs) > 1:
            spacing = np.diff(freqs)
            if np.any(spacing <= 0):
                raise ValueError("channels must be sorted by ascending frequency")
            if not np.allclose(spacing, spacing[0], rtol=1e-9):
                raise ValueError("channel spacing must be uniform")
            if np.any(spacing < bands[:-1] * (1 - 1e-9)):
                raise ValueError("channel spacing must be at least the channel bandwidth")
        for arr in (freqs, bands, alphas):
            arr.setflags(write=False)
        object.__setattr__(self, "_frequencies", freqs)
        object.__setattr__(self, "_bandwidths", bands)
        object.__setattr__(self, "_alphas", alphas)

    def __len__(self) -> int:
        return len(self.channels)

    @property
    def frequencies(self) -> np.ndarray:
        """Absolute center frequencies [Hz], ascending."""
        return self._frequencies

    @property
    def relative_frequencies(self) -> np.ndarray:
        """Frequencies relative to the grid center [Hz]."""
        return self._frequencies - self.center_frequency

    @property
    def bandwidths(self) -> np.ndarray:
        return self._bandwidths

    @property
    def alphas(self) -> np.ndarray:
        """Per-channel attenuation [1/m]."""
        return self._alphas

    @property
    def wavelengths_nm(self) -> np.ndarray:
        return C_LIGHT / self._frequencies * 1e9


@dataclass(frozen=True)
class LaunchPlan:
    """Uniform launch: every channel carries per_channel_power [W] and the
    co-propagating total is total_power [W]."""

    per_channel_power: float
    total_power: float

    def __post_init__(self):
        if self.per_channel_power <= 0 or self.total_power <= 0:
            raise ValueError("launch powers must be > 0")

    @classmethod
    def uniform(cls, per_channel_power_w: float, channel_count: int) -> "LaunchPlan":
        return cls(per_channel_power_w, per_channel_power_w * channel_count)

    @classmethod
    def uniform_dbm(cls, per_channel_dbm: float, channel_count: int) -> "LaunchPlan":
        return cls.uniform(dbm_to_watts(per_channel_dbm), channel_count)

    def check_matches(self, grid: ChannelGrid) -> None:
        expected = self.per_channel_power * len(grid)
        if not math.isclose(self.total_power, expected, rel_tol=1e-9):
            raise ModelError(
                f"launch plan total power {self.total_power} W does not equal "
                f"per-channel power x channel count ({expected} W)")


@dataclass(frozen=True)
class NoiseBreakdown:
    """Per-channel noise budget at one launch power and span count.

    p_ase and p_nli are single-span powers [W]; snr already includes the
    incoherent accumulation over span_count spans.
    """

    channel_index: int
    p_ase: float
    eta: float
    p_nli: float
    snr_linear: float
    snr_db: float
    span_count: int


def interpolate_attenuation(fiber: FiberSpec, wavelength_nm: float) -> float:
    """Attenuation at a wavelength, piecewise linear over the dB/km anchors
    and clamped to the nearest anchor outside their range.

    Returns the linear attenuation coefficient in 1/km.
    """
    lo, hi = ATTENUATION_DOMAIN_NM
    if not lo <= wavelength_nm <= hi:
        raise ModelError(
            f"wavelength {wavelength_nm} nm outside supported range [{lo}, {hi}] nm")
    anchors_nm = np.array([w for w, _ in fiber.attenuation_anchors])
    anchors_db = np.array([a for _, a in fiber.attenuation_anchors])
    alpha_db_km = float(np.interp(wavelength_nm, anchors_nm, anchors_db))
    return alpha_db_km * LN10 / 10.0


def dispersion_coefficients(fiber: FiberSpec, reference_wavelength_nm: float) -> tuple[float, float]:
    """(beta2 [s^2/m], beta3 [s^3/m]) from the data-sheet D and S.

    beta2 = -D lam^2 / (2 pi c) and beta3 = (lam^2 / (2 pi c))^2 (S + 2 D / lam).
    """
    if reference_wavelength_nm <= 0:
        raise ValueError("reference wavelength must be > 0")
    lam = reference_wavelength_nm * 1e-9
    d_si = fiber.dispersion_ps_nm_km * 1e-6           # ps/nm/km -> s/m^2
    s_si = fiber.dispersion_slope_ps_nm2_km * 1e3     # ps/nm^2/km -> s/m^3
    scale = lam**2 / (2 * pi * C_LIGHT)
    beta2 = -d_si * scale
    beta3 = scale**2 * (s_si + 2 * d_si / lam)
    return beta2, beta3


def raman_gain_slope_profile(fiber: FiberSpec, frequency_shift_thz: float) -> float:
    """Triangular Raman gain profile [1/(W km)].

    Linear in the shift up to the peak shift, zero beyond it, antisymmetric
    for negative shifts.
    """
    shift = abs(frequency_shift_thz)
    if shift > fiber.raman_peak_shift_thz:
        gain = 0.0
    else:
        gain = fiber.raman_slope_per_w_km_thz * shift
    return math.copysign(gain, frequency_shift_thz) if frequency_shift_thz != 0 else 0.0


def span_gain_linear(alpha_per_m: float, span_length_m: float) -> float:
    """Amplifier gain exactly compensating the span loss at this attenuation."""
    return math.exp(alpha_per_m * span_length_m)


def ase_power(channel: Channel, fiber: FiberSpec, amplifier: AmplifierSpec,
              noise_bandwidth_hz: float) -> float:
    """Single-span ASE power [W] in the noise bandwidth.

    P_ase = 2 n_sp h f (G - 1) B with the gain fully compensating the span
    loss at the channel's own attenuation.
    """
    gain = span_gain_linear(channel.alpha, fiber.span_length_km * 1e3)
    if gain < 1.0:
        raise ModelError(f"span gain {gain} below unity for channel {channel.index}")
    n_sp = amplifier.spontaneous_emission_factor
    return 2.0 * n_sp * PLANCK * channel.center_frequency * (gain - 1.0) * noise_bandwidth_hz


def _spm_bracket_terms(alpha: float, phi: float, bandwidth: float):
    """SPM arcsinh terms split into the T-linear decomposition.

    The bracket of the SPM closed form is (T - a^2)/a * asinh1 + (A^2 - T)/A
    * asinh2, which is linear in T; returns (q, r) with bracket = q T + r.
    """
    big_a = 2.0 * alpha
    asinh1 = math.asinh(phi * bandwidth**2 / (pi * alpha))
    asinh2 = math.asinh(phi * bandwidth**2 / (pi * big_a))
    q = asinh1 / alpha - asinh2 / big_a
    r = -alpha * asinh1 + big_a * asinh2
    return q, r


def eta_spm(channel: Channel, grid: ChannelGrid, plan: LaunchPlan) -> float:
    """Self-channel NLI coefficient [1/W^2] for one span.

    Closed form with phase factor phi = (2/3) pi^2 (beta2 + 2 pi beta3 f),
    f relative to the grid center, and ISRS tilt entering through
    T = (2 alpha - P_tot Cr f)^2.
    """
    plan.check_matches(grid)
    alpha = channel.alpha
    f_rel = channel.center_frequency - grid.center_frequency
    phi = (2.0 / 3.0) * pi**2 * (grid.beta2 + 2.0 * pi * grid.beta3 * f_rel)
    if phi == 0.0:
        raise ModelError(
            f"zero dispersion at channel {channel.index}; SPM closed form diverges")
    big_a = 2.0 * alpha
    t_i = (big_a - plan.total_power * grid.cr_slope * f_rel) ** 2
    q, r = _spm_bracket_terms(alpha, phi, channel.bandwidth)
    prefactor = (4.0 / 9.0) * (grid.gamma**2 / channel.bandwidth**2) * pi / (
        phi * alpha * (2.0 * alpha + alpha))
    return prefactor * (q * t_i + r)


def _xpm_term(alpha: float, phi_ik: float, t_k: float, bandwidth_k: float,
              gamma: float) -> float:
    """One interferer's contribution to the XPM sum (unit power ratio)."""
    big_a = 2.0 * alpha
    bracket = ((t_k - alpha**2) / alpha * math.atan(phi_ik * bandwidth_k / alpha)
               + (big_a**2 - t_k) / big_a * math.atan(phi_ik * bandwidth_k / big_a))
    return (32.0 / 27.0) * gamma**2 / (
        bandwidth_k * phi_ik * alpha * (2.0 * alpha + alpha)) * bracket


def eta_xpm(channel: Channel, grid: ChannelGrid, plan: LaunchPlan,
            interferer_powers: np.ndarray | None = None) -> float:
    """Cross-channel NLI coefficient [1/W^2] for one span.

    Sums the closed-form XPM term over every other channel, with phase factor
    phi_ik = 2 pi^2 (f_k - f_i)(beta2 + pi beta3 (f_k + f_i)) and the
    interferer-frequency ISRS tilt T_k.  Under the uniform launch plan the
    power ratio (P_k / P_i)^2 is one; `interferer_powers` overrides the
    per-interferer powers (indexed like the grid) for non-uniform studies.
    A vanishing phi_ik (possible only on synthetic dispersion profiles) drops
    that term.
    """
    plan.check_matches(grid)
    alpha = channel.alpha
    f_i = channel.center_frequency - grid.center_frequency
    gamma = grid.gamma
    big_a = 2.0 * alpha
    total = 0.0
    for k, other in enumerate(grid.channels):
        if other.index == channel.index:
            continue
        f_k = other.center_frequency - grid.center_frequency
        phi_ik = 2.0 * pi**2 * (f_k - f_i) * (grid.beta2 + pi * grid.beta3 * (f_k + f_i))
        if phi_ik == 0.0:
            continue
        t_k = (big_a - plan.total_power * grid.cr_slope * f_k) ** 2
        ratio_sq = 1.0
        if interferer_powers is not None:
            ratio_sq = (interferer_powers[k] / plan.per_channel_power) ** 2
        total += ratio_sq * _xpm_term(alpha, phi_ik, t_k, other.bandwidth, gamma)
    return total


def eta_total(channel: Channel, grid: ChannelGrid, plan: LaunchPlan,
              span_count: int) -> float:
    """NLI coefficient accumulated incoherently over identical spans.

    With per-channel gain fully compensating each span, the launch into every
    span equals the plan power, so the per-span coefficients simply add:
    eta_total = N (eta_spm + eta_xpm).
    """
    if span_count < 1:
        raise ValueError(f"span_count must be >= 1, got {span_count}")
    return span_count * (eta_spm(channel, grid, plan) + eta_xpm(channel, grid, plan))


def snr(channel: Channel, plan: LaunchPlan, p_ase: float, eta_single_span: float,
        span_count: int) -> NoiseBreakdown:
    """SNR with incoherent per-span accumulation of both ASE and NLI.

    SNR = P / (N P_ase + N eta_1 P^3).
    """
    if span_count < 1:
        raise ValueError(f"span_count must be >= 1, got {span_count}")
    power = plan.per_channel_power
    p_nli = eta_single_span * power**3
    snr_linear = power / (span_count * (p_ase + p_nli))
    return NoiseBreakdown(
        channel_index=channel.index,
        p_ase=p_ase,
        eta=eta_single_span,
        p_nli=p_nli,
        snr_linear=snr_linear,
        snr_db=linear_to_db(snr_linear),
        span_count=span_count,
    )


# ---------------------------------------------------------------------------
# Vectorised whole-grid evaluation.
#
# The launch power enters the closed form only through T = (A - P_tot Cr f)^2,
# which is quadratic in P_tot, so the per-channel eta is a fixed quadratic
# polynomial in the total power.  The O(N^2) interferer sums are folded once
# into the three polynomial coefficient arrays and every point of a power
# sweep afterwards costs O(N).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EtaCoefficients:
    """Per-channel eta(P_tot) = base + linear P_tot + quad P_tot^2 [1/W^2]."""

    base: np.ndarray
    linear: np.ndarray
    quad: np.ndarray

    def __post_init__(self):
        for arr in (self.base, self.linear, self.quad):
            arr.setflags(write=False)

    def evaluate(self, total_power_w: float) -> np.ndarray:
        return self.base + self.linear * total_power_w + self.quad * total_power_w**2


def eta_polynomial(grid: ChannelGrid, chunk_size: int = 256) -> EtaCoefficients:
    """Fold the SPM term and the XPM interferer sums into power polynomials.

    Equivalent to evaluating eta_spm + eta_xpm per channel; rows are processed
    in chunks to bound the working set.  Safe to call concurrently, the grid
    is never mutated.
    """
    n = len(grid)
    f_rel = grid.relative_frequencies
    alphas = grid.alphas
    bandwidths = grid.bandwidths
    gamma = grid.gamma
    crs = grid.cr_slope

    phi_i = (2.0 / 3.0) * pi**2 * (grid.beta2 + 2.0 * pi * grid.beta3 * f_rel)
    if np.any(phi_i == 0.0):
        bad = int(np.flatnonzero(phi_i == 0.0)[0])
        raise ModelError(f"zero dispersion at channel {bad}; SPM closed form diverges")

    big_a = 2.0 * alphas
    asinh1 = np.arcsinh(phi_i * bandwidths**2 / (pi * alphas))
    asinh2 = np.arcsinh(phi_i * bandwidths**2 / (pi * big_a))
    q_spm = asinh1 / alphas - asinh2 / big_a
    r_spm = -alphas * asinh1 + big_a * asinh2
    pref_spm = (4.0 / 9.0) * (gamma**2 / bandwidths**2) * pi / (
        phi_i * alphas * (2.0 * alphas + alphas))

    base = pref_spm * (big_a**2 * q_spm + r_spm)
    lin = pref_spm * (-2.0 * big_a * crs * f_rel * q_spm)
    quad = pref_spm * (crs**2 * f_rel**2 * q_spm)

    for start in range(0, n, chunk_size):
        stop = min(start + chunk_size, n)
        fi = f_rel[start:stop, None]
        ai = alphas[start:stop, None]
        big_ai = 2.0 * ai
        fk = f_rel[None, :]
        bk = bandwidths[None, :]
        phi_ik = 2.0 * pi**2 * (fk - fi) * (grid.beta2 + pi * grid.beta3 * (fk + fi))
        self_mask = np.zeros((stop - start, n), dtype=bool)
        self_mask[np.arange(stop - start), np.arange(start, stop)] = True
        live = ~self_mask & (phi_ik != 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            coeff = np.where(
                live,
                (32.0 / 27.0) * gamma**2 / (bk * phi_ik * ai * (2.0 * ai + ai)),
                0.0)
            atan1 = np.arctan(phi_ik * bk / ai)
            atan2 = np.arctan(phi_ik * bk / big_ai)
        q_k = atan1 / ai - atan2 / big_ai
        r_k = -ai * atan1 + big_ai * atan2
        base[start:stop] += np.sum(coeff * (big_ai**2 * q_k + r_k), axis=1)
        lin[start:stop] += np.sum(coeff * (-2.0 * big_ai * crs * fk * q_k), axis=1)
        quad[start:stop] += np.sum(coeff * (crs**2 * fk**2 * q_k), axis=1)

    return EtaCoefficients(base=base, linear=lin, quad=quad)


def grid_ase_power(grid: ChannelGrid, fiber: FiberSpec, amplifier: AmplifierSpec,
                   noise_bandwidth_hz: float) -> np.ndarray:
    """Per-channel single-span ASE power [W] for the whole grid."""
    gains = np.exp(grid.alphas * fiber.span_length_km * 1e3)
    if np.any(gains < 1.0):
        raise ModelError("span gain below unity")
    n_sp = amplifier.spontaneous_emission_factor
    return 2.0 * n_sp * PLANCK * grid.frequencies * (gains - 1.0) * noise_bandwidth_hz


@dataclass(frozen=True)
class NoiseTables:
    """Precomputed per-channel noise ingredients of one link configuration.

    Immutable; all methods are pure, so sweeps may be parallelised freely.
    """

    grid: ChannelGrid
    p_ase: np.ndarray
    eta_coefficients: EtaCoefficients

    def __post_init__(self):
        self.p_ase.setflags(write=False)

    @classmethod
    def build(cls, grid: ChannelGrid, fiber: FiberSpec, amplifier: AmplifierSpec,
              noise_bandwidth_hz: float) -> "NoiseTables":
        return cls(
            grid=grid,
            p_ase=grid_ase_power(grid, fiber, amplifier, noise_bandwidth_hz),
            eta_coefficients=eta_polynomial(grid),
        )

    def eta(self, total_power_w: float) -> np.ndarray:
        """Per-channel single-span NLI coefficient [1/W^2] at a total power."""
        return self.eta_coefficients.evaluate(total_power_w)

    def snr_linear(self, per_channel_power_w: float, span_count: int = 1) -> np.ndarray:
        if span_count < 1:
            raise ValueError(f"span_count must be >= 1, got {span_count}")
        power = per_channel_power_w
        eta = self.eta(power * len(self.grid))
        return power / (span_count * (self.p_ase + eta * power**3))

    def snr_db(self, per_channel_power_w: float, span_count: int = 1) -> np.ndarray:
        return linear_to_db(self.snr_linear(per_channel_power_w, span_count))

    def breakdown(self, channel_index: int, per_channel_power_w: float,
                  span_count: int = 1) -> NoiseBreakdown:
        power = per_channel_power_w
        eta = float(self.eta(power * len(self.grid))[channel_index])
        p_nli = eta * power**3
        snr_linear = power / (span_count * (float(self.p_ase[channel_index]) + p_nli))
        return NoiseBreakdown(
            channel_index=channel_index,
            p_ase=float(self.p_ase[channel_index]),
            eta=eta,
            p_nli=p_nli,
            snr_linear=snr_linear,
            snr_db=linear_to_db(snr_linear),
            span_count=span_count,
        )
