import math

import numpy as np
import pytest

from bandreach import (
    AmplifierSpec,
    Channel,
    ChannelGrid,
    FiberSpec,
    LaunchPlan,
    ModelError,
    ase_power,
    band_worst_snr,
    dispersion_coefficients,
    eta_polynomial,
    eta_spm,
    eta_total,
    eta_xpm,
    interpolate_attenuation,
    raman_gain_slope_profile,
    snr,
)

LN10 = math.log(10.0)

FIBER = FiberSpec(
    attenuation_anchors=((1410.0, 0.217), (1495.0, 0.177), (1550.0, 0.165), (1590.0, 0.171)),
    dispersion_ps_nm_km=21.3,
    dispersion_slope_ps_nm2_km=0.067,
    raman_peak_gain_per_w_km=0.028,
    raman_peak_shift_thz=13.0,
    gamma_per_w_km=1.2,
    span_length_km=100.0,
)
AMP = AmplifierSpec(noise_figure_db=5.0)

# hand-evaluated golden: 2 n_sp h f (G - 1) B at 1550 nm, 0.165 dB/km,
# 100 km, NF 5 dB, B 12.5 GHz, h = 6.62607015e-34 J s
ASE_GOLDEN_W = 2.2121874354929267e-07
# hand-evaluated from beta2 = -D lam^2 / (2 pi c), c = 299792458 m/s
BETA2_GOLDEN = -2.716704664924337e-26
BETA3_GOLDEN = 1.537033481614135e-40


def make_channel(wavelength_nm=1550.0, bandwidth=12.5e9, index=0):
    freq = 299792458.0 / (wavelength_nm * 1e-9)
    alpha = interpolate_attenuation(FIBER, wavelength_nm) / 1e3
    return Channel(index=index, center_frequency=freq, bandwidth=bandwidth, alpha=alpha)


class TestAttenuation:
    def test_reference_wavelength_value(self):
        alpha = interpolate_attenuation(FIBER, 1550.0)
        assert alpha == pytest.approx(0.165 * LN10 / 10.0, rel=1e-12)
        assert alpha == pytest.approx(0.0380, abs=5e-5)

    def test_anchor_hit(self):
        assert interpolate_attenuation(FIBER, 1410.0) == pytest.approx(
            0.217 * LN10 / 10.0, rel=1e-12)

    def test_midpoint_between_anchors(self):
        # 1452.5 nm is midway between the 1410 and 1495 anchors
        assert interpolate_attenuation(FIBER, 1452.5) == pytest.approx(
            0.197 * LN10 / 10.0, rel=1e-12)

    def test_clamps_outside_anchor_range(self):
        assert interpolate_attenuation(FIBER, 1380.0) == pytest.approx(
            0.217 * LN10 / 10.0, rel=1e-12)
        assert interpolate_attenuation(FIBER, 1630.0) == pytest.approx(
            0.171 * LN10 / 10.0, rel=1e-12)

    def test_domain_error_names_value(self):
        with pytest.raises(ModelError, match="1200"):
            interpolate_attenuation(FIBER, 1200.0)
        with pytest.raises(ModelError, match="1700.5"):
            interpolate_attenuation(FIBER, 1700.5)


class TestDispersion:
    def test_golden_values_at_1550(self):
        beta2, beta3 = dispersion_coefficients(FIBER, 1550.0)
        assert beta2 == pytest.approx(BETA2_GOLDEN, rel=1e-9)
        assert beta3 == pytest.approx(BETA3_GOLDEN, rel=1e-9)

    def test_beta2_in_ps2_km(self):
        beta2, _ = dispersion_coefficients(FIBER, 1550.0)
        assert beta2 * 1e27 == pytest.approx(-27.2, abs=0.05)

    def test_zero_dispersion_fiber(self):
        flat = FiberSpec(
            attenuation_anchors=((1550.0, 0.2),),
            dispersion_ps_nm_km=0.0,
            dispersion_slope_ps_nm2_km=0.0,
            raman_peak_gain_per_w_km=0.028,
            raman_peak_shift_thz=13.0,
            gamma_per_w_km=1.2,
            span_length_km=100.0,
        )
        assert dispersion_coefficients(flat, 1550.0) == (0.0, 0.0)

    def test_beta3_positive(self):
        _, beta3 = dispersion_coefficients(FIBER, 1550.0)
        assert beta3 > 0


class TestRamanProfile:
    def test_peak_value(self):
        assert raman_gain_slope_profile(FIBER, 13.0) == pytest.approx(0.028, rel=1e-12)

    def test_zero_shift(self):
        assert raman_gain_slope_profile(FIBER, 0.0) == 0.0

    def test_half_peak(self):
        assert raman_gain_slope_profile(FIBER, 6.5) == pytest.approx(0.014, rel=1e-12)

    def test_beyond_peak_is_zero(self):
        assert raman_gain_slope_profile(FIBER, 13.5) == 0.0
        assert raman_gain_slope_profile(FIBER, 20.0) == 0.0

    def test_antisymmetric(self):
        assert raman_gain_slope_profile(FIBER, -6.5) == pytest.approx(-0.014, rel=1e-12)
        assert raman_gain_slope_profile(FIBER, -14.0) == 0.0


class TestAsePower:
    def test_golden_value(self):
        ch = make_channel(1550.0)
        assert ase_power(ch, FIBER, AMP, 12.5e9) == pytest.approx(ASE_GOLDEN_W, rel=1e-9)

    def test_vanishes_for_zero_length_span(self):
        short = FiberSpec(
            attenuation_anchors=FIBER.attenuation_anchors,
            dispersion_ps_nm_km=21.3,
            dispersion_slope_ps_nm2_km=0.067,
            raman_peak_gain_per_w_km=0.028,
            raman_peak_shift_thz=13.0,
            gamma_per_w_km=1.2,
            span_length_km=1e-9,
        )
        assert ase_power(make_channel(1550.0), short, AMP, 12.5e9) == pytest.approx(
            0.0, abs=1e-15)

    def test_increases_with_attenuation(self):
        low = ase_power(make_channel(1550.0), FIBER, AMP, 12.5e9)
        high = ase_power(make_channel(1410.0), FIBER, AMP, 12.5e9)
        assert high > low

    def test_e_band_mean_exceeds_c_band(self, default_link, band_map):
        _, _, _, tables = default_link
        e_mean = tables.p_ase[np.asarray(band_map["E"].member_channels)].mean()
        c_mean = tables.p_ase[np.asarray(band_map["C"].member_channels)].mean()
        assert 10 * math.log10(e_mean / c_mean) > 4.0


def toy_grid(n=3, cr_slope=None, gamma=1.2e-3, center=200.67e12, spacing=12.5e9):
    beta2, beta3 = dispersion_coefficients(FIBER, 1550.0)
    if cr_slope is None:
        cr_slope = FIBER.raman_slope_per_w_km_thz / 1e3 / 1e12
    channels = []
    for i in range(n):
        freq = center + (i - (n - 1) / 2) * spacing
        wavelength = 299792458.0 / freq * 1e9
        channels.append(Channel(
            index=i, center_frequency=freq, bandwidth=spacing,
            alpha=interpolate_attenuation(FIBER, wavelength) / 1e3))
    return ChannelGrid(channels=tuple(channels), center_frequency=center,
                       beta2=beta2, beta3=beta3, cr_slope=cr_slope, gamma=gamma)


class TestEta:
    def test_spm_zero_when_gamma_zero(self):
        grid = toy_grid(gamma=0.0)
        plan = LaunchPlan.uniform_dbm(0.0, 3)
        assert eta_spm(grid.channels[1], grid, plan) == 0.0
        assert eta_xpm(grid.channels[1], grid, plan) == 0.0

    def test_spm_degenerates_to_single_term_without_raman(self):
        # with Cr = 0, T = A^2 and only the first arcsinh term survives
        grid = toy_grid(cr_slope=0.0)
        plan = LaunchPlan.uniform_dbm(0.0, 3)
        ch = grid.channels[1]
        alpha = ch.alpha
        f_rel = ch.center_frequency - grid.center_frequency
        phi = (2.0 / 3.0) * math.pi**2 * (grid.beta2 + 2 * math.pi * grid.beta3 * f_rel)
        expected = ((4.0 / 9.0) * (grid.gamma**2 / ch.bandwidth**2) * math.pi
                    / (phi * alpha * 3 * alpha)
                    * 3 * alpha * math.asinh(phi * ch.bandwidth**2 / (math.pi * alpha)))
        assert eta_spm(ch, grid, plan) == pytest.approx(expected, rel=1e-12)

    def test_spm_zero_dispersion_raises(self):
        grid = toy_grid()
        flat = ChannelGrid(channels=grid.channels, center_frequency=grid.center_frequency,
                           beta2=0.0, beta3=0.0, cr_slope=grid.cr_slope, gamma=grid.gamma)
        plan = LaunchPlan.uniform_dbm(0.0, 3)
        with pytest.raises(ModelError, match="dispersion"):
            eta_spm(flat.channels[1], flat, plan)

    def test_xpm_empty_sum_single_channel(self):
        grid = toy_grid(n=1)
        plan = LaunchPlan.uniform_dbm(0.0, 1)
        assert eta_xpm(grid.channels[0], grid, plan) == 0.0

    def test_xpm_quadratic_in_interferer_power(self):
        # with Cr = 0 the T factors are power independent, so doubling every
        # interferer's power at fixed own power scales the sum by four
        grid = toy_grid(n=5, cr_slope=0.0)
        plan = LaunchPlan.uniform_dbm(0.0, 5)
        ch = grid.channels[2]
        base = eta_xpm(ch, grid, plan)
        doubled = eta_xpm(ch, grid, plan,
                          interferer_powers=np.full(5, 2 * plan.per_channel_power))
        assert doubled == pytest.approx(4.0 * base, rel=1e-12)

    def test_eta_total_span_scaling(self):
        grid = toy_grid(n=5)
        plan = LaunchPlan.uniform_dbm(-3.0, 5)
        for ch in grid.channels:
            one = eta_total(ch, grid, plan, 1)
            assert one == pytest.approx(
                eta_spm(ch, grid, plan) + eta_xpm(ch, grid, plan), rel=1e-12)
            assert eta_total(ch, grid, plan, 10) == pytest.approx(10 * one, rel=1e-12)
            assert eta_total(ch, grid, plan, 2) / one == pytest.approx(2.0, rel=1e-12)

    def test_eta_total_rejects_bad_span_count(self):
        grid = toy_grid()
        plan = LaunchPlan.uniform_dbm(0.0, 3)
        with pytest.raises(ValueError):
            eta_total(grid.channels[0], grid, plan, 0)

    def test_plan_mismatch_rejected(self):
        grid = toy_grid(n=3)
        bad_plan = LaunchPlan(per_channel_power=1e-3, total_power=5e-3)
        with pytest.raises(ModelError):
            eta_spm(grid.channels[0], grid, bad_plan)


class TestSnr:
    def test_ase_limited_is_linear_in_power(self):
        grid = toy_grid()
        ch = grid.channels[1]
        p_ase = ase_power(ch, FIBER, AMP, 12.5e9)
        plan = LaunchPlan.uniform_dbm(-40.0, 3)
        eta = eta_total(ch, grid, plan, 1)
        result = snr(ch, plan, p_ase, eta, 1)
        assert result.snr_linear == pytest.approx(
            plan.per_channel_power / p_ase, rel=1e-4)

    def test_incoherent_scaling_exact(self):
        grid = toy_grid()
        ch = grid.channels[1]
        p_ase = ase_power(ch, FIBER, AMP, 12.5e9)
        plan = LaunchPlan.uniform_dbm(0.0, 3)
        eta = eta_spm(ch, grid, plan) + eta_xpm(ch, grid, plan)
        one = snr(ch, plan, p_ase, eta, 1)
        hundred = snr(ch, plan, p_ase, eta, 100)
        assert hundred.snr_db == pytest.approx(one.snr_db - 20.0, abs=1e-12)

    def test_breakdown_fields(self):
        grid = toy_grid()
        ch = grid.channels[0]
        p_ase = ase_power(ch, FIBER, AMP, 12.5e9)
        plan = LaunchPlan.uniform_dbm(-5.0, 3)
        eta = eta_spm(ch, grid, plan) + eta_xpm(ch, grid, plan)
        out = snr(ch, plan, p_ase, eta, 3)
        assert out.channel_index == ch.index
        assert out.span_count == 3
        assert out.p_nli == pytest.approx(eta * plan.per_channel_power**3, rel=1e-12)
        assert out.snr_linear == pytest.approx(
            plan.per_channel_power / (3 * (p_ase + out.p_nli)), rel=1e-12)

    def test_l_band_paper_operating_point(self, default_link, band_map):
        # worst L-band slot after one span at -7.5 dBm sits near 27.1 dB
        _, _, _, tables = default_link
        snr_db, _ = band_worst_snr(band_map["L"], tables, -7.5)
        assert snr_db == pytest.approx(27.1, abs=1.0)


class TestVectorisedEngine:
    def test_matches_scalar_ops(self):
        grid = toy_grid(n=7)
        plan = LaunchPlan.uniform_dbm(2.0, 7)
        coeffs = eta_polynomial(grid)
        vec = coeffs.evaluate(plan.total_power)
        for i, ch in enumerate(grid.channels):
            expected = eta_spm(ch, grid, plan) + eta_xpm(ch, grid, plan)
            assert vec[i] == pytest.approx(expected, rel=1e-12)

    def test_matches_scalar_on_default_grid(self, default_link):
        _, grid, _, tables = default_link
        plan = LaunchPlan.uniform_dbm(-7.5, len(grid))
        vec = tables.eta(plan.total_power)
        for idx in (0, 630, 1360, 2000, 2719):
            ch = grid.channels[idx]
            expected = eta_spm(ch, grid, plan) + eta_xpm(ch, grid, plan)
            assert vec[idx] == pytest.approx(expected, rel=1e-11)

    def test_chunking_invariance(self):
        grid = toy_grid(n=9)
        a = eta_polynomial(grid, chunk_size=2)
        b = eta_polynomial(grid, chunk_size=64)
        assert np.array_equal(a.base, b.base)
        assert np.array_equal(a.linear, b.linear)
        assert np.array_equal(a.quad, b.quad)

    def test_tables_are_immutable(self, default_link):
        _, _, _, tables = default_link
        with pytest.raises(ValueError):
            tables.p_ase[0] = 1.0
        with pytest.raises(ValueError):
            tables.eta_coefficients.base[0] = 1.0

    def test_breakdown_matches_snr_db(self, default_link):
        _, _, _, tables = default_link
        power_w = 10 ** (-7.5 / 10) * 1e-3
        out = tables.breakdown(1360, power_w, span_count=4)
        assert out.snr_db == pytest.approx(float(tables.snr_db(power_w, 4)[1360]), rel=1e-12)
