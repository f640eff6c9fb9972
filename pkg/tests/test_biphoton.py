import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.special import sici

from bellsynth import biphoton as bp
from bellsynth.biphoton import FilterParams, GridSpec, PumpParams
from bellsynth.errors import DomainError, MisuseError, ResolutionError


def test_parseval_cw(cw_spectrum):
    pi = bp.time_domain_amplitude(cw_spectrum)
    assert pi.norm == pytest.approx(cw_spectrum.norm, rel=1e-12)


def test_parseval_pulsed(pulsed_spectrum, pulsed_pi):
    assert pulsed_pi.norm == pytest.approx(pulsed_spectrum.norm, rel=1e-12)
    assert pulsed_pi.shape == (512, 512)


def test_transform_matches_direct_sum(cw_spectrum, cw_pi):
    # direct evaluation of (1/2pi) sum Phi e^{-i nu t} dnu at a few t
    phi = cw_spectrum
    for k in (300, 512, 700):
        t = cw_pi.t_minus[k]
        direct = np.sum(phi.values[0] * np.exp(-1j * phi.nu_minus * t)) * phi.dnu_plus * phi.dnu_minus / (2 * math.pi)
        assert cw_pi.values[0, k] == pytest.approx(direct, rel=1e-9, abs=1e-12)


def test_cw_support_is_zero_to_dl(cw_pi):
    dl = cw_pi.delay_spread_fs
    w = cw_pi.tminus_marginal()
    inside = (cw_pi.t_minus >= 0) & (cw_pi.t_minus <= dl)
    assert w[inside].sum() / w.sum() > 0.98


def test_cw_matches_band_limited_rectangle(cw_spectrum, cw_pi):
    # rect on [0, DL] seen through the grid's finite nu_d band (+-Omega):
    # [Si(Omega t) - Si(Omega (t - DL))] / pi
    dl = cw_pi.delay_spread_fs
    om = -cw_spectrum.nu_minus[0]
    t = cw_pi.t_minus
    oracle = (sici(om * t)[0] - sici(om * (t - dl))[0]) / math.pi
    v = cw_pi.values[0]
    scale = np.vdot(oracle, v) / np.vdot(oracle, oracle)
    err = np.linalg.norm(v - scale * oracle) / np.linalg.norm(v)
    assert err < 0.01


def test_rms_width_of_rectangle(cw_pi):
    # rectangle of width DL has rms width DL / sqrt(12)
    assert cw_pi.rms_tminus_width() == pytest.approx(cw_pi.delay_spread_fs / math.sqrt(12), rel=0.05)


def test_pulsed_amplitude_is_narrower_than_cw(pulsed_pi):
    assert pulsed_pi.rms_tminus_width() < pulsed_pi.delay_spread_fs / math.sqrt(12)


def test_marginals_are_mirror_images(cw_spectrum):
    nu, s1, s2 = cw_spectrum.marginals()
    assert np.allclose(s2, s1[::-1])
    assert nu[0] == pytest.approx(-nu[-1])


def test_marginals_need_cw(pulsed_spectrum):
    with pytest.raises(MisuseError):
        pulsed_spectrum.marginals()


def test_filter_transmission_halves_at_fwhm():
    f = FilterParams(780.0, 20.0)
    half = bp.nm_width_to_rad_per_fs(20.0, 780.0) / 2
    assert abs(f.amplitude(np.array([half]), 780.0)[0]) ** 2 == pytest.approx(0.5)
    assert not FilterParams(780.0).present


def test_pump_envelope_amplitude_fwhm(pulsed_setup):
    # a thin crystal without filters leaves the pump envelope nearly bare
    setup = pulsed_setup.with_params(length_mm=0.05, filter_fwhm_nm=math.inf)
    spec = bp.joint_spectral_amplitude(setup, bp.fitted_grid(setup))
    width = bp.nm_width_to_rad_per_fs(setup.pump.bandwidth_nm, setup.pump.center_nm)
    row = np.abs(spec.values[:, spec.values.shape[1] // 2])
    above = spec.nu_plus[row >= 0.5 * row.max()]
    assert above[-1] - above[0] == pytest.approx(width, abs=2 * spec.dnu_plus)


def test_nm_to_frequency_width():
    # d omega = 2 pi c d lambda / lambda^2
    assert bp.nm_width_to_rad_per_fs(1.0, 780.0) == pytest.approx(2 * math.pi * 299.792458 / 780.0**2, rel=1e-9)


@pytest.mark.parametrize(
    "kwargs",
    [dict(mode="ring"), dict(mode="cw", bandwidth_nm=1.0), dict(mode="pulsed", bandwidth_nm=0.0), dict(center_nm=-1.0)],
)
def test_pump_validation(kwargs):
    with pytest.raises(DomainError):
        PumpParams(**kwargs)


def test_filter_validation():
    with pytest.raises(DomainError):
        FilterParams(780.0, -1.0)
    with pytest.raises(DomainError):
        FilterParams(780.0, 5.0, shape="boxcar")


def test_grid_validation():
    with pytest.raises(ResolutionError):
        GridSpec(n_plus=500)
    with pytest.raises(ResolutionError):
        GridSpec(span_thz=0.0)


def test_coarse_grid_is_rejected(cw_setup):
    coarse = replace(cw_setup, grid=GridSpec(n_minus_cw=64, span_thz=40.0))
    with pytest.raises(ResolutionError):
        bp.joint_spectral_amplitude(coarse)


def test_narrow_span_is_rejected(cw_setup):
    narrow = replace(cw_setup, grid=GridSpec(span_thz=0.5))
    with pytest.raises(ResolutionError):
        bp.joint_spectral_amplitude(narrow)


def test_fitted_grid_handles_thin_crystal(pulsed_setup):
    thin = pulsed_setup.with_params(length_mm=0.5)
    with pytest.raises(ResolutionError):
        bp.joint_spectral_amplitude(thin)
    g = bp.fitted_grid(thin)
    pi = bp.biphoton_amplitude(thin, g)
    assert pi.norm > 0


def test_analytic_rectangle(cw_setup, cw_spectrum):
    rect = bp.analytic_pi_cw(cw_setup.crystal, cw_spectrum.dispersion, cw_setup.grid)
    inside = rect.values[0].real > 0
    span = rect.t_minus[inside]
    assert span[0] >= 0 and span[-1] <= rect.delay_spread_fs
    assert span[-1] - span[0] == pytest.approx(rect.delay_spread_fs, abs=2 * rect.dt_minus)


def test_analytic_rectangle_rejects_pulsed(pulsed_setup, pulsed_spectrum):
    with pytest.raises(MisuseError):
        bp.analytic_pi_cw(pulsed_setup.crystal, pulsed_spectrum.dispersion, pump=pulsed_setup.pump)
