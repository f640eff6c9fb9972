"""Biphoton amplitude of type-II SPDC in a first-order group-velocity model.

Frequencies are angular detunings from the degenerate centre in rad/fs, times
are in fs. The spectral grid is laid out in rotated coordinates

    nu_plus = nu1 + nu2          (pump detuning)
    nu_d    = (nu1 - nu2) / 2    (so nu1 = nu_plus/2 + nu_d, nu2 = nu_plus/2 - nu_d)

whose Fourier conjugates are exactly ``t_plus = (t1 + t2)/2`` and
``t_minus = t1 - t2``. The phase ``nu1 t1 + nu2 t2`` equals
``nu_plus t_plus + nu_d t_minus`` and the Jacobian is 1, so a single 2D FFT
lands on a regular (t_plus, t_minus) grid with Parseval intact.

Photon 1 is the o-ray, photon 2 the e-ray; with D = 1/u_o - 1/u_e > 0 the cw
amplitude is supported on t_minus in [0, D L].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional

import numpy as np

from .dispersion import C_NM_PER_FS, CrystalParams, DispersionSummary, dispersion_summary
from .errors import DomainError, MisuseError, ResolutionError

MIN_LOBE_SAMPLES = 8
LOBE_COVERAGE = 5.0
TMINUS_COVERAGE = 3.0

_LN2 = math.log(2.0)


def thz_to_rad_per_fs(f_thz):
    return 2.0 * math.pi * f_thz * 1e-3


def nm_width_to_rad_per_fs(width_nm, center_nm):
    """Convert a wavelength FWHM to an angular-frequency FWHM (rad/fs)."""
    return 2.0 * math.pi * C_NM_PER_FS * width_nm / center_nm**2


def wavelength_to_detuning(wavelength_nm, center_nm):
    return 2.0 * math.pi * C_NM_PER_FS * (1.0 / wavelength_nm - 1.0 / center_nm)


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PumpParams:
    """Pump laser.

    ``bandwidth_nm`` is the FWHM of the pump's spectral *amplitude* envelope
    |alpha|. It is zero for a cw pump.
    """

    mode: str = "cw"
    center_nm: float = 351.1
    bandwidth_nm: float = 0.0

    def __post_init__(self):
        if self.mode not in ("cw", "pulsed"):
            raise DomainError(f"pump mode must be 'cw' or 'pulsed', got '{self.mode}'")
        if not self.center_nm > 0:
            raise DomainError(f"pump centre must be positive, got {self.center_nm}")
        if self.mode == "cw" and self.bandwidth_nm != 0:
            raise DomainError("a cw pump has zero bandwidth")
        if self.mode == "pulsed" and not self.bandwidth_nm > 0:
            raise DomainError("a pulsed pump needs a positive bandwidth")

    @property
    def is_cw(self):
        return self.mode == "cw"


@dataclass(frozen=True)
class FilterParams:
    """Gaussian interference filter; ``fwhm_nm=None`` means no filter."""

    center_nm: float
    fwhm_nm: Optional[float] = None
    shape: str = "gaussian"

    def __post_init__(self):
        if self.shape != "gaussian":
            raise DomainError(f"only gaussian filters are modelled, got '{self.shape}'")
        if self.fwhm_nm is not None and not self.fwhm_nm > 0:
            raise DomainError(f"filter FWHM must be positive, got {self.fwhm_nm}")

    @property
    def present(self):
        return self.fwhm_nm is not None and math.isfinite(self.fwhm_nm)

    def amplitude(self, nu, down_center_nm):
        """Amplitude transmission at detuning ``nu``.

        The FWHM refers to the intensity transmission |f|^2, so the amplitude
        Gaussian is sqrt(2) wider.
        """
        if not self.present:
            return np.ones_like(nu, dtype=float)
        width = nm_width_to_rad_per_fs(self.fwhm_nm, self.center_nm)
        nu0 = wavelength_to_detuning(self.center_nm, down_center_nm)
        return np.exp(-2.0 * _LN2 * ((nu - nu0) / width) ** 2)


@dataclass(frozen=True)
class GridSpec:
    """Spectral sampling.

    Spans are half-widths in THz (ordinary frequency). ``n_minus_cw`` is the
    number of nu_d samples for the 1D cw reduction; ``cw_window_fs`` is the
    nominal t_plus extent assigned to a cw amplitude.
    """

    n_plus: int = 512
    n_minus: int = 512
    n_minus_cw: int = 1024
    span_thz: float = 40.0
    span_plus_thz: float = 40.0
    cw_window_fs: float = 1.0

    def __post_init__(self):
        for name in ("n_plus", "n_minus", "n_minus_cw"):
            n = getattr(self, name)
            if not _is_pow2(int(n)) or n < 2:
                raise ResolutionError(f"grid.{name} must be a power of two >= 2, got {n}")
        for name in ("span_thz", "span_plus_thz", "cw_window_fs"):
            if not getattr(self, name) > 0:
                raise ResolutionError(f"grid.{name} must be positive")


@dataclass(frozen=True, eq=False)
class SpectralAmplitude:
    """Joint spectral amplitude sampled on the (nu_plus, nu_d) grid.

    ``values[i, k]`` is Phi at ``nu_plus[i], nu_d[k]``. A cw amplitude has a
    single nu_plus row at 0 whose cell width is ``2 pi / cw_window_fs``.
    """

    values: np.ndarray
    nu_plus: np.ndarray
    nu_minus: np.ndarray
    dnu_plus: float
    dnu_minus: float
    cw: bool
    dispersion: DispersionSummary
    down_center_nm: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ResolutionError("spectral amplitude has non-finite samples")
        if not self.norm > 0:
            raise ResolutionError("spectral amplitude vanishes on the grid")

    @property
    def shape(self):
        return self.values.shape

    @property
    def delay_spread_fs(self):
        return self.dispersion.delay_spread_fs

    @property
    def nu1(self):
        return 0.5 * self.nu_plus[:, None] + self.nu_minus[None, :]

    @property
    def nu2(self):
        return 0.5 * self.nu_plus[:, None] - self.nu_minus[None, :]

    @cached_property
    def norm(self):
        return float(np.sum(np.abs(self.values) ** 2) * self.dnu_plus * self.dnu_minus)

    def marginals(self):
        """Single-photon spectra of a cw amplitude on a symmetric detuning axis.

        Returns ``(nu, s1, s2)`` with ``s1(nu) = |Phi|^2`` at photon-1 detuning
        nu and ``s2(nu)`` the same for photon 2. With nu_plus = 0 photon 2 sits
        at -nu_d. The unpaired first sample of the centred grid is dropped.
        """
        if not self.cw:
            raise MisuseError("marginals are only defined for the cw reduction")
        s = np.abs(self.values[0, 1:]) ** 2
        nu = self.nu_minus[1:]
        return nu, s, s[::-1].copy()


@dataclass(frozen=True, eq=False)
class BiphotonAmplitude:
    """Two-photon temporal amplitude Pi(t_plus, t_minus).

    ``values[i, k]`` is Pi at ``t_plus[i], t_minus[k]``; ``norm`` is the grid
    integral of |Pi|^2.
    """

    values: np.ndarray
    t_plus: np.ndarray
    t_minus: np.ndarray
    dt_plus: float
    dt_minus: float
    cw: bool
    delay_spread_fs: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.norm > 0:
            raise ResolutionError("biphoton amplitude vanishes on the grid")
        half = 0.5 * self.dt_minus * len(self.t_minus)
        need = TMINUS_COVERAGE * abs(self.delay_spread_fs)
        if half < need:
            raise ResolutionError(
                f"t_minus grid spans +-{half:.1f} fs but +-{need:.1f} fs (3 D L) is required; "
                "refine the spectral step (more points or a smaller span)"
            )

    @property
    def shape(self):
        return self.values.shape

    @cached_property
    def norm(self):
        return float(np.sum(np.abs(self.values) ** 2) * self.dt_plus * self.dt_minus)

    @property
    def max_shift_fs(self):
        """Largest |tau| that can be applied without wrapping."""
        return 0.5 * self.dt_minus * len(self.t_minus)

    def tminus_marginal(self):
        """Integral of |Pi|^2 over t_plus, as a function of t_minus."""
        return np.sum(np.abs(self.values) ** 2, axis=0) * self.dt_plus

    def rms_tminus_width(self):
        w = self.tminus_marginal()
        t = self.t_minus
        mean = np.sum(w * t) / np.sum(w)
        return float(np.sqrt(np.sum(w * (t - mean) ** 2) / np.sum(w)))

    def to_rows(self):
        tp, tm = np.meshgrid(self.t_plus, self.t_minus, indexing="ij")
        return zip(tp.ravel(), tm.ravel(), self.values.real.ravel(), self.values.imag.ravel())


def _centred_axis(n, step):
    return (np.arange(n) - n // 2) * step


def _setup_dispersion(setup):
    pump = setup.pump
    down = 2.0 * pump.center_nm
    return dispersion_summary(setup.crystal, pump.center_nm, down), down


def check_grid(setup, grid: GridSpec, disp: DispersionSummary):
    """Raise `ResolutionError` if ``grid`` cannot resolve ``setup``."""
    L = disp.length_mm
    n_minus = grid.n_minus_cw if setup.pump.is_cw else grid.n_minus
    dnu_d = 2.0 * thz_to_rad_per_fs(grid.span_thz) / n_minus
    # Delta = D nu_d along nu_plus = 0; first zero of sinc(Delta L / 2) at nu_d = 2 pi / (D L)
    lobe_d = 4.0 * math.pi / (abs(disp.D) * L)
    if lobe_d / dnu_d < MIN_LOBE_SAMPLES:
        raise ResolutionError(
            f"sinc main lobe spans {lobe_d / dnu_d:.1f} nu_d samples, need {MIN_LOBE_SAMPLES}"
        )
    if 2.0 * thz_to_rad_per_fs(grid.span_thz) < LOBE_COVERAGE * lobe_d:
        raise ResolutionError("nu_d span covers less than 5 sinc main lobes")
    if setup.pump.is_cw:
        return
    dnu_p = 2.0 * thz_to_rad_per_fs(grid.span_plus_thz) / grid.n_plus
    span_p = 2.0 * thz_to_rad_per_fs(grid.span_plus_thz)
    if disp.D_plus != 0:
        lobe_p = 4.0 * math.pi / (abs(disp.D_plus) * L)
        if lobe_p / dnu_p < MIN_LOBE_SAMPLES:
            raise ResolutionError(
                f"sinc main lobe spans {lobe_p / dnu_p:.1f} nu_plus samples, need {MIN_LOBE_SAMPLES}"
            )
        if span_p < LOBE_COVERAGE * lobe_p:
            raise ResolutionError("nu_plus span covers less than 5 sinc main lobes")
    pump_width = nm_width_to_rad_per_fs(setup.pump.bandwidth_nm, setup.pump.center_nm)
    if span_p < LOBE_COVERAGE * pump_width:
        raise ResolutionError("nu_plus span covers less than 5 pump bandwidths")


def fitted_grid(setup, grid: Optional[GridSpec] = None) -> GridSpec:
    """Widen ``grid`` (spans and sizes, powers of two kept) until `check_grid` passes.

    Used by parameter sweeps that visit thin crystals or broad pumps.
    """
    grid = grid or setup.grid
    disp, _ = _setup_dispersion(setup)
    L = disp.length_mm
    lobe_d = 4.0 * math.pi / (abs(disp.D) * L)
    need_span = LOBE_COVERAGE * lobe_d / (4.0 * math.pi * 1e-3)
    span = max(grid.span_thz, need_span)
    span_p = grid.span_plus_thz
    if not setup.pump.is_cw:
        pump_width = nm_width_to_rad_per_fs(setup.pump.bandwidth_nm, setup.pump.center_nm)
        lobe_p = 4.0 * math.pi / (abs(disp.D_plus) * L) if disp.D_plus else 0.0
        need_p = LOBE_COVERAGE * max(pump_width, lobe_p) / (4.0 * math.pi * 1e-3)
        span_p = max(span_p, need_p)
    grid = replace(grid, span_thz=span, span_plus_thz=span_p)
    # keep the t_minus window >= 6 D L and the lobes sampled
    for _ in range(8):
        try:
            n_minus = grid.n_minus_cw if setup.pump.is_cw else grid.n_minus
            dnu_d = 2.0 * thz_to_rad_per_fs(grid.span_thz) / n_minus
            half_t = 0.5 * 2.0 * math.pi / dnu_d
            if half_t < TMINUS_COVERAGE * abs(disp.delay_spread_fs):
                raise ResolutionError("t window")
            check_grid(setup, grid, disp)
            return grid
        except ResolutionError:
            grid = replace(
                grid,
                n_minus=grid.n_minus * 2,
                n_minus_cw=grid.n_minus_cw * 2,
                n_plus=grid.n_plus if setup.pump.is_cw else grid.n_plus * 2,
            )
    raise ResolutionError("could not find an adequate grid")


def joint_spectral_amplitude(setup, grid: Optional[GridSpec] = None) -> SpectralAmplitude:
    """Phi(nu1, nu2) = alpha(nu1 + nu2) e^{i Delta L/2} sinc(Delta L/2) f1(nu1) f2(nu2).

    ``Delta = (1/u_o - 1/u_p) nu1 + (1/u_e - 1/u_p) nu2`` to first order. The
    pump envelope alpha is Gaussian with amplitude FWHM from the pump
    bandwidth; a cw pump is the 1D reduction nu_plus = 0.
    """
    grid = grid or setup.grid
    disp, down = _setup_dispersion(setup)
    check_grid(setup, grid, disp)
    L = disp.length_mm
    cw = setup.pump.is_cw

    n_minus = grid.n_minus_cw if cw else grid.n_minus
    dnu_d = 2.0 * thz_to_rad_per_fs(grid.span_thz) / n_minus
    nu_d = _centred_axis(n_minus, dnu_d)
    if cw:
        dnu_p = 2.0 * math.pi / grid.cw_window_fs
        nu_p = np.zeros(1)
    else:
        dnu_p = 2.0 * thz_to_rad_per_fs(grid.span_plus_thz) / grid.n_plus
        nu_p = _centred_axis(grid.n_plus, dnu_p)

    nu1 = 0.5 * nu_p[:, None] + nu_d[None, :]
    nu2 = 0.5 * nu_p[:, None] - nu_d[None, :]

    k_p = 1.0 / disp.u_p
    delta = (1.0 / disp.u_o - k_p) * nu1 + (1.0 / disp.u_e - k_p) * nu2
    half = 0.5 * delta * L
    pm = np.exp(1j * half) * np.sinc(half / math.pi)

    if cw:
        alpha = np.ones_like(nu_p)
    else:
        width = nm_width_to_rad_per_fs(setup.pump.bandwidth_nm, setup.pump.center_nm)
        alpha = np.exp(-4.0 * _LN2 * (nu_p / width) ** 2)

    f1 = setup.filter1.amplitude(nu1, down) if setup.filter1 is not None else 1.0
    f2 = setup.filter2.amplitude(nu2, down) if setup.filter2 is not None else 1.0

    values = alpha[:, None] * pm * f1 * f2
    return SpectralAmplitude(
        values=values,
        nu_plus=nu_p,
        nu_minus=nu_d,
        dnu_plus=dnu_p,
        dnu_minus=dnu_d,
        cw=cw,
        dispersion=disp,
        down_center_nm=down,
    )


def time_domain_amplitude(phi: SpectralAmplitude) -> BiphotonAmplitude:
    """Pi(t_plus, t_minus) = (1/2pi) sum Phi e^{-i(nu_plus t_plus + nu_d t_minus)} dnu_plus dnu_d.

    The 1/(2 pi) makes the transform unitary, so the grid integrals of |Phi|^2
    and |Pi|^2 agree.
    """
    n_p, n_m = phi.values.shape
    dt_p = 2.0 * math.pi / (n_p * phi.dnu_plus)
    dt_m = 2.0 * math.pi / (n_m * phi.dnu_minus)
    shifted = np.fft.ifftshift(phi.values, axes=(0, 1))
    pi = np.fft.fftshift(np.fft.fft2(shifted), axes=(0, 1))
    pi *= phi.dnu_plus * phi.dnu_minus / (2.0 * math.pi)
    return BiphotonAmplitude(
        values=pi,
        t_plus=_centred_axis(n_p, dt_p),
        t_minus=_centred_axis(n_m, dt_m),
        dt_plus=dt_p,
        dt_minus=dt_m,
        cw=phi.cw,
        delay_spread_fs=phi.delay_spread_fs,
    )


def biphoton_amplitude(setup, grid: Optional[GridSpec] = None) -> BiphotonAmplitude:
    """Convenience: `joint_spectral_amplitude` followed by `time_domain_amplitude`."""
    return time_domain_amplitude(joint_spectral_amplitude(setup, grid))


def analytic_pi_cw(
    crystal: CrystalParams,
    dispersion: DispersionSummary,
    grid: Optional[GridSpec] = None,
    pump: Optional[PumpParams] = None,
) -> BiphotonAmplitude:
    """Closed-form cw amplitude: 1 for t_minus in [0, D L], 0 elsewhere.

    Sampled on the same t_minus grid the numeric cw pipeline produces, with a
    single t_plus cell of width ``grid.cw_window_fs``.
    """
    if pump is not None and not pump.is_cw:
        raise MisuseError("the closed-form rectangle only describes a cw pump")
    if not math.isclose(crystal.length_mm, dispersion.length_mm, rel_tol=1e-12):
        raise DomainError("crystal length does not match the dispersion summary")
    grid = grid or GridSpec()
    n = grid.n_minus_cw
    dnu_d = 2.0 * thz_to_rad_per_fs(grid.span_thz) / n
    dt = 2.0 * math.pi / (n * dnu_d)
    t = _centred_axis(n, dt)
    width = dispersion.delay_spread_fs
    lo, hi = min(0.0, width), max(0.0, width)
    rect = ((t >= lo) & (t <= hi)).astype(complex)
    return BiphotonAmplitude(
        values=rect[None, :],
        t_plus=np.zeros(1),
        t_minus=t,
        dt_plus=grid.cw_window_fs,
        dt_minus=dt,
        cw=True,
        delay_spread_fs=width,
    )
