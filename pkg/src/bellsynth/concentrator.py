"""Coincidence rate behind the interferometric concentrator and the output state.

For analyzer angles theta1, theta2, arm delay tau and plate phase phi the rate
is

    R = sum |c1 c2 Pi(t+, t- + tau) + e^{i phi} s1 s2 Pi(t+, t- - tau)|^2 dt+ dt-

normalized to its value at tau = 0, 45/45 deg, phi = 0. Both terms carry the
same t+ shift of tau/2; it is removed by a change of variables over the
(zero-padded) t+ axis and therefore not applied.

Delays are applied as exact band-limited shifts along t-: the amplitude is
zero padded to twice its t- length and multiplied by e^{i kappa tau} in the
conjugate domain. The shift is unitary, so the shifted copies keep the norm
of Pi for every tau.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .biphoton import BiphotonAmplitude
from .errors import DomainError, ShiftRangeError
from .qstate import TwoQubitState, partial_state

ABSCISSA_KINDS = ("delay_fs", "analyzer_deg")


@dataclass(frozen=True)
class MeasurementSetting:
    tau_fs: float = 0.0
    theta1_deg: float = 45.0
    theta2_deg: float = 45.0
    phi: float = 0.0

    def __post_init__(self):
        for name in ("tau_fs", "theta1_deg", "theta2_deg", "phi"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")


@dataclass(frozen=True, eq=False)
class SweepCurve:
    abscissa: np.ndarray
    rate: np.ndarray
    abscissa_kind: str

    def __post_init__(self):
        x = np.asarray(self.abscissa, dtype=float)
        y = np.asarray(self.rate, dtype=float)
        if self.abscissa_kind not in ABSCISSA_KINDS:
            raise DomainError(f"unknown abscissa kind '{self.abscissa_kind}'")
        if x.shape != y.shape or x.ndim != 1:
            raise DomainError("abscissa and rate must be 1D arrays of equal length")
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise DomainError("abscissa must be strictly increasing")
        if np.any(y < 0) or not np.all(np.isfinite(y)):
            raise DomainError("rates must be finite and non-negative")
        object.__setattr__(self, "abscissa", x)
        object.__setattr__(self, "rate", y)

    def __len__(self):
        return self.abscissa.size

    def rows(self):
        return zip(self.abscissa.tolist(), self.rate.tolist())


@dataclass(frozen=True)
class InterferenceTerms:
    """Grid integrals of the two shifted amplitudes A = Pi(t- + tau), B = Pi(t- - tau).

    ``norm_a`` and ``norm_b`` are the integrals of |A|^2 and |B|^2, ``cross``
    the integral of conj(A) B and ``norm`` that of |Pi|^2.
    """

    tau_fs: float
    norm_a: float
    norm_b: float
    cross: complex
    norm: float

    def rate(self, theta1_deg, theta2_deg, phi):
        t1 = np.radians(theta1_deg)
        t2 = np.radians(theta2_deg)
        cc = np.cos(t1) * np.cos(t2)
        ss = np.sin(t1) * np.sin(t2)
        cross = np.real(np.exp(1j * np.asarray(phi)) * self.cross)
        r = cc**2 * self.norm_a + ss**2 * self.norm_b + 2.0 * cc * ss * cross
        return np.clip(r / self.norm, 0.0, None)

    @property
    def overlap(self) -> complex:
        """Normalized overlap conj(A).B / sqrt(|A|^2 |B|^2)."""
        if self.norm_a == self.norm_b:
            return self.cross / self.norm_a
        return self.cross / math.sqrt(self.norm_a * self.norm_b)


def _thread_count():
    raw = os.environ.get("BELLSYNTH_THREADS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _padded_spectrum(pi: BiphotonAmplitude):
    cached = pi._cache.get("tminus_spectrum")
    if cached is None:
        n = pi.values.shape[1]
        padded = np.zeros((pi.values.shape[0], 2 * n), dtype=complex)
        padded[:, :n] = pi.values
        spec = np.fft.fft(padded, axis=1)
        kappa = 2.0 * math.pi * np.fft.fftfreq(2 * n, d=pi.dt_minus)
        cached = (padded, spec, kappa)
        pi._cache["tminus_spectrum"] = cached
    return cached


def check_shift(pi: BiphotonAmplitude, tau_fs: float):
    if not math.isfinite(tau_fs) or abs(tau_fs) > pi.max_shift_fs:
        raise ShiftRangeError(
            f"|tau| = {abs(tau_fs):.3f} fs exceeds half the t_minus grid span ({pi.max_shift_fs:.3f} fs)"
        )


def shifted_amplitude(pi: BiphotonAmplitude, shift_fs: float) -> np.ndarray:
    """Pi(t+, t- + shift) on the zero-padded t- axis (length 2 N)."""
    padded, spec, kappa = _padded_spectrum(pi)
    if shift_fs == 0:
        return padded
    return np.fft.ifft(spec * np.exp(1j * kappa * shift_fs), axis=1)


def interference_terms(pi: BiphotonAmplitude, tau_fs: float) -> InterferenceTerms:
    check_shift(pi, tau_fs)
    a = shifted_amplitude(pi, tau_fs)
    b = a if tau_fs == 0 else shifted_amplitude(pi, -tau_fs)
    na, nb, x = kernels.interference_sums(a, b)
    cell = pi.dt_plus * pi.dt_minus
    return InterferenceTerms(
        tau_fs=float(tau_fs), norm_a=na * cell, norm_b=nb * cell, cross=x * cell, norm=pi.norm
    )


def coincidence_rate(pi: BiphotonAmplitude, s: MeasurementSetting) -> float:
    """Normalized coincidence rate for one measurement setting."""
    terms = interference_terms(pi, s.tau_fs)
    return float(terms.rate(s.theta1_deg, s.theta2_deg, s.phi))


def _ordered(values, what):
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DomainError(f"{what} must be a non-empty 1D sequence")
    if x.size > 1 and np.any(np.diff(x) <= 0):
        raise DomainError(f"{what} must be strictly increasing")
    return x


def delay_terms(pi: BiphotonAmplitude, tau_values: Sequence[float], workers: int | None = None):
    """`InterferenceTerms` for every delay; reusable across analyzer angles and phases.

    ``workers`` (default: ``BELLSYNTH_THREADS`` or 1) evaluates delays in a
    thread pool; results do not depend on the evaluation order.
    """
    taus = _ordered(tau_values, "tau values")
    for t in (taus[0], taus[-1]):
        check_shift(pi, t)
    workers = workers or _thread_count()
    if workers > 1 and taus.size > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda t: interference_terms(pi, t), taus))
    return [interference_terms(pi, t) for t in taus]


def curve_from_terms(terms, theta1_deg=45.0, theta2_deg=45.0, phi=0.0) -> SweepCurve:
    taus = np.array([t.tau_fs for t in terms])
    rates = np.array([float(t.rate(theta1_deg, theta2_deg, phi)) for t in terms])
    return SweepCurve(taus, rates, "delay_fs")


def sweep_delay(
    pi: BiphotonAmplitude,
    tau_values: Sequence[float],
    theta1_deg: float = 45.0,
    theta2_deg: float = 45.0,
    phi: float = 0.0,
    workers: int | None = None,
) -> SweepCurve:
    """Coincidence rate versus delay at fixed analyzers and phase."""
    return curve_from_terms(delay_terms(pi, tau_values, workers), theta1_deg, theta2_deg, phi)


def sweep_analyzer(
    pi: BiphotonAmplitude,
    tau_fs: float,
    theta1_deg: float,
    theta2_values: Sequence[float],
    phi: float = 0.0,
) -> SweepCurve:
    """Coincidence rate versus the second analyzer angle (degrees)."""
    th2 = _ordered(theta2_values, "analyzer angles")
    terms = interference_terms(pi, tau_fs)
    return SweepCurve(th2, np.asarray(terms.rate(theta1_deg, th2, phi), dtype=float), "analyzer_deg")


def visibility(curve: SweepCurve) -> float:
    """(max - min) / (max + min) of the curve's rates."""
    if len(curve) < 3:
        raise DomainError("visibility needs at least 3 samples")
    hi = float(np.max(curve.rate))
    lo = float(np.min(curve.rate))
    if not hi > 0:
        raise DomainError("visibility is undefined for an all-zero curve")
    return (hi - lo) / (hi + lo)


def werner_overlap(pi: BiphotonAmplitude, tau_fs: float) -> complex:
    return complex(interference_terms(pi, tau_fs).overlap)


def werner_epsilon(pi: BiphotonAmplitude, tau_fs: float) -> float:
    """Weight of the entangled component at delay tau, in [0, 1]."""
    return float(min(1.0, abs(werner_overlap(pi, tau_fs))))


def output_state(pi: BiphotonAmplitude, tau_fs: float, phi: float = 0.0) -> TwoQubitState:
    """Polarization state after the concentrator.

    The overlap's complex argument adds to the plate phase.
    """
    ov = werner_overlap(pi, tau_fs)
    eps = min(1.0, abs(ov))
    phase = phi + (np.angle(ov) if eps > 0 else 0.0)
    return partial_state(eps, phase)


# -- curve shape --------------------------------------------------------------

def _edge_baseline(curve: SweepCurve, fraction: float = 0.1):
    n = max(1, int(round(fraction * len(curve))))
    return float(0.5 * (np.mean(curve.rate[:n]) + np.mean(curve.rate[-n:])))


def triangle_base_width(curve: SweepCurve, baseline: float | None = None) -> float:
    """Base width of a triangular peak, ``2 * area / height`` above the baseline.

    The baseline defaults to the mean of the outer 10% of samples on each side.
    """
    base = _edge_baseline(curve) if baseline is None else baseline
    excess = curve.rate - base
    height = float(np.max(excess))
    if not height > 0:
        raise DomainError("curve has no peak above its baseline")
    area = float(np.trapezoid(np.clip(excess, 0.0, None), curve.abscissa))
    return 2.0 * area / height


def _half_crossings(x, y, level):
    k = int(np.argmax(y))
    left = k
    while left > 0 and y[left] > level:
        left -= 1
    right = k
    while right < len(y) - 1 and y[right] > level:
        right += 1
    if y[left] > level or y[right] > level:
        raise DomainError("feature does not fall below half maximum inside the sweep")
    xl = np.interp(level, [y[left], y[left + 1]], [x[left], x[left + 1]])
    xr = np.interp(level, [y[right], y[right - 1]], [x[right], x[right - 1]])
    return float(xl), float(xr)


def peak_fwhm(curve: SweepCurve, baseline: float | None = None) -> float:
    base = _edge_baseline(curve) if baseline is None else baseline
    excess = curve.rate - base
    lo, hi = _half_crossings(curve.abscissa, excess, 0.5 * np.max(excess))
    return hi - lo


def dip_fwhm(curve: SweepCurve, baseline: float | None = None) -> float:
    """Full width at half depth of a dip below the baseline."""
    base = _edge_baseline(curve) if baseline is None else baseline
    depth = base - curve.rate
    if not np.max(depth) > 0:
        raise DomainError("curve has no dip below its baseline")
    lo, hi = _half_crossings(curve.abscissa, depth, 0.5 * np.max(depth))
    return hi - lo
