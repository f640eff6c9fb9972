"""Refractive indices and first-order group delays of the nonlinear crystal.

Units: wavelengths in nm, lengths in mm, times in fs. Sellmeier formulas take
the wavelength in micrometres internally.

BBO uses the Kato (1986) coefficients,

    n^2 = A + B / (lam^2 - C) - D lam^2      (lam in um)

K. Kato, IEEE J. Quantum Electron. QE-22, 1013 (1986).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError

C_NM_PER_FS = 299.792458
C_MM_PER_FS = C_NM_PER_FS * 1e-6

WAVELENGTH_RANGE_NM = (200.0, 2600.0)

# (A, B, C, D) for the ordinary and extraordinary principal indices
SELLMEIER = {
    "BBO": {
        "o": (2.7359, 0.01878, 0.01822, 0.01354),
        "e": (2.3753, 0.01224, 0.01667, 0.01516),
    },
}


class Ray(str, Enum):
    ORDINARY = "ordinary"
    EXTRAORDINARY = "extraordinary"


@dataclass(frozen=True)
class CrystalParams:
    material: str = "BBO"
    length_mm: float = 3.0
    phase_matching_angle_deg: float = 49.2
    cut: str = "type-II"

    def __post_init__(self):
        if self.material not in SELLMEIER:
            raise DomainError(f"unsupported crystal material '{self.material}'")
        if self.cut != "type-II":
            raise DomainError(f"only type-II phase matching is modelled, got '{self.cut}'")
        if not self.length_mm > 0:
            raise DomainError(f"crystal length must be positive, got {self.length_mm}")
        if not 0.0 < self.phase_matching_angle_deg < 90.0:
            raise DomainError(
                f"phase-matching angle must lie in (0, 90) deg, got {self.phase_matching_angle_deg}"
            )


@dataclass(frozen=True)
class DispersionSummary:
    """Group-velocity parameters at one operating point.

    ``D`` is the o/e group-delay mismatch per mm at the down-converted
    wavelength and ``D_plus`` the pump versus mean-biphoton mismatch, both in
    fs/mm. Velocities are in mm/fs.
    """

    n_o: float
    n_e_effective: float
    u_p: float
    u_o: float
    u_e: float
    D: float
    D_plus: float
    length_mm: float

    @property
    def delay_spread_fs(self) -> float:
        """D * L, the width of the two-photon correlation in t_minus."""
        return self.D * self.length_mm


def _check_wavelength(wavelength_nm):
    lam = np.asarray(wavelength_nm, dtype=float)
    lo, hi = WAVELENGTH_RANGE_NM
    if np.any(~np.isfinite(lam)) or np.any(lam < lo) or np.any(lam > hi):
        raise DomainError(f"wavelength outside Sellmeier range [{lo}, {hi}] nm: {wavelength_nm}")
    return lam


def _principal(coeffs, lam_nm):
    a, b, c, d = coeffs
    x = (lam_nm * 1e-3) ** 2
    return np.sqrt(a + b / (x - c) - d * x)


def _principal_derivative(coeffs, lam_nm):
    """dn/dlam in 1/nm, from the analytic derivative of the Sellmeier form."""
    a, b, c, d = coeffs
    lam_um = lam_nm * 1e-3
    x = lam_um**2
    n = np.sqrt(a + b / (x - c) - d * x)
    dn2_dlam_um = -2.0 * b * lam_um / (x - c) ** 2 - 2.0 * d * lam_um
    return dn2_dlam_um / (2.0 * n) * 1e-3


def _angle_index(n_o, n_e, theta):
    return 1.0 / np.sqrt(np.cos(theta) ** 2 / n_o**2 + np.sin(theta) ** 2 / n_e**2)


def refractive_index(wavelength_nm, ray="ordinary", angle_deg=90.0, material="BBO"):
    """Index seen by an o- or e-polarized wave.

    For the extraordinary ray the index is angle tuned,
    ``1/n(theta)^2 = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2``, with theta the
    angle between the wave vector and the optic axis. ``angle_deg`` is ignored
    for the ordinary ray.
    """
    lam = _check_wavelength(wavelength_nm)
    coeffs = SELLMEIER[material]
    n_o = _principal(coeffs["o"], lam)
    if Ray(ray) is Ray.ORDINARY:
        return n_o if n_o.ndim else float(n_o)
    n_e = _principal(coeffs["e"], lam)
    n = _angle_index(n_o, n_e, np.radians(angle_deg))
    return n if n.ndim else float(n)


def index_derivative(wavelength_nm, ray="ordinary", angle_deg=90.0, material="BBO"):
    """Analytic dn/dlam (1/nm) matching `refractive_index`."""
    lam = _check_wavelength(wavelength_nm)
    coeffs = SELLMEIER[material]
    n_o = _principal(coeffs["o"], lam)
    dn_o = _principal_derivative(coeffs["o"], lam)
    if Ray(ray) is Ray.ORDINARY:
        return dn_o if dn_o.ndim else float(dn_o)
    n_e = _principal(coeffs["e"], lam)
    dn_e = _principal_derivative(coeffs["e"], lam)
    theta = np.radians(angle_deg)
    n = _angle_index(n_o, n_e, theta)
    # differentiate 1/n^2 = cos^2/n_o^2 + sin^2/n_e^2
    dn = n**3 * (np.cos(theta) ** 2 * dn_o / n_o**3 + np.sin(theta) ** 2 * dn_e / n_e**3)
    return dn if dn.ndim else float(dn)


def group_index(wavelength_nm, ray="ordinary", angle_deg=90.0, material="BBO"):
    n = refractive_index(wavelength_nm, ray, angle_deg, material)
    return n - np.asarray(wavelength_nm) * index_derivative(wavelength_nm, ray, angle_deg, material)


def group_velocity(wavelength_nm, ray="ordinary", angle_deg=90.0, material="BBO"):
    """u = c / (n - lam dn/dlam), in mm/fs."""
    return C_MM_PER_FS / group_index(wavelength_nm, ray, angle_deg, material)


def phase_matching_angle(pump_center_nm, material="BBO"):
    """Collinear, frequency-degenerate type-II (e -> o + e) phase-matching angle in degrees.

    Solves ``n_e(theta, lp)/lp = (n_o(2 lp) + n_e(theta, 2 lp)) / (2 lp)``.
    """
    lp = float(pump_center_nm)
    ls = 2.0 * lp
    _check_wavelength([lp, ls])

    def mismatch(theta_deg):
        kp = refractive_index(lp, "extraordinary", theta_deg, material) / lp
        ks = (
            refractive_index(ls, "ordinary", material=material)
            + refractive_index(ls, "extraordinary", theta_deg, material)
        ) / ls
        return kp - ks

    lo, hi = 1e-3, 90.0 - 1e-3
    if mismatch(lo) * mismatch(hi) > 0:
        raise DomainError(f"no type-II phase matching for a {lp} nm pump in {material}")
    return float(brentq(mismatch, lo, hi, xtol=1e-10))


def dispersion_summary(crystal: CrystalParams, pump_center_nm: float, down_center_nm: float):
    """Group velocities and delay mismatches for a frequency-degenerate type-II crystal.

    The pump and the down-converted e-ray both see the angle-tuned index at the
    crystal's fixed phase-matching angle.
    """
    if abs(down_center_nm - 2.0 * pump_center_nm) > 0.01 * down_center_nm:
        raise DomainError(
            f"down-converted centre {down_center_nm} nm is not degenerate with pump {pump_center_nm} nm"
        )
    ang = crystal.phase_matching_angle_deg
    mat = crystal.material
    u_p = float(group_velocity(pump_center_nm, "extraordinary", ang, mat))
    u_o = float(group_velocity(down_center_nm, "ordinary", ang, mat))
    u_e = float(group_velocity(down_center_nm, "extraordinary", ang, mat))
    d = 1.0 / u_o - 1.0 / u_e
    d_plus = 1.0 / u_p - 0.5 * (1.0 / u_o + 1.0 / u_e)
    return DispersionSummary(
        n_o=float(refractive_index(down_center_nm, "ordinary", material=mat)),
        n_e_effective=float(refractive_index(down_center_nm, "extraordinary", ang, mat)),
        u_p=u_p,
        u_o=u_o,
        u_e=u_e,
        D=d,
        D_plus=d_plus,
        length_mm=crystal.length_mm,
    )
