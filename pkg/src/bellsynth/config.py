"""Flat ``section.key = value`` configuration files.

One assignment per line, ``#`` starts a comment. Units are part of the key
names. Unknown keys, duplicates and malformed values raise `ConfigError`
carrying the line number and key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .biphoton import FilterParams, GridSpec, PumpParams
from .dispersion import CrystalParams, phase_matching_angle
from .errors import BellSynthError, ConfigError
from .expsim import DetectionConfig


def _float(raw):
    v = float(raw)
    if math.isnan(v):
        raise ValueError("nan is not allowed")
    return v


def _int(raw):
    return int(raw, 0)


def _optional_float(raw):
    if raw.lower() in ("none", "inf", "infinity", "off"):
        return None
    return _float(raw)


def _float_list(raw):
    out = []
    for part in raw.split(","):
        part = part.strip()
        if part.lower() in ("inf", "infinity", "none"):
            out.append(math.inf)
        else:
            out.append(_float(part))
    if not out:
        raise ValueError("empty list")
    return out


def _str(raw):
    return raw


# key -> (parser, default). A default of None means "derived" or "absent".
SCHEMA = {
    "crystal.material": (_str, "BBO"),
    "crystal.length_mm": (_float, 3.0),
    "crystal.angle_deg": (_optional_float, None),
    "crystal.cut": (_str, "type-II"),
    "pump.mode": (_str, "cw"),
    "pump.center_nm": (_float, 351.1),
    "pump.bandwidth_nm": (_float, 0.0),
    "filter1.center_nm": (_optional_float, None),
    "filter1.fwhm_nm": (_optional_float, None),
    "filter1.shape": (_str, "gaussian"),
    "filter2.center_nm": (_optional_float, None),
    "filter2.fwhm_nm": (_optional_float, None),
    "filter2.shape": (_str, "gaussian"),
    "grid.n_plus": (_int, 512),
    "grid.n_minus": (_int, 512),
    "grid.n_minus_cw": (_int, 1024),
    "grid.span_thz": (_float, 40.0),
    "grid.span_plus_thz": (_float, 40.0),
    "grid.cw_window_fs": (_float, 1.0),
    "phase.phi_rad": (_float, 0.0),
    "sweep.tau_min_fs": (_float, -800.0),
    "sweep.tau_max_fs": (_float, 800.0),
    "sweep.tau_step_fs": (_float, 10.0),
    "sweep.theta1_deg": (_float, 45.0),
    "sweep.theta2_deg": (_float, 45.0),
    "sweep.shape": (_str, "auto"),
    "sweep.phi_scan_rad": (_float_list, None),
    "analyzer.tau_fs": (_float, 0.0),
    "analyzer.theta1_deg": (_float, 45.0),
    "analyzer.theta2_min_deg": (_float, 0.0),
    "analyzer.theta2_max_deg": (_float, 180.0),
    "analyzer.theta2_step_deg": (_float, 5.0),
    "universality.pump_bandwidths_nm": (_float_list, [0.0, 1.0, 2.0, 4.0]),
    "universality.lengths_mm": (_float_list, [0.5, 1.0, 3.0]),
    "universality.filter_fwhms_nm": (_float_list, [math.inf, 20.0, 5.0, 1.0]),
    "werner.tau_min_fs": (_float, 0.0),
    "werner.tau_max_fs": (_float, 800.0),
    "werner.tau_step_fs": (_float, 20.0),
    "detection.pair_rate_hz": (_float, 2.0e4),
    "detection.efficiency1": (_float, 0.2),
    "detection.efficiency2": (_float, 0.2),
    "detection.background1_hz": (_float, 1.0e4),
    "detection.background2_hz": (_float, 1.0e4),
    "detection.coincidence_window_ns": (_float, 3.0),
    "detection.tac_bin_ns": (_float, 0.1),
    "detection.duration_s": (_float, 1.0),
    "detection.jitter_ns": (_float, 0.3),
    "detection.seed": (_int, 0),
    "events.tau_fs": (_float, 0.0),
    "events.theta1_deg": (_float, 45.0),
    "events.theta2_deg": (_float, 45.0),
    "tomography.tau_fs": (_float, 0.0),
    "tomography.shots": (_int, 1_000_000),
    "tomography.seed": (_int, 0),
}

BUNDLED = ("cw_fig3", "pulsed_fig4")


def parse_text(text: str, source: str = "<config>") -> dict:
    """Parse config text into ``{key: (value, line)}`` for keys present."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'section.key = value' in {source}", line=lineno)
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError("unknown key", line=lineno, key=key)
        if key in out:
            raise ConfigError("duplicate key", line=lineno, key=key)
        if raw == "":
            raise ConfigError("missing value", line=lineno, key=key)
        parser, _ = SCHEMA[key]
        try:
            value = parser(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value '{raw}' ({exc})", line=lineno, key=key) from None
        out[key] = (value, lineno)
    return out


@dataclass(frozen=True)
class SetupConfig:
    """Everything the biphoton amplitude depends on."""

    crystal: CrystalParams
    pump: PumpParams
    filter1: Optional[FilterParams] = None
    filter2: Optional[FilterParams] = None
    grid: GridSpec = field(default_factory=GridSpec)
    phase_phi: float = 0.0

    @property
    def down_center_nm(self):
        return 2.0 * self.pump.center_nm

    def with_params(self, *, bandwidth_nm=None, length_mm=None, filter_fwhm_nm=None):
        """Copy with the pump bandwidth, crystal length and/or both filter FWHMs replaced.

        A zero bandwidth selects a cw pump; an infinite FWHM removes the filters.
        """
        pump = self.pump
        if bandwidth_nm is not None:
            mode = "cw" if bandwidth_nm == 0 else "pulsed"
            pump = PumpParams(mode, pump.center_nm, float(bandwidth_nm))
        crystal = self.crystal
        if length_mm is not None:
            crystal = CrystalParams(
                crystal.material, float(length_mm), crystal.phase_matching_angle_deg, crystal.cut
            )
        f1, f2 = self.filter1, self.filter2
        if filter_fwhm_nm is not None:
            fw = None if math.isinf(filter_fwhm_nm) else float(filter_fwhm_nm)
            f1 = FilterParams(self.down_center_nm, fw)
            f2 = FilterParams(self.down_center_nm, fw)
        return SetupConfig(crystal, pump, f1, f2, self.grid, self.phase_phi)


class RunConfig:
    """Typed view over a parsed config file with schema defaults."""

    def __init__(self, entries: dict, source: str = "<config>"):
        self._entries = entries
        self.source = source

    @classmethod
    def from_text(cls, text, source="<config>"):
        return cls(parse_text(text, source), source)

    @classmethod
    def load(cls, path_or_name):
        """Load a file, or one of the bundled configs by name (e.g. ``cw_fig3``)."""
        p = Path(path_or_name)
        if not p.exists() and str(path_or_name) in BUNDLED:
            text = resources.files("bellsynth").joinpath("configs", f"{path_or_name}.cfg").read_text()
            return cls.from_text(text, f"<bundled {path_or_name}>")
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config '{path_or_name}': {exc.strerror}") from None
        return cls.from_text(text, str(p))

    def __getitem__(self, key):
        if key in self._entries:
            return self._entries[key][0]
        return SCHEMA[key][1]

    def has(self, key):
        return key in self._entries

    def line(self, key):
        entry = self._entries.get(key)
        return entry[1] if entry else None

    def override(self, key, value):
        self._entries[key] = (value, None)

    def _build(self, key, factory, *args):
        try:
            return factory(*args)
        except (BellSynthError, ValueError, TypeError) as exc:
            raise ConfigError(str(exc), line=self.line(key), key=key) from None

    def setup(self) -> SetupConfig:
        pump = self._build(
            "pump.mode", PumpParams, self["pump.mode"], self["pump.center_nm"], self["pump.bandwidth_nm"]
        )
        angle = self["crystal.angle_deg"]
        if angle is None:
            angle = self._build("pump.center_nm", phase_matching_angle, pump.center_nm, self["crystal.material"])
        crystal = self._build(
            "crystal.length_mm",
            CrystalParams,
            self["crystal.material"],
            self["crystal.length_mm"],
            angle,
            self["crystal.cut"],
        )
        filters = []
        for name in ("filter1", "filter2"):
            fwhm = self[f"{name}.fwhm_nm"]
            if fwhm is None:
                filters.append(None)
                continue
            center = self[f"{name}.center_nm"] or 2.0 * pump.center_nm
            filters.append(
                self._build(f"{name}.fwhm_nm", FilterParams, center, fwhm, self[f"{name}.shape"])
            )
        grid = self._build(
            "grid.n_plus",
            GridSpec,
            self["grid.n_plus"],
            self["grid.n_minus"],
            self["grid.n_minus_cw"],
            self["grid.span_thz"],
            self["grid.span_plus_thz"],
            self["grid.cw_window_fs"],
        )
        return SetupConfig(crystal, pump, filters[0], filters[1], grid, self["phase.phi_rad"])

    def detection(self) -> DetectionConfig:
        return self._build(
            "detection.pair_rate_hz",
            DetectionConfig,
            self["detection.pair_rate_hz"],
            self["detection.efficiency1"],
            self["detection.efficiency2"],
            self["detection.background1_hz"],
            self["detection.background2_hz"],
            self["detection.coincidence_window_ns"],
            self["detection.tac_bin_ns"],
            self["detection.duration_s"],
            self["detection.seed"],
            self["detection.jitter_ns"],
        )

    def tau_grid(self, section):
        lo, hi, step = self[f"{section}.tau_min_fs"], self[f"{section}.tau_max_fs"], self[f"{section}.tau_step_fs"]
        return self._range(section + ".tau_step_fs", lo, hi, step)

    def theta2_grid(self):
        return self._range(
            "analyzer.theta2_step_deg",
            self["analyzer.theta2_min_deg"],
            self["analyzer.theta2_max_deg"],
            self["analyzer.theta2_step_deg"],
        )

    def _range(self, key, lo, hi, step):
        if not step > 0 or not hi >= lo:
            raise ConfigError("range needs min <= max and a positive step", line=self.line(key), key=key)
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [lo + k * step for k in range(n)]
