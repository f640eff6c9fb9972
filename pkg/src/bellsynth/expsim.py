"""Monte Carlo detection chain and simulated two-qubit tomography.

Random numbers come from numpy's PCG64. A run seeded with ``s`` spawns
independent child streams from ``SeedSequence(s)`` in this fixed order:

    0 pair emission times     3 pair timing jitter
    1 analyzer outcomes       4 background at D1
    2 detector efficiencies   5 background at D2

Each stream draws a fixed number of variates per pair, so changing one
parameter does not reshuffle the draws of another process.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .concentrator import MeasurementSetting
from .errors import BellSynthError, DomainError, InvariantError
from .qstate import TwoQubitState, _as_state, coincidence_probability, projector_probability

D1, D2 = 1, 2
PAIR, BACKGROUND = 0, 1
DETECTOR_LABELS = {D1: "D1", D2: "D2"}
ORIGIN_LABELS = {PAIR: "pair", BACKGROUND: "background"}

TOMO_BASES = ("H", "V", "D", "L")
_TOMO_KETS = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "D": np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    "L": np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2.0),
}


@dataclass(frozen=True)
class DetectionConfig:
    pair_rate_hz: float = 2.0e4
    efficiency1: float = 0.2
    efficiency2: float = 0.2
    background1_hz: float = 1.0e4
    background2_hz: float = 1.0e4
    coincidence_window_ns: float = 3.0
    tac_bin_ns: float = 0.1
    duration_s: float = 1.0
    rng_seed: int = 0
    jitter_ns: float = 0.3

    def __post_init__(self):
        for name in ("pair_rate_hz", "background1_hz", "background2_hz", "jitter_ns"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise DomainError(f"{name} must be finite and >= 0, got {v}")
        for name in ("efficiency1", "efficiency2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        for name in ("coincidence_window_ns", "tac_bin_ns", "duration_s"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive, got {v}")
        if self.coincidence_window_ns < self.tac_bin_ns:
            raise DomainError("coincidence window must be at least one TAC bin")
        if not 0 <= int(self.rng_seed) < 2**64:
            raise DomainError("rng_seed must be a 64-bit unsigned integer")

    @property
    def duration_ns(self):
        return self.duration_s * 1e9


@dataclass(frozen=True)
class EventRecord:
    detector: int
    time_ns: float
    origin: int


@dataclass(frozen=True, eq=False)
class EventStream:
    """Time-ordered detection events stored column-wise."""

    detector: np.ndarray
    time_ns: np.ndarray
    origin: np.ndarray
    duration_ns: float

    def __len__(self):
        return self.time_ns.size

    def __iter__(self):
        for d, t, o in zip(self.detector.tolist(), self.time_ns.tolist(), self.origin.tolist()):
            yield EventRecord(d, t, o)

    def times(self, detector):
        return self.time_ns[self.detector == detector]

    def is_sorted(self):
        return bool(np.all(np.diff(self.time_ns) >= 0))

    def rows(self):
        for ev in self:
            yield DETECTOR_LABELS[ev.detector], ev.time_ns, ORIGIN_LABELS[ev.origin]


@dataclass(frozen=True, eq=False)
class Histogram:
    bin_centers_ns: np.ndarray
    counts: np.ndarray

    def rows(self):
        return zip(self.bin_centers_ns.tolist(), self.counts.tolist())


@dataclass(frozen=True)
class CoincidenceSummary:
    singles1: int
    singles2: int
    coincidences: int
    accidentals_expected: float
    duration_s: float
    window_ns: float

    @property
    def true_estimate(self):
        return self.coincidences - self.accidentals_expected

    def as_dict(self):
        return {
            "singles1": self.singles1,
            "singles2": self.singles2,
            "coincidences": self.coincidences,
            "accidentals_expected": self.accidentals_expected,
            "true_estimate": self.true_estimate,
            "duration_s": self.duration_s,
            "window_ns": self.window_ns,
        }


def _streams(seed, n=6):
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(int(seed)).spawn(n)]


def outcome_probabilities(rho, theta1_deg, theta2_deg):
    """Joint probabilities (pass/pass, pass/block, block/pass, block/block)."""
    a = math.radians(theta1_deg)
    b = math.radians(theta2_deg)
    q = math.pi / 2
    p = np.array(
        [
            coincidence_probability(rho, a, b),
            coincidence_probability(rho, a, b + q),
            coincidence_probability(rho, a + q, b),
            coincidence_probability(rho, a + q, b + q),
        ]
    )
    return p / p.sum()


def simulate_events(rho, setting: MeasurementSetting, cfg: DetectionConfig) -> EventStream:
    """Emit, analyze, detect and timestamp photon pairs plus background clicks.

    Pairs arrive as a Poisson process. Each pair's analyzer outcome is drawn
    from the four joint probabilities; a photon that passes is detected with
    its detector's efficiency. The D2 partner is displaced from its D1 twin by
    Gaussian jitter of width ``cfg.jitter_ns``. Background clicks are
    independent Poisson processes. Events outside [0, duration] are dropped.
    """
    rho = _as_state(rho)
    g_time, g_outcome, g_eff, g_jit, g_bg1, g_bg2 = _streams(cfg.rng_seed)
    T = cfg.duration_ns

    n_pairs = int(g_time.poisson(cfg.pair_rate_hz * cfg.duration_s))
    t0 = np.sort(g_time.uniform(0.0, T, n_pairs))
    p = outcome_probabilities(rho, setting.theta1_deg, setting.theta2_deg)
    outcome = np.searchsorted(np.cumsum(p), g_outcome.uniform(size=n_pairs), side="right")
    outcome = np.minimum(outcome, 3)
    pass1 = (outcome == 0) | (outcome == 1)
    pass2 = (outcome == 0) | (outcome == 2)
    u = g_eff.uniform(size=(n_pairs, 2))
    det1 = pass1 & (u[:, 0] < cfg.efficiency1)
    det2 = pass2 & (u[:, 1] < cfg.efficiency2)
    jitter = g_jit.normal(0.0, 1.0, n_pairs) * cfg.jitter_ns

    t1 = t0[det1]
    t2 = (t0 + jitter)[det2]
    t2 = t2[(t2 >= 0.0) & (t2 <= T)]
    b1 = g_bg1.uniform(0.0, T, int(g_bg1.poisson(cfg.background1_hz * cfg.duration_s)))
    b2 = g_bg2.uniform(0.0, T, int(g_bg2.poisson(cfg.background2_hz * cfg.duration_s)))

    time = np.concatenate([t1, t2, b1, b2])
    detector = np.concatenate(
        [np.full(t1.size, D1), np.full(t2.size, D2), np.full(b1.size, D1), np.full(b2.size, D2)]
    ).astype(np.int8)
    origin = np.concatenate(
        [np.full(t1.size + t2.size, PAIR), np.full(b1.size + b2.size, BACKGROUND)]
    ).astype(np.int8)
    order = np.lexsort((origin, detector, time))
    return EventStream(detector[order], time[order], origin[order], T)


def coincidence_histogram(events: EventStream, cfg: DetectionConfig):
    """TAC histogram of t(D2) - t(D1) over [-window, +window] and a count summary.

    The accidental estimate is ``r1 * r2 * (2 * window) * duration`` with the
    singles rates measured from the stream.
    """
    if not events.is_sorted():
        raise InvariantError("event stream must be sorted by time")
    w = cfg.coincidence_window_ns
    t1 = events.times(D1)
    t2 = events.times(D2)
    counts, n_coinc = kernels.coincidence_pairs(t1, t2, w, cfg.tac_bin_ns)
    nbins = counts.size
    edges = np.linspace(-w, w, nbins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    T = cfg.duration_ns
    acc = (t1.size / T) * (t2.size / T) * 2.0 * w * T
    summary = CoincidenceSummary(
        singles1=int(t1.size),
        singles2=int(t2.size),
        coincidences=int(n_coinc),
        accidentals_expected=float(acc),
        duration_s=cfg.duration_s,
        window_ns=w,
    )
    return Histogram(centers, counts), summary


def expected_true_coincidences(rho, setting: MeasurementSetting, cfg: DetectionConfig) -> float:
    p = outcome_probabilities(rho, setting.theta1_deg, setting.theta2_deg)[0]
    return cfg.pair_rate_hz * cfg.efficiency1 * cfg.efficiency2 * p * cfg.duration_s


def expected_accidentals(rho, setting: MeasurementSetting, cfg: DetectionConfig) -> float:
    """Closed-form accidental count from the expected singles rates."""
    p = outcome_probabilities(rho, setting.theta1_deg, setting.theta2_deg)
    r1 = cfg.pair_rate_hz * cfg.efficiency1 * (p[0] + p[1]) + cfg.background1_hz
    r2 = cfg.pair_rate_hz * cfg.efficiency2 * (p[0] + p[2]) + cfg.background2_hz
    return r1 * r2 * 2.0 * cfg.coincidence_window_ns * 1e-9 * cfg.duration_s


# -- tomography ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CountTable:
    """Counts for the 16 settings (a, b) in {H, V, D, L}^2.

    ``counts[i, j]`` belongs to setting ``(TOMO_BASES[i], TOMO_BASES[j])``.
    Counts may be floats for noiseless expectation tables.
    """

    counts: np.ndarray
    total_per_setting: int

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.shape != (4, 4):
            raise DomainError("count table must be 4x4")
        if np.any(c < 0):
            raise DomainError("counts must be non-negative")
        if np.any(c > self.total_per_setting):
            raise DomainError("a count exceeds the per-setting total")

    def rows(self):
        for i, a in enumerate(TOMO_BASES):
            for j, b in enumerate(TOMO_BASES):
                yield a, b, self.counts[i, j], self.total_per_setting


def setting_probabilities(rho) -> np.ndarray:
    rho = _as_state(rho)
    return np.array(
        [[projector_probability(rho, _TOMO_KETS[a], _TOMO_KETS[b]) for b in TOMO_BASES] for a in TOMO_BASES]
    )


def tomography_counts(rho, shots_per_setting: int, seed: int) -> CountTable:
    """Binomial counts for each of the 16 projective settings."""
    shots = int(shots_per_setting)
    if shots <= 0:
        raise DomainError("shots_per_setting must be positive")
    g = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
    p = setting_probabilities(rho)
    return CountTable(g.binomial(shots, np.clip(p, 0.0, 1.0)).astype(np.int64), shots)


def expected_count_table(rho, shots_per_setting: float) -> CountTable:
    """Noiseless table of expectations (floats)."""
    return CountTable(setting_probabilities(rho) * shots_per_setting, shots_per_setting)


_PAULI = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]
_PAULI2 = [np.kron(a, b) for a, b in itertools.product(_PAULI, repeat=2)]


def _design_matrix():
    rows = []
    for a in TOMO_BASES:
        for b in TOMO_BASES:
            v = np.kron(_TOMO_KETS[a], _TOMO_KETS[b])
            proj = np.outer(v, v.conj())
            rows.append([np.real(np.trace(proj @ s)) / 4.0 for s in _PAULI2])
    return np.array(rows)


_DESIGN = _design_matrix()


def linear_inversion(counts: CountTable) -> np.ndarray:
    """Raw linear-inversion estimate (Hermitian, not necessarily PSD or unit trace)."""
    total = counts.total_per_setting
    if not total > 0:
        raise DomainError("count table has zero totals")
    if np.linalg.cond(_DESIGN) > 1e12:
        raise BellSynthError("tomography design matrix is singular")
    freqs = np.asarray(counts.counts, dtype=float).ravel() / total
    coeffs = np.linalg.solve(_DESIGN, freqs)
    m = sum(c * s for c, s in zip(coeffs, _PAULI2)) / 4.0
    return 0.5 * (m + m.conj().T)


def project_psd(m: np.ndarray) -> np.ndarray:
    """Clip negative eigenvalues and renormalize the trace."""
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w = np.clip(w, 0.0, None)
    if not w.sum() > 0:
        raise DomainError("estimate has no positive spectrum")
    out = (v * (w / w.sum())) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def reconstruct_state(counts: CountTable) -> TwoQubitState:
    """Linear inversion followed by projection onto the PSD cone."""
    return TwoQubitState(project_psd(linear_inversion(counts)))
