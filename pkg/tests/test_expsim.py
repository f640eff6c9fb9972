import math

import numpy as np
import pytest

from bellsynth import expsim, qstate
from bellsynth.concentrator import MeasurementSetting
from bellsynth.errors import DomainError, InvariantError
from bellsynth.expsim import CountTable, DetectionConfig, EventStream

BELL = qstate.bell_phi()
PEAK = MeasurementSetting(0.0, 45.0, 45.0, 0.0)


def test_same_seed_same_stream():
    cfg = DetectionConfig(duration_s=0.2, rng_seed=11)
    a = expsim.simulate_events(BELL, PEAK, cfg)
    b = expsim.simulate_events(BELL, PEAK, cfg)
    assert np.array_equal(a.time_ns, b.time_ns)
    assert np.array_equal(a.detector, b.detector)
    c = expsim.simulate_events(BELL, PEAK, DetectionConfig(duration_s=0.2, rng_seed=12))
    assert len(c) != len(a) or not np.array_equal(c.time_ns, a.time_ns)


def test_stream_is_sorted_and_in_range():
    cfg = DetectionConfig(duration_s=0.2, rng_seed=3)
    s = expsim.simulate_events(BELL, PEAK, cfg)
    assert s.is_sorted()
    assert s.time_ns.min() >= 0 and s.time_ns.max() <= cfg.duration_ns
    assert set(np.unique(s.detector)) <= {expsim.D1, expsim.D2}


def test_singles_rates():
    cfg = DetectionConfig(duration_s=2.0, rng_seed=5)
    s = expsim.simulate_events(BELL, PEAK, cfg)
    # each photon passes its analyzer with probability 1/2
    expect = cfg.pair_rate_hz * 0.2 * 0.5 * cfg.duration_s + cfg.background1_hz * cfg.duration_s
    for d in (expsim.D1, expsim.D2):
        n = s.times(d).size
        assert abs(n - expect) < 4 * math.sqrt(expect)


def test_coincidences_match_expectation():
    cfg = DetectionConfig(duration_s=1.0, rng_seed=9)
    s = expsim.simulate_events(BELL, PEAK, cfg)
    hist, summ = expsim.coincidence_histogram(s, cfg)
    expect = expsim.expected_true_coincidences(BELL, PEAK, cfg) + expsim.expected_accidentals(BELL, PEAK, cfg)
    assert abs(summ.coincidences - expect) < 4 * math.sqrt(expect)
    assert hist.counts.sum() == summ.coincidences
    assert hist.counts.size == 60
    # jitter-limited peak sits at zero delay
    assert abs(hist.bin_centers_ns[np.argmax(hist.counts)]) < 0.3


def test_crossed_analyzers_leave_only_accidentals():
    dip = MeasurementSetting(0.0, 45.0, -45.0, 0.0)
    cfg = DetectionConfig(duration_s=1.0, rng_seed=1)
    assert expsim.expected_true_coincidences(BELL, dip, cfg) == pytest.approx(0.0, abs=1e-9)
    _, summ = expsim.coincidence_histogram(expsim.simulate_events(BELL, dip, cfg), cfg)
    assert summ.coincidences < 10


def test_unsorted_stream_is_rejected():
    s = EventStream(np.array([1, 2], np.int8), np.array([5.0, 1.0]), np.zeros(2, np.int8), 10.0)
    with pytest.raises(InvariantError):
        expsim.coincidence_histogram(s, DetectionConfig())


def test_event_rows_use_labels():
    cfg = DetectionConfig(duration_s=1e-4, rng_seed=0)
    rows = list(expsim.simulate_events(BELL, PEAK, cfg).rows())
    assert rows and {r[0] for r in rows} <= {"D1", "D2"} and {r[2] for r in rows} <= {"pair", "background"}


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(efficiency1=1.5),
        dict(pair_rate_hz=-1.0),
        dict(duration_s=0.0),
        dict(coincidence_window_ns=0.05, tac_bin_ns=0.1),
        dict(rng_seed=-1),
    ],
)
def test_detection_validation(kwargs):
    with pytest.raises(DomainError):
        DetectionConfig(**kwargs)


@pytest.mark.parametrize("th", [(0, 0), (45, 45), (10, 77), (45, -45)])
def test_outcome_probabilities_normalized(th):
    p = expsim.outcome_probabilities(qstate.partial_state(0.6, 0.2), *th)
    assert p.sum() == pytest.approx(1.0)
    assert np.all(p >= 0)


@pytest.mark.parametrize("eps,phi", [(1.0, 0.0), (0.5, 0.7), (0.0, 0.0)])
def test_noiseless_tomography_is_exact(eps, phi):
    rho = qstate.partial_state(eps, phi)
    est = expsim.reconstruct_state(expsim.expected_count_table(rho, 1000.0))
    assert np.allclose(est.matrix, rho.matrix, atol=1e-12)


def test_random_state_tomography_is_exact():
    rng = np.random.default_rng(4)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = g @ g.conj().T
    rho = qstate.TwoQubitState(m / np.trace(m).real)
    est = expsim.linear_inversion(expsim.expected_count_table(rho, 1.0))
    assert np.allclose(est, rho.matrix, atol=1e-12)


def test_sampled_tomography():
    counts = expsim.tomography_counts(BELL, 100_000, seed=2)
    assert counts.counts.dtype == np.int64
    est = expsim.reconstruct_state(counts)
    assert qstate.fidelity(BELL, est) > 0.98
    assert len(list(counts.rows())) == 16


def test_project_psd():
    m = np.diag([0.7, 0.5, -0.1, -0.1]).astype(complex)
    out = expsim.project_psd(m)
    w = np.linalg.eigvalsh(out)
    assert w.min() >= -1e-15 and np.trace(out).real == pytest.approx(1.0)


def test_count_table_validation():
    with pytest.raises(DomainError):
        CountTable(np.zeros((3, 4)), 10)
    with pytest.raises(DomainError):
        CountTable(np.full((4, 4), 11), 10)
    with pytest.raises(DomainError):
        expsim.tomography_counts(BELL, 0, 1)


def test_jittered_pairs_fall_inside_window():
    # accidental-free stream: every pair-pair coincidence is a true one
    cfg = DetectionConfig(duration_s=2.0, background1_hz=0.0, background2_hz=0.0, efficiency1=1.0, efficiency2=1.0, rng_seed=8)
    s = expsim.simulate_events(qstate.bell_phi(), MeasurementSetting(0, 0, 0, 0), cfg)
    _, summ = expsim.coincidence_histogram(s, cfg)
    # both photons pass at 0/0 with probability 1/2, and then both are detected
    assert summ.coincidences / min(summ.singles1, summ.singles2) > 0.999


def test_maximally_mixed_tomography_counts():
    shots = 100_000
    c = expsim.tomography_counts(qstate.maximally_mixed(), shots, seed=3).counts
    sigma = math.sqrt(shots * 0.25 * 0.75)
    assert np.all(np.abs(c - shots / 4) < 4 * sigma)
