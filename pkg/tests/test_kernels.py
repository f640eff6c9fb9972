import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellsynth import _kernels_py, kernels

BACKENDS = kernels.backends()


def brute_force_pairs(t1, t2, window, bin_width):
    nbins = int(round(2 * window / bin_width))
    counts = np.zeros(nbins, dtype=np.int64)
    n = 0
    for a in t1:
        for b in t2:
            dt = b - a
            if -window <= dt <= window:
                k = min(max(int(np.floor((dt + window) / bin_width)), 0), nbins - 1)
                counts[k] += 1
                n += 1
    return counts, n


def test_compiled_backend_is_built():
    assert "cython" in BACKENDS
    assert kernels.BACKEND == "cython"


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_interference_sums(name):
    rng = np.random.default_rng(0)
    a = rng.normal(size=(8, 16)) + 1j * rng.normal(size=(8, 16))
    b = rng.normal(size=(8, 16)) + 1j * rng.normal(size=(8, 16))
    na, nb, x = BACKENDS[name].interference_sums(a, b)
    assert na == pytest.approx(np.sum(np.abs(a) ** 2), rel=1e-12)
    assert nb == pytest.approx(np.sum(np.abs(b) ** 2), rel=1e-12)
    assert x == pytest.approx(np.sum(a.conj() * b), rel=1e-12)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_interference_sums_shape_mismatch(name):
    with pytest.raises(ValueError):
        BACKENDS[name].interference_sums(np.ones(3, complex), np.ones(4, complex))


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(0, 100), max_size=40),
    st.lists(st.floats(0, 100), max_size=40),
    st.sampled_from([(3.0, 0.1), (1.0, 0.25), (5.0, 1.0)]),
)
def test_pairing_matches_brute_force(t1, t2, wb):
    t1, t2 = np.sort(np.array(t1, float)), np.sort(np.array(t2, float))
    window, bw = wb
    ref_counts, ref_n = brute_force_pairs(t1, t2, window, bw)
    for mod in BACKENDS.values():
        counts, n = mod.coincidence_pairs(t1, t2, window, bw)
        assert n == ref_n
        assert np.array_equal(counts, ref_counts)


def test_window_edges_are_inclusive():
    for mod in BACKENDS.values():
        counts, n = mod.coincidence_pairs(np.array([10.0]), np.array([7.0, 13.0]), 3.0, 0.5)
        assert n == 2
        assert counts[0] == 1 and counts[-1] == 1


def test_backends_agree_on_large_stream():
    rng = np.random.default_rng(1)
    t1 = np.sort(rng.uniform(0, 1e7, 20000))
    t2 = np.sort(rng.uniform(0, 1e7, 20000))
    ref = _kernels_py.coincidence_pairs(t1, t2, 3.0, 0.1)
    for mod in BACKENDS.values():
        c, n = mod.coincidence_pairs(t1, t2, 3.0, 0.1)
        assert n == ref[1] and np.array_equal(c, ref[0])


def test_empty_inputs():
    for mod in BACKENDS.values():
        c, n = mod.coincidence_pairs(np.array([]), np.array([1.0]), 3.0, 0.1)
        assert n == 0 and c.sum() == 0 and c.size == 60


def test_benchmark_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main(["--repeat", "1"])
    out = capsys.readouterr().out
    assert "interference_sums" in out and "coincidence_pairs" in out


def test_fallback_selected_by_env():
    import os
    import subprocess
    import sys

    env = dict(os.environ, BELLSYNTH_KERNELS="python")
    out = subprocess.run(
        [sys.executable, "-c", "import bellsynth; print(bellsynth.BACKEND)"], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "python"
