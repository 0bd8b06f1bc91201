import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavelet_landau.filters import make_filter, read_filter
from wavelet_landau.inverse import (
    TailError,
    extract_coefficient,
    extract_filter,
    filter_roundtrip,
    k_variation,
    mra_condition_sum,
    sample_k,
    write_extracted,
)
from wavelet_landau.landau import filter_kq_function, sublattice_criterion
from wavelet_landau.zak import KqFunction, LineFunction, zak_transform

A = math.sqrt(2 * math.pi)
BUILTINS = ["haar", "d4", "d6"]


def quasi_periodic(cell_rule):
    """Extend a rule given on the cell to the plane by the kq boundary conditions."""

    def h(k, q):
        k, q = np.broadcast_arrays(np.asarray(k, float), np.asarray(q, float))
        j = np.floor(q / A)
        return np.exp(1j * k * j * A) * cell_rule(k, q - j * A)

    return h


def smooth_phase(k, q):
    theta = 0.7 * np.sin(2 * np.pi * k / A) + 0.3 * np.cos(2 * np.pi * q / A) + 0.2 * np.sin(2 * np.pi * (k + q) / A)
    return np.exp(1j * theta) / math.sqrt(2 * np.pi)


PHASE = KqFunction.from_function(quasi_periodic(smooth_phase))


def test_haar_extraction_is_k_independent_and_exact():
    t = filter_kq_function(make_filter("haar"))
    ks = sample_k(8)
    for n, expected in [(0, 1 / math.sqrt(2)), (1, 1 / math.sqrt(2)), (2, 0), (-1, 0)]:
        vals = extract_coefficient(t, n, ks)
        assert np.max(np.abs(vals - expected)) < 1e-14
        assert np.max(np.abs(vals - vals[0])) <= 1e-12


def test_constant_source():
    c = 0.4 - 0.3j
    h = KqFunction.from_function(lambda k, q: np.full(np.broadcast(k, q).shape, c))
    vals = extract_coefficient(h, np.arange(-3, 4), 1.1)
    expected = np.where(np.arange(-3, 4) == 0, c * A, 0)
    assert np.max(np.abs(vals - expected)) < 1e-14


def test_grid_only_extraction_matches_evaluator():
    t = filter_kq_function(make_filter("d4"), 1, 32, 32)
    g = KqFunction(t.values)
    k = t.k_grid[5]
    np.testing.assert_allclose(extract_coefficient(g, np.arange(-2, 6), k), extract_coefficient(t, np.arange(-2, 6), k), atol=1e-13)
    with pytest.raises(ValueError):
        extract_coefficient(g, 0, 0.123)


@pytest.mark.parametrize("name", BUILTINS)
@pytest.mark.parametrize("L", [1, 2, 3])
def test_roundtrip(name, L):
    rep = filter_roundtrip(make_filter(name), L)
    tol = 1e-12 if name == "haar" else 1e-10
    assert rep.max_dev <= tol
    assert rep.k_variation <= 1e-10
    assert rep.recovered.shape == (8, rep.indices.size)


@pytest.mark.parametrize("name", BUILTINS)
@pytest.mark.parametrize("l", [0, 1, 2])
def test_mra_condition_on_filter_images(name, l):
    t = filter_kq_function(make_filter(name))
    for k in sample_k(8):
        assert abs(mra_condition_sum(t, l, k) - (l == 0)) <= 1e-10


@pytest.mark.parametrize("l", [0, 1, 2])
def test_mra_condition_on_pure_phase(l):
    assert sublattice_criterion(PHASE, 2).max_dev < 1e-14
    for k in sample_k(8):
        assert abs(mra_condition_sum(PHASE, l, k) - (l == 0)) <= 1e-8


def test_pure_phase_extraction_depends_on_k():
    # a genuinely k-dependent source: the extracted bank moves with k
    assert k_variation(PHASE, range(-3, 4), sample_k(8)) > 1e-2


@settings(max_examples=20, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.integers(1, 3))
def test_random_smooth_phases_pass(a1, a2, f):
    def rule(k, q):
        return np.exp(1j * (a1 * np.sin(2 * np.pi * f * q / A + k) + a2 * np.cos(2 * np.pi * k / A))) / math.sqrt(2 * np.pi)

    h = KqFunction.from_function(quasi_periodic(rule), 16, 16)
    for k in (0.2, 1.9):
        for l in (0, 1):
            assert abs(mra_condition_sum(h, l, k) - (l == 0)) <= 1e-8


def test_violation_is_detected():
    # Gaussian image: |h| is not constant, the sums are off.  At k = 0 the
    # boundary phase is 1, so h(0, .) is smooth and periodic on the cell.
    h = zak_transform(LineFunction.normalized_gaussian())
    assert sublattice_criterion(h, 2).max_dev > 1e-2
    assert abs(mra_condition_sum(h, 0, 0.0) - 1) > 1e-3


def test_tail_error_with_short_window():
    with pytest.raises(TailError):
        mra_condition_sum(PHASE, 0, 0.5, n_window=3)


def test_tail_error_for_slowly_decaying_source():
    # away from k = 0 the Gaussian image jumps at the cell edge: 1/n coefficients
    h = zak_transform(LineFunction.normalized_gaussian())
    with pytest.raises(TailError):
        mra_condition_sum(h, 0, 0.5)
    jump = KqFunction.from_function(quasi_periodic(lambda k, q: np.exp(1j * q) / math.sqrt(2 * np.pi)))
    with pytest.raises(TailError):
        mra_condition_sum(jump, 0, 0.5)


def test_automatic_window():
    ex = extract_filter(filter_kq_function(make_filter("d6")), 0.3)
    assert ex.n_range == (-13, 13)  # last tap at 5, padded by 8
    assert abs(ex.qmf_sum(0) - 1) < 1e-13


def test_extracted_export(tmp_path):
    ex = extract_filter(filter_kq_function(make_filter("d4")), 0.25, n_window=4)
    path = tmp_path / "ex.txt"
    write_extracted(ex, path)
    text = path.read_text()
    assert text.startswith("# k=0.25\n")
    back = read_filter(path)
    assert back.n_min == -4
    np.testing.assert_allclose(back.coeffs[4:8], make_filter("d4").coeffs, atol=1e-14)
    fb = ex.as_filter()
    assert fb.n_min == -4 and len(fb) == 9
