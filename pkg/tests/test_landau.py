import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavelet_landau.filters import make_filter
from wavelet_landau.landau import (
    LandauOrbital,
    LatticeSpec,
    direct_overlap,
    filter_kq,
    filter_kq_function,
    filter_line_function,
    format_wavefunction_grid,
    gram_slater,
    level_one_equivalence,
    level_one_overlap,
    magnetic_translate,
    overlap_kq,
    overlap_line,
    overlap_table,
    sublattice_criterion,
    sublattice_sites,
    synthesize,
)
from wavelet_landau.quadrature import QuadratureError
from wavelet_landau.zak import CELL, KqFunction, LineFunction, check_boundary, zak_transform

A = math.sqrt(2 * math.pi)
BUILTINS = ["haar", "d4", "d6"]
GAUSS = LineFunction.normalized_gaussian()


def gaussian_overlap(m, n):
    """Closed form for the unit Gaussian reduced function."""
    return (-1) ** (m * n) * math.exp(-(m * m + n * n) * math.pi / 2)


def four_tap(theta):
    c, s = math.cos(theta), math.sin(theta)
    return make_filter(np.array([1 - c + s, 1 + c + s, 1 + c - s, 1 - c - s]) / (2 * math.sqrt(2)))


# ---------------------------------------------------------------- lattice / T


def test_lattice_parameters():
    lat = LatticeSpec(3)
    assert lat.M == 6 and lat.filling == pytest.approx(1 / 6)
    assert lat.a**2 == pytest.approx(2 * math.pi)
    for bad in (0, -1, 1.5):
        with pytest.raises(ValueError):
            LatticeSpec(bad)


def test_haar_T2_modulus():
    T = filter_line_function(make_filter("haar"))
    w = np.linspace(0, A, 50, endpoint=False)
    np.testing.assert_allclose(np.abs(T(w)) ** 2, (1 + np.cos(A * w)) / A, atol=1e-15)
    assert T(-0.1) == 0 and T(A) == 0


def test_haar_T4_uses_doubled_stride():
    T = filter_line_function(make_filter("haar"), 2)
    w = np.linspace(0, A, 11, endpoint=False)
    expected = (1 + np.exp(-2j * w * A)) / math.sqrt(2 * A)
    np.testing.assert_allclose(T(w), expected, atol=1e-15)
    assert T.lo == 0 and T.hi == pytest.approx(A)


@pytest.mark.parametrize("name", BUILTINS)
@pytest.mark.parametrize("L", [1, 2, 3])
def test_T_has_unit_norm(name, L):
    assert abs(filter_line_function(make_filter(name), L).norm_squared() - 1) < 1e-12


def test_T_refuses_unverified_bank():
    with pytest.raises(ValueError):
        filter_line_function(make_filter([1, 1]))


@pytest.mark.parametrize("name", BUILTINS)
def test_closed_form_kq_matches_zak_transform(name):
    fb = make_filter(name)
    t = filter_kq_function(fb, 1, 32, 32)
    z = zak_transform(filter_line_function(fb), 32, 32)
    assert np.max(np.abs(t.values - z.values)) < 1e-12
    assert np.max(np.abs(t.values - t.values[0])) == 0
    assert check_boundary(t).passed


def test_closed_form_kq_off_cell():
    fb = make_filter("d4")
    k, q = 0.7, 0.4
    v = filter_kq(fb, 1, k, q)
    assert abs(filter_kq(fb, 1, k + A, q) - v) < 1e-14
    assert abs(filter_kq(fb, 1, k, q + A) - np.exp(1j * k * A) * v) < 1e-14
    assert abs(filter_kq(fb, 1, k, q - 2 * A) - np.exp(-2j * k * A) * v) < 1e-14


# ---------------------------------------------------------------- J criterion


@pytest.mark.parametrize("name", BUILTINS)
@pytest.mark.parametrize("L", [1, 2, 3])
def test_J_equals_L_over_pi(name, L):
    rep = sublattice_criterion(filter_kq_function(make_filter(name), L), 2 * L)
    assert rep.target == pytest.approx(L / math.pi)
    assert rep.max_dev <= 1e-10


def test_J_of_constant_modulus():
    h = KqFunction.from_function(lambda k, q: np.full(np.broadcast(k, q).shape, 1 / A, complex))
    rep = sublattice_criterion(h, 1)
    assert rep.max_dev < 1e-15
    assert rep.target == pytest.approx(1 / (2 * math.pi))


def test_J_detects_gaussian_failure():
    assert sublattice_criterion(zak_transform(GAUSS), 2).max_dev > 1e-2


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 2 * math.pi))
def test_J_holds_across_four_tap_family(theta):
    assert sublattice_criterion(filter_kq_function(four_tap(theta), 1, 32, 32), 2).max_dev < 1e-10


# ---------------------------------------------------------------- synthesis


def test_gaussian_level0_closed_form():
    orb = LandauOrbital(GAUSS)
    x, y = np.meshgrid(np.linspace(-5, 5, 11), np.linspace(-4, 6, 9))
    psi = orb(x, y)
    np.testing.assert_allclose(psi, np.exp(-(x * x + y * y) / 4) / math.sqrt(2 * math.pi), atol=1e-14)


@pytest.mark.parametrize("level", [0, 1])
def test_gaussian_normalization_on_grid(level):
    step = 0.25
    g = np.arange(-12, 12 + step, step)
    x, y = np.meshgrid(g, g)
    psi = synthesize(LandauOrbital(GAUSS, level), x, y)
    assert abs(np.sum(np.abs(psi) ** 2) * step * step - 1) < 1e-6


def test_haar_level0_normalization_on_grid():
    # |psi|^2 falls off like 1/y^2 (T_2 has jumps), so the mass missing from a
    # box |y| <= Y is ~ c/Y; extrapolate Y -> infinity from two boxes
    orb = LandauOrbital(filter_line_function(make_filter("haar")))
    step = 0.2
    gx = np.arange(-14, 10 + step, step)

    def mass(Y):
        gy = np.arange(-Y, Y + step / 2, step)
        w = np.ones_like(gy)
        w[0] = w[-1] = 0.5
        x, y = np.meshgrid(gx, gy)
        return np.sum(np.abs(synthesize(orb, x, y)) ** 2 * w[:, None]) * step * step

    m15, m30 = mass(15), mass(30)
    assert 1 - m30 > 0.01
    assert abs(2 * m30 - m15 - 1) < 1e-3


def test_orbital_validation():
    with pytest.raises(ValueError):
        LandauOrbital(GAUSS, level=2)
    half = LineFunction.gaussian(lambda w: 0.5 * GAUSS(w), 0.0, 1.0)
    with pytest.raises(ValueError):
        LandauOrbital(half)


def test_synthesis_reports_unreachable_tolerance():
    # declared bandwidth 0 hides a fast oscillation: panels are too coarse
    fast = LineFunction.compact(lambda w: np.exp(300j * np.asarray(w)) / math.sqrt(A), 0.0, A)
    with pytest.raises(QuadratureError):
        synthesize(LandauOrbital(fast), np.array([0.3, -1.0]), np.array([0.2, 0.5]))


def test_translated_orbital_indices_add():
    o = LandauOrbital(GAUSS, 1, 2, -1).translated(1, 3)
    assert (o.level, o.m, o.n) == (1, 3, 2)


# ---------------------------------------------------------------- translations


def _probe_points():
    rng = np.random.default_rng(7)
    return rng.uniform(-4, 4, 40), rng.uniform(-4, 4, 40)


def test_translate_identity():
    f = LandauOrbital(GAUSS)
    x, y = _probe_points()
    assert magnetic_translate(f, 0, 0) is f


@pytest.mark.parametrize("m,n", [(1, 0), (0, 1), (2, -3), (-1, 1)])
def test_translate_modulus_covariance(m, n):
    base = LandauOrbital(filter_line_function(make_filter("d4")))
    x, y = _probe_points()
    moved = magnetic_translate(base, m, n)(x, y)
    ref = base(x + m * A, y + n * A)
    # equal up to the rounding of a unit-modulus phase
    np.testing.assert_allclose(np.abs(moved), np.abs(ref), rtol=1e-15, atol=0)


def test_translate_composition():
    f = lambda x, y: np.exp(0.3j * x - 0.2 * y * y + 0.1 * x * y)  # noqa: E731
    x, y = _probe_points()
    two_step = magnetic_translate(magnetic_translate(f, 1, 0), 0, 1)(x, y)
    joint = magnetic_translate(f, 1, 1)(x, y)
    np.testing.assert_allclose(np.abs(two_step), np.abs(joint), atol=1e-12)
    # on this lattice the two translations commute and compose exactly
    np.testing.assert_allclose(two_step, joint, atol=1e-12)
    other_order = magnetic_translate(magnetic_translate(f, 0, 1), 1, 0)(x, y)
    np.testing.assert_allclose(other_order, joint, atol=1e-12)


def test_orbital_translate_matches_generic_translate():
    orb = LandauOrbital(GAUSS, 1)
    x, y = _probe_points()
    np.testing.assert_allclose(orb.translated(1, -2)(x, y), magnetic_translate(orb, 1, -2)(x, y), atol=1e-15)


# ---------------------------------------------------------------- overlaps


@pytest.mark.parametrize("m,n", [(0, 0), (1, 0), (0, 1), (1, 1), (-2, 1), (1, 3), (3, -2)])
def test_gaussian_overlap_line_closed_form(m, n):
    assert abs(overlap_line(GAUSS, m, n) - gaussian_overlap(m, n)) < 1e-14


@pytest.mark.parametrize("m,n", [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 2)])
def test_gaussian_overlap_kq_closed_form(m, n):
    assert abs(overlap_kq(zak_transform(GAUSS), m, n) - gaussian_overlap(m, n)) < 1e-12


@pytest.mark.parametrize("name", BUILTINS)
@pytest.mark.parametrize("L", [1, 2])
def test_sublattice_orthonormality_both_forms(name, L):
    fb = make_filter(name)
    line = overlap_table(filter_line_function(fb, L), 2 * L)
    cell = overlap_table(filter_kq_function(fb, L), 2 * L)
    assert line.max_dev <= 1e-10 and cell.max_dev <= 1e-10
    assert max(abs(line.entries[k] - cell.entries[k]) for k in line.entries) <= 1e-10
    assert len(line.entries) == 49


def test_haar_off_sublattice_half():
    assert abs(overlap_line(filter_line_function(make_filter("haar")), 0, 1) - 0.5) < 1e-12
    assert abs(overlap_kq(filter_kq_function(make_filter("haar")), 0, 1) - 0.5) < 1e-12


def test_disjoint_supports_are_exact_zero():
    T = filter_line_function(make_filter("d6"))
    for m in (1, -1, 3):
        for n in (0, 1, 5):
            assert overlap_line(T, m, n) == 0


def test_overlap_of_constant_modulus_is_delta():
    h = KqFunction.from_function(lambda k, q: np.exp(1j * np.sin(k) * q) / A)
    for m in range(-2, 3):
        for n in range(-2, 3):
            assert abs(overlap_kq(h, m, n) - (m == 0 and n == 0)) < 1e-13


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 0.2), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**31))
def test_phase_criterion_bound(eps, f1, f2, seed):
    rng = np.random.default_rng(seed)
    n = 24
    k, q = np.meshgrid(np.arange(n) * A / n, np.arange(n) * A / n, indexing="ij")
    bump = np.cos(f1 * 2 * np.pi * k / A + rng.uniform(0, 6)) * np.sin(f2 * 2 * np.pi * q / A)
    modsq = (1 + eps * bump) / (2 * np.pi)
    h = KqFunction(np.sqrt(modsq) * np.exp(1j * rng.uniform(0, 6, (n, n))))
    dev = np.max(np.abs(np.abs(h.values) ** 2 - 1 / (2 * np.pi)))
    for m in range(-2, 3):
        for nn in range(-2, 3):
            assert abs(overlap_kq(h, m, nn) - (m == 0 and nn == 0)) <= 2 * np.pi * dev + 1e-14


def test_overlap_table_rows_and_threads():
    T = filter_line_function(make_filter("d4"), 2)
    serial = overlap_table(T, 4, radius=2)
    with ThreadPoolExecutor(3) as pool:
        threaded = overlap_table(T, 4, radius=2, mapper=pool.map)
    assert serial.entries == threaded.entries
    rows = list(serial.rows())
    assert rows[0][:2] == (-2, -8)
    assert all(n % 4 == 0 for _, n, _, _ in rows)
    assert serial.deviation((0, 0)) == abs(serial.entries[(0, 0)] - 1)


def test_overlap_hermitian_symmetry():
    T = filter_line_function(make_filter("d6"))
    for m, n in [(0, 1), (0, 3), (1, 1)]:
        assert abs(overlap_line(T, -m, -n) - np.conj(overlap_line(T, m, n))) < 1e-14
    for m, n in [(1, 2), (-2, 1)]:
        assert abs(overlap_line(GAUSS, -m, -n) - np.conj(overlap_line(GAUSS, m, n))) < 1e-14


def test_line_form_matches_two_dimensional_overlap():
    # independent oracle: integrate conj(psi) psi_{m,n} over the plane
    for m, n in [(0, 0), (1, 0), (0, 1), (1, 1)]:
        assert abs(direct_overlap(GAUSS, 0, m, n) - gaussian_overlap(m, n)) < 1e-9


# ---------------------------------------------------------------- Gram / Slater


def test_sublattice_sites():
    s = sublattice_sites(4, 2)
    assert s == [(0, 0), (1, 0), (0, 2), (1, 2)]
    assert len(set(sublattice_sites(9, 4))) == 9
    assert all(n % 4 == 0 for _, n in sublattice_sites(9, 4))
    with pytest.raises(ValueError):
        sublattice_sites(0, 2)


@pytest.mark.parametrize("name", BUILTINS)
def test_orthonormal_family_has_unit_determinant(name):
    rep = gram_slater(filter_line_function(make_filter(name)), sublattice_sites(4, 2))
    assert abs(rep.det - 1) <= 1e-8
    np.testing.assert_allclose(rep.gram, np.eye(4), atol=1e-12)


def test_single_site():
    rep = gram_slater(GAUSS, [(3, 4)])
    assert rep.det == pytest.approx(1.0, abs=1e-14)


def test_gaussian_pair_determinant():
    rep = gram_slater(GAUSS, [(0, 0), (1, 0)])
    assert rep.det == pytest.approx(1 - math.exp(-math.pi), abs=1e-14)
    assert rep.det < 1 - 1e-3
    assert np.allclose(rep.gram, rep.gram.conj().T, atol=1e-15)


def test_gram_rejects_duplicates():
    with pytest.raises(ValueError):
        gram_slater(GAUSS, [(0, 0), (1, 2), (0, 0)])
    with pytest.raises(ValueError):
        gram_slater(GAUSS, [])


def test_off_sublattice_family_is_not_orthonormal():
    rep = gram_slater(filter_line_function(make_filter("haar")), [(0, 0), (0, 1)])
    assert rep.det == pytest.approx(0.75, abs=1e-12)


# ---------------------------------------------------------------- first Landau level


def test_haar_level_one_basics():
    T = filter_line_function(make_filter("haar"))
    assert abs(level_one_overlap(T, 0, 0) - 1) < 1e-10
    assert abs(level_one_overlap(T, 1, 0)) < 1e-10


@pytest.mark.parametrize("line", [GAUSS, LineFunction.normalized_gaussian(0.5, 1.4)])
def test_level_one_direct_matches_reduced(line):
    for m, n in [(0, 1), (1, 1)]:
        d = level_one_overlap(line, m, n, method="direct")
        r = level_one_overlap(line, m, n, method="reduced")
        assert abs(d - r) < 1e-8


def test_level_one_equivalence_report():
    rep = level_one_equivalence(filter_line_function(make_filter("d4")), [(0, 0), (0, 1), (1, 2), (-1, 3)])
    assert rep.max_dev < 1e-10


def test_direct_overlap_needs_decay():
    with pytest.raises(ValueError):
        level_one_overlap(filter_line_function(make_filter("haar")), 0, 1, method="direct")
    with pytest.raises(ValueError):
        level_one_overlap(GAUSS, 0, 1, method="other")


def test_wavefunction_export():
    orb = LandauOrbital(GAUSS, 0, 1, 0)
    text = format_wavefunction_grid(orb, [0.0, 1.0], [0.0, 0.5, 1.0])
    lines = text.splitlines()
    assert lines[1] == "# x y re im abs"
    assert len(lines) == 2 + 6
    x, y, re, im, ab = map(float, lines[3].split())
    v = orb(x, y)
    assert complex(re, im) == pytest.approx(v, abs=1e-14)
    assert ab == pytest.approx(abs(v), abs=1e-14)


def test_cell_constant_shared():
    assert LatticeSpec.a == CELL
