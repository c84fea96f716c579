import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microlocal import laggr as lg


def test_zero_section_from_holomorphic():
    # k = 1 with S = 0 is the zero section
    L = lg.LagrangianPlane(1, lg.realify(np.array([[1, 0]], dtype=complex), 1))
    assert lg.subspace_distance(L.span.T, lg.zero_section(1).span.T) < 1e-12


def test_fiber_block():
    F = lg.fiber(1)
    # spanned by p_x and -p_y directions: Q = 0, P = diag(1, -1)
    assert np.allclose(F.span[:, :2], 0)
    assert np.allclose(np.abs(F.span[:, 2:]), np.eye(2))
    assert np.allclose(F.span[:, 2:], np.diag([1, -1]))


def test_isotropy():
    L = lg.random_holomorphic_plane(2, 1, seed=5)
    assert L.isotropy_residual() < 1e-12


def test_phase_examples():
    assert abs(lg.phase_squared(lg.zero_section(2)) - 1) < 1e-12
    assert abs(lg.phase_squared(lg.fiber(1)) - 1) < 1e-12


def test_fiber_angles():
    a = lg.short_path_angles(lg.zero_section(1), lg.fiber(1))
    assert np.allclose(sorted(a.angles), [-0.25, -0.25])


def test_same_plane_not_transverse():
    L = lg.random_holomorphic_plane(2, 1, seed=1)
    with pytest.raises(lg.NotTransverse):
        lg.short_path_angles(L, L)


def test_degrees():
    assert round(lg.intersection_degree(lg.zero_section(1), lg.fiber(1)), 9) == 1
    assert round(lg.intersection_degree(lg.zero_section(1), lg.fiber(1, theta=2.0)), 9) == 3


def test_ungraded():
    rng = np.random.default_rng(0)
    with pytest.raises(lg.Ungraded):
        lg.intersection_degree(lg.zero_section(1), lg.random_unitary_plane(1, rng))


def test_calibration_constant():
    assert abs(lg.calibrate() - lg.DEGREE_SCALE) < 1e-9


def test_graph_degree_is_morse_index():
    rng = np.random.default_rng(3)
    for _ in range(10):
        X = rng.normal(size=(4, 4))
        H = (X + X.T) / 2
        idx = int(np.sum(np.linalg.eigvalsh(H) < 0))
        assert abs(lg.intersection_degree(lg.graph_plane(H), lg.zero_section(2)) - idx) < 1e-8


def test_non_holomorphic_control():
    rng = np.random.default_rng(7)
    phases = [lg.phase_squared(lg.random_unitary_plane(2, rng)) for _ in range(20)]
    assert max(abs(p.imag) for p in phases) > 1e-3


def test_json_round_trip():
    L = lg.random_holomorphic_plane(2, 1, seed=2)
    M = lg.LagrangianPlane.from_json(L.to_json())
    assert np.allclose(M.span, L.span) and M.theta == L.theta


def test_non_lagrangian_json_rejected():
    bad = {"n": 1, "rows": [[1, 0, 0, 0], [0, 0, 1, 0]], "theta": 0}
    with pytest.raises(ValueError):
        lg.LagrangianPlane.from_json(bad)


seeds = st.integers(0, 2 ** 32 - 1)
ns = st.integers(1, 4)


@settings(max_examples=60, deadline=None)
@given(ns, seeds)
def test_holomorphic_phase_real_positive(n, seed):
    rng = np.random.default_rng(seed)
    L = lg.random_holomorphic_plane(n, int(rng.integers(0, n + 1)), rng=rng)
    p = lg.phase_squared(L)
    assert abs(p.imag) < 1e-9 * abs(p) and p.real > 0


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), seeds)
def test_anticommuting_blocks(k, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    A = lg.real_block((X + X.T) / 2)
    J = lg.complex_structure(k)
    assert np.abs(A @ J + J @ A).max() < 1e-12


@settings(max_examples=60, deadline=None)
@given(ns, seeds)
def test_degree_law(n, seed):
    rng = np.random.default_rng(seed)
    L0, L1 = lg.random_holomorphic_pair(n, rng)
    a = lg.short_path_angles(L0, L1)
    assert np.all(a.angles < 0) and np.all(a.angles > -0.5)
    assert abs(a.angles.sum() + n / 2) < 1e-8
    assert a.pairing_defect() < 1e-8
    assert abs(lg.intersection_degree(L0, L1) - n) < 1e-6
    assert lg.subspace_distance(lg.rotate(L0, a), L1.orthonormal()) < 1e-8


@settings(max_examples=30, deadline=None)
@given(ns, seeds, st.integers(-3, 3), st.integers(-3, 3))
def test_degree_shift_linear(n, seed, t0, t1):
    rng = np.random.default_rng(seed)
    L0, L1 = lg.random_holomorphic_pair(n, rng)
    d = lg.intersection_degree(L0.with_theta(float(t0)), L1.with_theta(float(t1)))
    assert abs(d - (t1 - t0 + n)) < 1e-6
