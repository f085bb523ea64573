from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from annular_khr import geometry as geo
from annular_khr.geometry import I, J, K, ONE, ChartDomain, NonTransverse, Quat, RepPoint

coord = st.floats(-2.0, 2.0, allow_nan=False)
quats = st.builds(Quat, coord, coord, coord, coord)
angle = st.floats(-3.0, 3.0, allow_nan=False)


def test_unit_relations():
    for u in (I, J, K):
        assert (u * u).close(-ONE)
    assert (I * J).close(K) and (J * K).close(I) and (K * I).close(J)
    assert (I * J * K).close(-ONE)


@given(quats, quats, quats)
def test_multiplication_is_associative(p, q, r):
    assert ((p * q) * r).close(p * (q * r), 1e-9)


@given(quats, quats)
def test_matrix_form_is_multiplicative(p, q):
    assert np.allclose((p * q).matrix(), p.matrix() @ q.matrix(), atol=1e-9)
    assert math.isclose((p * q).norm(), p.norm() * q.norm(), rel_tol=1e-9, abs_tol=1e-12)


@given(quats, quats.filter(lambda g: g.norm() > 0.1))
def test_conjugation_keeps_trace_and_vector_length(p, g):
    c = g * p * g.inv()
    assert math.isclose(c.trace(), p.trace(), abs_tol=1e-9)
    assert math.isclose(np.linalg.norm(c.vector), np.linalg.norm(p.vector), abs_tol=1e-9)


def test_trivial_tuple_has_zero_residual():
    assert geo.rep_residual(RepPoint(ONE, ONE, ONE, ONE)) == 0.0


def test_residual_examples():
    assert geo.rep_residual(geo.chart_point(1, 1.0, 0.7, 0.3, 0.2)) <= 1e-12
    assert geo.rep_residual(geo.w0_point(math.pi / 3, 0.4)) <= 1e-12
    assert geo.rep_residual(geo.P_D) <= 1e-12


def test_residuals_on_all_samples():
    for name, stats in geo.residual_summary(1e-2).items():
        assert stats["residual"] <= 1e-10, name
        assert stats["trace"] <= 1e-10, name


def test_a_perturbed_tuple_is_detected():
    p = geo.w0_point(0.3, 0.2)
    q = RepPoint(p.A, p.B, p.a, p.b * Quat(math.cos(1e-3), math.sin(1e-3)))
    assert geo.rep_residual(q) > 1e-4


@given(angle.filter(lambda u: abs(math.sin(u)) > 0.05), angle, angle.filter(lambda u: abs(math.cos(u)) > 0.05))
def test_chart_one_at_t_zero_is_the_standard_point(alpha, beta, s):
    p = geo.chart_point(1, alpha, beta, s, 0.0)
    q = geo.standard_point(alpha, beta, s)
    assert np.allclose(geo.invariants(p), geo.invariants(q), atol=1e-9)


def test_p_d_chart_coordinates():
    p = geo.chart_point(1, *geo.P_D_CHART1)
    assert np.allclose(geo.invariants(p), geo.invariants(geo.P_D), atol=1e-12)


def test_chart_domain_errors():
    with pytest.raises(ChartDomain):
        geo.chart_point(1, 0.0, 0.5, 0.1, 0.1)
    with pytest.raises(ChartDomain):
        geo.chart_point(2, 0.5, 0.0, 0.1, 0.1)
    with pytest.raises(ChartDomain):
        geo.chart_point(1, 1.0, 0.5, math.pi / 2, 0.1)
    with pytest.raises(ChartDomain):
        geo.parametrized_point("W2", (0.3, 0.5))
    with pytest.raises(ChartDomain):
        geo.parametrized_point("L7", (0.3, 0.5))


@pytest.mark.parametrize("theta", [0.0, math.pi])
@pytest.mark.parametrize("phi", [0.4, 1.3, 2.5])
def test_l0_on_the_slice(phi, theta):
    eps = 1e-2
    p = geo.l0_point(phi, theta, eps)
    assert np.allclose(geo.slice_class(p), geo.slice_class_of(*geo.l0_slice_coords(phi, theta, eps)), atol=1e-12)


def test_l2_is_the_braid_image_of_l0():
    al, be = geo.l0_slice_coords(0.4, 0.0, 1e-2)
    assert geo.parametrized_point("L2", (0.4, 0.0)) == geo.alpha1_squared(al, be)
    assert geo.parametrized_point("W2", (0.7, 0.0)) == (0.7, math.pi - 1.4)


def test_l0_leaves_the_slice():
    assert geo.l0_off_slice_gap(1e-2) > 1e-4


def test_sphere_parametrization_agrees_with_angles():
    phi, theta = 0.9, 0.6
    x, y, z = math.sin(phi) * math.cos(theta), math.sin(phi) * math.sin(theta), math.cos(phi)
    a, b = geo.l0_sphere_point(x, y, z, 1e-2), geo.l0_point(phi, theta, 1e-2)
    assert all(u.close(v, 1e-12) for u, v in zip((a.A, a.B, a.a, a.b), (b.A, b.B, b.a, b.b)))


def test_finite_difference_checks():
    checks = geo.fd_checks(1e-5)
    assert len(checks) >= 10
    bad = [c.row() for c in checks if not c.ok]
    assert bad == []
    assert all(geo.richardson_consistent(checks, 1e-5).values())


def test_jacobian_at_p_d_is_identity():
    (jac,) = [c for c in geo.fd_checks() if "p_D" in c.name]
    assert np.allclose(np.reshape(jac.measured, (4, 4)), np.eye(4), atol=1e-5)


@pytest.mark.parametrize("pair, count", [(("W0", "L0"), 2), (("L0", "L0"), 4), (("L2", "L0"), 4)])
def test_pushoff_counts(pair, count):
    assert geo.pushoff_and_count(*pair) == count


def test_counts_do_not_depend_on_sampling():
    assert geo.pushoff_and_count("L0", "L0", samples=2001) == 4


def test_unperturbed_self_intersection_is_not_transverse():
    with pytest.raises(NonTransverse):
        geo.pushoff_and_count("L0", "L0", tau=0.0)
