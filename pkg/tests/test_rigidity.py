import math

import numpy as np
import pytest

from qpyramid import (
    EdgeLengthSet,
    flex_sample,
    flex_tangent,
    jacobian,
    rank_analysis,
    residuals,
    rigidity_verdict,
    trace_family,
)
from qpyramid.errors import (
    AmbiguousKernel,
    DiscriminantNegative,
    DivisionBreakdown,
    HeightImaginary,
    NotARealization,
    NotFlexible,
)
from qpyramid.rigidity import FLEX_BASE_POINT, FLEX_LENGTHS, StopReason, Verdict, measured_lengths
from qpyramid.sampling import random_convex_pyramid

from conftest import SQUARE_COORDS

SQUARE_LENGTHS = EdgeLengthSet(1, 1, 1, 1, *[math.sqrt(1.5)] * 4)


def fd_jacobian(c, L, h=1e-6):
    J = np.empty((7, 7))
    for k in range(7):
        e = np.zeros(7)
        e[k] = h
        J[:, k] = (residuals(c + e, L) - residuals(c - e, L)) / (2 * h)
    return J


def family_derivative(y1, h=1e-5):
    return (flex_sample(y1 + h).coords - flex_sample(y1 - h).coords) / (2 * h)


def test_residuals_zero_at_flex_example():
    np.testing.assert_allclose(residuals(FLEX_BASE_POINT, FLEX_LENGTHS), 0, atol=1e-15)


def test_residual_perturbation():
    d = 0.01
    L = EdgeLengthSet(1, math.sqrt(1 + d), 1, 1, *[math.sqrt(1.5)] * 4)
    r = residuals(SQUARE_COORDS, L)
    np.testing.assert_allclose(r, [0, -d, 0, 0, 0, 0, 0], atol=1e-15)


def test_residuals_brute_force(rng):
    for _ in range(50):
        c = rng.normal(size=7)
        L = EdgeLengthSet.from_sequence(rng.uniform(0.5, 2, 8))
        x1, y1, x2, y2, x3, y3, z3 = c
        A, B, C, D, E = (0, 0, 0), (1, 0, 0), (x2, y2, 0), (x1, y1, 0), (x3, y3, z3)
        n = L.normalized()
        want = [math.dist(D, A) ** 2 - n.l4 ** 2, math.dist(B, C) ** 2 - n.l2 ** 2,
                math.dist(C, D) ** 2 - n.l3 ** 2, math.dist(E, A) ** 2 - n.l5 ** 2,
                math.dist(E, B) ** 2 - n.l6 ** 2, math.dist(E, D) ** 2 - n.l8 ** 2,
                math.dist(E, C) ** 2 - n.l7 ** 2]
        np.testing.assert_allclose(residuals(c, L), want, atol=1e-12)


def test_jacobian_da_row():
    c = np.array([0.3, 1.7, 0, 0, 0, 0, 0])
    np.testing.assert_array_equal(jacobian(c)[0], [0.6, 3.4, 0, 0, 0, 0, 0])


def test_jacobian_finite_differences(rng):
    for _ in range(100):
        c = rng.normal(size=7) * 2
        J = jacobian(c)
        F = fd_jacobian(c, SQUARE_LENGTHS)
        assert np.max(np.abs(J - F)) <= 1e-6 * max(1.0, np.max(np.abs(J)))


def test_jacobian_annihilates_family_tangent():
    t = family_derivative(1.0)
    assert np.max(np.abs(jacobian(FLEX_BASE_POINT) @ t)) <= 1e-9


def test_rank_identity_and_zero_row(rng):
    sv, kd = rank_analysis(np.eye(7))
    np.testing.assert_allclose(sv, 1.0)
    assert kd == 0
    J = rng.normal(size=(7, 7))
    J[3] = 0
    assert rank_analysis(J)[1] >= 1


def test_rank_against_eigen_oracle(rng):
    for _ in range(200):
        J = rng.normal(size=(7, 7))
        sv, kd = rank_analysis(J)
        assert kd == 0
        assert np.all(np.diff(sv) <= 0)
        ev = np.sqrt(np.clip(np.linalg.eigvalsh(J.T @ J), 0, None))[::-1]
        np.testing.assert_allclose(sv, ev, rtol=1e-9, atol=1e-9 * sv[0])


def test_square_is_rigid():
    rep = rigidity_verdict(SQUARE_COORDS, SQUARE_LENGTHS)
    assert rep.verdict is Verdict.Rigid and rep.kernel_dim == 0
    assert flex_tangent(SQUARE_COORDS) is None


def test_flex_example_kernel():
    rep = rigidity_verdict(FLEX_BASE_POINT, FLEX_LENGTHS)
    assert rep.kernel_dim == 1
    assert rep.verdict is Verdict.InfinitesimallyFlexible


def test_verdict_requires_realization():
    with pytest.raises(NotARealization):
        rigidity_verdict(SQUARE_COORDS, FLEX_LENGTHS)


def test_random_convex_rigid(rng):
    for _ in range(200):
        p = random_convex_pyramid(rng)
        rep = rigidity_verdict(p, measured_lengths(p.coords))
        assert rep.verdict is Verdict.Rigid
        assert rep.condition_ratio > 1e-6
        assert flex_tangent(p) is None


def test_ambiguous_kernel():
    # every free vertex collapsed onto A: many vanishing columns
    c = np.zeros(7)
    with pytest.raises(AmbiguousKernel):
        flex_tangent(c)


def test_flex_sample_base_point():
    s = flex_sample(1.0)
    np.testing.assert_allclose(s.coords, FLEX_BASE_POINT, atol=1e-15)
    assert s.valid


def test_flex_sample_off_base():
    s = flex_sample(1.1)
    assert s.y3 == pytest.approx((3 - math.sqrt(3.79)) / 1.1, rel=1e-15)
    assert np.max(np.abs(residuals(s.coords, FLEX_LENGTHS))) <= 1e-12
    assert s.valid


def test_flex_changes_faces():
    # |AC| is a base diagonal: the base quadrilateral changes shape along the family
    ac = [math.hypot(flex_sample(y).x2, flex_sample(y).y2) for y in (0.9, 1.1)]
    assert abs(ac[0] - ac[1]) > 1e-2


def test_flex_sample_errors():
    with pytest.raises(DiscriminantNegative):
        flex_sample(2.3)
    with pytest.raises(HeightImaginary):
        flex_sample(0.5)
    with pytest.raises(DivisionBreakdown):
        flex_sample(2.0)


def test_flex_tangent_matches_family():
    t = flex_tangent(FLEX_BASE_POINT, FLEX_LENGTHS)
    d = family_derivative(1.0)
    d /= np.linalg.norm(d)
    if d @ t < 0:
        d = -d
    np.testing.assert_allclose(t, d, atol=1e-8)
    assert np.linalg.norm(t) == pytest.approx(1.0)


@pytest.mark.parametrize("direction", [1, -1])
def test_trace_follows_closed_form(direction):
    tr = trace_family(FLEX_BASE_POINT, FLEX_LENGTHS, steps=40, h=0.01, direction=direction)
    assert tr.steps == 40 and tr.stop_reason is None
    for c in tr:
        assert np.max(np.abs(residuals(c, FLEX_LENGTHS))) <= 1e-10
        np.testing.assert_allclose(c, flex_sample(c[1]).coords, atol=1e-7)


def test_trace_from_rigid_pyramid_refused():
    with pytest.raises(NotFlexible):
        trace_family(SQUARE_COORDS, SQUARE_LENGTHS)


def test_trace_to_flat_apex():
    # decreasing y1 raises y3 until y3^2 = 2, where the apex reaches the base plane
    t = flex_tangent(FLEX_BASE_POINT)
    direction = -1 if t[1] > 0 else 1
    tr = trace_family(FLEX_BASE_POINT, FLEX_LENGTHS, steps=1000, direction=direction)
    assert tr.stop_reason is StopReason.KernelCollapse
    last = tr.points[-1]
    assert last[6] < 0.05
    y1_flat = math.sqrt(2) - math.sqrt(24) / 6  # 3 y1^2 - 6 sqrt(2) y1 + 4 = 0
    assert last[1] == pytest.approx(y1_flat, abs=1e-2)


def test_trace_window():
    tr = trace_family(FLEX_BASE_POINT, FLEX_LENGTHS, steps=1000, y1_window=(0.8, 1.2))
    assert tr.stop_reason is StopReason.OutOfWindow
    assert all(0.8 <= c[1] <= 1.2 for c in tr)
