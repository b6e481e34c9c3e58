"""Acceptance criteria, one test each.  Run with ``-s`` to see the PASS/FAIL lines."""
import contextlib
import io
import math
import time

import numpy as np
import pytest

from qpyramid import (
    congruent,
    critical_points,
    dof_balance,
    ec_profile,
    edge_lengths,
    find_realizations,
)
from qpyramid.cli import main
from qpyramid.dof import FaceVector
from qpyramid.rigidity import (
    FLEX_BASE_POINT,
    FLEX_LENGTHS,
    Verdict,
    flex_sample,
    jacobian,
    rank_analysis,
    residuals,
    rigidity_verdict,
    squared_lengths,
    trace_family,
)
from qpyramid.sampling import random_convex_pyramid, random_lengths
from qpyramid.solver import branch_nonconvex, branch_parallelogram
from qpyramid.geometry import segments_intersect

from conftest import EXAMPLE_SWEEP, SQUARE_COORDS


@contextlib.contextmanager
def criterion(n, title):
    try:
        yield
    except BaseException:
        print(f"\nCRITERION {n} FAIL  {title}")
        raise
    print(f"\nCRITERION {n} PASS  {title}")


def test_criterion_1_example_profile():
    with criterion(1, "example profile endpoints and interior extrema"):
        ec_profile(EXAMPLE_SWEEP, n=64)  # JIT warm-up
        t0 = time.perf_counter()
        P = ec_profile(EXAMPLE_SWEEP)
        cps = critical_points(P)
        elapsed = time.perf_counter() - t0
        (iv,) = P.admissible_intervals
        assert iv.lo == pytest.approx(0.9449, abs=1e-3)
        assert iv.hi == pytest.approx(3 * math.pi / 4, abs=1e-9)
        kinds = {c.kind: c for c in cps}
        assert kinds["LeftEndpoint"].value == pytest.approx(7.8284, abs=1e-3)
        assert kinds["RightEndpoint"].value == pytest.approx(9.3067, abs=1e-3)
        mx, mn = kinds["LocalMax"], kinds["LocalMin"]
        assert mx.alpha == pytest.approx(math.pi / 2, abs=1e-6)
        assert mx.value == pytest.approx(9.0, abs=1e-9)
        assert mn.alpha == pytest.approx(1.9404, abs=5e-3)
        assert mn.value == pytest.approx(8.9555, abs=2e-3)
        assert len(cps) == 4
        assert elapsed < 1.0, f"profile took {elapsed:.3f} s"


@pytest.mark.parametrize("ec2,expected", [(8.98, 3), (9.2, 1), (8.5, 1), (9.0, 2)])
def test_criterion_2_realization_window(ec2, expected):
    with criterion(2, f"realize |EC|^2={ec2} gives {expected}"):
        out = io.StringIO()
        code = main(["realize", "1", "2", "sqrt(2)", "1", "sqrt(2)", "sqrt(5)", f"sqrt({ec2})", "sqrt(3)"],
                    out=out)
        assert code == 0
        assert out.getvalue().splitlines()[0] == f"count {expected}"


@pytest.mark.slow
def test_criterion_3_realization_bound():
    with criterion(3, "at most 4 realizations and round-trip recovery"):
        rng = np.random.default_rng(31)
        t0 = time.perf_counter()
        for _ in range(1000):
            r = random_convex_pyramid(rng)
            found = find_realizations(edge_lengths(r))
            assert len(found) <= 4
            assert any(congruent(r, f, 1e-7) for f in found)
        for _ in range(1000):
            L = random_lengths(rng)
            found = find_realizations(L)
            assert len(found) <= 4
            for f in found:
                again = find_realizations(edge_lengths(f))
                assert any(congruent(f, g, 1e-7) for g in again)
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0, f"took {elapsed:.1f} s"


def test_criterion_4_flex_example():
    with criterion(4, "self-intersecting example flexes"):
        rep = rigidity_verdict(FLEX_BASE_POINT, FLEX_LENGTHS)
        assert rep.kernel_dim == 1
        pts = []
        for d in (1, -1):
            tr = trace_family(FLEX_BASE_POINT, FLEX_LENGTHS, steps=1000, h=0.005, direction=d,
                              y1_window=(0.8, 1.2))
            pts.extend(tr.points[1:])
        pts.append(FLEX_BASE_POINT)
        assert len(pts) - 1 >= 40
        ac = []
        for c in pts:
            assert 0.8 <= c[1] <= 1.2
            assert np.max(np.abs(residuals(c, FLEX_LENGTHS))) <= 1e-10
            np.testing.assert_allclose(c, flex_sample(c[1]).coords, rtol=0, atol=1e-7)
            ac.append(math.hypot(c[2], c[3]))
        assert max(ac) - min(ac) >= 1e-2


def test_criterion_5_convex_rigid():
    with criterion(5, "random convex pyramids and the square are rigid"):
        rng = np.random.default_rng(55)
        for _ in range(1000):
            rep = rigidity_verdict(random_convex_pyramid(rng))
            assert rep.verdict is Verdict.Rigid
            assert rep.condition_ratio > 1e-6
        assert rigidity_verdict(SQUARE_COORDS).verdict is Verdict.Rigid


def test_criterion_6_dof_identity():
    with criterion(6, "freedoms equal relations"):
        named = {
            "pyramid": (FaceVector({3: 4, 4: 1}), 7),
            "cube": (FaceVector({4: 6}), 16),
            "tetrahedron": (FaceVector({3: 4}), 5),
        }
        for F, expected in named.values():
            b = dof_balance(F)
            assert b.freedoms == b.relations == expected and b.balanced
        rng = np.random.default_rng(66)
        checked = 0
        while checked < 10_000:
            m = int(rng.integers(3, 9))
            counts = {i: int(rng.integers(0, 6)) for i in range(3, m + 1)}
            counts[m] = max(counts[m], 1)
            e2 = sum(i * n for i, n in counts.items())
            if e2 % 2:
                counts[3] += 1
            e = sum(i * n for i, n in counts.items()) // 2
            v = e - sum(counts.values()) + 2  # Euler
            if v < 4:
                continue
            F = FaceVector(counts)
            b = dof_balance(F)
            assert isinstance(b.freedoms, int) and isinstance(b.relations, int)
            assert b.freedoms == b.relations
            k = F.k
            assert b.freedoms == 2 * (k - 2) + 3 * (v - k)
            assert b.relations == (e - 1) + sum(n * (i - 3) for i, n in counts.items()) - (k - 3)
            checked += 1


def test_criterion_7_branch_formulas():
    with criterion(7, "non-convex and parallelogram branches"):
        rng = np.random.default_rng(77)
        for a2, b2 in zip(rng.uniform(-3, 3, 10_000), rng.uniform(-3, 3, 10_000)):
            a1, b1 = branch_nonconvex(a2, b2)
            det = a2 * b1 - b2 * a1
            assert abs(det + b2) <= 1e-12 * max(abs(b2), abs(a2 * b1), abs(b2 * a1), 1e-300)
            if b1 > 0 and b2 > 0:
                assert segments_intersect((0, 0), (a1, b1), (1, 0), (a2, b2))
        for a1, b1, c3 in zip(rng.uniform(-3, 3, 10_000), rng.uniform(0.05, 3, 10_000),
                              rng.uniform(0.05, 3, 10_000)):
            sq = edge_lengths(branch_parallelogram(a1, b1, c3)).squared()
            assert abs(sq[4] - sq[6]) <= 1e-14 * sq[4]
            assert abs(sq[5] - sq[7]) <= 1e-14 * sq[5]


def test_criterion_8_numerical_hygiene():
    with criterion(8, "Jacobian and SVD cross-checks"):
        rng = np.random.default_rng(88)
        h = 1e-6
        for _ in range(100):
            c = rng.uniform(-2, 2, 7)
            J = jacobian(c)
            fd = np.column_stack([(squared_lengths(c + h * e) - squared_lengths(c - h * e)) / (2 * h)
                                  for e in np.eye(7)])
            assert np.max(np.abs(fd - J)) <= 1e-6 * max(1.0, np.max(np.abs(J)))
            sv, _ = rank_analysis(J)
            ev = np.sqrt(np.clip(np.linalg.eigvalsh(J.T @ J), 0, None))[::-1]
            assert np.max(np.abs(sv - ev)) <= 1e-9 * sv[0]
