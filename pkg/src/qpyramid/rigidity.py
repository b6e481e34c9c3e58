"""Numerical strong-rigidity analysis of labelled quadrangular pyramids.

Everything works on the seven free standard-position coordinates
``c = (x1, y1, x2, y2, x3, y3, z3)`` and the seven squared-length constraints
other than |AB| = 1, ordered DA, BC, CD, EA, EB, ED, EC.  All constraints are
quadratic, so the rigidity matrix (their Jacobian) is exact and linear in c.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    AmbiguousKernel,
    DiscriminantNegative,
    DivisionBreakdown,
    FlexFamilyError,
    HeightImaginary,
    NotARealization,
    NotFlexible,
)
from .geometry import EdgeLengthSet, Realization

RANK_TOL = 1e-8

CONSTRAINT_NAMES = ("DA", "BC", "CD", "EA", "EB", "ED", "EC")
# EdgeLengthSet index of each constraint
_TARGET_INDEX = (3, 1, 2, 4, 5, 7, 6)

# the self-intersecting flexible pyramid A=(0,0), B=(1,0), C=(2,2), D=(2,1), E=(1,1,1)
FLEX_BASE_POINT = np.array([2.0, 1.0, 2.0, 2.0, 1.0, 1.0, 1.0])
FLEX_LENGTHS = EdgeLengthSet.from_squared((1, 5, 1, 5, 3, 2, 3, 2))


def as_coords(c) -> np.ndarray:
    if isinstance(c, Realization):
        return c.coords
    arr = np.asarray(c, dtype=float).reshape(-1)
    if arr.shape != (7,):
        raise ValueError(f"expected 7 coordinates, got shape {arr.shape}")
    return arr


def target_squares(L: EdgeLengthSet) -> np.ndarray:
    """Squared target lengths in constraint order, normalized to |AB| = 1."""
    sq = L.normalized().squared()
    return sq[list(_TARGET_INDEX)]


def squared_lengths(c) -> np.ndarray:
    x1, y1, x2, y2, x3, y3, z3 = as_coords(c)
    return np.array([
        x1 * x1 + y1 * y1,
        (x2 - 1.0) ** 2 + y2 * y2,
        (x2 - x1) ** 2 + (y2 - y1) ** 2,
        x3 * x3 + y3 * y3 + z3 * z3,
        (x3 - 1.0) ** 2 + y3 * y3 + z3 * z3,
        (x3 - x1) ** 2 + (y3 - y1) ** 2 + z3 * z3,
        (x3 - x2) ** 2 + (y3 - y2) ** 2 + z3 * z3,
    ])


def residuals(c, L: EdgeLengthSet) -> np.ndarray:
    return squared_lengths(c) - target_squares(L)


def jacobian(c, L: Optional[EdgeLengthSet] = None) -> np.ndarray:
    """Rigidity matrix: d(residuals)/dc.  ``L`` is accepted for symmetry and ignored."""
    x1, y1, x2, y2, x3, y3, z3 = as_coords(c)
    J = np.zeros((7, 7))
    J[0, 0:2] = 2 * x1, 2 * y1
    J[1, 2:4] = 2 * (x2 - 1.0), 2 * y2
    dx, dy = x2 - x1, y2 - y1
    J[2, 0:4] = -2 * dx, -2 * dy, 2 * dx, 2 * dy
    J[3, 4:7] = 2 * x3, 2 * y3, 2 * z3
    J[4, 4:7] = 2 * (x3 - 1.0), 2 * y3, 2 * z3
    dx, dy = x3 - x1, y3 - y1
    J[5, [0, 1, 4, 5, 6]] = -2 * dx, -2 * dy, 2 * dx, 2 * dy, 2 * z3
    dx, dy = x3 - x2, y3 - y2
    J[6, [2, 3, 4, 5, 6]] = -2 * dx, -2 * dy, 2 * dx, 2 * dy, 2 * z3
    return J


def rank_analysis(J: np.ndarray, rank_tol: float = RANK_TOL):
    """Singular values (descending) and the numerical kernel dimension."""
    sv = np.linalg.svd(np.asarray(J, dtype=float), compute_uv=False)
    if sv[0] == 0:
        return sv, len(sv)
    return sv, int(np.count_nonzero(sv / sv[0] < rank_tol))


class Verdict(enum.Enum):
    Rigid = "rigid"
    InfinitesimallyFlexible = "infinitesimally-flexible"


@dataclass(frozen=True)
class RigidityReport:
    residuals: np.ndarray
    jacobian: np.ndarray
    singular_values: np.ndarray
    kernel_dim: int
    verdict: Verdict

    @property
    def condition_ratio(self) -> float:
        """sigma_min / sigma_max."""
        sv = self.singular_values
        return float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0


def rigidity_verdict(R, L: Optional[EdgeLengthSet] = None, rank_tol: float = RANK_TOL,
                     residual_tol: float = 1e-9) -> RigidityReport:
    c = as_coords(R)
    if L is None:
        L = measured_lengths(c)
    r = residuals(c, L)
    if np.max(np.abs(r)) > residual_tol:
        raise NotARealization(f"max residual {np.max(np.abs(r)):.3g} exceeds {residual_tol:g}")
    J = jacobian(c)
    sv, kd = rank_analysis(J, rank_tol)
    verdict = Verdict.Rigid if kd == 0 else Verdict.InfinitesimallyFlexible
    return RigidityReport(r, J, sv, kd, verdict)


def _reorder_to_lengths(sq7: np.ndarray) -> np.ndarray:
    # constraint order -> EdgeLengthSet order l2..l8
    out = np.empty(8)
    out[list(_TARGET_INDEX)] = sq7
    return out[1:]


def measured_lengths(c) -> EdgeLengthSet:
    """Edge lengths of the pyramid with coordinates ``c`` (|AB| = 1)."""
    return EdgeLengthSet.from_squared(np.concatenate([[1.0], _reorder_to_lengths(squared_lengths(c))]))


@dataclass(frozen=True)
class FlexSample:
    y1: float
    y3: float
    x1: float
    y2: float
    x2: float
    z3: float
    x3: float = 1.0
    valid: bool = True

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.x1, self.y1, self.x2, self.y2, self.x3, self.y3, self.z3])


def flex_sample(y1: float) -> FlexSample:
    """Closed-form member of the flexible self-intersecting family, parametrized by y1.

    Uses the root of ``y1^2 y3^2 - 6 y1 y3 + y1^2 + 4 = 0`` through (y1, y3) = (1, 1).
    """
    y1 = float(y1)
    if y1 <= 0:
        raise FlexFamilyError(f"y1 must be positive, got {y1}")
    disc = 5.0 - y1 * y1
    if disc < 0:
        raise DiscriminantNegative(f"y1^2 = {y1 * y1:.6g} > 5")
    y3 = (3.0 - math.sqrt(disc)) / y1
    if y3 * y3 > 2.0:
        raise HeightImaginary(f"y3^2 = {y3 * y3:.6g} > 2")
    if abs(y3) <= 1e-12:
        raise DivisionBreakdown("y3 = 0")
    x1 = 3.0 - y1 * y3
    if abs(x1 - 1.0) <= 1e-12:
        raise DivisionBreakdown("x1 = 1")
    y2 = 2.0 / y3
    x2 = (4.0 - y1 * y2) / (x1 - 1.0)
    z3 = math.sqrt(2.0 - y3 * y3)
    s = FlexSample(y1=y1, y3=y3, x1=x1, y2=y2, x2=x2, z3=z3)
    ok = bool(np.max(np.abs(residuals(s.coords, FLEX_LENGTHS))) <= 1e-12)
    return FlexSample(y1=y1, y3=y3, x1=x1, y2=y2, x2=x2, z3=z3, valid=ok)


def _kernel_vector(J: np.ndarray) -> np.ndarray:
    _, _, vt = np.linalg.svd(J)
    t = vt[-1]
    # deterministic sign: largest component positive
    i = int(np.argmax(np.abs(t)))
    return t if t[i] > 0 else -t


def flex_tangent(c, L: Optional[EdgeLengthSet] = None, rank_tol: float = RANK_TOL):
    """Unit kernel vector of the rigidity matrix, or None when it has full rank."""
    J = jacobian(as_coords(c))
    _, kd = rank_analysis(J, rank_tol)
    if kd == 0:
        return None
    if kd > 1:
        raise AmbiguousKernel(f"kernel dimension {kd}")
    return _kernel_vector(J)


class StopReason(enum.Enum):
    CorrectionDiverged = "correction-diverged"
    KernelCollapse = "kernel-collapse"
    OutOfWindow = "out-of-window"


@dataclass
class FlexTrace:
    """Accepted points of a continuation run, starting point first."""

    points: list
    stop_reason: Optional[StopReason] = None

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def steps(self) -> int:
        return len(self.points) - 1


def _correct(pred, t, targets, tol, max_iter=20):
    c = pred.copy()
    for _ in range(max_iter):
        r = squared_lengths(c) - targets
        g = t @ (c - pred)
        if np.max(np.abs(r)) <= tol and abs(g) <= tol:
            return c
        A = np.vstack([jacobian(c), t])
        b = -np.append(r, g)
        delta = np.linalg.lstsq(A, b, rcond=None)[0]
        if not np.all(np.isfinite(delta)) or np.linalg.norm(delta) > 1.0:
            return None
        c = c + delta
    r = squared_lengths(c) - targets
    return c if np.max(np.abs(r)) <= tol else None


def trace_family(c0, L: EdgeLengthSet, steps: int = 40, h: float = 0.01, direction: int = 1,
                 y1_window: Optional[Sequence[float]] = None, rank_tol: float = RANK_TOL,
                 tol: float = 1e-11, min_h: float = 1e-5) -> FlexTrace:
    """Follow the one-parameter flex through ``c0`` by predictor-corrector continuation.

    The predictor steps by ``h`` along the kernel tangent; the corrector runs
    Gauss-Newton on the residuals restricted to the hyperplane orthogonal to
    that tangent.  The step is halved on corrector failure down to ``min_h``.
    Tracing stops early with a :class:`StopReason` when the correction
    diverges, the kernel dimension changes or the apex reaches the base plane,
    or y1 leaves ``y1_window``.
    """
    c = as_coords(c0).copy()
    targets = target_squares(L)
    r0 = squared_lengths(c) - targets
    if np.max(np.abs(r0)) > 1e-10:
        raise NotARealization(f"start point residual {np.max(np.abs(r0)):.3g} > 1e-10")
    _, kd = rank_analysis(jacobian(c), rank_tol)
    if kd != 1:
        raise NotFlexible(f"kernel dimension {kd} at the start point, need 1")
    t = _kernel_vector(jacobian(c)) * (1 if direction >= 0 else -1)

    trace = FlexTrace([c.copy()])
    hh = h
    while trace.steps < steps:
        cn = _correct(c + hh * t, t, targets, tol)
        if cn is None:
            hh /= 2
            if hh < min_h:
                trace.stop_reason = StopReason.CorrectionDiverged
                break
            continue
        if cn[6] <= 0:
            trace.stop_reason = StopReason.KernelCollapse
            break
        J = jacobian(cn)
        _, kd = rank_analysis(J, rank_tol)
        if kd != 1:
            trace.stop_reason = StopReason.KernelCollapse
            break
        if y1_window is not None and not (y1_window[0] <= cn[1] <= y1_window[1]):
            trace.stop_reason = StopReason.OutOfWindow
            break
        tn = _kernel_vector(J)
        if tn @ t < 0:
            tn = -tn
        trace.points.append(cn)
        c, t, hh = cn, tn, h
    return trace
