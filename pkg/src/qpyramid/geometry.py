"""Labelled quadrangular pyramids ABCDE: data model and planar predicates.

Standard position puts A at the origin and B at (1, 0, 0) after scaling by
1/|AB|, the base in the plane z = 0 on the y >= 0 side and the apex above it.
The seven free coordinates are (x1, y1) for D, (x2, y2) for C and
(x3, y3, z3) for E.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateEdge, FlatPyramid, InvalidLengths, NonCoplanarBase

EPS = 1e-10
CONGRUENCE_TOL = 1e-7

EDGE_NAMES = ("AB", "BC", "CD", "DA", "EA", "EB", "EC", "ED")

# faces as index tuples into the eight lengths
FACES = {
    "EAB": (0, 4, 5),
    "EBC": (1, 5, 6),
    "ECD": (2, 6, 7),
    "EDA": (3, 7, 4),
    "ABCD": (0, 1, 2, 3),
}


class BaseClass(enum.Enum):
    ConvexCCW = "convex"
    NonConvexSimple = "nonconvex"
    SelfIntersecting = "selfint"
    Degenerate = "degenerate"

    @classmethod
    def from_code(cls, code: int) -> "BaseClass":
        return _BY_CODE[int(code)]


_BY_CODE = {
    0: BaseClass.ConvexCCW,
    1: BaseClass.NonConvexSimple,
    2: BaseClass.SelfIntersecting,
    3: BaseClass.Degenerate,
}


@dataclass(frozen=True)
class EdgeLengthSet:
    """Eight edge lengths in the order |AB|, |BC|, |CD|, |DA|, |EA|, |EB|, |EC|, |ED|."""

    l1: float
    l2: float
    l3: float
    l4: float
    l5: float
    l6: float
    l7: float
    l8: float

    def __post_init__(self):
        for name, v in zip(("l1", "l2", "l3", "l4", "l5", "l6", "l7", "l8"), self.as_tuple()):
            if not (math.isfinite(v) and v > 0):
                raise InvalidLengths(f"{name} must be a positive finite number, got {v!r}")

    @classmethod
    def from_sequence(cls, values: Iterable[float]) -> "EdgeLengthSet":
        values = [float(v) for v in values]
        if len(values) != 8:
            raise InvalidLengths(f"expected 8 lengths, got {len(values)}")
        return cls(*values)

    @classmethod
    def from_squared(cls, squares: Iterable[float]) -> "EdgeLengthSet":
        return cls.from_sequence(math.sqrt(s) for s in squares)

    def as_tuple(self) -> tuple:
        return (self.l1, self.l2, self.l3, self.l4, self.l5, self.l6, self.l7, self.l8)

    def squared(self) -> np.ndarray:
        return np.square(np.array(self.as_tuple()))

    def normalized(self) -> "EdgeLengthSet":
        """Lengths divided by l1, so that |AB| = 1."""
        return EdgeLengthSet.from_sequence(v / self.l1 for v in self.as_tuple())

    def face_violations(self) -> list:
        """Names of faces whose polygon inequality fails (necessary condition only)."""
        vals = self.as_tuple()
        bad = []
        for name, idx in FACES.items():
            sides = [vals[i] for i in idx]
            total = sum(sides)
            if any(s >= total - s for s in sides):
                bad.append(name)
        return bad


@dataclass(frozen=True)
class BaseQuad:
    """Base ABCD in standard position: D = (x1, y1), C = (x2, y2).

    The constructor does not enforce the upper-half-plane convention because
    circle-intersection candidates may violate it; use :meth:`is_standard`.
    """

    x1: float
    y1: float
    x2: float
    y2: float

    def points(self) -> np.ndarray:
        return np.array([[0.0, 0.0], [1.0, 0.0], [self.x2, self.y2], [self.x1, self.y1]])

    def is_standard(self, eps: float = EPS) -> bool:
        if self.y1 < -eps or self.y2 < -eps or max(self.y1, self.y2) <= eps:
            return False
        p = self.points()
        gaps = [np.linalg.norm(p[i] - p[j]) for i in range(4) for j in range(i + 1, 4)]
        return min(gaps) > eps


@dataclass(frozen=True)
class Realization:
    base: BaseQuad
    x3: float
    y3: float
    z3: float
    scale: float = 1.0
    base_class: Optional[BaseClass] = None
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.base_class is None:
            object.__setattr__(self, "base_class", classify_base(self.base))

    @classmethod
    def from_coords(cls, c: Sequence[float], scale: float = 1.0, alpha=None) -> "Realization":
        x1, y1, x2, y2, x3, y3, z3 = (float(v) for v in c)
        return cls(BaseQuad(x1, y1, x2, y2), x3, y3, z3, scale=scale, alpha=alpha)

    @property
    def coords(self) -> np.ndarray:
        b = self.base
        return np.array([b.x1, b.y1, b.x2, b.y2, self.x3, self.y3, self.z3])

    def points(self) -> np.ndarray:
        """Vertices A, B, C, D, E as a (5, 3) array in normalized units."""
        b = self.base
        return np.array([
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [b.x2, b.y2, 0.0],
            [b.x1, b.y1, 0.0],
            [self.x3, self.y3, self.z3],
        ])

    def scaled_coords(self) -> np.ndarray:
        """Coordinates in the caller's original length units."""
        return self.coords / self.scale


# vertex index pairs in EdgeLengthSet order, with A..E = 0..4
_EDGES = ((0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3))


def edge_lengths(r: Realization, unscaled: bool = False) -> EdgeLengthSet:
    p = r.points()
    vals = [float(np.linalg.norm(p[i] - p[j])) for i, j in _EDGES]
    if unscaled:
        vals = [v / r.scale for v in vals]
    return EdgeLengthSet.from_sequence(vals)


def normalize_to_standard(A, B, C, D, E, tol: float = 1e-9):
    """Map a labelled pyramid to standard position.

    Returns ``(scale, realization)`` with ``scale = 1/|AB|``.  Congruent
    pyramids, mirror images included, map to identical coordinates.
    """
    P = np.array([A, B, C, D, E], dtype=float)
    if P.shape != (5, 3):
        raise ValueError("expected five points in 3-space")
    ab = np.linalg.norm(P[1] - P[0])
    if not ab > 0:
        raise DegenerateEdge("|AB| = 0")
    scale = 1.0 / ab
    Q = (P - P[0]) * scale
    e1 = Q[1]

    base = Q[:4]
    centered = base - base.mean(axis=0)
    _, s, vt = np.linalg.svd(centered)
    if s[1] > tol:
        n = vt[2]
        off = np.abs(centered @ n)
        if off.max() > tol:
            raise NonCoplanarBase(f"base points leave their plane by {off.max():.3g}")
        n = n - (n @ e1) * e1
    else:
        # collinear base: take the plane through AB orthogonal to the apex offset
        w = Q[4] - (Q[4] @ e1) * e1
        n = w
    nn = np.linalg.norm(n)
    if nn == 0:
        raise FlatPyramid("apex lies on the base line")
    e3 = n / nn
    e2 = np.cross(e3, e1)
    X = np.column_stack([Q @ e1, Q @ e2, Q @ e3])

    if abs(X[4, 2]) <= tol:
        raise FlatPyramid("apex lies in the base plane")
    # pick the in-plane side holding the base; ties fall back to D then C
    side = X[2, 1] + X[3, 1]
    if abs(side) <= tol:
        side = X[3, 1] if abs(X[3, 1]) > tol else X[2, 1]
    if side < 0:
        X[:, 1] *= -1
    if X[4, 2] < 0:
        X[:, 2] *= -1
    X[:4, 2] = 0.0
    X[0] = 0.0
    X[1] = (1.0, 0.0, 0.0)
    return scale, Realization.from_coords(
        (X[3, 0], X[3, 1], X[2, 0], X[2, 1], X[4, 0], X[4, 1], X[4, 2]), scale=float(scale)
    )


def orient2d(p, q, r) -> float:
    """Twice the signed area of triangle pqr (positive when counterclockwise)."""
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _sgn(v: float, eps: float) -> int:
    if v > eps:
        return 1
    if v < -eps:
        return -1
    return 0


def _on_segment(p, q, r) -> bool:
    # r collinear with p, q; test bounding box
    return (min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
            and min(p[1], q[1]) <= r[1] <= max(p[1], q[1]))


def segments_intersect(p1, p2, q1, q2, eps: float = EPS) -> bool:
    """True iff closed segments p1p2 and q1q2 share a point."""
    o1 = _sgn(orient2d(p1, p2, q1), eps)
    o2 = _sgn(orient2d(p1, p2, q2), eps)
    o3 = _sgn(orient2d(q1, q2, p1), eps)
    o4 = _sgn(orient2d(q1, q2, p2), eps)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _on_segment(p1, p2, q1):
        return True
    if o2 == 0 and _on_segment(p1, p2, q2):
        return True
    if o3 == 0 and _on_segment(q1, q2, p1):
        return True
    if o4 == 0 and _on_segment(q1, q2, p2):
        return True
    return False


def vertex_turns(q: BaseQuad) -> list:
    """Cross products of consecutive edge vectors at A, B, C, D."""
    p = q.points()[[0, 1, 2, 3]]
    turns = []
    for i in range(4):
        prev, cur, nxt = p[i - 1], p[i], p[(i + 1) % 4]
        u, v = cur - prev, nxt - cur
        turns.append(float(u[0] * v[1] - u[1] * v[0]))
    return turns


def classify_base(q: BaseQuad, eps: float = EPS) -> BaseClass:
    turns = vertex_turns(q)
    if all(t > eps for t in turns):
        return BaseClass.ConvexCCW
    if any(abs(t) <= eps for t in turns):
        return BaseClass.Degenerate
    A, B, C, D = q.points()
    if segments_intersect(A, B, C, D, eps) or segments_intersect(B, C, D, A, eps):
        return BaseClass.SelfIntersecting
    return BaseClass.NonConvexSimple


@dataclass(frozen=True)
class CongruenceTolerance:
    tol: float = CONGRUENCE_TOL

    def __post_init__(self):
        if not self.tol >= 0:
            raise ValueError("congruence tolerance must be non-negative")


def congruent(r1: Realization, r2: Realization, tol=CONGRUENCE_TOL) -> bool:
    if isinstance(tol, CongruenceTolerance):
        tol = tol.tol
    return float(np.max(np.abs(r1.coords - r2.coords))) <= tol
