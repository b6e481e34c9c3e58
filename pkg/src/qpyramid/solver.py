"""Realizations of an edge-length set by a sweep over the base angle at A.

All work happens in normalized units (|AB| = 1).  For a base angle alpha the
vertex D sits at ``l4 (cos alpha, sin alpha)``, C is one of the two
intersections of the circles about B and D, and the apex is trilaterated
from the spheres about A, B and D.  What is left is the single scalar
condition ``|EC(alpha)|^2 = l7^2``, whose roots are bracketed on a grid,
bisected, and then polished on the full seven-coordinate system.

The module also carries the closed forms of the two elimination branches of
the deformation system (parallelogram base with the apex over its centre,
and the non-convex branch).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import kernels
from .errors import (
    ApexImpossible,
    CollinearABD,
    InvalidLengths,
    InvalidParallelogram,
    OriginInput,
)
from .geometry import (
    CONGRUENCE_TOL,
    EPS,
    BaseClass,
    BaseQuad,
    EdgeLengthSet,
    Realization,
    classify_base,
    congruent,
)
from .rigidity import jacobian, squared_lengths, target_squares

log = logging.getLogger(__name__)

GRID = 8192
ENDPOINT_TOL = 1e-12
ROOT_TOL = 1e-13
CRITICAL_TOL = 1e-10
TANGENCY_TOL = 1e-9
RESIDUAL_TOL = 1e-12
NEWTON_MAX_ITER = 50

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


# --------------------------------------------------------------------------
# construction of a configuration from the base angle

@dataclass(frozen=True)
class BaseCandidate:
    quad: BaseQuad
    branch: int
    base_class: BaseClass


@dataclass(frozen=True)
class Apex:
    x3: float
    y3: float
    z3: float


def _circle_points(l2, l3, x1, y1):
    ux, uy = x1 - 1.0, y1
    d = math.hypot(ux, uy)
    if d == 0.0 or d > l2 + l3 or d < abs(l2 - l3):
        return None
    ux, uy = ux / d, uy / d
    a = (l2 * l2 - l3 * l3 + d * d) / (2.0 * d)
    h = math.sqrt(max(l2 * l2 - a * a, 0.0))
    px, py = 1.0 + a * ux, a * uy
    # branch 0 lies right of B->D, across the diagonal BD from A
    return (px + h * uy, py - h * ux), (px - h * uy, py + h * ux)


def base_from_angle(l2: float, l3: float, l4: float, alpha: float,
                    eps: float = EPS) -> List[BaseCandidate]:
    """Both bases ABCD with angle ``alpha`` at A; empty when the circles about B and D miss."""
    x1, y1 = l4 * math.cos(alpha), l4 * math.sin(alpha)
    pts = _circle_points(l2, l3, x1, y1)
    if pts is None:
        return []
    out = []
    for branch, (x2, y2) in enumerate(pts):
        q = BaseQuad(x1, y1, x2, y2)
        out.append(BaseCandidate(q, branch, classify_base(q, eps)))
    return out


def _apex_xy(l4sq, l5, l6, l8, x1, y1):
    if abs(y1) <= 1e-14:
        raise CollinearABD("D lies on the line AB")
    x3 = 0.5 * (1.0 + (l5 * l5 - l6 * l6))
    y3 = (l4sq - 2.0 * x1 * x3 + l5 * l5 - l8 * l8) / (2.0 * y1)
    return x3, y3, l5 * l5 - x3 * x3 - y3 * y3


def apex_from_three(l5: float, l6: float, l8: float, Q: BaseQuad) -> Optional[Apex]:
    """Apex above the base from |EA|, |EB|, |ED|; None when the spheres do not meet above it."""
    x3, y3, z3sq = _apex_xy(Q.x1 * Q.x1 + Q.y1 * Q.y1, l5, l6, l8, Q.x1, Q.y1)
    if z3sq < 0:
        return None
    return Apex(x3, y3, math.sqrt(z3sq))


# --------------------------------------------------------------------------
# sweep profile

@dataclass(frozen=True)
class SweepParams:
    """Normalized lengths the sweep depends on (|EC| is the unknown)."""

    l2: float
    l3: float
    l4: float
    l5: float
    l6: float
    l8: float

    @classmethod
    def from_lengths(cls, L) -> "SweepParams":
        if isinstance(L, SweepParams):
            return L
        if isinstance(L, EdgeLengthSet):
            vals = list(L.as_tuple())
        else:
            vals = [None if v is None else float(v) for v in L]
            if len(vals) != 8:
                raise InvalidLengths(f"expected 8 lengths (l7 may be None), got {len(vals)}")
        for i, v in enumerate(vals):
            if i != 6 and not (v is not None and math.isfinite(v) and v > 0):
                raise InvalidLengths(f"l{i + 1} must be positive, got {v!r}")
        l1 = vals[0]
        return cls(*(vals[i] / l1 for i in (1, 2, 3, 4, 5, 7)))

    def as_tuple(self):
        return (self.l2, self.l3, self.l4, self.l5, self.l6, self.l8)


def _config(alpha: float, branch: int, p: SweepParams):
    """(x1, y1, x2, y2, x3, y3, z3sq) or None when C does not exist."""
    x1, y1 = p.l4 * math.cos(alpha), p.l4 * math.sin(alpha)
    pts = _circle_points(p.l2, p.l3, x1, y1)
    if pts is None:
        return None
    x2, y2 = pts[branch]
    x3, y3, z3sq = _apex_xy(p.l4 * p.l4, p.l5, p.l6, p.l8, x1, y1)
    return x1, y1, x2, y2, x3, y3, z3sq


def _ec2(cfg) -> float:
    x1, y1, x2, y2, x3, y3, z3sq = cfg
    return (x3 - x2) ** 2 + (y3 - y2) ** 2 + z3sq


def _admissible(alpha, branch, p, eps) -> bool:
    cfg = _config(alpha, branch, p)
    if cfg is None or not cfg[6] > 0:
        return False
    return classify_base(BaseQuad(*cfg[:4]), eps) is BaseClass.ConvexCCW


@dataclass(frozen=True)
class SweepSample:
    alpha: float
    branch: int
    ec2: float
    z3sq: float
    base_class: BaseClass


@dataclass(frozen=True)
class AdmissibleInterval:
    lo: float
    hi: float
    branch: int


@dataclass
class SweepProfile:
    params: SweepParams
    alphas: np.ndarray
    ec2: np.ndarray        # (2, n)
    z3sq: np.ndarray       # (n,)
    classes: np.ndarray    # (2, n) kernel class codes
    admissible_intervals: List[AdmissibleInterval] = field(default_factory=list)
    n: int = GRID
    eps: float = EPS

    @property
    def samples(self) -> List[SweepSample]:
        out = []
        for i, a in enumerate(self.alphas):
            for b in (0, 1):
                out.append(SweepSample(float(a), b, float(self.ec2[b, i]), float(self.z3sq[i]),
                                       BaseClass.from_code(self.classes[b, i])))
        return out

    def admissible_mask(self) -> np.ndarray:
        return (self.classes == kernels.CONVEX) & (self.z3sq > 0)[None, :]

    def __bool__(self):
        return bool(self.admissible_intervals)


def _bisect_predicate(pred, good, bad, tol):
    # pred(good) is True, pred(bad) is False
    while abs(bad - good) > tol:
        mid = 0.5 * (good + bad)
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def alpha_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """``n`` equal sub-intervals of [lo, hi]; the degenerate angles 0 and pi are dropped."""
    a = np.linspace(lo, hi, n + 1)
    keep = (a > 0.0) & (a < math.pi)
    return a[keep]


def ec_profile(L, alpha_range=(0.0, math.pi), n: int = GRID, eps: float = EPS) -> SweepProfile:
    """Sample |EC|^2 over a grid of base angles and locate the admissible intervals.

    ``L`` is an :class:`EdgeLengthSet` or eight lengths with ``l7`` possibly
    None; l7 is ignored.  Admissible means a counterclockwise convex base and
    a positive squared apex height.  Interval ends are refined by bisection
    to 1e-12 in alpha and lie on the admissible side.
    """
    if n < 2:
        raise ValueError("grid size must be at least 2")
    p = SweepParams.from_lengths(L)
    lo, hi = float(alpha_range[0]), float(alpha_range[1])
    alphas = alpha_grid(lo, hi, n)
    ec2, z3sq, cls = kernels.sweep(alphas, *p.as_tuple(), eps=eps)
    prof = SweepProfile(p, alphas, ec2, z3sq, cls, n=n, eps=eps)
    if alphas.size == 0:
        return prof

    mask = prof.admissible_mask()
    for b in (0, 1):
        m = mask[b]
        if not m.any():
            continue
        idx = np.flatnonzero(np.diff(np.concatenate([[0], m.astype(np.int8), [0]])))
        for start, stop in zip(idx[::2], idx[1::2]):
            last = stop - 1
            pred = lambda a, b=b: _admissible(a, b, p, eps)
            a_lo = alphas[start]
            if start > 0:
                a_lo = _bisect_predicate(pred, alphas[start], alphas[start - 1], ENDPOINT_TOL)
            a_hi = alphas[last]
            if last + 1 < alphas.size:
                a_hi = _bisect_predicate(pred, alphas[last], alphas[last + 1], ENDPOINT_TOL)
            prof.admissible_intervals.append(AdmissibleInterval(float(a_lo), float(a_hi), b))
    prof.admissible_intervals.sort(key=lambda iv: iv.lo)
    return prof


# --------------------------------------------------------------------------
# critical points of the profile

@dataclass(frozen=True)
class CriticalPoint:
    alpha: float
    value: float
    kind: str  # LocalMin, LocalMax, LeftEndpoint, RightEndpoint


def _golden_min(f, a, b, tol):
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _interval_values(iv: AdmissibleInterval, p: SweepParams, n: int, eps: float):
    a = np.linspace(iv.lo, iv.hi, n + 1)
    ec2, _, _ = kernels.sweep(a, *p.as_tuple(), eps=eps)
    v = ec2[iv.branch]
    ok = np.isfinite(v)
    return a[ok], v[ok]


def _ec2_at(alpha, branch, p):
    cfg = _config(alpha, branch, p)
    return math.nan if cfg is None else _ec2(cfg)


def critical_points(P: SweepProfile, tol: float = CRITICAL_TOL) -> List[CriticalPoint]:
    """Interval endpoints and interior local extrema of |EC|^2 on each admissible interval.

    Each interval is resampled with ``P.n`` sub-intervals; sign changes of the
    first difference are refined by golden-section search.
    """
    out: List[CriticalPoint] = []
    p = P.params
    for iv in P.admissible_intervals:
        a, v = _interval_values(iv, p, P.n, P.eps)
        if a.size == 0:
            continue
        out.append(CriticalPoint(float(a[0]), float(v[0]), "LeftEndpoint"))
        d = np.diff(v)
        for i in range(1, d.size):
            if d[i - 1] > 0 >= d[i] or d[i - 1] < 0 <= d[i]:
                second = v[i + 1] - 2 * v[i] + v[i - 1]
                is_max = second < 0 if second != 0 else d[i - 1] > 0
                sign = -1.0 if is_max else 1.0
                x, fx = _golden_min(lambda t: sign * _ec2_at(t, iv.branch, p), a[i - 1], a[i + 1], tol)
                out.append(CriticalPoint(float(x), float(sign * fx), "LocalMax" if is_max else "LocalMin"))
        out.append(CriticalPoint(float(a[-1]), float(v[-1]), "RightEndpoint"))
    return out


# --------------------------------------------------------------------------
# realizations

def _bisect_root(f, a, b, fa, tol):
    while abs(b - a) > tol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def newton_polish(c0, targets, tol: float = RESIDUAL_TOL, max_iter: int = NEWTON_MAX_ITER):
    """Damped Newton on the seven squared-length residuals; returns (coords, max residual)."""
    c = np.array(c0, dtype=float)
    r = squared_lengths(c) - targets
    res = float(np.max(np.abs(r)))
    for _ in range(max_iter):
        if res <= tol:
            break
        J = jacobian(c)
        try:
            step = np.linalg.solve(J, -r)
            if not np.all(np.isfinite(step)):
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -r, rcond=None)[0]
        lam = 1.0
        norm = np.linalg.norm(r)
        while lam > 1e-8:
            cn = c + lam * step
            rn = squared_lengths(cn) - targets
            if np.linalg.norm(rn) < norm:
                break
            lam *= 0.5
        else:
            break
        c, r = cn, rn
        res = float(np.max(np.abs(r)))
    return c, res


def _find_roots(f, a, v, tangency_tol, include_ends):
    """Roots of f on the sampled points a (values v = f(a)); returns [(alpha, tangential)]."""
    roots = []
    n = a.size
    for i in range(n):
        if v[i] == 0.0 and (include_ends or 0 < i < n - 1):
            roots.append((float(a[i]), False))
    for i in range(n - 1):
        if v[i] * v[i + 1] < 0:
            roots.append((_bisect_root(f, a[i], a[i + 1], v[i], ROOT_TOL), False))
    # sign-preserving dips of |f|: tangential root, close pair, or nothing
    av = np.abs(v)
    for i in range(1, n - 1):
        if not (av[i] <= av[i - 1] and av[i] <= av[i + 1]):
            continue
        s = np.sign(v[i])
        if s == 0 or np.sign(v[i - 1]) != s or np.sign(v[i + 1]) != s:
            continue
        x, fx = _golden_min(lambda t: s * f(t), a[i - 1], a[i + 1], CRITICAL_TOL)
        if abs(fx) <= tangency_tol:
            roots.append((float(x), True))
        elif fx < 0:
            roots.append((_bisect_root(f, a[i - 1], x, v[i - 1], ROOT_TOL), False))
            roots.append((_bisect_root(f, x, a[i + 1], s * fx, ROOT_TOL), False))
    if include_ends:
        for i in (0, n - 1):
            if v[i] != 0.0 and abs(v[i]) <= tangency_tol:
                roots.append((float(a[i]), True))
    return sorted(roots)


def find_realizations(L: EdgeLengthSet, grid: int = GRID, tol: float = RESIDUAL_TOL,
                      congruence_tol: float = CONGRUENCE_TOL, include_degenerate: bool = False,
                      tangency_tol: float = TANGENCY_TOL, eps: float = EPS) -> List[Realization]:
    """All pairwise non-congruent convex realizations of ``L``, sorted by the base angle.

    Coordinates are in normalized units; each result carries ``scale = 1/l1``.
    """
    if not isinstance(L, EdgeLengthSet):
        L = EdgeLengthSet.from_sequence(L)
    p = SweepParams.from_lengths(L)
    target = (L.l7 / L.l1) ** 2
    targets7 = target_squares(L)
    scale = 1.0 / L.l1

    if include_degenerate:
        prof = _closure_profile(p, grid, eps)
    else:
        prof = ec_profile(p, n=grid, eps=eps)
    if not prof.admissible_intervals:
        log.debug("no admissible base angle for %s", L)
        return []

    found: List[Realization] = []
    for iv in prof.admissible_intervals:
        a, v = _interval_values(iv, p, grid, eps)
        if a.size == 0:
            continue
        f = lambda t, b=iv.branch: _ec2_at(t, b, p) - target
        for alpha, tangential in _find_roots(f, a, v - target, tangency_tol, include_degenerate):
            cfg = _config(alpha, iv.branch, p)
            if cfg is None or cfg[6] < 0:
                continue
            c0 = list(cfg[:6]) + [math.sqrt(cfg[6])]
            c, res = newton_polish(c0, targets7, tol)
            limit = tangency_tol if (tangential or include_degenerate) else tol
            if res > limit:
                log.debug("rejecting root at alpha=%.17g, residual %.3g", alpha, res)
                continue
            r = Realization.from_coords(c, scale=scale, alpha=math.atan2(c[1], c[0]))
            if not _accept(r, include_degenerate, eps):
                continue
            if any(congruent(r, q, congruence_tol) for q in found):
                continue
            found.append(r)
    found.sort(key=lambda r: r.alpha)
    return found


def _accept(r: Realization, include_degenerate: bool, eps: float) -> bool:
    if r.base_class is BaseClass.ConvexCCW and r.z3 > 0:
        return True
    if not include_degenerate:
        return False
    return r.base_class in (BaseClass.ConvexCCW, BaseClass.Degenerate) and r.z3 >= 0


def _closure_profile(p: SweepParams, grid: int, eps: float) -> SweepProfile:
    # admissible intervals widened to their boundary: convex-or-degenerate base, z3^2 >= 0
    prof = ec_profile(p, n=grid, eps=eps)
    widened = []
    for iv in prof.admissible_intervals:
        lo = _bisect_predicate(lambda t: _closed_ok(t, iv.branch, p, eps), iv.lo,
                               max(iv.lo - 1e-9, 0.0), 1e-15)
        hi = _bisect_predicate(lambda t: _closed_ok(t, iv.branch, p, eps), iv.hi,
                               min(iv.hi + 1e-9, math.pi), 1e-15)
        widened.append(AdmissibleInterval(lo, hi, iv.branch))
    prof.admissible_intervals = widened
    return prof


def _closed_ok(alpha, branch, p, eps):
    cfg = _config(alpha, branch, p)
    if cfg is None or cfg[6] < -1e-12:
        return False
    cls = classify_base(BaseQuad(*cfg[:4]), eps)
    return cls in (BaseClass.ConvexCCW, BaseClass.Degenerate)


# --------------------------------------------------------------------------
# closed forms of the two elimination branches

def branch_parallelogram(a1: float, b1: float, c3: float) -> Realization:
    """Parallelogram base A, B, C=(a1+1, b1), D=(a1, b1) with the apex over its centre."""
    if not (b1 > 0 and c3 > 0):
        raise ValueError("need b1 > 0 and c3 > 0")
    r = Realization.from_coords((a1, b1, a1 + 1.0, b1, 0.5 * (a1 + 1.0), 0.5 * b1, c3))
    ea, eb, ec, ed = _apex_squares(r)
    if abs(ea - ec) > 1e-14 * max(1.0, ea) or abs(eb - ed) > 1e-14 * max(1.0, eb):
        raise ArithmeticError("apex is not equidistant from opposite base vertices")
    return r


def _apex_squares(r: Realization):
    P = r.points()
    e = P[4]
    return tuple(float(np.sum((e - P[i]) ** 2)) for i in (0, 1, 2, 3))


def branch_nonconvex(a2: float, b2: float):
    """Position (a1, b1) of D forced by C = (a2, b2) on the non-convex branch.

    The determinant ``a2*b1 - b2*a1`` equals ``-b2``: the turn from OC to OD is
    clockwise, so the base cannot be convex.
    """
    if a2 == 0 and b2 == 0:
        raise OriginInput("C must differ from A")
    n = a2 * a2 + b2 * b2
    a1 = (a2 ** 3 - a2 * a2 + a2 * b2 * b2 + b2 * b2) / n
    b1 = b2 * (a2 * a2 - 2.0 * a2 + b2 * b2) / n
    return a1, b1


def parallelogram_eb2(p: float, q: float, l5: float, d1: float) -> float:
    """|EB|^2 for a parallelogram with sides p, q and diagonal |AC| = d1, apex over the centre at |EA| = l5."""
    if not (abs(p - q) <= d1 <= p + q):
        raise InvalidParallelogram(f"diagonal {d1} impossible for sides {p}, {q}")
    if l5 < d1 / 2:
        raise ApexImpossible(f"|EA| = {l5} < half diagonal {d1 / 2}")
    return l5 * l5 + 0.5 * (p * p + q * q) - 0.5 * d1 * d1
