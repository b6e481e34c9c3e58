"""Vectorized sweep of the base angle at A.

For every angle alpha the base vertex D is placed at ``l4 * (cos, sin)``,
both circle-intersection candidates for C are built, the apex is trilaterated
from the spheres at A, B, D and |EC|^2 is evaluated.  Two interchangeable
implementations exist: an explicit loop compiled with numba and a pure numpy
version.  :func:`sweep` dispatches according to :data:`qpyramid._accel.USE_NUMBA`.

All lengths are in normalized units (|AB| = 1).

Base class codes: 0 convex (counterclockwise), 1 non-convex simple,
2 self-intersecting, 3 degenerate or missing.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

CONVEX, NONCONVEX, SELFINT, DEGENERATE = 0, 1, 2, 3


@njit(cache=True)
def _classify_crosses(ka, kb, kc, kd, eps):
    # ka..kd: turn at A, B, C, D going A->B->C->D->A
    if ka > eps and kb > eps and kc > eps and kd > eps:
        return CONVEX
    if abs(ka) <= eps or abs(kb) <= eps or abs(kc) <= eps or abs(kd) <= eps:
        return DEGENERATE
    # with no vanishing turn, every orientation needed for the two
    # non-adjacent edge pairs is one of the four vertex turns
    ab_cd = (ka > 0) != (kb > 0) and (kc > 0) != (kd > 0)
    bc_da = (kb > 0) != (kc > 0) and (kd > 0) != (ka > 0)
    if ab_cd or bc_da:
        return SELFINT
    return NONCONVEX


@njit(cache=True)
def _sweep_loop(alphas, l2, l3, l4, l5, l6, l8, eps):
    n = alphas.shape[0]
    ec2 = np.full((2, n), np.nan)
    cls = np.full((2, n), DEGENERATE, dtype=np.int8)
    z3sq = np.empty(n)
    x3 = 0.5 * (1.0 + (l5 * l5 - l6 * l6))
    for i in range(n):
        x1 = l4 * np.cos(alphas[i])
        y1 = l4 * np.sin(alphas[i])
        if y1 != 0.0:
            y3 = (l4 * l4 - 2.0 * x1 * x3 + l5 * l5 - l8 * l8) / (2.0 * y1)
            zz = l5 * l5 - x3 * x3 - y3 * y3
        else:
            y3 = np.nan
            zz = np.nan
        z3sq[i] = zz

        ux = x1 - 1.0
        uy = y1
        d = np.sqrt(ux * ux + uy * uy)
        if d == 0.0 or d > l2 + l3 or d < abs(l2 - l3):
            continue
        ux /= d
        uy /= d
        a = (l2 * l2 - l3 * l3 + d * d) / (2.0 * d)
        h = np.sqrt(max(l2 * l2 - a * a, 0.0))
        px = 1.0 + a * ux
        py = a * uy
        ka = y1  # turns at A..D of the closed path A->B->C->D->A
        for b in range(2):
            # branch 0 lies right of B->D, i.e. across the diagonal from A
            s = -1.0 if b == 0 else 1.0
            x2 = px - s * h * uy
            y2 = py + s * h * ux
            kb = y2
            kc = (x2 - 1.0) * (y1 - y2) - y2 * (x1 - x2)
            kd = x1 * (y1 - y2) - y1 * (x1 - x2)
            cls[b, i] = _classify_crosses(ka, kb, kc, kd, eps)
            if zz >= 0.0:
                ec2[b, i] = (x3 - x2) ** 2 + (y3 - y2) ** 2 + zz
    return ec2, z3sq, cls


def _classify_crosses_np(ka, kb, kc, kd, eps):
    out = np.full(np.broadcast(ka, kb, kc, kd).shape, NONCONVEX, dtype=np.int8)
    pa, pb, pc, pd = ka > 0, kb > 0, kc > 0, kd > 0
    selfint = ((pa != pb) & (pc != pd)) | ((pb != pc) & (pd != pa))
    out[selfint] = SELFINT
    degenerate = (
        (np.abs(ka) <= eps) | (np.abs(kb) <= eps) | (np.abs(kc) <= eps) | (np.abs(kd) <= eps)
    )
    out[degenerate] = DEGENERATE
    out[(ka > eps) & (kb > eps) & (kc > eps) & (kd > eps)] = CONVEX
    return out


def _sweep_numpy(alphas, l2, l3, l4, l5, l6, l8, eps):
    alphas = np.asarray(alphas, dtype=float)
    n = alphas.shape[0]
    x1 = l4 * np.cos(alphas)
    y1 = l4 * np.sin(alphas)
    x3 = 0.5 * (1.0 + (l5 * l5 - l6 * l6))
    with np.errstate(divide="ignore", invalid="ignore"):
        y3 = np.where(y1 != 0.0, (l4 * l4 - 2.0 * x1 * x3 + l5 * l5 - l8 * l8) / (2.0 * y1), np.nan)
        z3sq = l5 * l5 - x3 * x3 - y3 * y3

        ux = x1 - 1.0
        uy = y1.copy()
        d = np.hypot(ux, uy)
        meet = (d > 0.0) & (d <= l2 + l3) & (d >= abs(l2 - l3))
        ux = ux / d
        uy = uy / d
        a = (l2 * l2 - l3 * l3 + d * d) / (2.0 * d)
        h = np.sqrt(np.maximum(l2 * l2 - a * a, 0.0))
    px = 1.0 + a * ux
    py = a * uy

    ec2 = np.full((2, n), np.nan)
    cls = np.full((2, n), DEGENERATE, dtype=np.int8)
    for b, s in enumerate((-1.0, 1.0)):
        x2 = px - s * h * uy
        y2 = py + s * h * ux
        kc = (x2 - 1.0) * (y1 - y2) - y2 * (x1 - x2)
        kd = x1 * (y1 - y2) - y1 * (x1 - x2)
        with np.errstate(invalid="ignore"):
            c = _classify_crosses_np(y1, y2, kc, kd, eps)
            e = (x3 - x2) ** 2 + (y3 - y2) ** 2 + z3sq
        cls[b] = np.where(meet, c, DEGENERATE)
        ec2[b] = np.where(meet & (z3sq >= 0.0), e, np.nan)
    return ec2, z3sq, cls


def sweep_numba(alphas, l2, l3, l4, l5, l6, l8, eps=1e-10):
    return _sweep_loop(np.ascontiguousarray(alphas, dtype=np.float64),
                       float(l2), float(l3), float(l4), float(l5), float(l6), float(l8),
                       float(eps))


def sweep_numpy(alphas, l2, l3, l4, l5, l6, l8, eps=1e-10):
    return _sweep_numpy(alphas, float(l2), float(l3), float(l4), float(l5), float(l6),
                        float(l8), float(eps))


def sweep(alphas, l2, l3, l4, l5, l6, l8, eps=1e-10):
    """Evaluate the sweep at every angle in ``alphas``.

    Returns ``(ec2, z3sq, cls)``: |EC|^2 per branch with shape ``(2, n)``
    (NaN where C or a real apex is missing), the squared apex height with
    shape ``(n,)``, and base class codes with shape ``(2, n)``.
    """
    impl = sweep_numba if USE_NUMBA else sweep_numpy
    return impl(alphas, l2, l3, l4, l5, l6, l8, eps)
