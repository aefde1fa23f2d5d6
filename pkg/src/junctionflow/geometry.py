"""Discrete curves and three-curve networks.

A curve is sampled at the uniform parameter grid x_i = i/(n-1).  Parameter
derivatives use second-order stencils: central in the interior, one-sided
3-point (first derivative) and 4-point (second derivative) at the ends, so
endpoint values are consistent-order with the interior -- the compatibility
checks read second derivatives exactly there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateParametrization,
    EmptyInput,
    IndexOutOfRange,
)

DELTA_MIN_DEFAULT = 1e-6
TAU_JUNCTION_DEFAULT = 1e-10

#: brute-force pair cap for the Hoelder estimator (uniform thinning beyond)
HOLDER_MAX_SAMPLES = 2000


# ---------------------------------------------------------------------------
# difference stencils on the uniform grid
# ---------------------------------------------------------------------------

def param_derivative(points: np.ndarray) -> np.ndarray:
    """First parameter derivative p_x at every sample, second order."""
    p = np.asarray(points, dtype=float)
    n = p.shape[0]
    h = 1.0 / (n - 1)
    d = np.empty_like(p)
    d[1:-1] = (p[2:] - p[:-2]) * (0.5 / h)
    d[0] = (-3.0 * p[0] + 4.0 * p[1] - p[2]) * (0.5 / h)
    d[-1] = (3.0 * p[-1] - 4.0 * p[-2] + p[-3]) * (0.5 / h)
    return d


def param_second_derivative(points: np.ndarray) -> np.ndarray:
    """Second parameter derivative p_xx at every sample, second order.

    Endpoints use the 4-point one-sided stencil (exact through cubics).
    """
    p = np.asarray(points, dtype=float)
    n = p.shape[0]
    h = 1.0 / (n - 1)
    d = np.empty_like(p)
    d[1:-1] = (p[2:] - 2.0 * p[1:-1] + p[:-2]) / (h * h)
    if n >= 4:
        d[0] = (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) / (h * h)
        d[-1] = (2.0 * p[-1] - 5.0 * p[-2] + 4.0 * p[-3] - p[-4]) / (h * h)
    else:
        # n == 3: the 3-point second difference is all we have
        d[0] = d[1]
        d[-1] = d[1]
    return d


def speed(points: np.ndarray) -> np.ndarray:
    """|p_x| at every sample."""
    return np.linalg.norm(param_derivative(points), axis=1)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Curve:
    """One interface, sampled at x_i = i/(n-1).  Immutable after construction."""

    points: np.ndarray
    delta_min: float = DELTA_MIN_DEFAULT

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("curve points must be an (n, 2) array")
        if pts.shape[0] < 3:
            raise ValueError("a curve needs n >= 3 samples")
        if not np.all(np.isfinite(pts)):
            raise ValueError("curve points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        s = speed(pts)
        if s.min() < self.delta_min:
            i = int(s.argmin())
            raise DegenerateParametrization(
                f"|p_x| = {s[i]:.3e} < delta_min = {self.delta_min:.3e} "
                f"at sample {i}"
            )

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def h(self) -> float:
        return 1.0 / (self.n - 1)


@dataclass(frozen=True)
class Network:
    """Three curves sharing a junction, each pinned to a distinct anchor."""

    curves: tuple[Curve, Curve, Curve]
    anchors: np.ndarray
    tau_junction: float = TAU_JUNCTION_DEFAULT

    def __post_init__(self):
        if len(self.curves) != 3:
            raise ValueError("a network has exactly 3 curves")
        anc = np.ascontiguousarray(np.asarray(self.anchors, dtype=float))
        if anc.shape != (3, 2):
            raise ValueError("anchors must be a (3, 2) array")
        anc.setflags(write=False)
        object.__setattr__(self, "anchors", anc)
        j0 = self.curves[0].points[0]
        for c in self.curves[1:]:
            if np.abs(c.points[0] - j0).max() > self.tau_junction:
                raise ValueError(
                    "curves do not share a junction within tau_junction"
                )
        for k, c in enumerate(self.curves):
            if not np.array_equal(c.points[-1], anc[k]):
                raise ValueError(f"curve {k} endpoint is not pinned to anchor {k}")
        for a in range(3):
            for b in range(a + 1, 3):
                if np.array_equal(anc[a], anc[b]):
                    raise ValueError("anchors must be pairwise distinct")

    @property
    def junction(self) -> np.ndarray:
        return self.curves[0].points[0]


@dataclass(frozen=True)
class HolderEstimate:
    """Discrete Hoelder seminorm and sup norm of a sampled function."""

    exponent: float
    seminorm: float
    sup_norm: float


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def tangent_at_junction(c: Curve) -> np.ndarray:
    """Unit tangent p_x(0)/|p_x(0)| from the one-sided stencil."""
    d0 = param_derivative(c.points)[0]
    nrm = float(np.linalg.norm(d0))
    if nrm < c.delta_min:
        raise DegenerateParametrization(f"|p_x(0)| = {nrm:.3e} below floor")
    return d0 / nrm


def curvature_vector(c: Curve, i: int) -> np.ndarray:
    """Full curvature vector at interior sample i.

    k = p_xx/|p_x|^2 - p_x (p_x . p_xx)/|p_x|^4; the second term removes the
    tangential part, so k is normal to the curve.  This is distinct from the
    special-flow right side, which keeps the tangential part.
    """
    if not (1 <= i <= c.n - 2):
        raise IndexOutOfRange(f"need 1 <= i <= n-2, got i={i}, n={c.n}")
    h = c.h
    p = c.points
    px = (p[i + 1] - p[i - 1]) * (0.5 / h)
    pxx = (p[i + 1] - 2.0 * p[i] + p[i - 1]) / (h * h)
    nrm2 = float(px @ px)
    if math.sqrt(nrm2) < c.delta_min:
        raise DegenerateParametrization(f"|p_x| below floor at sample {i}")
    return pxx / nrm2 - px * float(px @ pxx) / (nrm2 * nrm2)


def length(c: Curve) -> float:
    """Trapezoid quadrature of |p_x| over [0, 1]."""
    return float(np.trapezoid(speed(c.points), dx=c.h))


def hausdorff_distance(a: Curve, b: Curve) -> float:
    """Discrete (point-sampled) symmetric Hausdorff distance.

    A lower bound for the continuum distance; the sampling bias is O(1/n).
    """
    pa, pb = a.points, b.points
    d2 = ((pa[:, None, :] - pb[None, :, :]) ** 2).sum(axis=2)
    forward = np.sqrt(d2.min(axis=1)).max()
    backward = np.sqrt(d2.min(axis=0)).max()
    return float(max(forward, backward))


def holder_seminorm(ts, values, beta: float) -> HolderEstimate:
    """sup over sample pairs of |v_i - v_j| / |t_i - t_j|^beta, plus sup norm.

    Values may be scalar or vector per sample (vector differences use the
    Euclidean norm).  O(m^2) brute force, thinned uniformly to at most
    HOLDER_MAX_SAMPLES samples.
    """
    t = np.asarray(ts, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise EmptyInput("need at least 2 samples")
    if not np.all(np.diff(t) > 0):
        raise ValueError("sample times must be strictly increasing")
    if not (0.0 < beta <= 1.0):
        raise ValueError("exponent beta must lie in (0, 1]")
    if v.shape[0] != t.size:
        raise ValueError("values and times must have the same length")
    if t.size > HOLDER_MAX_SAMPLES:
        idx = np.linspace(0, t.size - 1, HOLDER_MAX_SAMPLES).round().astype(int)
        idx = np.unique(idx)
        t = t[idx]
        v = v[idx]
    if v.ndim == 1:
        v = v[:, None]
    dv = np.linalg.norm(v[:, None, :] - v[None, :, :], axis=2)
    dt = np.abs(t[:, None] - t[None, :])
    iu = np.triu_indices(t.size, k=1)
    ratios = dv[iu] / dt[iu] ** beta
    return HolderEstimate(
        exponent=beta,
        seminorm=float(ratios.max()),
        sup_norm=float(np.linalg.norm(v, axis=1).max()),
    )


def discrete_c2_norm(c: Curve, alpha: float = 0.5) -> float:
    """Discrete stand-in for the spatial C^{2+alpha} norm of a curve.

    sup|p| + sup|p_x| + sup|p_xx| + Hoelder-alpha seminorm of p_xx over the
    sample pairs.  Diagnostic only (uniform-bound reports).
    """
    p = c.points
    px = param_derivative(p)
    pxx = param_second_derivative(p)
    x = np.arange(c.n) * c.h
    sem = holder_seminorm(x, pxx, alpha).seminorm
    return float(
        np.linalg.norm(p, axis=1).max()
        + np.linalg.norm(px, axis=1).max()
        + np.linalg.norm(pxx, axis=1).max()
        + sem
    )
