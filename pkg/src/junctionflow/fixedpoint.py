"""Frozen-coefficient linear solves iterated to a fixed point.

One application of the map takes guessed space-time fields (six scalar
components plus three angle paths), forms the coefficient-mismatch forcing,
integrates the junction boundary data and the rotation integrands from the
guess, and solves six decoupled linear heat equations implicitly.  The
fixed point of the map solves the nonlinear discrete system; the distance
between successive iterates is measured in a sup + time-Hoelder composite
norm and the per-iteration contraction factors are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .errors import (
    DegenerateFrozenCoefficient,
    DegenerateParametrization,
    InputGridMismatch,
)
from .flow import SimState
from .geometry import param_derivative
from .tension import TensionModel

#: time samples used when measuring iterate distances (uniform thinning)
DISTANCE_TIME_CAP = 201


def _spatial_derivative(u: np.ndarray, h: float) -> np.ndarray:
    """u_x along the last axis, second order (one-sided at the ends)."""
    d = np.empty_like(u)
    d[..., 1:-1] = (u[..., 2:] - u[..., :-2]) * (0.5 / h)
    d[..., 0] = (-3.0 * u[..., 0] + 4.0 * u[..., 1] - u[..., 2]) * (0.5 / h)
    d[..., -1] = (3.0 * u[..., -1] - 4.0 * u[..., -2] + u[..., -3]) * (0.5 / h)
    return d


def _second_derivative_interior(u: np.ndarray, h: float) -> np.ndarray:
    """u_xx along the last axis at interior samples."""
    return (u[..., 2:] - 2.0 * u[..., 1:-1] + u[..., :-2]) / (h * h)


@dataclass
class LinearizedProblem:
    """Grid, frozen coefficients and boundary data of the linearized system."""

    u0: np.ndarray          # (6, n) initial components
    theta0: np.ndarray      # (3,)
    anchors: np.ndarray     # (3, 2)
    D: np.ndarray           # (6, n) frozen diffusion coefficients
    model: TensionModel
    mu: float
    nu: float
    T: float
    dt: float
    alpha: float = 0.5
    delta: float = 0.0      # initial parametrization floor, for the delta/2 guard

    @classmethod
    def from_state(cls, state: SimState, model: TensionModel, mu: float,
                   nu: float, T: float, dt: float, alpha: float = 0.5):
        net = state.network
        n = net.curves[0].n
        u0 = np.empty((6, n))
        D = np.empty((6, n))
        speeds = []
        from .tension import interface_sigmas

        sig0 = interface_sigmas(model, state.orientations)
        for c in range(3):
            pts = net.curves[c].points
            u0[2 * c] = pts[:, 0]
            u0[2 * c + 1] = pts[:, 1]
            px2 = (param_derivative(pts) ** 2).sum(axis=1)
            speeds.append(np.sqrt(px2))
            D[2 * c] = sig0[c] / px2
            D[2 * c + 1] = D[2 * c]
        if D.min() <= 0.0:
            raise DegenerateFrozenCoefficient("min D <= 0")
        return cls(
            u0=u0,
            theta0=np.asarray(state.orientations, dtype=float),
            anchors=net.anchors.copy(),
            D=D,
            model=model,
            mu=mu,
            nu=nu,
            T=T,
            dt=dt,
            alpha=alpha,
            delta=float(min(s.min() for s in speeds)),
        )

    @property
    def n(self) -> int:
        return self.u0.shape[1]

    @property
    def nt(self) -> int:
        return int(round(self.T / self.dt))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.nt + 1) * self.dt

    def constant_guess(self):
        """Time-constant extension of the initial data."""
        nt = self.nt
        ubar = np.repeat(self.u0[:, None, :], nt + 1, axis=1)
        thbar = np.repeat(self.theta0[:, None], nt + 1, axis=1)
        return ubar, thbar


def _interface_sigma_series(model: TensionModel, thbar: np.ndarray) -> np.ndarray:
    """sigma_{j-1,j}(t_k) for the three interfaces from angle paths (3, nt+1)."""
    out = np.empty((3, thbar.shape[1]))
    for k in range(thbar.shape[1]):
        t1, t2, t3 = thbar[:, k]
        out[0, k] = model.sigma(t3 - t1)
        out[1, k] = model.sigma(t1 - t2)
        out[2, k] = model.sigma(t2 - t3)
    return out


def _cumtrapz(y: np.ndarray, dt: float) -> np.ndarray:
    """Cumulative trapezoid along the last axis, starting at 0."""
    out = np.zeros_like(y)
    out[..., 1:] = np.cumsum(0.5 * (y[..., 1:] + y[..., :-1]), axis=-1) * dt
    return out


def solve_linearized(prob: LinearizedProblem, ubar: np.ndarray,
                     thbar: np.ndarray):
    """One application of the frozen-coefficient map.

    ubar has shape (6, nt+1, n), thbar (3, nt+1).  Returns fields of the
    same shapes: the solution of the six linear heat equations with the
    forcing, junction data and rotation integrals built from the inputs.
    """
    n, nt = prob.n, prob.nt
    if ubar.shape != (6, nt + 1, n) or thbar.shape != (3, nt + 1):
        raise InputGridMismatch(
            f"expected {(6, nt + 1, n)} and {(3, nt + 1)}, "
            f"got {ubar.shape} and {thbar.shape}"
        )
    if not np.allclose(ubar[:, 0, :], prob.u0, rtol=0.0, atol=1e-12):
        raise InputGridMismatch("guess does not start from the initial data")
    h = 1.0 / (n - 1)
    dt = prob.dt

    sig_bar = _interface_sigma_series(prob.model, thbar)

    # parametrization speeds of the guess, (3, nt+1, n)
    px2 = np.empty((3, nt + 1, n))
    for c in range(3):
        dx = _spatial_derivative(ubar[2 * c], h)
        dy = _spatial_derivative(ubar[2 * c + 1], h)
        px2[c] = dx * dx + dy * dy
    if prob.delta > 0.0 and np.sqrt(px2.min()) <= 0.5 * prob.delta:
        raise DegenerateParametrization(
            "guess violates the |p_x| > delta/2 margin"
        )

    # junction boundary data from the guess
    ux0 = np.empty((6, nt + 1))
    for j in range(6):
        ux0[j] = (-3.0 * ubar[j, :, 0] + 4.0 * ubar[j, :, 1]
                  - ubar[j, :, 2]) * (0.5 / h)
    spd0 = np.sqrt(px2[:, :, 0])
    phi_rate = sum(sig_bar[c] * ux0[2 * c] / spd0[c] for c in range(3))
    psi_rate = sum(sig_bar[c] * ux0[2 * c + 1] / spd0[c] for c in range(3))
    phi = prob.u0[0, 0] + _cumtrapz(phi_rate, dt) / prob.mu
    psi = prob.u0[1, 0] + _cumtrapz(psi_rate, dt) / prob.mu

    # rotation integrals from the guess
    lengths = np.trapezoid(np.sqrt(px2), dx=h, axis=2)  # (3, nt+1)
    theta = np.empty_like(thbar)
    sp = np.empty((3, nt + 1))
    for k in range(nt + 1):
        t1, t2, t3 = thbar[:, k]
        sp[0, k] = prob.model.sigma_prime(t3 - t1)
        sp[1, k] = prob.model.sigma_prime(t1 - t2)
        sp[2, k] = prob.model.sigma_prime(t2 - t3)
    for j in range(3):
        integrand = prob.nu * (
            sp[j] * lengths[j] - sp[(j + 1) % 3] * lengths[(j + 1) % 3]
        )
        theta[j] = prob.theta0[j] + _cumtrapz(integrand, dt)

    # forcing and the six implicit solves
    u = np.empty_like(ubar)
    for j in range(6):
        c = j // 2
        coord = j % 2
        ubar_xx = _second_derivative_interior(ubar[j], h)  # (nt+1, n-2)
        coeff_mismatch = (
            sig_bar[c][:, None] / px2[c][:, 1:-1] - prob.D[j][None, 1:-1]
        )
        f = coeff_mismatch * ubar_xx
        left = phi if coord == 0 else psi
        right = np.full(nt + 1, prob.anchors[c, coord])
        u[j] = implicit_heat_solve(prob.D[j], prob.u0[j], left, right, f,
                                   dt, h)
    return u, theta


def implicit_heat_solve(D: np.ndarray, u0: np.ndarray, left: np.ndarray,
                        right: np.ndarray, f: np.ndarray, dt: float,
                        h: float) -> np.ndarray:
    """Backward-Euler solve of u_t - D(x) u_xx = f with Dirichlet data.

    D and u0 have shape (n,), left/right (nt+1,), f (nt+1, n-2) at interior
    samples (row k is used for the step onto t_k).  Returns (nt+1, n).
    """
    n = u0.shape[0]
    nt = left.shape[0] - 1
    r = dt * D[1:-1] / (h * h)
    ab = np.zeros((3, n - 2))
    ab[0, 1:] = -r[:-1]
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :-1] = -r[1:]
    u = np.empty((nt + 1, n))
    u[0] = u0
    for k in range(1, nt + 1):
        rhs = u[k - 1, 1:-1] + dt * f[k]
        rhs[0] += r[0] * left[k]
        rhs[-1] += r[-1] * right[k]
        u[k, 1:-1] = solve_banded((1, 1), ab, rhs)
        u[k, 0] = left[k]
        u[k, -1] = right[k]
    return u


def _time_holder(w: np.ndarray, ts: np.ndarray, beta: float) -> float:
    """sup over x of the time-Hoelder seminorm of w (nt+1, n) or (nt+1,).

    Equivalent to holder_seminorm along the time axis at each x, evaluated
    on a thinned time grid; one vectorized all-pairs pass over x.
    """
    if ts.size > DISTANCE_TIME_CAP:
        idx = np.unique(
            np.linspace(0, ts.size - 1, DISTANCE_TIME_CAP).round().astype(int)
        )
        w = w[idx]
        ts = ts[idx]
    if w.ndim == 1:
        w = w[:, None]
    iu, ju = np.triu_indices(ts.size, k=1)
    num = np.abs(w[iu] - w[ju])
    den = np.abs(ts[iu] - ts[ju])[:, None] ** beta
    return float((num / den).max())


def iterate_distance(du: np.ndarray, dth: np.ndarray, ts: np.ndarray,
                     alpha: float) -> float:
    """Composite distance: sup + time-Hoelder(alpha/2) per component, plus
    sup + Hoelder(alpha) per angle path."""
    total = 0.0
    for j in range(6):
        total += float(np.abs(du[j]).max())
        total += _time_holder(du[j], ts, alpha / 2.0)
    for j in range(3):
        total += float(np.abs(dth[j]).max())
        total += _time_holder(dth[j], ts, alpha)
    return total


@dataclass
class ContractionReport:
    """Distances and empirical contraction factors of the iteration."""

    T: float
    alpha: float
    distances: list[float] = field(default_factory=list)
    factors: list[float] = field(default_factory=list)
    converged: bool = False
    non_contraction: bool = False
    below_half: bool = False
    iterations: int = 0
    u: np.ndarray | None = None
    theta: np.ndarray | None = None

    @property
    def max_factor(self) -> float:
        return max(self.factors) if self.factors else math.nan

    def as_dict(self) -> dict:
        return {
            "T": self.T,
            "alpha": self.alpha,
            "distances": self.distances,
            "factors": self.factors,
            "max_factor": None if not self.factors else self.max_factor,
            "converged": self.converged,
            "non_contraction": self.non_contraction,
            "below_half": self.below_half,
            "iterations": self.iterations,
        }


def iterate_to_fixed_point(prob: LinearizedProblem, max_iter: int = 20,
                           tol: float = 1e-10) -> ContractionReport:
    """Apply the frozen-coefficient map from the constant-in-time guess until
    successive iterates stop moving."""
    ubar, thbar = prob.constant_guess()
    ts = prob.times
    report = ContractionReport(T=prob.T, alpha=prob.alpha)
    for it in range(1, max_iter + 1):
        u, theta = solve_linearized(prob, ubar, thbar)
        d = iterate_distance(u - ubar, theta - thbar, ts, prob.alpha)
        report.iterations = it
        if report.distances and report.distances[-1] > 0.0:
            report.factors.append(d / report.distances[-1])
        report.distances.append(d)
        ubar, thbar = u, theta
        if d < tol:
            report.converged = True
            break
    report.non_contraction = any(f >= 1.0 for f in report.factors[1:])
    report.below_half = bool(report.factors) and max(report.factors) < 0.5
    report.u = ubar
    report.theta = thbar
    return report


def fixed_point_residual(prob: LinearizedProblem, u: np.ndarray,
                         theta: np.ndarray) -> float:
    """Max residual of the nonlinear discrete system at the fixed point.

    Substitutes the converged fields back into u_t = (sigma/|p_x|^2) u_xx
    with the same stencils and the implicit time pairing.
    """
    n = prob.n
    h = 1.0 / (n - 1)
    sig = _interface_sigma_series(prob.model, theta)
    worst = 0.0
    for j in range(6):
        c = j // 2
        dx = _spatial_derivative(u[2 * c], h)
        dy = _spatial_derivative(u[2 * c + 1], h)
        px2 = dx * dx + dy * dy
        ut = (u[j, 1:] - u[j, :-1]) / prob.dt        # (nt, n)
        uxx = _second_derivative_interior(u[j], h)   # (nt+1, n-2)
        res = ut[:, 1:-1] - (sig[c][1:, None] / px2[1:, 1:-1]) * uxx[1:]
        worst = max(worst, float(np.abs(res).max()))
    return worst
