"""Compatibility conditions on initial data, and the constructive fix.

Parametric compatibility matches the six component equations and the drag
law at t = 0 for one concrete parametrization; geometric compatibility is
its parametrization-free counterpart (a curvature balance at the junction
and flat curvature at the anchors).  A geometrically compatible network can
be reparametrized curve-by-curve with a quintic diffeomorphism of [0, 1] so
the parametric conditions hold as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    GeometricCompatibilityRequired,
    NonMonotoneReparametrization,
)
from .geometry import Curve, Network, param_derivative, param_second_derivative
from .tension import TensionModel, interface_sigmas


def _ccw_normal(t: np.ndarray) -> np.ndarray:
    return np.array([-t[1], t[0]])


def _junction_data(net: Network):
    """Per-curve (p_x, |p_x|, tau, p_xx) at x = 0 from one-sided stencils."""
    out = []
    for c in net.curves:
        px = param_derivative(c.points)[0]
        pxx = param_second_derivative(c.points)[0]
        nrm = float(np.linalg.norm(px))
        out.append((px, nrm, px / nrm, pxx))
    return out


@dataclass
class CompatReport:
    """Residual magnitudes of the compatibility conditions, plus pass flags."""

    kind: str
    tol: float
    junction_residuals: list[float] = field(default_factory=list)
    anchor_residuals: list[float] = field(default_factory=list)
    junction_coherence: float = 0.0
    passed: bool = False

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "tol": self.tol,
            "junction_residuals": self.junction_residuals,
            "anchor_residuals": self.anchor_residuals,
            "junction_coherence": self.junction_coherence,
            "passed": self.passed,
        }


def check_parametric(net: Network, theta, model: TensionModel, mu: float,
                     tol: float = 1e-8) -> CompatReport:
    """Residuals of the component-wise first-order conditions at x=0 and x=1.

    At the junction each curve must satisfy
    sigma_j p_xx / |p_x|^2 = (1/mu) sum_k sigma_k tau_k (both components);
    at the anchors p_xx must vanish.
    """
    sig = interface_sigmas(model, theta)
    data = _junction_data(net)
    drag = sum(s * tau for s, (_, _, tau, _) in zip(sig, data)) / mu
    jres = []
    for s, (_, nrm, _, pxx) in zip(sig, data):
        lhs = s * pxx / (nrm * nrm)
        jres.append(float(np.abs(lhs - drag).max()))
    ares = [
        float(np.abs(param_second_derivative(c.points)[-1]).max())
        for c in net.curves
    ]
    coher = max(
        float(np.abs(c.points[0] - net.curves[0].points[0]).max())
        for c in net.curves
    )
    passed = (
        max(jres) <= tol and max(ares) <= tol and coher <= net.tau_junction
    )
    return CompatReport("parametric", tol, jres, ares, coher, passed)


def check_geometric(net: Network, theta, model: TensionModel, mu: float,
                    tol: float = 1e-8) -> CompatReport:
    """Residuals of the curvature balance at the junction and at the anchors.

    Junction: sigma_j kappa_j = (1/mu) (sum_k sigma_k tau_k) . nu_j with
    nu_j the counterclockwise normal of tau_j; anchors: kappa_j = 0.
    """
    sig = interface_sigmas(model, theta)
    data = _junction_data(net)
    drag = sum(s * tau for s, (_, _, tau, _) in zip(sig, data)) / mu
    jres = []
    for s, (_, nrm, tau, pxx) in zip(sig, data):
        nu = _ccw_normal(tau)
        kappa = float(pxx @ nu) / (nrm * nrm)
        jres.append(abs(s * kappa - float(drag @ nu)))
    ares = []
    for c in net.curves:
        px = param_derivative(c.points)[-1]
        pxx = param_second_derivative(c.points)[-1]
        nrm = float(np.linalg.norm(px))
        nu = _ccw_normal(px / nrm)
        ares.append(abs(float(pxx @ nu)) / (nrm * nrm))
    coher = max(
        float(np.abs(c.points[0] - net.curves[0].points[0]).max())
        for c in net.curves
    )
    passed = (
        max(jres) <= tol and max(ares) <= tol and coher <= net.tau_junction
    )
    return CompatReport("geometric", tol, jres, ares, coher, passed)


def _quintic_phi(phixx0: float, phixx1: float):
    """The unique quintic with phi(0)=0, phi(1)=1, phi'(0)=phi'(1)=1 and the
    given endpoint second derivatives.  Returns (phi, phi')."""
    # phi(x) = x + h(x); h has zero value and slope at both ends
    # h(x) = A x^2 (1-x)^3 + B x^3 (1-x)^2 with h''(0) = 2A, h''(1) = 2B
    A = 0.5 * phixx0
    B = 0.5 * phixx1

    def phi(x):
        x = np.asarray(x, dtype=float)
        return x + A * x**2 * (1 - x) ** 3 + B * x**3 * (1 - x) ** 2

    def dphi(x):
        x = np.asarray(x, dtype=float)
        da = 2 * x * (1 - x) ** 3 - 3 * x**2 * (1 - x) ** 2
        db = 3 * x**2 * (1 - x) ** 2 - 2 * x**3 * (1 - x)
        return 1.0 + A * da + B * db

    return phi, dphi


def reparametrize_to_compatible(net: Network, theta, model: TensionModel,
                                mu: float, tol_geo: float = 1e-6) -> Network:
    """Compose each curve with a quintic diffeomorphism so the parametric
    conditions hold; the trace is preserved up to spline resampling error.

    The endpoint second derivatives of phi_j are the tangential-balance
    values that cancel the tangential mismatch at the junction and flatten
    the tangential second derivative at the anchor.
    """
    geo = check_geometric(net, theta, model, mu, tol_geo)
    if not geo.passed:
        raise GeometricCompatibilityRequired(
            f"geometric residuals {geo.junction_residuals} / "
            f"{geo.anchor_residuals} exceed {tol_geo}"
        )
    sig = interface_sigmas(model, theta)
    data = _junction_data(net)
    drag_sum = sum(s * tau for s, (_, _, tau, _) in zip(sig, data))

    new_curves = []
    for k, c in enumerate(net.curves):
        qx0, nrm0, tau0, qxx0 = data[k]
        phixx0 = nrm0 * (
            float(drag_sum @ tau0) / (mu * sig[k])
            - float(qxx0 @ qx0) / nrm0**3
        )
        qx1 = param_derivative(c.points)[-1]
        qxx1 = param_second_derivative(c.points)[-1]
        phixx1 = -float(qxx1 @ qx1) / float(qx1 @ qx1)

        phi, dphi = _quintic_phi(phixx0, phixx1)
        scan = np.linspace(0.0, 1.0, 10 * c.n)
        if dphi(scan).min() <= 0.0:
            raise NonMonotoneReparametrization(
                f"curve {k}: quintic slope dips to {dphi(scan).min():.3e}"
            )

        x = np.arange(c.n) * c.h
        d = param_derivative(c.points)
        spline_x = CubicSpline(x, c.points[:, 0], bc_type=((1, d[0, 0]), (1, d[-1, 0])))
        spline_y = CubicSpline(x, c.points[:, 1], bc_type=((1, d[0, 1]), (1, d[-1, 1])))
        xi = phi(x)
        pts = np.column_stack([spline_x(xi), spline_y(xi)])
        pts[0] = c.points[0]
        pts[-1] = c.points[-1]
        new_curves.append(Curve(pts, delta_min=c.delta_min))

    return Network(tuple(new_curves), net.anchors, tau_junction=net.tau_junction)
