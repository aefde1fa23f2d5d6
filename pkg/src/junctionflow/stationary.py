"""Stationary configuration and its stability.

The equilateral configuration (three unit segments from the origin to the
vertices of an equilateral triangle, orientations 0, 2*pi/3, 4*pi/3) is
stationary for every tension model with the symmetry axioms.  Stability is
classified through an auxiliary four-variable energy F(a, b, r, s): junction
position plus the two free orientation differences (the common rotation mode
is gauged away).  For the quadratic profile the Hessian eigenvalues have
closed forms; for any model a numeric eigensolver and a finite-difference
Jacobian of the reduced straight-segment dynamics are available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AnchorSingularity
from .geometry import Curve, Network
from .tension import TensionModel, interface_sigmas

ANCHORS = np.array([
    [math.sqrt(3.0) / 2.0, -0.5],
    [0.0, 1.0],
    [-math.sqrt(3.0) / 2.0, -0.5],
])

THETA_STAR = (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0)


def stationary_configuration(n: int, delta_min: float = 1e-6):
    """Straight unit segments from the origin to the equilateral anchors."""
    x = (np.arange(n) / (n - 1))[:, None]
    curves = tuple(Curve(x * a[None, :], delta_min=delta_min) for a in ANCHORS)
    return Network(curves, ANCHORS), THETA_STAR


def grad_g(x: float, y: float, model: TensionModel) -> np.ndarray:
    """Gradient of g(x, y) = sigma(y) + sigma(-x) + sigma(x - y)."""
    return np.array([
        -model.sigma_prime(-x) + model.sigma_prime(x - y),
        model.sigma_prime(y) - model.sigma_prime(x - y),
    ])


def F_value_grad_hessian(a: float, b: float, r: float, s: float,
                         model: TensionModel):
    """Auxiliary energy F(a,b,r,s), its gradient and Hessian, analytically.

    F = sigma(s) d1 + sigma(-r) d2 + sigma(r-s) d3 with d_k the distance from
    (a, b) to anchor k; the derivatives go through the canonical reduction,
    valid on the smooth branch containing the arguments.
    """
    p = np.array([a, b])
    d = np.linalg.norm(p[None, :] - ANCHORS, axis=1)
    if d.min() < 1e-12:
        raise AnchorSingularity("junction position coincides with an anchor")
    nvec = (p[None, :] - ANCHORS) / d[:, None]

    sig = np.array([model.sigma(s), model.sigma(-r), model.sigma(r - s)])
    F = float(sig @ d)

    sp_r = model.sigma_prime(r)       # = -sigma'(-r), sigma' odd
    sp_s = model.sigma_prime(s)
    sp_rs = model.sigma_prime(r - s)
    spp_r = model.sigma_double_prime(r)
    spp_s = model.sigma_double_prime(s)
    spp_rs = model.sigma_double_prime(r - s)

    grad = np.empty(4)
    grad[0:2] = sig @ nvec
    grad[2] = sp_r * d[1] + sp_rs * d[2]
    grad[3] = sp_s * d[0] - sp_rs * d[2]

    hess = np.zeros((4, 4))
    for k in range(3):
        hess[0:2, 0:2] += sig[k] * (np.eye(2) - np.outer(nvec[k], nvec[k])) / d[k]
    hess[0:2, 2] = sp_r * nvec[1] + sp_rs * nvec[2]
    hess[0:2, 3] = sp_s * nvec[0] - sp_rs * nvec[2]
    hess[2, 0:2] = hess[0:2, 2]
    hess[3, 0:2] = hess[0:2, 3]
    hess[2, 2] = spp_r * d[1] + spp_rs * d[2]
    hess[2, 3] = hess[3, 2] = -spp_rs * d[2]
    hess[3, 3] = spp_s * d[0] + spp_rs * d[2]
    return F, grad, hess


def eigenvalues_formula(c: float) -> np.ndarray:
    """Closed-form eigenvalues of the stationary Hessian, quadratic profile."""
    pi = math.pi
    s1 = math.sqrt(81 * c * c + 72 * c * (pi * pi - 3) + 16 * (pi**4 + 18 * pi * pi + 9))
    s2 = math.sqrt(81 * c * c + 72 * c * (pi * pi - 9) + 16 * (pi**4 + 54 * pi * pi + 81))
    return np.array([
        (9 * c + 12 + 4 * pi * pi - s1) / 12.0,
        (9 * c + 12 + 4 * pi * pi + s1) / 12.0,
        (9 * c + 36 + 4 * pi * pi - s2) / 12.0,
        (9 * c + 36 + 4 * pi * pi + s2) / 12.0,
    ])


def quadratic_stability_threshold(lo: float = 1e-6, hi: float = 100.0,
                                  tol: float = 1e-8) -> float:
    """Bisect min_j lambda_j(c) = 0 over (lo, hi] for the quadratic profile."""
    f = lambda c: float(eigenvalues_formula(c).min())
    if f(lo) >= 0.0:
        return lo
    if f(hi) <= 0.0:
        raise ValueError("no sign change of min lambda on the given bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass
class StationaryReport:
    """Stationary-point data, Hessian spectrum and classification."""

    anchors: np.ndarray
    junction: np.ndarray
    theta: tuple[float, float, float]
    grad_g: np.ndarray
    grad_F: np.ndarray
    hessian_F: np.ndarray
    eigenvalues_numeric: np.ndarray
    eigenvalues_formula: np.ndarray | None
    classification: str
    c_threshold: float | None = None
    model_metadata: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "anchors": self.anchors.tolist(),
            "junction": self.junction.tolist(),
            "theta": list(self.theta),
            "grad_g": self.grad_g.tolist(),
            "grad_F": self.grad_F.tolist(),
            "hessian_F": self.hessian_F.tolist(),
            "eigenvalues_numeric": self.eigenvalues_numeric.tolist(),
            "classification": self.classification,
            "model": self.model_metadata,
        }
        if self.eigenvalues_formula is not None:
            out["eigenvalues_formula"] = self.eigenvalues_formula.tolist()
        if self.c_threshold is not None:
            out["c_threshold"] = self.c_threshold
        return out


ZERO_EIG_TOL = 1e-10


def classify_stability(model: TensionModel) -> StationaryReport:
    """Spectrum of the stationary Hessian and sign classification.

    For the quadratic profile the closed-form eigenvalues and the positivity
    threshold found by bisection are included.
    """
    r, s = THETA_STAR[1], THETA_STAR[2]
    _, grad, hess = F_value_grad_hessian(0.0, 0.0, r, s, model)
    eig = np.linalg.eigvalsh(hess)
    if eig.min() > ZERO_EIG_TOL:
        cls = "strict_local_min"
    elif eig.min() < -ZERO_EIG_TOL:
        cls = "saddle"
    else:
        cls = "degenerate"
    formula = None
    c_thr = None
    if model.kind == "quadratic":
        formula = eigenvalues_formula(model.c)
        c_thr = quadratic_stability_threshold()
    return StationaryReport(
        anchors=ANCHORS.copy(),
        junction=np.zeros(2),
        theta=THETA_STAR,
        grad_g=grad_g(r, s, model),
        grad_F=grad,
        hessian_F=hess,
        eigenvalues_numeric=eig,
        eigenvalues_formula=formula,
        classification=cls,
        c_threshold=c_thr,
        model_metadata=model.metadata(),
    )


# ---------------------------------------------------------------------------
# reduced straight-segment model
# ---------------------------------------------------------------------------

def reduced_field(state: np.ndarray, model: TensionModel, mu: float,
                  nu: float) -> np.ndarray:
    """Right side of the straight-segment dynamics in (a, b, th1, th2, th3).

    Segments run from the junction (a, b) to the fixed anchors; the junction
    obeys the drag law with the segment tangents and the orientations follow
    the rotation law with the segment lengths.
    """
    p = state[0:2]
    th = state[2:5]
    diff = ANCHORS - p[None, :]
    L = np.linalg.norm(diff, axis=1)
    if L.min() < 1e-12:
        raise AnchorSingularity("junction at an anchor in the reduced model")
    tau = diff / L[:, None]
    sig = interface_sigmas(model, th)
    out = np.empty(5)
    out[0:2] = (np.asarray(sig) @ tau) / mu
    sp = [model.sigma_prime(th[(j - 1) % 3] - th[j]) for j in range(3)]
    for j in range(3):
        out[2 + j] = nu * (sp[j] * L[j] - sp[(j + 1) % 3] * L[(j + 1) % 3])
    return out


def reduced_ode_jacobian(model: TensionModel, mu: float, nu: float,
                         fd_step: float = 1e-6) -> dict:
    """Finite-difference Jacobian of the reduced dynamics at the equilibrium.

    Returns the raw 5x5 Jacobian and the 4x4 quotient with the neutral
    all-angles rotation direction (0,0,1,1,1) removed, with eigenvalues of
    both.
    """
    x0 = np.array([0.0, 0.0, *THETA_STAR])
    jac = np.empty((5, 5))
    for k in range(5):
        e = np.zeros(5)
        e[k] = fd_step
        jac[:, k] = (
            reduced_field(x0 + e, model, mu, nu)
            - reduced_field(x0 - e, model, mu, nu)
        ) / (2.0 * fd_step)
    # orthonormal basis of the complement of the neutral direction
    q = np.zeros((5, 4))
    q[0, 0] = 1.0
    q[1, 1] = 1.0
    q[2:5, 2] = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
    q[2:5, 3] = np.array([1.0, 1.0, -2.0]) / math.sqrt(6.0)
    quotient = q.T @ jac @ q
    return {
        "jacobian": jac,
        "eigenvalues": np.linalg.eigvals(jac),
        "quotient": quotient,
        "quotient_eigenvalues": np.linalg.eigvals(quotient),
    }
