"""Initial-state builders for runs and tests.

Besides the stationary configuration and its seeded perturbations, two
constructive families live here: networks built from quadratic arcs near the
junction so the drag compatibility holds exactly in the continuum, and
arc-length-parametrized networks with prescribed junction curvature balance
(geometrically but not parametrically compatible).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConstructionFailed
from .flow import SimState
from .geometry import Curve, Network
from .stationary import ANCHORS, THETA_STAR
from .tension import TensionModel, interface_sigmas


def stationary_scenario(n: int, delta_min: float = 1e-6) -> SimState:
    from .stationary import stationary_configuration

    net, theta = stationary_configuration(n, delta_min)
    return SimState(net, theta, 0.0)


def perturbed_stationary_scenario(n: int, rng: np.random.Generator,
                                  eps: float = 0.1,
                                  delta_min: float = 1e-6) -> SimState:
    """Anchors fixed; junction offset and curve bumps drawn from rng.

    Bump amplitudes and the junction offset are bounded by eps so the state
    stays within the stability neighborhood of the stationary solution.
    """
    x = np.arange(n) / (n - 1)
    offset = eps * 0.5 * rng.uniform(-1.0, 1.0, size=2)
    curves = []
    for a in ANCHORS:
        base = offset[None, :] * (1.0 - x)[:, None] + x[:, None] * a[None, :]
        direction = (a - offset) / np.linalg.norm(a - offset)
        normal = np.array([-direction[1], direction[0]])
        amp = eps * 0.5 * rng.uniform(-1.0, 1.0)
        pts = base + amp * np.sin(math.pi * x)[:, None] * normal[None, :]
        pts[-1] = a
        curves.append(Curve(pts, delta_min=delta_min))
    net = Network(tuple(curves), ANCHORS)
    return SimState(net, THETA_STAR, 0.0)


def bowed_symmetric_scenario(n: int, amplitudes=(0.12, 0.06, 0.0),
                             junction_offset=(0.05, 0.02),
                             delta_min: float = 1e-6) -> SimState:
    """Deterministic non-equilibrium start for junction-angle relaxation runs."""
    x = np.arange(n) / (n - 1)
    offset = np.asarray(junction_offset, dtype=float)
    curves = []
    for a, amp in zip(ANCHORS, amplitudes):
        base = offset[None, :] * (1.0 - x)[:, None] + x[:, None] * a[None, :]
        direction = (a - offset) / np.linalg.norm(a - offset)
        normal = np.array([-direction[1], direction[0]])
        pts = base + amp * np.sin(math.pi * x)[:, None] * normal[None, :]
        pts[-1] = a
        curves.append(Curve(pts, delta_min=delta_min))
    return SimState(Network(tuple(curves), ANCHORS), THETA_STAR, 0.0)


def compatible_scenario(model: TensionModel, theta, mu: float, n: int,
                        junction=(0.0, 0.0), tangent_scale: float = 1.0,
                        bend: float = 0.25,
                        delta_min: float = 1e-6) -> SimState:
    """Parametrically compatible curved network toward the equilateral anchors.

    Near the junction each curve is the quadratic x -> J + x T_j + x^2 A_j
    with A_j = w |T_j|^2 / (2 sigma_j), w = (1/mu) sum_k sigma_k tau_k, which
    satisfies the drag compatibility exactly; a speed-balanced quintic with
    vanishing end second derivative carries it to a straight constant-speed
    run into the anchor (affine there, so the anchor-side conditions hold
    exactly under the difference stencils).
    """
    from .diagnostics import anchor_approach, hermite_quintic

    theta = tuple(float(v) for v in theta)
    sig = interface_sigmas(model, theta)
    J = np.asarray(junction, dtype=float)
    dirs = []
    for k, a in enumerate(ANCHORS):
        d = (a - J) / np.linalg.norm(a - J)
        rot = bend * (k - 1.0)  # mild asymmetric fan
        cs, sn = math.cos(rot), math.sin(rot)
        dirs.append(np.array([cs * d[0] - sn * d[1], sn * d[0] + cs * d[1]]))
    tangents = [tangent_scale * d for d in dirs]
    taus = [t / np.linalg.norm(t) for t in tangents]
    w = sum(s * tau for s, tau in zip(sig, taus)) / mu

    xs = np.arange(n) / (n - 1)
    xc = 0.35
    x_tail = 1.0 - max(0.08, 3.5 / (n - 1))
    curves = []
    for k, a in enumerate(ANCHORS):
        T = tangents[k]
        A = w * float(T @ T) / (2.0 * sig[k])
        p0 = J + xc * T + xc * xc * A
        v0 = T + 2.0 * xc * A
        acc0 = 2.0 * A
        # end speed balances the quintic's mean speed against the start speed
        chord = np.linalg.norm(a - p0)
        end_dir = (a - p0) / chord
        v_end = max(2.0 * chord / (1.0 - xc) - np.linalg.norm(v0),
                    0.5 * np.linalg.norm(v0))
        tail_start, tail_vel, tail_ev = anchor_approach(x_tail, a, v_end, end_dir)
        ev = hermite_quintic(xc, x_tail, p0, v0, acc0,
                             tail_start, tail_vel, np.zeros(2))
        pts = np.empty((n, 2))
        for i, x in enumerate(xs):
            if x <= xc:
                pts[i] = J + x * T + x * x * A
            elif x <= x_tail:
                pts[i] = ev(x)[0]
            else:
                pts[i] = tail_ev(x)[0]
        pts[-1] = a
        curves.append(Curve(pts, delta_min=delta_min))
    return SimState(Network(tuple(curves), ANCHORS), theta, 0.0)


def arclength_compatible_network(model: TensionModel, theta, mu: float,
                                 n: int, rng: np.random.Generator,
                                 base_length: float = 1.2,
                                 delta_min: float = 1e-6,
                                 headings=None):
    """Arc-length-parametrized network satisfying the geometric conditions.

    Each curve is built from a heading function phi(s) = h + kappa* s
    (1 - (1 - s/L)^3)/3-type profile whose initial curvature is the junction
    balance value and whose curvature vanishes at the far end; the anchors
    are wherever the curves land.  |p_x| is constant (= L) per curve, so the
    parametric tangential condition fails generically while the geometric
    conditions hold.
    """
    theta = tuple(float(v) for v in theta)
    sig = interface_sigmas(model, theta)
    if headings is None:
        headings = [
            math.atan2(ANCHORS[k][1], ANCHORS[k][0]) + rng.uniform(-0.15, 0.15)
            for k in range(3)
        ]
    taus = [np.array([math.cos(h), math.sin(h)]) for h in headings]
    drag = sum(s * t for s, t in zip(sig, taus)) / mu

    curves = []
    anchors = []
    for k in range(3):
        tau = taus[k]
        nu_vec = np.array([-tau[1], tau[0]])
        kappa0 = float(drag @ nu_vec) / sig[k]
        L = base_length * (1.0 + rng.uniform(-0.1, 0.1))
        # heading with phi'(0) = kappa0, phi'(L) = 0
        over = 16
        m = over * (n - 1) + 1
        s = np.linspace(0.0, L, m)
        phi = headings[k] + kappa0 * (L / 3.0) * (1.0 - (1.0 - s / L) ** 3)
        e = np.column_stack([np.cos(phi), np.sin(phi)])
        pts_fine = np.zeros((m, 2))
        np.cumsum(0.5 * (e[1:] + e[:-1]) * (s[1] - s[0]), axis=0,
                  out=pts_fine[1:])
        pts = pts_fine[::over].copy()
        anchors.append(pts[-1].copy())
        curves.append(Curve(pts, delta_min=delta_min))
    anchors = np.asarray(anchors)
    if min(np.linalg.norm(anchors[i] - anchors[j]) for i in range(3)
           for j in range(i + 1, 3)) < 0.2:
        raise ConstructionFailed("anchors landed too close together")
    return Network(tuple(curves), anchors), theta
