"""Time integration of the parametric problem.

Six heat-type component equations u_t = (sigma/|p_x|^2) u_xx, a drag law
moving the shared junction, pinned anchors, and the grain-rotation ODE.
The default scheme lags sigma/|p_x|^2 at the previous step and solves one
tridiagonal system per scalar component (unconditionally stable); an
explicit scheme is kept for cross-validation.  All sub-updates of one step
read the pre-step state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from . import diagnostics
from .errors import (
    ConfigError,
    DegenerateParametrization,
    KinkPoint,
    SigmaNonpositive,
)
from .geometry import (
    Curve,
    DELTA_MIN_DEFAULT,
    Network,
    TAU_JUNCTION_DEFAULT,
    length,
    param_derivative,
)
from .tension import TensionModel, interface_sigmas

EXPLICIT_SAFETY = 0.4


@dataclass(frozen=True)
class FlowParams:
    """Numerical and physical parameters of one run."""

    mu: float
    nu: float = 0.0
    n: int = 65
    dt: float = 1e-4
    t_end: float = 1.0
    delta_min: float = DELTA_MIN_DEFAULT
    tau_junction: float = TAU_JUNCTION_DEFAULT
    scheme: str = "semi_implicit"
    snapshot_every: int = 100

    def __post_init__(self):
        if not (self.mu > 0.0):
            raise ConfigError("mu (inverse junction mobility) must be > 0")
        if self.nu < 0.0:
            raise ConfigError("nu (rotation mobility) must be >= 0")
        if self.n < 3:
            raise ConfigError("need n >= 3 samples per curve")
        if not (self.dt > 0.0):
            raise ConfigError("dt must be > 0")
        if self.t_end < 0.0:
            raise ConfigError("t_end must be >= 0")
        if self.scheme not in ("semi_implicit", "explicit"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.snapshot_every < 1:
            raise ConfigError("snapshot_every must be >= 1")


@dataclass(frozen=True)
class SimState:
    """One snapshot of the coupled system: network, orientations, time."""

    network: Network
    orientations: tuple[float, float, float]
    time: float = 0.0

    def __post_init__(self):
        th = tuple(float(v) for v in self.orientations)
        if len(th) != 3 or not all(math.isfinite(v) for v in th):
            raise ValueError("orientations must be 3 finite angles")
        object.__setattr__(self, "orientations", th)


@dataclass
class SimRecord:
    """Time series produced by run(): snapshots, traces and events."""

    snapshots: list[SimState] = field(default_factory=list)
    energy: list[tuple[float, float]] = field(default_factory=list)
    junction_speed: list[tuple[float, float]] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)

    def add_event(self, kind: str, time: float, **extra) -> None:
        self.events.append({"kind": kind, "time": time, **extra})

    def halting_event(self):
        for ev in self.events:
            if ev["kind"] in ("Degeneracy", "SigmaNonpositive", "KinkHalt"):
                return ev
            if ev["kind"] == "SelfIntersection" and ev.get("halted"):
                return ev
        return None


# ---------------------------------------------------------------------------
# right-hand sides and single step
# ---------------------------------------------------------------------------

def special_flow_rhs(c: Curve, sigma: float) -> np.ndarray:
    """sigma * p_xx / |p_x|^2 at the interior samples (endpoints excluded)."""
    if sigma <= 0.0:
        raise SigmaNonpositive(f"sigma = {sigma!r}")
    p = c.points
    h = c.h
    pxx = (p[2:] - 2.0 * p[1:-1] + p[:-2]) / (h * h)
    px = (p[2:] - p[:-2]) * (0.5 / h)
    nrm2 = (px * px).sum(axis=1)
    if np.sqrt(nrm2.min()) < c.delta_min:
        raise DegenerateParametrization("|p_x| below floor on an interior sample")
    return sigma * pxx / nrm2[:, None]


def junction_velocity(net: Network, sigmas, mu: float) -> np.ndarray:
    """(1/mu) * sum_j sigma_{j-1,j} * tau_j with tau_j the outgoing unit tangents."""
    v = np.zeros(2)
    for c, s in zip(net.curves, sigmas):
        d0 = param_derivative(c.points)[0]
        nrm = float(np.linalg.norm(d0))
        if nrm < c.delta_min:
            raise DegenerateParametrization("junction tangent below floor")
        v += s * d0 / nrm
    return v / mu


def rotation_rhs(state: SimState, model: TensionModel, nu: float) -> np.ndarray:
    """dtheta_j/dt = nu [sigma'(th_{j-1}-th_j) L_j - sigma'(th_j-th_{j+1}) L_{j+1}]."""
    th = state.orientations
    L = [length(c) for c in state.network.curves]
    sp = [model.sigma_prime(th[(j - 1) % 3] - th[j]) for j in range(3)]
    out = np.empty(3)
    for j in range(3):
        out[j] = nu * (sp[j] * L[j] - sp[(j + 1) % 3] * L[(j + 1) % 3])
    return out


def _tridiag_dirichlet_step(u: np.ndarray, coeff: np.ndarray, dt: float,
                            h: float, left, right) -> np.ndarray:
    """One implicit heat step of u_t = coeff(x) u_xx with Dirichlet data.

    u has shape (n, k); coeff shape (n,); left/right are the new boundary
    values (shape (k,)).  coeff is held fixed over the step.
    """
    n = u.shape[0]
    r = dt * coeff[1:-1] / (h * h)
    ab = np.zeros((3, n - 2))
    ab[0, 1:] = -r[:-1]
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :-1] = -r[1:]
    rhs = u[1:-1].copy()
    rhs[0] += r[0] * np.asarray(left)
    rhs[-1] += r[-1] * np.asarray(right)
    out = np.empty_like(u)
    out[0] = left
    out[-1] = right
    out[1:-1] = solve_banded((1, 1), ab, rhs)
    return out


def explicit_dt_bound(state: SimState, p: FlowParams, model: TensionModel) -> float:
    """Stability bound safety * dx^2 * min|p_x|^2 / max sigma for the explicit scheme."""
    sig = interface_sigmas(model, state.orientations)
    h = 1.0 / (p.n - 1)
    minpx2 = min(
        float((param_derivative(c.points) ** 2).sum(axis=1).min())
        for c in state.network.curves
    )
    return EXPLICIT_SAFETY * h * h * minpx2 / max(sig)


def step(state: SimState, p: FlowParams, model: TensionModel) -> SimState:
    """Advance the coupled system by one time step (Jacobi-style coupling)."""
    net = state.network
    th = state.orientations
    sig = interface_sigmas(model, th)
    if min(sig) <= 0.0:
        raise SigmaNonpositive(f"interface tensions {sig} at t={state.time}")

    v = junction_velocity(net, sig, p.mu)
    new_junction = net.junction + p.dt * v

    dth = rotation_rhs(state, model, p.nu) if p.nu != 0.0 else np.zeros(3)
    new_theta = tuple(t + p.dt * d for t, d in zip(th, dth))

    h = 1.0 / (p.n - 1)
    new_curves = []
    for c, s, anchor in zip(net.curves, sig, net.anchors):
        px2 = (param_derivative(c.points) ** 2).sum(axis=1)
        if math.sqrt(px2.min()) < p.delta_min:
            raise DegenerateParametrization(
                f"|p_x| below delta_min at t={state.time}"
            )
        coeff = s / px2
        if p.scheme == "semi_implicit":
            pts = _tridiag_dirichlet_step(
                c.points, coeff, p.dt, h, new_junction, anchor
            )
        else:
            pts = c.points.copy()
            lap = (c.points[2:] - 2.0 * c.points[1:-1] + c.points[:-2]) / (h * h)
            pts[1:-1] = c.points[1:-1] + p.dt * coeff[1:-1, None] * lap
            pts[0] = new_junction
            pts[-1] = anchor
        new_curves.append(Curve(pts, delta_min=p.delta_min))

    net2 = Network(tuple(new_curves), net.anchors, tau_junction=p.tau_junction)
    return SimState(net2, new_theta, state.time + p.dt)


# ---------------------------------------------------------------------------
# full runs
# ---------------------------------------------------------------------------

def energy(state: SimState, model: TensionModel) -> float:
    """Total surface energy sum_j sigma_{j-1,j} * Length(curve j)."""
    sig = interface_sigmas(model, state.orientations)
    return float(sum(s * length(c) for s, c in zip(sig, state.network.curves)))


def _snapshot(rec: SimRecord, state: SimState, p: FlowParams,
              model: TensionModel, detect: bool, halt_on_intersection: bool) -> bool:
    """Record one snapshot; returns True if the run should halt."""
    rec.snapshots.append(state)
    rec.energy.append((state.time, energy(state, model)))
    sig = interface_sigmas(model, state.orientations)
    v = junction_velocity(state.network, sig, p.mu)
    rec.junction_speed.append((state.time, float(np.linalg.norm(v))))
    if detect:
        events = diagnostics.detect_intersections(state.network)
        for ev in events:
            rec.add_event(
                "SelfIntersection" if ev.curves[0] == ev.curves[1] else "Intersection",
                state.time,
                curves=list(ev.curves),
                point=[float(ev.point[0]), float(ev.point[1])],
                params=[float(ev.params[0]), float(ev.params[1])],
                touch=ev.touch,
                halted=halt_on_intersection,
            )
        if events and halt_on_intersection:
            return True
    return False


def run(initial: SimState, p: FlowParams, model: TensionModel,
        detect_intersections: bool = True,
        halt_on_intersection: bool = False) -> SimRecord:
    """Iterate step() until t_end or a halting event, recording traces."""
    rec = SimRecord()
    state = initial
    if p.scheme == "explicit":
        bound = explicit_dt_bound(state, p, model)
        if p.dt > bound:
            raise ConfigError(
                f"explicit dt={p.dt} exceeds stability bound {bound:.3e}"
            )
    if _snapshot(rec, state, p, model, detect_intersections, halt_on_intersection):
        return rec
    nsteps = int(round(p.t_end / p.dt))
    for k in range(1, nsteps + 1):
        try:
            state = step(state, p, model)
        except DegenerateParametrization as exc:
            rec.add_event("Degeneracy", state.time, detail=str(exc))
            break
        except SigmaNonpositive as exc:
            rec.add_event("SigmaNonpositive", state.time, detail=str(exc))
            break
        except KinkPoint as exc:
            rec.add_event("KinkHalt", state.time, detail=str(exc))
            break
        if k % p.snapshot_every == 0 or k == nsteps:
            if _snapshot(rec, state, p, model, detect_intersections,
                         halt_on_intersection):
                break
    return rec


def run_closed_circle(r0: float, p: FlowParams) -> list[tuple[float, float]]:
    """Shrinking-circle oracle: special flow with sigma = 1 on a closed curve.

    The curve is sampled at n points x_i = i/n with periodic wraparound
    stencils.  Returns (t, fitted radius) pairs, the radius being the mean
    distance to the centroid.  Exact law for comparison: R(t) = sqrt(R0^2 - 2t).
    """
    if not (r0 * r0 > 2.0 * p.t_end):
        raise ConfigError("need R0^2 > 2 t_end (circle vanishes earlier)")
    n = p.n
    h = 1.0 / n
    x = np.arange(n) * h
    pts = r0 * np.stack([np.cos(2 * np.pi * x), np.sin(2 * np.pi * x)], axis=1)

    def radius(q: np.ndarray) -> float:
        ctr = q.mean(axis=0)
        return float(np.linalg.norm(q - ctr, axis=1).mean())

    if p.scheme == "explicit":
        px2_min = float(
            (((np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)) * (0.5 / h)) ** 2)
            .sum(axis=1)
            .min()
        )
        if p.dt > EXPLICIT_SAFETY * h * h * px2_min:
            raise ConfigError("explicit dt exceeds stability bound for the circle")

    trace = [(0.0, radius(pts))]
    nsteps = int(round(p.t_end / p.dt))
    floor = 10.0 * h * r0
    for k in range(1, nsteps + 1):
        up = np.roll(pts, -1, axis=0)
        dn = np.roll(pts, 1, axis=0)
        px = (up - dn) * (0.5 / h)
        nrm2 = (px * px).sum(axis=1)
        if math.sqrt(nrm2.min()) < p.delta_min:
            raise DegenerateParametrization("closed curve lost regularity")
        if p.scheme == "explicit":
            lap = (up - 2.0 * pts + dn) / (h * h)
            pts = pts + p.dt * lap / nrm2[:, None]
        else:
            pts = _cyclic_heat_step(pts, 1.0 / nrm2, p.dt, h)
        r = radius(pts)
        if r < floor:
            raise DegenerateParametrization(
                f"fitted radius {r:.3e} fell below 10*dx*R0 = {floor:.3e}"
            )
        if k % p.snapshot_every == 0 or k == nsteps:
            trace.append((k * p.dt, r))
    return trace


def _cyclic_heat_step(u: np.ndarray, coeff: np.ndarray, dt: float,
                      h: float) -> np.ndarray:
    """Implicit heat step with periodic wraparound (Sherman-Morrison)."""
    n = u.shape[0]
    r = dt * coeff / (h * h)
    ab = np.zeros((3, n))
    ab[0, 1:] = -r[:-1]
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :-1] = -r[1:]
    # corner entries -r[0] (top-right) and -r[-1] (bottom-left) via rank-1 fix
    gamma = -(1.0 + 2.0 * r[0])
    ab[1, 0] -= gamma
    ab[1, -1] -= r[0] * r[-1] / gamma
    uvec = np.zeros(n)
    uvec[0] = gamma
    uvec[-1] = -r[-1]
    y = solve_banded((1, 1), ab, u)
    q = solve_banded((1, 1), ab, uvec)
    vy = y[0] - r[0] / gamma * y[-1]
    vq = q[0] - r[0] / gamma * q[-1]
    return y - np.outer(q, vy) / (1.0 + vq)
