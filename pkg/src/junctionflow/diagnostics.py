"""Event detection and scenario construction.

The intersection detector is a brute-force segment-pair test over the
polylines of all three curves.  Orientation signs near zero are re-evaluated
with exact rational arithmetic, so reported crossings do not depend on
floating-point luck; exact endpoint touches shared by construction (the
junction) are not events.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConstructionFailed, DegenerateParametrization
from .geometry import Curve, Network, speed

#: |det| below scale * this threshold falls through to exact arithmetic
ORIENT_GUARD = 1e-12


@dataclass(frozen=True)
class IntersectionEvent:
    """A detected contact between two polyline segments.

    curves is (i, j) with i == j for a self-intersection; params are the
    global parameter locations x in [0, 1] along each curve; touch marks a
    degenerate contact (collinear or endpoint graze) as opposed to a proper
    crossing.
    """

    curves: tuple[int, int]
    params: tuple[float, float]
    point: np.ndarray
    touch: bool = False
    time: float | None = None


def _orient_exact(a, b, c) -> int:
    ax, ay = Fraction(float(a[0])), Fraction(float(a[1]))
    bx, by = Fraction(float(b[0])), Fraction(float(b[1]))
    cx, cy = Fraction(float(c[0])), Fraction(float(c[1]))
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def _orient(a, b, c) -> int:
    """Sign of the 2x2 orientation determinant, exact near ties."""
    det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    scale = max(
        1.0,
        abs(b[0] - a[0]) * (abs(c[1]) + abs(a[1])),
        abs(b[1] - a[1]) * (abs(c[0]) + abs(a[0])),
    )
    if abs(det) <= ORIENT_GUARD * scale:
        return _orient_exact(a, b, c)
    return 1 if det > 0.0 else -1


def _on_segment_collinear(p, a, b) -> bool:
    """Whether collinear point p lies within segment [a, b] (exact compare)."""
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _crossing_point(a1, a2, b1, b2):
    """Intersection point and fractions for properly crossing segments."""
    d1 = a2 - a1
    d2 = b2 - b1
    den = d1[0] * d2[1] - d1[1] * d2[0]
    rhs = b1 - a1
    t = (rhs[0] * d2[1] - rhs[1] * d2[0]) / den
    s = (rhs[0] * d1[1] - rhs[1] * d1[0]) / den
    return a1 + t * d1, t, s


def _segment_pair_event(a1, a2, b1, b2):
    """Classify one segment pair: None, ('cross', ...) or ('touch', ...)."""
    o1 = _orient(a1, a2, b1)
    o2 = _orient(a1, a2, b2)
    o3 = _orient(b1, b2, a1)
    o4 = _orient(b1, b2, a2)
    if o1 * o2 < 0 and o3 * o4 < 0:
        pt, t, s = _crossing_point(a1, a2, b1, b2)
        return "cross", pt, t, s
    # degenerate contacts: an endpoint of one segment on the other
    for p, (ta, sb) in (
        (b1, (None, 0.0)),
        (b2, (None, 1.0)),
        (a1, (0.0, None)),
        (a2, (1.0, None)),
    ):
        if p is b1 or p is b2:
            on = o1 == 0 if p is b1 else o2 == 0
            seg = (a1, a2)
        else:
            on = o3 == 0 if p is a1 else o4 == 0
            seg = (b1, b2)
        if on and _on_segment_collinear(p, *seg):
            # fraction of p along the host segment
            d = seg[1] - seg[0]
            f = float(
                ((p - seg[0]) @ d) / (d @ d)
            )
            t = f if ta is None else ta
            s = f if sb is None else sb
            return "touch", np.asarray(p, dtype=float), t, s
    return None


def detect_intersections(net: Network) -> list[IntersectionEvent]:
    """All segment-pair contacts of the network's three polylines.

    Adjacent segments of one curve and the shared junction point are not
    contacts; everything else (including a curve meeting itself) is.
    """
    curves = net.curves
    segs = []  # (curve index, segment index, p0, p1)
    for ci, c in enumerate(curves):
        pts = c.points
        for i in range(c.n - 1):
            segs.append((ci, i, pts[i], pts[i + 1]))
    m = len(segs)
    lo = np.empty((m, 2))
    hi = np.empty((m, 2))
    for k, (_, _, p0, p1) in enumerate(segs):
        lo[k] = np.minimum(p0, p1)
        hi[k] = np.maximum(p0, p1)

    # vectorized bounding-box prefilter over the upper triangle, in row
    # blocks so memory stays bounded for fine grids
    cand_a: list[int] = []
    cand_b: list[int] = []
    block = 2048
    for start in range(0, m, block):
        stop = min(start + block, m)
        ov = (
            (lo[start:stop, None, 0] <= hi[None, :, 0])
            & (lo[None, :, 0] <= hi[start:stop, None, 0])
            & (lo[start:stop, None, 1] <= hi[None, :, 1])
            & (lo[None, :, 1] <= hi[start:stop, None, 1])
        )
        ra, rb = np.where(ov)
        keep = start + ra < rb
        cand_a.extend((start + ra[keep]).tolist())
        cand_b.extend(rb[keep].tolist())
    cand = zip(cand_a, cand_b)

    events: list[IntersectionEvent] = []
    junction = curves[0].points[0]
    for ka, kb in cand:
        ca, ia, a1, a2 = segs[ka]
        cb, ib, b1, b2 = segs[kb]
        if ca == cb and abs(ia - ib) <= 1:
            continue
        res = _segment_pair_event(a1, a2, b1, b2)
        if res is None:
            continue
        kind, pt, t, s = res
        if kind == "touch" and pt[0] == junction[0] and pt[1] == junction[1]:
            continue  # the three curves legitimately meet there
        ha = 1.0 / (curves[ca].n - 1)
        hb = 1.0 / (curves[cb].n - 1)
        events.append(
            IntersectionEvent(
                curves=(ca, cb),
                params=((ia + t) * ha, (ib + s) * hb),
                point=np.asarray(pt, dtype=float),
                touch=(kind == "touch"),
            )
        )
    return events


def junction_angles(net: Network) -> tuple[float, float, float]:
    """Angles between consecutive outgoing junction tangents; they sum to 2*pi."""
    from .geometry import tangent_at_junction

    angles = sorted(
        math.atan2(t[1], t[0])
        for t in (tangent_at_junction(c) for c in net.curves)
    )
    gaps = (
        angles[1] - angles[0],
        angles[2] - angles[1],
        2.0 * math.pi - (angles[2] - angles[0]),
    )
    return gaps


# ---------------------------------------------------------------------------
# the large-drag self-intersection scenario
# ---------------------------------------------------------------------------

# coordinate sums of the three junction unit tangents (1,1)/sqrt2, (1,2)/sqrt5,
# (1,3)/sqrt10; these make the quadratic arcs satisfy the drag compatibility
K1 = 1.0 / math.sqrt(2.0) + 1.0 / math.sqrt(5.0) + 1.0 / math.sqrt(10.0)
K2 = 1.0 / math.sqrt(2.0) + 2.0 / math.sqrt(5.0) + 3.0 / math.sqrt(10.0)

DOMAIN_RADIUS = 3.0
ANCHOR_ANGLES = (math.radians(20.0), math.radians(55.0), math.radians(-45.0))

# return-strand arc: unit radius, swept counterclockwise so its curvature
# drives it across the junction gap at psi = 225 degrees
ARC_RADIUS = 1.0
ARC_PSI_IN = math.radians(170.0)
ARC_PSI_OUT = math.radians(270.0)
ARC_SLOW_LO = math.radians(222.5)
ARC_SLOW_HI = math.radians(227.5)

# free-form waypoint carrying curve 3 over the top of the bundle,
# placed relative to the end of its quadratic piece
LOOP_OFFSET = np.array([-0.45, 0.06])
LOOP_HEADING = math.radians(180.0)
LOOP_CURVATURE = 0.9
LOOP_WAYPOINT_SPEED = 10.0

ARC_BASE_SPEED = 16.0
END_SPEED_3 = 14.0
END_SPEEDS_12 = (8.0, 6.0)  # continuation end speeds for curves 1 and 2

#: parametrization floor the construction refuses to cross
SPEED_FLOOR = 0.75

#: parameter share of the straight constant-speed run into each anchor
#: (affine there, so endpoint difference stencils are exact)
STRAIGHT_TAIL = 0.06


def hermite_quintic(xa, xb, p0, v0, a0, p1, v1, a1):
    """C^2 Hermite segment on [xa, xb]; returns eval(x) -> (p, px, pxx)."""
    L = xb - xa
    p0, v0, a0 = map(np.asarray, (p0, v0, a0))
    p1, v1, a1 = map(np.asarray, (p1, v1, a1))
    V0, A0 = v0 * L, a0 * L * L
    V1, A1 = v1 * L, a1 * L * L

    def ev(x):
        s = (x - xa) / L
        s2, s3 = s * s, s ** 3
        s4, s5 = s3 * s, s3 * s * s
        h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5
        h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5
        h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5
        h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5
        h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5
        h5 = 0.5 * s3 - s4 + 0.5 * s5
        p = h0 * p0 + h1 * V0 + h2 * A0 + h3 * p1 + h4 * V1 + h5 * A1
        d0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4
        d1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4
        d2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4
        d3 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4
        d4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4
        d5 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4
        px = (d0 * p0 + d1 * V0 + d2 * A0 + d3 * p1 + d4 * V1 + d5 * A1) / L
        e0 = -60.0 * s + 180.0 * s2 - 120.0 * s3
        e1 = -36.0 * s + 96.0 * s2 - 60.0 * s3
        e2 = 1.0 - 9.0 * s + 18.0 * s2 - 10.0 * s3
        e3 = 60.0 * s - 180.0 * s2 + 120.0 * s3
        e4 = -24.0 * s + 84.0 * s2 - 60.0 * s3
        e5 = 3.0 * s - 12.0 * s2 + 10.0 * s3
        pxx = (e0 * p0 + e1 * V0 + e2 * A0 + e3 * p1 + e4 * V1 + e5 * A1) / (L * L)
        return p, px, pxx

    return ev


def anchor_approach(xa, anchor, speed_val, direction):
    """Straight constant-speed run ending exactly on the anchor at x = 1.

    Affine in the parameter, so one-sided difference stencils at the anchor
    read a vanishing second derivative exactly.  Returns (start point,
    velocity, eval)."""
    direction = _unit(direction)
    vel = speed_val * direction
    anchor = np.asarray(anchor, dtype=float)

    def ev(x):
        return anchor - (1.0 - x) * vel, vel, np.zeros(2)

    return ev(xa)[0], vel, ev


def _quintic_scalar(xa, xb, f0, d0, f1, d1):
    """1D quintic with given endpoint values/slopes and zero second
    derivatives at both ends; returns eval(x) -> (f, f', f'')."""
    ev = hermite_quintic(xa, xb, np.array([f0]), np.array([d0]), np.zeros(1),
                         np.array([f1]), np.array([d1]), np.zeros(1))

    def scalar(x):
        p, d, dd = ev(x)
        return float(p[0]), float(d[0]), float(dd[0])

    return scalar


class _PiecewiseCurve:
    """A C^2 chain of analytic pieces over subintervals of [0, 1]."""

    def __init__(self):
        self.pieces = []  # (xa, xb, eval)

    def add(self, xa, xb, ev):
        self.pieces.append((xa, xb, ev))

    def eval(self, x):
        for xa, xb, ev in self.pieces:
            if x <= xb:
                return ev(x)
        return self.pieces[-1][2](x)

    def sample(self, n):
        xs = np.arange(n) / (n - 1)
        return np.array([self.eval(x)[0] for x in xs])


def _unit(v):
    return np.asarray(v) / np.linalg.norm(v)


def _heading(angle):
    return np.array([math.cos(angle), math.sin(angle)])


def build_intersection_scenario(mu: float, n: int, delta_min: float = 0.5,
                                validate_embedding: bool = True):
    """Initial state whose third curve self-intersects quickly under the flow.

    Quadratic arcs near the junction (at (1/mu^2, 1/mu^2), tangents of slope
    1, 2, 3) satisfy the drag compatibility exactly; curve 3 then loops over
    the bundle and returns through the gap between the origin and the
    junction as a unit-radius arc whose curvature pushes it onto the
    junction, while curves 1 and 2 exit to their anchors.  All shape
    constants are independent of mu, so the family has uniform C^2 bounds
    and a uniform parametrization floor.
    """
    if mu < 10.0:
        raise ConstructionFailed("scenario requires mu >= 10")
    if n < 33:
        raise ConstructionFailed("scenario needs n >= 33 to resolve the loop")
    from .flow import SimState  # local import to avoid a module cycle

    eps = 1.0 / (mu * mu)
    junction = np.array([eps, eps])
    anchors = np.array(
        [DOMAIN_RADIUS * _heading(a) for a in ANCHOR_ANGLES]
    )

    tangents = [np.array([1.0, float(j)]) for j in (1, 2, 3)]
    a_coef = [(1 + j * j) * K1 / (2.0 * mu) for j in (1, 2, 3)]
    b_coef = [(1 + j * j) * K2 / (2.0 * mu) for j in (1, 2, 3)]

    def quad_eval(j):
        aj, bj = a_coef[j], b_coef[j]
        slope = float(j + 1)

        def ev(x):
            p = np.array([eps + x + aj * x * x, eps + slope * x + bj * x * x])
            px = np.array([1.0 + 2.0 * aj * x, slope + 2.0 * bj * x])
            pxx = np.array([2.0 * aj, 2.0 * bj])
            return p, px, pxx

        return ev

    h = 1.0 / (n - 1)
    x_tail = 1.0 - max(STRAIGHT_TAIL, 3.5 * h)
    curves = []

    # curves 1 and 2: quadratic, a quintic with flat end, a straight run
    for j in (0, 1):
        pc = _PiecewiseCurve()
        qe = quad_eval(j)
        pc.add(0.0, 0.5, qe)
        p0, v0, acc0 = qe(0.5)
        end_dir = _heading(ANCHOR_ANGLES[j])
        tail_start, tail_vel, tail_ev = anchor_approach(
            x_tail, anchors[j], END_SPEEDS_12[j], end_dir
        )
        pc.add(0.5, x_tail, hermite_quintic(0.5, x_tail, p0, v0, acc0,
                                            tail_start, tail_vel, np.zeros(2)))
        pc.add(x_tail, 1.0, tail_ev)
        curves.append(pc)

    # curve 3: quadratic, loop to the arc entry, gap arc (sampled slowly
    # around the gap so the polyline clears the junction), exit piece
    pc = _PiecewiseCurve()
    qe = quad_eval(2)
    pc.add(0.0, 0.5, qe)
    p0, v0, acc0 = qe(0.5)

    gap_point = 0.5 * junction
    center = gap_point + ARC_RADIUS * _unit(np.array([1.0, 1.0]))

    def arc_state(psi, psi_rate, psi_acc=0.0):
        e = np.array([math.cos(psi), math.sin(psi)])
        epsi = np.array([-math.sin(psi), math.cos(psi)])
        p = center + ARC_RADIUS * e
        px = ARC_RADIUS * psi_rate * epsi
        pxx = ARC_RADIUS * (psi_acc * epsi - psi_rate * psi_rate * e)
        return p, px, pxx

    # chord sagitta v^2 h^2 / (8 rho) must stay under a quarter of the
    # junction-to-gap distance eps/sqrt(2)
    clearance = float(np.linalg.norm(junction - gap_point))
    v_slow = 0.9 * math.sqrt(2.0 * ARC_RADIUS * clearance) / h
    v_slow = min(v_slow, ARC_BASE_SPEED)
    if v_slow < SPEED_FLOOR:
        raise ConstructionFailed(
            f"gap clearance {clearance:.2e} needs arc speed {v_slow:.2f} "
            f"below the floor {SPEED_FLOOR} at n={n}; increase n"
        )

    waypoint = p0 + LOOP_OFFSET
    w_dir = _heading(LOOP_HEADING)
    w_normal = np.array([-w_dir[1], w_dir[0]])
    w_vel = LOOP_WAYPOINT_SPEED * w_dir
    w_acc = LOOP_WAYPOINT_SPEED ** 2 * LOOP_CURVATURE * w_normal

    entry = center + ARC_RADIUS * _heading(ARC_PSI_IN)
    exit_pt = center + ARC_RADIUS * _heading(ARC_PSI_OUT)
    end_dir = _heading(ANCHOR_ANGLES[2])
    tail_start, tail_vel, tail_ev = anchor_approach(
        x_tail, anchors[2], END_SPEED_3, end_dir
    )

    # parameter budget: chord-length estimates over mean speeds, window first
    spans = np.array([
        ARC_SLOW_LO - ARC_PSI_IN,
        ARC_SLOW_HI - ARC_SLOW_LO,
        ARC_PSI_OUT - ARC_SLOW_HI,
    ]) * ARC_RADIUS
    budgets = np.array([
        1.10 * np.linalg.norm(waypoint - p0)
        / (0.5 * (np.linalg.norm(v0) + LOOP_WAYPOINT_SPEED)),
        1.10 * np.linalg.norm(entry - waypoint)
        / (0.5 * (LOOP_WAYPOINT_SPEED + ARC_BASE_SPEED)),
        spans[0] / (0.5 * (ARC_BASE_SPEED + v_slow)),
        spans[1] / v_slow,
        spans[2] / (0.5 * (v_slow + ARC_BASE_SPEED)),
        1.05 * np.linalg.norm(tail_start - exit_pt)
        / (0.5 * (ARC_BASE_SPEED + END_SPEED_3)),
    ])
    budgets *= (x_tail - 0.5) / budgets.sum()
    xk = 0.5 + np.concatenate([[0.0], np.cumsum(budgets)])
    xk[-1] = x_tail
    x_w, x_in, x_s0, x_s1, x_out = xk[1], xk[2], xk[3], xk[4], xk[5]

    slow_rate = (ARC_SLOW_HI - ARC_SLOW_LO) / (x_s1 - x_s0)
    base_rate_in = ARC_BASE_SPEED / ARC_RADIUS
    sag = (slow_rate * ARC_RADIUS * h) ** 2 / (8.0 * ARC_RADIUS)
    if sag > 0.5 * clearance:
        raise ConstructionFailed(
            f"polyline sagitta {sag:.2e} eats the gap clearance "
            f"{clearance:.2e} at n={n}; increase n"
        )

    pin, vin, ain = arc_state(ARC_PSI_IN, base_rate_in)
    pout, vout, aout = arc_state(ARC_PSI_OUT, base_rate_in)

    pc.add(0.5, x_w, hermite_quintic(0.5, x_w, p0, v0, acc0,
                                     waypoint, w_vel, w_acc))
    pc.add(x_w, x_in, hermite_quintic(x_w, x_in, waypoint, w_vel, w_acc,
                                      pin, vin, ain))

    ramp_in = _quintic_scalar(x_in, x_s0, ARC_PSI_IN, base_rate_in,
                              ARC_SLOW_LO, slow_rate)
    ramp_out = _quintic_scalar(x_s1, x_out, ARC_SLOW_HI, slow_rate,
                               ARC_PSI_OUT, base_rate_in)

    def arc_ev(x):
        if x <= x_s0:
            psi, rate, acc = ramp_in(x)
        elif x <= x_s1:
            psi = ARC_SLOW_LO + slow_rate * (x - x_s0)
            rate, acc = slow_rate, 0.0
        else:
            psi, rate, acc = ramp_out(x)
        return arc_state(psi, rate, acc)

    # monotonicity of the angular ramps (quintic overshoot guard)
    for lo, hi, ramp in ((x_in, x_s0, ramp_in), (x_s1, x_out, ramp_out)):
        rates = [ramp(x)[1] for x in np.linspace(lo, hi, 200)]
        if min(rates) * ARC_RADIUS < SPEED_FLOOR:
            raise ConstructionFailed(
                f"arc speed ramp dips to {min(rates):.2f}; adjust speeds"
            )

    pc.add(x_in, x_out, arc_ev)
    pc.add(x_out, x_tail, hermite_quintic(x_out, x_tail, pout, vout, aout,
                                          tail_start, tail_vel, np.zeros(2)))
    pc.add(x_tail, 1.0, tail_ev)
    curves.append(pc)

    sampled = []
    for k, pc in enumerate(curves):
        pts = pc.sample(n)
        pts[0] = junction  # bit-identical shared junction
        pts[-1] = anchors[k]
        try:
            sampled.append(Curve(pts, delta_min=delta_min))
        except DegenerateParametrization as exc:
            raise ConstructionFailed(
                f"curve {k} violates the parametrization floor: {exc}"
            ) from exc

    net = Network(tuple(sampled), anchors)

    if validate_embedding:
        events = detect_intersections(net)
        if events:
            raise ConstructionFailed(
                f"initial network self-intersects during construction: "
                f"{events[0]}"
            )
    if np.linalg.norm(gap_point) >= np.linalg.norm(junction):
        raise ConstructionFailed("gap point is not between origin and junction")
    return SimState(net, (0.0, 0.0, 0.0), 0.0)


def minimal_scenario_n(mu: float) -> int:
    """Coarsest sample count whose polyline resolves the junction gap."""
    clearance = 1.0 / (mu * mu * math.sqrt(2.0))
    need = 1.05 * SPEED_FLOOR / (0.9 * math.sqrt(2.0 * ARC_RADIUS * clearance))
    return next(m for m in (257, 1025, 2049, 8193, 32769) if m - 1 >= need)


def scenario_bounds(mu: float, n: int | None = None,
                    alpha: float = 0.5) -> dict:
    """Uniformity report for the scenario family: C^2 norms and |p_x| floor.

    With n omitted, the coarsest grid that resolves the gap for this mu is
    chosen (the norms estimate a continuum quantity, so n only needs to be
    fine enough for the construction to exist).
    """
    from .geometry import discrete_c2_norm

    if n is None:
        n = minimal_scenario_n(mu)
    state = build_intersection_scenario(mu, n, validate_embedding=False)
    norms = [discrete_c2_norm(c, alpha) for c in state.network.curves]
    floors = [float(speed(c.points).min()) for c in state.network.curves]
    return {
        "mu": mu,
        "n": n,
        "c2_norms": norms,
        "max_c2_norm": max(norms),
        "min_speed": min(floors),
    }
