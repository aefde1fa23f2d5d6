"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; tolerances are stated inline next to each assertion.
"""

import math
import time

import numpy as np
import pytest

from junctionflow import diagnostics, fixedpoint, flow, scenarios, stationary, tension
from junctionflow.compat import check_parametric, reparametrize_to_compatible
from junctionflow.errors import ConstructionFailed
from junctionflow.flow import FlowParams, run, run_closed_circle
from junctionflow.geometry import hausdorff_distance
from junctionflow.tension import interface_sigmas

from exact_oracle import events_as_keys, exact_intersections

PI = math.pi


def report(name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def test_stationary_exactness():
    model = tension.quadratic(1.0)
    st = scenarios.stationary_scenario(65)
    sig = interface_sigmas(model, st.orientations)
    v0 = flow.junction_velocity(st.network, sig, 1.0)
    params = FlowParams(mu=1.0, nu=1.0, n=65, dt=1e-4, t_end=1.0,
                        snapshot_every=1000)
    t0 = time.perf_counter()
    rec = run(st, params, model, detect_intersections=False)
    elapsed = time.perf_counter() - t0
    fin = rec.snapshots[-1]
    drift = max(hausdorff_distance(a, b)
                for a, b in zip(fin.network.curves, st.network.curves))
    tdrift = max(abs(a - b)
                 for a, b in zip(fin.orientations, st.orientations))
    ok = (np.abs(v0).max() <= 1e-12 and drift <= 1e-6 and tdrift <= 1e-8
          and elapsed < 10.0)
    report("stationary-exactness", ok,
           f"|v0|={np.abs(v0).max():.2e} drift={drift:.2e} "
           f"theta_drift={tdrift:.2e} runtime={elapsed:.1f}s")


def test_circle_law():
    params = FlowParams(mu=1.0, n=401, dt=1e-5, t_end=1.0, scheme="explicit",
                        snapshot_every=100000)
    t0 = time.perf_counter()
    trace = run_closed_circle(5.0, params)
    elapsed = time.perf_counter() - t0
    tf, rf = trace[-1]
    err = abs(rf - math.sqrt(25.0 - 2.0 * tf))
    ok = err <= 1e-3 and elapsed < 60.0
    report("circle-law", ok,
           f"radius={rf:.6f} vs sqrt(23)={math.sqrt(23):.6f} "
           f"err={err:.2e} runtime={elapsed:.1f}s")


def _twenty_scenario_records():
    model = tension.constant(1.0)
    records = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        st = scenarios.perturbed_stationary_scenario(65, rng, eps=0.1)
        params = FlowParams(mu=1.0, nu=0.0, n=65, dt=1e-4, t_end=0.05,
                            snapshot_every=50)
        records.append(run(st, params, model, detect_intersections=False))
    return records


@pytest.fixture(scope="module")
def twenty_records():
    return _twenty_scenario_records()


def test_drag_speed_bound(twenty_records):
    mu = 1.0
    worst = max(v for rec in twenty_records for _, v in rec.junction_speed)
    ok = worst <= 3.0 / mu + 1e-9
    report("drag-speed-bound", ok, f"max speed {worst:.4f} <= 3/mu = {3.0/mu}")


def test_energy_dissipation(twenty_records):
    worst = -np.inf
    for rec in twenty_records:
        E = [e for _, e in rec.energy]
        for a, b in zip(E, E[1:]):
            worst = max(worst, b - a - 1e-8 * (1 + abs(a)))
    ok = worst <= 0.0
    report("energy-dissipation", ok,
           f"worst interval rise above tolerance: {worst:.2e}")


def test_hessian_eigenvalue_agreement():
    worst = 0.0
    for c in (0.1, 1.0, 10.0, 100.0):
        _, _, H = stationary.F_value_grad_hessian(
            0.0, 0.0, 2 * PI / 3, 4 * PI / 3, tension.quadratic(c)
        )
        num = np.linalg.eigvalsh(H)
        form = np.sort(stationary.eigenvalues_formula(c))
        worst = max(worst, float(np.abs(num - form).max()
                                 / np.abs(form).max()))
    grads = []
    for m in (tension.quadratic(1.0),
              tension.read_shockley(1.0, 1.0 + math.log(PI), 1e-3)):
        _, g, _ = stationary.F_value_grad_hessian(
            0.0, 0.0, 2 * PI / 3, 4 * PI / 3, m
        )
        grads.append(np.abs(g).max())
    ok = worst <= 1e-10 and max(grads) <= 1e-12
    report("hessian-eigenvalues", ok,
           f"eig rel err {worst:.2e}; |grad_F| quad/RS "
           f"{grads[0]:.2e}/{grads[1]:.2e}")


def test_quadratic_stability_threshold():
    cbar = stationary.quadratic_stability_threshold()
    at_thr = abs(stationary.eigenvalues_formula(cbar).min())
    above = stationary.eigenvalues_formula(cbar * 1.01).min()
    ok = at_thr <= 1e-8 and above > 0.0
    report("quadratic-threshold", ok,
           f"c_bar = {cbar:.10f}, |min lambda| = {at_thr:.2e}, "
           f"min lambda at 1.01 c_bar = {above:.2e}")


def test_read_shockley_reduced_instability():
    m = tension.read_shockley(1.0, 1.0 + math.log(PI), 1e-3)
    out = stationary.reduced_ode_jacobian(m, 1.0, 1.0)
    top = float(out["quotient_eigenvalues"].real.max())
    ok = top > 1e-8
    report("read-shockley-instability", ok,
           f"max Re(quotient eigenvalue) = {top:.4f}")


def test_self_intersection_demo():
    model = tension.constant(1.0)
    n = 257
    found = None
    tried = []
    for mu in (100.0, 1000.0, 10000.0):
        try:
            st = diagnostics.build_intersection_scenario(mu, n)
        except ConstructionFailed as exc:
            tried.append(f"mu={mu:g}: construction refused ({exc})")
            continue
        params = FlowParams(mu=mu, nu=0.0, n=n, dt=1e-6, t_end=4e-4,
                            snapshot_every=10)
        rec = run(st, params, model, halt_on_intersection=True)
        hits = [ev for ev in rec.events
                if ev["kind"] in ("SelfIntersection", "Intersection")]
        if hits and hits[0]["time"] < 10.0 / mu:
            found = (mu, hits[0]["time"], rec)
            break
        tried.append(f"mu={mu:g}: no event before 10/mu")
    ok = found is not None
    detail = (f"mu={found[0]:g} event at t={found[1]:.2e} < 10/mu"
              if ok else "; ".join(tried))

    if ok:
        frame = found[2].snapshots[-1].network
        got = events_as_keys(diagnostics.detect_intersections(frame), n)
        want = exact_intersections(frame)
        agree = set(got) == set(want)
        ok = ok and agree
        detail += f"; detector/oracle agree on {len(want)} contacts: {agree}"
    report("self-intersection", ok, detail)


def test_fixed_point_consistency():
    model = tension.quadratic(1.0)
    mu, nu, n, dt = 4.0, 0.5, 65, 2e-4
    st = scenarios.compatible_scenario(model, (0.1, 1.9, 4.0), mu, n)

    prob = fixedpoint.LinearizedProblem.from_state(st, model, mu, nu, 0.05, dt)
    rep = fixedpoint.iterate_to_fixed_point(prob, max_iter=80, tol=1e-8)

    params = FlowParams(mu=mu, nu=nu, n=n, dt=dt, t_end=0.05,
                        snapshot_every=250)
    rec = run(st, params, model, detect_intersections=False)
    fin = rec.snapshots[-1]
    diff = 0.0
    for c in range(3):
        pts = fin.network.curves[c].points
        diff = max(diff,
                   float(np.abs(rep.u[2 * c, -1] - pts[:, 0]).max()),
                   float(np.abs(rep.u[2 * c + 1, -1] - pts[:, 1]).max()))
    bound = 5.0 * ((1.0 / (n - 1)) ** 2 + dt)

    prob_half = fixedpoint.LinearizedProblem.from_state(st, model, mu, nu,
                                                        0.025, dt)
    rep_half = fixedpoint.iterate_to_fixed_point(prob_half, max_iter=80,
                                                 tol=1e-8)
    ok = (rep.converged and max(rep.factors) < 1.0 and diff <= bound
          and max(rep_half.factors) <= max(rep.factors) + 1e-12)
    report("fixed-point", ok,
           f"converged={rep.converged} max_factor={max(rep.factors):.3f} "
           f"(T/2: {max(rep_half.factors):.3f}) diff={diff:.2e} "
           f"bound={bound:.2e}")


def test_herring_limit():
    model = tension.constant(1.0)

    def deviation(mu, dt):
        st = scenarios.bowed_symmetric_scenario(65)
        params = FlowParams(mu=mu, nu=0.0, n=65, dt=dt, t_end=0.02,
                            snapshot_every=10**9)
        rec = run(st, params, model, detect_intersections=False)
        ang = diagnostics.junction_angles(rec.snapshots[-1].network)
        return math.degrees(max(abs(a - 2 * PI / 3) for a in ang))

    dev_coarse = deviation(1e-2, 5e-5)
    dev_fine = deviation(1e-3, 5e-6)
    ok = dev_fine <= 2.0 and dev_coarse <= 2.0 and dev_fine < dev_coarse
    report("herring-limit", ok,
           f"deviation mu=1e-2: {dev_coarse:.3f} deg, "
           f"mu=1e-3: {dev_fine:.3f} deg")


def test_compatibility_equivalence():
    model = tension.quadratic(1.0)
    rng = np.random.default_rng(123)
    worst = 0.0
    passed = 0
    for _ in range(10):
        mu = float(rng.uniform(30000.0, 60000.0))
        theta = (rng.uniform(0, 0.3), rng.uniform(1.8, 2.2),
                 rng.uniform(4.1, 4.5))
        net, th = scenarios.arclength_compatible_network(
            model, theta, mu, 801, rng, base_length=0.8
        )
        net2 = reparametrize_to_compatible(net, th, model, mu, tol_geo=1e-7)
        rep = check_parametric(net2, th, model, mu, tol=1e-8)
        worst = max(worst, max(rep.junction_residuals),
                    max(rep.anchor_residuals))
        passed += rep.passed
    ok = passed == 10
    report("compat-equivalence", ok,
           f"{passed}/10 pass at 1e-8 (worst residual {worst:.2e})")
