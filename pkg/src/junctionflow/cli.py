"""Command-line surface: simulate, stationary, check-compat, contract-test,
intersect-demo.

One JSON config document drives each command; unknown fields are rejected so
a manifest echo fully determines a rerun.  Outputs are deterministic for a
given config and seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__, diagnostics, fixedpoint, io, scenarios, stationary, tension
from .compat import check_geometric, check_parametric
from .errors import ConfigError, JunctionFlowError
from .flow import FlowParams, SimState, run, run_closed_circle
from .tension import TensionModel

_FLOW_KEYS = {
    "mu", "nu", "n", "dt", "t_end", "delta_min", "tau_junction",
    "scheme", "snapshot_every",
}
_SCENARIO_KINDS = {"stationary", "perturbed_stationary", "intersection",
                   "circle", "custom"}
_SCENARIO_KEYS = {"kind", "epsilon", "mu", "r0", "path"}
_TOP_KEYS = {"scenario", "tension", "flow", "seed", "halt_on_intersection",
             "compat_tol", "contract", "sweep_c"}
_CONTRACT_KEYS = {"T_values", "alpha", "tol", "max_iter"}


def _reject_unknown(d: dict, allowed: set, where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown config fields in {where}: {sorted(unknown)}")


def load_config(path: str) -> dict:
    with open(path) as f:
        cfg = json.load(f)
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(cfg, _TOP_KEYS, "top level")
    sc = cfg.get("scenario", {"kind": "stationary"})
    _reject_unknown(sc, _SCENARIO_KEYS, "scenario")
    if sc.get("kind") not in _SCENARIO_KINDS:
        raise ConfigError(f"unknown scenario kind {sc.get('kind')!r}")
    fl = cfg.get("flow", {})
    _reject_unknown(fl, _FLOW_KEYS, "flow")
    _reject_unknown(cfg.get("contract", {}), _CONTRACT_KEYS, "contract")
    cfg["scenario"] = sc
    cfg["flow"] = fl
    return cfg


def flow_params(cfg: dict) -> FlowParams:
    fl = dict(cfg.get("flow", {}))
    if "mu" not in fl:
        raise ConfigError("flow.mu is required")
    return FlowParams(**fl)


def tension_model(cfg: dict) -> TensionModel:
    spec = cfg.get("tension", {"kind": "constant", "value": 1.0})
    try:
        return tension.from_config(spec)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad tension spec: {exc}") from exc


def build_initial_state(cfg: dict, params: FlowParams,
                        rng: np.random.Generator) -> SimState:
    sc = cfg["scenario"]
    kind = sc["kind"]
    if kind == "stationary":
        return scenarios.stationary_scenario(params.n, params.delta_min)
    if kind == "perturbed_stationary":
        eps = float(sc.get("epsilon", 0.1))
        return scenarios.perturbed_stationary_scenario(
            params.n, rng, eps, params.delta_min
        )
    if kind == "intersection":
        mu = float(sc.get("mu", params.mu))
        return diagnostics.build_intersection_scenario(mu, params.n)
    if kind == "custom":
        path = sc.get("path")
        if not path or not os.path.exists(path):
            raise ConfigError(f"custom scenario needs an existing path, got {path!r}")
        with open(path) as f:
            net = io.network_from_dict(json.load(f), params.delta_min)
        return SimState(net, (0.0, 0.0, 0.0), 0.0)
    raise ConfigError(f"scenario kind {kind!r} is not simulateable here")


def _write_manifest(outdir: str, cfg: dict, model: TensionModel,
                    status: str, events=None) -> None:
    io.dump_json(
        {
            "version": __version__,
            "config": cfg,
            "model": model.metadata(),
            "status": status,
            "events": events or [],
        },
        os.path.join(outdir, "manifest.json"),
    )


def cmd_simulate(cfg: dict, outdir: str, seed: int) -> int:
    params = flow_params(cfg)
    model = tension_model(cfg)
    rng = np.random.default_rng(seed)
    sc = cfg["scenario"]

    if sc["kind"] == "circle":
        r0 = float(sc.get("r0", 1.0))
        trace = run_closed_circle(r0, params)
        os.makedirs(outdir, exist_ok=True)
        with open(os.path.join(outdir, "radius.csv"), "w") as f:
            f.write("t,radius,law\n")
            for t, r in trace:
                f.write(f"{io.fmt(t)},{io.fmt(r)},"
                        f"{io.fmt(math.sqrt(r0 * r0 - 2.0 * t))}\n")
        _write_manifest(outdir, cfg, model, "ok")
        return 0

    state = build_initial_state(cfg, params, rng)
    rec = run(state, params, model,
              halt_on_intersection=bool(cfg.get("halt_on_intersection", False)))
    os.makedirs(outdir, exist_ok=True)
    io.dump_json(io.record_to_dict(rec), os.path.join(outdir, "record.json"))
    io.write_traces_csv(rec, os.path.join(outdir, "traces.csv"))
    io.write_snapshot_csvs(rec, os.path.join(outdir, "snapshots"))
    halting = rec.halting_event()
    _write_manifest(outdir, cfg, model, "halted" if halting else "ok",
                    rec.events)
    return 3 if halting else 0


def cmd_stationary(cfg: dict, outdir: str, seed: int) -> int:
    model = tension_model(cfg)
    report = stationary.classify_stability(model)
    os.makedirs(outdir, exist_ok=True)
    io.dump_json(report.as_dict(), os.path.join(outdir, "stationary.json"))
    cs = cfg.get("sweep_c", [0.1, 0.5, 1.0, 2.0, 4.0, 4.5, 5.0, 10.0, 100.0])
    with open(os.path.join(outdir, "eigenvalues.csv"), "w") as f:
        f.write("c,lambda1,lambda2,lambda3,lambda4\n")
        for c in cs:
            lam = stationary.eigenvalues_formula(float(c))
            f.write(",".join(io.fmt(v) for v in (c, *lam)) + "\n")
    _write_manifest(outdir, cfg, model, "ok")
    print(json.dumps(report.as_dict()))
    print(f"classification: {report.classification}")
    if report.c_threshold is not None:
        print(f"positivity threshold c = {report.c_threshold:.8f}")
    return 0


def cmd_check_compat(cfg: dict, outdir: str, seed: int) -> int:
    params = flow_params(cfg)
    model = tension_model(cfg)
    rng = np.random.default_rng(seed)
    state = build_initial_state(cfg, params, rng)
    tol = float(cfg.get("compat_tol", 1e-8))
    rep_p = check_parametric(state.network, state.orientations, model,
                             params.mu, tol)
    rep_g = check_geometric(state.network, state.orientations, model,
                            params.mu, tol)
    os.makedirs(outdir, exist_ok=True)
    io.dump_json({"parametric": rep_p.as_dict(), "geometric": rep_g.as_dict()},
                 os.path.join(outdir, "compat.json"))
    _write_manifest(outdir, cfg, model, "ok")
    print(f"{'condition':<12} {'curve':>5} {'junction':>12} {'anchor':>12}")
    for rep in (rep_p, rep_g):
        for k in range(3):
            print(f"{rep.kind:<12} {k:>5} {rep.junction_residuals[k]:>12.3e} "
                  f"{rep.anchor_residuals[k]:>12.3e}")
        print(f"{rep.kind:<12} -> {'PASS' if rep.passed else 'FAIL'} "
              f"(tol {rep.tol:.1e})")
    return 0


def cmd_contract_test(cfg: dict, outdir: str, seed: int) -> int:
    params = flow_params(cfg)
    model = tension_model(cfg)
    ct = cfg.get("contract", {})
    T_values = [float(t) for t in ct.get("T_values", [0.05])]
    alpha = float(ct.get("alpha", 0.5))
    tol = float(ct.get("tol", 1e-10))
    max_iter = int(ct.get("max_iter", 20))
    state = scenarios.compatible_scenario(model, (0.1, 1.9, 4.0), params.mu,
                                          params.n)
    os.makedirs(outdir, exist_ok=True)
    rows = []
    for T in T_values:
        prob = fixedpoint.LinearizedProblem.from_state(
            state, model, params.mu, params.nu, T, params.dt, alpha
        )
        rep = fixedpoint.iterate_to_fixed_point(prob, max_iter, tol)
        rows.append((T, rep))
        safe = format(T, "g").replace(".", "p").replace("-", "m")
        with open(os.path.join(outdir, f"iters_T{safe}.csv"), "w") as f:
            f.write("iter,distance,factor\n")
            for i, d in enumerate(rep.distances):
                fac = "" if i == 0 or not rep.factors else io.fmt(
                    rep.factors[i - 1] if i - 1 < len(rep.factors) else math.nan
                )
                f.write(f"{i + 1},{io.fmt(d)},{fac}\n")
        io.dump_json(rep.as_dict(), os.path.join(outdir, f"report_T{safe}.json"))
    with open(os.path.join(outdir, "sweep.csv"), "w") as f:
        f.write("T,iterations,max_factor,converged\n")
        for T, rep in rows:
            mf = io.fmt(rep.max_factor) if rep.factors else ""
            f.write(f"{io.fmt(T)},{rep.iterations},{mf},"
                    f"{int(rep.converged)}\n")
    _write_manifest(outdir, cfg, model, "ok")
    for T, rep in rows:
        print(f"T={T}: iterations={rep.iterations} "
              f"max_factor={rep.max_factor:.4f} converged={rep.converged}")
    return 0


def cmd_intersect_demo(cfg: dict, outdir: str, seed: int, mu: float) -> int:
    model = tension.constant(1.0)
    fl = cfg.get("flow", {})
    n = int(fl.get("n", diagnostics.minimal_scenario_n(mu)))
    # the return strand closes the junction gap ~1/(mu^2 sqrt 2) at unit speed
    gap = 1.0 / (mu * mu * math.sqrt(2.0))
    dt = float(fl.get("dt", gap / 50.0))
    horizon = 10.0 / mu
    params = FlowParams(
        mu=mu, nu=0.0, n=n, dt=dt, t_end=min(horizon, 1000 * dt),
        snapshot_every=int(fl.get("snapshot_every", 10)),
    )
    state = diagnostics.build_intersection_scenario(mu, n)
    rec = run(state, params, model, halt_on_intersection=True)
    os.makedirs(outdir, exist_ok=True)
    io.dump_json(io.record_to_dict(rec), os.path.join(outdir, "record.json"))
    _write_manifest(outdir, cfg, model,
                    "halted" if rec.halting_event() else "ok", rec.events)
    hits = [ev for ev in rec.events
            if ev["kind"] in ("SelfIntersection", "Intersection")]
    if hits:
        print(f"first intersection at t = {hits[0]['time']:.6e} "
              f"(curves {hits[0]['curves']}, horizon 10/mu = {horizon:.3e})")
        return 3
    print(f"none within horizon (t_end = {params.t_end:.3e})")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="junctionflow",
        description="curvature flow of a three-curve network with junction drag",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("simulate", "stationary", "check-compat", "contract-test",
                 "intersect-demo"):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None)
        p.add_argument("--out", required=True)
        p.add_argument("--seed", type=int, default=0)
        if name == "intersect-demo":
            p.add_argument("--mu", type=float, default=100.0)
    args = ap.parse_args(argv)

    try:
        cfg = load_config(args.config) if args.config else {
            "scenario": {"kind": "stationary"}, "flow": {"mu": 1.0},
        }
        if args.command == "simulate":
            return cmd_simulate(cfg, args.out, args.seed)
        if args.command == "stationary":
            return cmd_stationary(cfg, args.out, args.seed)
        if args.command == "check-compat":
            return cmd_check_compat(cfg, args.out, args.seed)
        if args.command == "contract-test":
            return cmd_contract_test(cfg, args.out, args.seed)
        if args.command == "intersect-demo":
            return cmd_intersect_demo(cfg, args.out, args.seed, args.mu)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except JunctionFlowError as exc:
        print(f"halted: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
