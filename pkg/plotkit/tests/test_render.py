import json
import math
import os

import numpy as np
import pytest

from plotkit import PlotJob, SchemaMismatch, render
from plotkit.render import stationary_energy_reference


def fmt(x):
    return format(float(x), ".17g")


def make_run_dir(tmp_path, scenario_kind="stationary",
                 tension=None, with_snapshots=True):
    """Synthesize a run directory per the documented file formats."""
    tension = tension or {"kind": "quadratic", "c": 1.0}
    d = tmp_path / "run"
    d.mkdir()
    manifest = {
        "version": "0.1.0",
        "config": {"scenario": {"kind": scenario_kind}, "tension": tension},
        "model": tension,
        "status": "ok",
        "events": [],
    }
    (d / "manifest.json").write_text(json.dumps(manifest))

    ts = np.linspace(0.0, 1.0, 11)
    m = 2 * math.pi / 3
    estar = 3 * (m * m + tension.get("c", 0.0)) if tension["kind"] == "quadratic" else 3.0
    with open(d / "traces.csv", "w") as f:
        f.write("t,E,junction_speed,theta1,theta2,theta3\n")
        for t in ts:
            f.write(",".join(fmt(v) for v in
                             (t, estar, 0.0, 0.0, m, 2 * m)) + "\n")

    if with_snapshots:
        snapdir = d / "snapshots"
        snapdir.mkdir()
        anchors = np.array([[math.sqrt(3) / 2, -0.5], [0.0, 1.0],
                            [-math.sqrt(3) / 2, -0.5]])
        x = np.linspace(0, 1, 9)
        for k in range(3):
            with open(snapdir / f"snap_{k:06d}.csv", "w") as f:
                f.write("curve,idx,x,y\n")
                for ci in range(3):
                    for i, xx in enumerate(x):
                        p = xx * anchors[ci]
                        f.write(f"{ci},{i},{fmt(p[0])},{fmt(p[1])}\n")

    with open(d / "eigenvalues.csv", "w") as f:
        f.write("c,lambda1,lambda2,lambda3,lambda4\n")
        for c in (0.1, 1.0, 4.0, 5.0, 10.0):
            s1 = math.sqrt(81 * c * c + 72 * c * (math.pi**2 - 3)
                           + 16 * (math.pi**4 + 18 * math.pi**2 + 9))
            s2 = math.sqrt(81 * c * c + 72 * c * (math.pi**2 - 9)
                           + 16 * (math.pi**4 + 54 * math.pi**2 + 81))
            lams = ((9 * c + 12 + 4 * math.pi**2 - s1) / 12,
                    (9 * c + 12 + 4 * math.pi**2 + s1) / 12,
                    (9 * c + 36 + 4 * math.pi**2 - s2) / 12,
                    (9 * c + 36 + 4 * math.pi**2 + s2) / 12)
            f.write(",".join(fmt(v) for v in (c, *lams)) + "\n")

    with open(d / "sweep.csv", "w") as f:
        f.write("T,iterations,max_factor,converged\n")
        f.write("0.05,11,0.25,1\n0.025,10,0.14,1\n")
    for T, label in ((0.05, "0p05"), (0.025, "0p025")):
        with open(d / f"iters_T{label}.csv", "w") as f:
            f.write("iter,distance,factor\n")
            d0 = 1.0
            for i in range(1, 8):
                f.write(f"{i},{fmt(d0)},{fmt(0.25)}\n")
                d0 *= 0.25
    return str(d)


class TestJobValidation:
    def test_refuses_directory_without_manifest(self, tmp_path):
        (tmp_path / "empty").mkdir()
        with pytest.raises(SchemaMismatch):
            PlotJob(str(tmp_path / "empty"), ("energy",), str(tmp_path / "o"))

    def test_rejects_unknown_kind(self, tmp_path):
        indir = make_run_dir(tmp_path)
        with pytest.raises(SchemaMismatch):
            PlotJob(indir, ("hologram",), str(tmp_path / "o"))


class TestRender:
    def test_all_four_kinds(self, tmp_path):
        indir = make_run_dir(tmp_path)
        out = str(tmp_path / "img")
        paths = render(PlotJob(
            indir, ("snapshots", "energy", "eigs", "contraction"), out))
        assert len(paths) == 4
        for p in paths:
            assert os.path.isfile(p) and os.path.getsize(p) > 0

    def test_missing_snapshots_reported(self, tmp_path):
        indir = make_run_dir(tmp_path, with_snapshots=False)
        with pytest.raises(SchemaMismatch):
            render(PlotJob(indir, ("snapshots",), str(tmp_path / "o")))

    def test_bad_columns_reported_with_names(self, tmp_path):
        indir = make_run_dir(tmp_path)
        with open(os.path.join(indir, "traces.csv"), "w") as f:
            f.write("time,energy\n0,1\n")
        with pytest.raises(SchemaMismatch) as err:
            render(PlotJob(indir, ("energy",), str(tmp_path / "o")))
        assert "time" in str(err.value)

    def test_read_only_on_input(self, tmp_path):
        indir = make_run_dir(tmp_path)
        before = {
            p: os.path.getmtime(os.path.join(indir, p))
            for p in os.listdir(indir)
        }
        render(PlotJob(indir, ("energy", "eigs"), str(tmp_path / "o")))
        after = {
            p: os.path.getmtime(os.path.join(indir, p))
            for p in os.listdir(indir)
        }
        assert before == after

    def test_deterministic_bytes(self, tmp_path):
        indir = make_run_dir(tmp_path)
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        p1 = render(PlotJob(indir, ("energy",), out1))[0]
        p2 = render(PlotJob(indir, ("energy",), out2))[0]
        assert open(p1, "rb").read() == open(p2, "rb").read()


class TestEnergyReference:
    def test_quadratic_value(self, tmp_path):
        indir = make_run_dir(tmp_path, tension={"kind": "quadratic", "c": 2.5})
        with open(os.path.join(indir, "manifest.json")) as f:
            ref = stationary_energy_reference(json.load(f))
        m = 2 * math.pi / 3
        assert ref == pytest.approx(3 * (m * m + 2.5), rel=1e-15)

    def test_only_for_stationary_runs(self, tmp_path):
        indir = make_run_dir(tmp_path, scenario_kind="perturbed_stationary")
        with open(os.path.join(indir, "manifest.json")) as f:
            assert stationary_energy_reference(json.load(f)) is None
