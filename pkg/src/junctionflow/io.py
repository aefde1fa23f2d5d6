"""Serialization of curves, networks and run records.

Floating-point values go to text with 17 significant digits, which
round-trips IEEE doubles exactly; CSV files contain no wall-clock data, so
re-running a command with the same config and seed reproduces them byte for
byte.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .flow import SimRecord
from .geometry import Curve, Network


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def curve_to_dict(c: Curve) -> dict:
    return {"n": c.n, "points": [[p[0], p[1]] for p in c.points.tolist()]}


def curve_from_dict(d: dict, delta_min: float = 1e-6) -> Curve:
    pts = np.asarray(d["points"], dtype=float)
    if d.get("n") not in (None, pts.shape[0]):
        raise ValueError("curve field n disagrees with the point count")
    return Curve(pts, delta_min=delta_min)


def network_to_dict(net: Network) -> dict:
    return {
        "curves": [curve_to_dict(c) for c in net.curves],
        "anchors": [[a[0], a[1]] for a in net.anchors.tolist()],
    }


def network_from_dict(d: dict, delta_min: float = 1e-6) -> Network:
    curves = tuple(curve_from_dict(cd, delta_min) for cd in d["curves"])
    return Network(curves, np.asarray(d["anchors"], dtype=float))


def _iter_fmt(o):
    """JSON text with floats at 17 significant digits (exact round-trip)."""
    if isinstance(o, float):
        yield fmt(o)
    elif isinstance(o, bool) or o is None or isinstance(o, int):
        yield json.dumps(o)
    elif isinstance(o, str):
        yield json.dumps(o)
    elif isinstance(o, dict):
        yield "{"
        first = True
        for k, v in o.items():
            if not first:
                yield ", "
            first = False
            yield json.dumps(str(k))
            yield ": "
            yield from _iter_fmt(v)
        yield "}"
    elif isinstance(o, (list, tuple)):
        yield "["
        first = True
        for v in o:
            if not first:
                yield ", "
            first = False
            yield from _iter_fmt(v)
        yield "]"
    elif isinstance(o, np.ndarray):
        yield from _iter_fmt(o.tolist())
    elif isinstance(o, (np.floating,)):
        yield fmt(float(o))
    elif isinstance(o, (np.integer,)):
        yield str(int(o))
    else:
        raise TypeError(f"cannot serialize {type(o)}")


def dump_json(obj, path: str) -> None:
    with open(path, "w") as f:
        for chunk in _iter_fmt(obj):
            f.write(chunk)
        f.write("\n")


def record_to_dict(rec: SimRecord) -> dict:
    return {
        "snapshots": [
            {
                "time": st.time,
                "orientations": list(st.orientations),
                "network": network_to_dict(st.network),
            }
            for st in rec.snapshots
        ],
        "energy": [[t, e] for t, e in rec.energy],
        "junction_speed": [[t, v] for t, v in rec.junction_speed],
        "events": rec.events,
    }


def write_traces_csv(rec: SimRecord, path: str) -> None:
    with open(path, "w") as f:
        f.write("t,E,junction_speed,theta1,theta2,theta3\n")
        for (t, e), (_, v), st in zip(rec.energy, rec.junction_speed,
                                      rec.snapshots):
            th = st.orientations
            f.write(",".join(fmt(x) for x in (t, e, v, th[0], th[1], th[2])))
            f.write("\n")


def write_snapshot_csvs(rec: SimRecord, directory: str) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    paths = []
    for k, st in enumerate(rec.snapshots):
        path = os.path.join(directory, f"snap_{k:06d}.csv")
        with open(path, "w") as f:
            f.write("curve,idx,x,y\n")
            for ci, c in enumerate(st.network.curves):
                for i, p in enumerate(c.points):
                    f.write(f"{ci},{i},{fmt(p[0])},{fmt(p[1])}\n")
        paths.append(path)
    return paths
