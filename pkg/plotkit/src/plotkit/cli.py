"""plotkit --in <dir> --kinds snapshots,energy,eigs,contraction --out <dir>"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotJob, SchemaMismatch, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="plotkit",
                                 description=__doc__.strip())
    ap.add_argument("--in", dest="indir", required=True,
                    help="a junctionflow output directory")
    ap.add_argument("--kinds", default=",".join(KINDS),
                    help="comma-separated plot kinds")
    ap.add_argument("--out", dest="outdir", required=True)
    args = ap.parse_args(argv)
    kinds = tuple(k.strip() for k in args.kinds.split(",") if k.strip())
    try:
        job = PlotJob(args.indir, kinds, args.outdir)
        paths = render(job)
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
