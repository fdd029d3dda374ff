#!/usr/bin/env python3
"""Defect-seeded relaxation front on a strongly coupled ring.

One atom starts in the ground state; at large beta the de-excitation spreads
outward site by site like a domain-wall front.  Writes the site-resolved
trajectory and prints the half-relaxation time per site.
"""

import argparse
import pathlib

import numpy as np

from isingrelax import meanfield as mf
from isingrelax.cli import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results", type=pathlib.Path)
    ap.add_argument("--n", default=20, type=int)
    ap.add_argument("--beta", default=0.99, type=float)
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    res = mf.soliton_ring(n_atoms=args.n, beta=args.beta, defect_site=0)
    header = ["tau", "gamma"] + [f"sz_{i}" for i in range(args.n)]
    rows = [(res.times[k], res.gamma[k], *res.sigma_z[k])
            for k in range(res.times.size)]
    out = args.outdir / f"soliton_n{args.n}_beta{args.beta}.csv"
    write_csv(str(out), header, rows)
    print(f"wrote {out}")
    for site, t in enumerate(res.transition_times):
        label = "defect (starts relaxed)" if np.isnan(t) else f"{t:.4f}"
        print(f"site {site:2d}: crossing time {label}")


if __name__ == "__main__":
    main()
