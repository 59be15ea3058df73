#!/usr/bin/env python3
# Copyright 2026 the d2dsim authors
# SPDX-License-Identifier: Apache-2.0
"""Render the CSV outputs of one or more runs.

Usage:
    plot_results.py cdf OUT_DIR [OUT_DIR ...] [--png FILE]
    plot_results.py scatter SCATTER_CSV [--png FILE]

`cdf` overlays the per-class SINR CDFs of the given run directories;
`scatter` draws the power/throughput plane of a sweep.
"""

import argparse
import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def cmd_cdf(dirs, png):
    fig, ax = plt.subplots(figsize=(7, 5))
    for d in dirs:
        d = pathlib.Path(d)
        for cls, style in (("d2d", "-"), ("cellular", "--")):
            rows = read_csv(d / f"sinr_cdf_{cls}.csv")
            if not rows:
                continue
            xs = [float(r["sinr_db"]) for r in rows]
            ys = [float(r["cdf"]) for r in rows]
            ax.plot(xs, ys, style, label=f"{d.name} ({cls})")
    ax.set_xlabel("SINR [dB]")
    ax.set_ylabel("CDF")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(png, dpi=150)
    print(f"wrote {png}")


def cmd_scatter(path, png):
    rows = read_csv(path)
    fig, ax = plt.subplots(figsize=(7, 5))
    for r in rows:
        label = r["scheme"] + (f"({r['omega']})" if r["omega"] else "")
        x, y = float(r["total_power_w"]), float(r["mean_throughput_mbps"])
        ax.scatter([x], [y], s=40)
        ax.annotate(label, (x, y), textcoords="offset points", xytext=(5, 5))
    ax.set_xlabel("total UE power [W]")
    ax.set_ylabel("mean throughput [Mbit/s]")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(png, dpi=150)
    print(f"wrote {png}")


def main(argv):
    ap = argparse.ArgumentParser(description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)
    p_cdf = sub.add_parser("cdf")
    p_cdf.add_argument("dirs", nargs="+")
    p_cdf.add_argument("--png", default="sinr_cdf.png")
    p_sc = sub.add_parser("scatter")
    p_sc.add_argument("csv")
    p_sc.add_argument("--png", default="scatter.png")
    args = ap.parse_args(argv)
    if args.cmd == "cdf":
        cmd_cdf(args.dirs, args.png)
    else:
        cmd_scatter(args.csv, args.png)


if __name__ == "__main__":
    main(sys.argv[1:])
