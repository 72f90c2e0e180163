#!/usr/bin/env python3
"""Plot edge-cut ratio and load imbalance per interval from sdp metrics CSV files.

Accepts single-run files (metrics.csv) and merged comparison files (compare.csv, with a
leading algo column). Several files may be given; each becomes its own series.

    python3 tools/plot_metrics.py out/compare.csv -o trend.png
"""

import argparse
import csv
import sys
from collections import defaultdict
from pathlib import Path


def load(path):
    series = defaultdict(list)
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            label = row.get("algo") or Path(path).parent.name or Path(path).stem
            series[label].append(row)
    return series


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv", nargs="+", help="metrics.csv or compare.csv files")
    ap.add_argument("-o", "--output", help="image file to write (shows a window otherwise)")
    ap.add_argument("--log-imbalance", action="store_true", help="log scale for the imbalance axis")
    args = ap.parse_args(argv)

    import matplotlib

    if args.output:
        matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.ticker import MaxNLocator

    fig, (ax_cut, ax_imb) = plt.subplots(1, 2, figsize=(11, 4))
    for path in args.csv:
        for label, rows in load(path).items():
            x = [int(r["interval"]) for r in rows]
            ax_cut.plot(x, [float(r["edge_cut_ratio"]) for r in rows], marker="o", label=label)
            ax_imb.plot(x, [float(r["load_imbalance"]) for r in rows], marker="o", label=label)

    ax_cut.set_title("edge-cut ratio")
    ax_cut.set_xlabel("interval")
    ax_cut.set_ylim(bottom=0)
    ax_imb.set_title("load imbalance (std dev of loads)")
    ax_imb.set_xlabel("interval")
    if args.log_imbalance:
        ax_imb.set_yscale("symlog")
    for ax in (ax_cut, ax_imb):
        ax.xaxis.set_major_locator(MaxNLocator(integer=True))
        ax.grid(alpha=0.3)
        ax.legend()
    fig.tight_layout()

    if args.output:
        fig.savefig(args.output, dpi=120)
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    sys.exit(main())
