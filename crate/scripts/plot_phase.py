#!/usr/bin/env python3
"""Plot the squared transition lines from a `hdkde phase` table."""
import csv
import sys

import matplotlib.pyplot as plt


def load(path):
    with open(path) as fh:
        rows = [r for r in csv.DictReader(l for l in fh if not l.startswith("#"))]
    return rows


def main():
    if len(sys.argv) != 2:
        sys.exit("usage: plot_phase.py phase.csv")
    rows = load(sys.argv[1])
    alpha = [float(r["alpha"]) for r in rows]
    plt.figure(figsize=(5, 4))
    plt.plot(alpha, [float(r["h_clt_sq"]) for r in rows], label=r"$h_{CLT}^2$")
    plt.plot(alpha, [float(r["h_g_sq"]) for r in rows], label=r"$h_G^2$")
    plt.plot(alpha, [float(r["h_opt_sq"]) for r in rows], "--", label=r"$h_{opt}^2$")
    plt.xlabel(r"$\alpha = \ln(n)/d$")
    plt.ylabel(r"$h^2$")
    plt.legend()
    plt.tight_layout()
    out = sys.argv[1].rsplit(".", 1)[0] + ".png"
    plt.savefig(out, dpi=160)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
