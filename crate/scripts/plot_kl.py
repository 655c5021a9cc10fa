#!/usr/bin/env python3
"""Overlay theory KL curves (`hdkde kl-curve`) with empirical readings
(`hdkde simulate --mode empirical-kl`)."""
import csv
import sys

import matplotlib.pyplot as plt


def load(path):
    with open(path) as fh:
        return [r for r in csv.DictReader(l for l in fh if not l.startswith("#"))]


def main():
    if len(sys.argv) not in (2, 3):
        sys.exit("usage: plot_kl.py kl_theory.csv [kl_empirical.csv]")
    theory = load(sys.argv[1])
    plt.figure(figsize=(5.5, 4))
    gammas = sorted(
        {c.split("dkl_g")[1] for c in theory[0] if c.startswith("dkl_g")}, key=float
    )
    for g in gammas:
        hs = [float(r["h"]) for r in theory]
        dkl = [float(r[f"dkl_g{g}"]) for r in theory]
        plt.plot(hs, dkl, label=rf"theory $\gamma={g}$")
    if len(sys.argv) == 3:
        empirical = load(sys.argv[2])
        for g in sorted({r["gamma"] for r in empirical}, key=float):
            pts = [r for r in empirical if r["gamma"] == g]
            plt.errorbar(
                [float(r["h"]) for r in pts],
                [float(r["dkl_per_d"]) for r in pts],
                yerr=[float(r["std_error"]) for r in pts],
                fmt="o",
                ms=3,
                label=rf"empirical $\gamma={g}$",
            )
    plt.xlabel(r"$h$")
    plt.ylabel(r"$D_{KL}/d$ (nats per dimension)")
    plt.legend(fontsize=8)
    plt.tight_layout()
    out = sys.argv[1].rsplit(".", 1)[0] + ".png"
    plt.savefig(out, dpi=160)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
