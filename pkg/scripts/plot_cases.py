"""Simulate both bundled cases and plot tracks and target-slot distance.

Usage: python scripts/plot_cases.py [--out-dir figures]
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from loiterlane import load_scenario, run_scenario  # noqa: E402


def plot_case(name, out):
    tr = run_scenario(load_scenario(name))
    fig, (ax, bx) = plt.subplots(1, 2, figsize=(12, 5))
    for m in np.flatnonzero(tr.active):
        label = "incoming" if m == 0 else f"slot {m}"
        ax.plot(tr.states["x"][:, m], tr.states["y"][:, m], lw=1.2 if m == 0 else 0.8,
                label=label)
    ax.plot(*tr.path.insertion_point, "k*", ms=10, label="insertion point")
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.legend(fontsize=7, loc="lower right")
    ax.set_title(f"{name}: tracks")

    bx.plot(tr.d_sep_times, tr.d_sep)
    grouped = {}
    for t, kind in tr.events:
        grouped.setdefault(round(t, 6), []).append(kind)
    for t, kinds in grouped.items():
        bx.axvline(t, color="grey", lw=0.5)
        bx.text(t, bx.get_ylim()[1] * 0.95, " / ".join(kinds), rotation=90, fontsize=7,
                va="top")
    bx.set_xlabel("t (s)")
    bx.set_ylabel("distance to target slot (m)")
    bx.set_title(f"hops {list(tr.plan.hop_slots)}, pairwise min {tr.pairwise_min:.1f} m")
    fig.tight_layout()
    fig.savefig(out / f"{name}.png", dpi=120)
    plt.close(fig)
    print(f"{name}: {out / (name + '.png')}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="figures")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in ("case1", "case2"):
        plot_case(name, out)


if __name__ == "__main__":
    main()
