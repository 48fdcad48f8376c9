"""Figures from the CSV artifacts written by `nlpoisson solve` and `nlpoisson sweep`.

    python -m nlpoisson.plots <kind> <in.csv> <out.png>

kind is one of heatmap, slice, convergence, region. Exit 1 on a bad CSV.
"""

import csv
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

HISTORY_HEADER = ["iter", "delta_norm2", "ratio"]
SWEEP_HEADER = ["R", "gamma", "delta", "eta", "verdict", "binding_constraint"]


class SchemaError(ValueError):
    pass


def read_csv(path, expected=None):
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if expected is not None and header != expected:
        raise SchemaError(f"{path}: header {header} != {expected}")
    return header, body


def solution_header(header):
    xs = [h for h in header if h.startswith("x")]
    us = [h for h in header if h.startswith("u")]
    n, N = len(xs), len(us)
    if n not in (2, 3) or N < 1 or header != [f"x{k + 1}" for k in range(n)] + [f"u{c + 1}" for c in range(N)]:
        raise SchemaError(f"not a solution header: {header}")
    return n, N


def heatmap(path, out):
    header, body = read_csv(path)
    n, _ = solution_header(header)
    pts = [[float(v) for v in row] for row in body]
    if n == 3:
        h = min(abs(p[2]) for p in pts)
        pts = [p for p in pts if abs(p[2]) <= h + 1e-15]
    fig, ax = plt.subplots(figsize=(5, 4))
    sc = ax.scatter([p[0] for p in pts], [p[1] for p in pts], c=[p[n] for p in pts], s=6, cmap="viridis")
    fig.colorbar(sc, ax=ax, label="u1")
    ax.set_aspect("equal")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    fig.savefig(out, dpi=120)
    plt.close(fig)


def slice_(path, out):
    header, body = read_csv(path)
    n, N = solution_header(header)
    pts = [[float(v) for v in row] for row in body]
    pts = sorted((p for p in pts if all(abs(p[k]) < 1e-12 for k in range(1, n))), key=lambda p: p[0])
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for c in range(N):
        ax.plot([p[0] for p in pts], [p[n + c] for p in pts], marker=".", label=f"u{c + 1}")
    ax.set_xlabel("x1")
    ax.legend()
    fig.savefig(out, dpi=120)
    plt.close(fig)


def convergence(path, out):
    _, body = read_csv(path, HISTORY_HEADER)
    it = [int(r[0]) for r in body]
    d = [max(float(r[1]), 1e-300) for r in body]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(it, d, marker="o")
    ax.set_xlabel("iteration")
    ax.set_ylabel("||u_{m+1} - u_m||")
    fig.savefig(out, dpi=120)
    plt.close(fig)


def region(path, out):
    _, body = read_csv(path, SWEEP_HEADER)
    fig, ax = plt.subplots(figsize=(5, 4))
    for verdict, colour in (("admissible", "tab:green"), ("not_admissible", "tab:red")):
        pts = [r for r in body if r[4] == verdict]
        ax.scatter([float(r[0]) for r in pts], [float(r[1]) for r in pts], c=colour, label=verdict, s=18)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("R")
    ax.set_ylabel("gamma")
    ax.legend()
    fig.savefig(out, dpi=120)
    plt.close(fig)


KINDS = {"heatmap": heatmap, "slice": slice_, "convergence": convergence, "region": region}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 3 or argv[0] not in KINDS:
        print("usage: plot {heatmap,slice,convergence,region} <in.csv> <out.png>", file=sys.stderr)
        return 1
    try:
        KINDS[argv[0]](argv[1], argv[2])
    except (OSError, SchemaError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
