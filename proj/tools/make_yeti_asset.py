#!/usr/bin/env python3
"""Writes a footprint-shaped 84-patch test geometry (assets/yeti_like_84.mp).

21 coarse Bezier patches (5x3 sole, five toes, one long heel channel) are
each split 2x2 by de Casteljau subdivision. The four heel patches carry a
knot at v=1/2, so they start with two elements along their long side. All
patches are oriented with u pointing right and v pointing up.
"""
import argparse
import math

import numpy as np


def subdivide_1d(pts, t=0.5):
    """de Casteljau split of a Bezier control polygon (n+1, d)."""
    left, right = [pts[0]], [pts[-1]]
    cur = pts
    while len(cur) > 1:
        cur = [(1 - t) * a + t * b for a, b in zip(cur[:-1], cur[1:])]
        left.append(cur[0])
        right.append(cur[-1])
    return np.array(left), np.array(right[::-1])


def split_patch(cp):
    """cp: array (nv, nu, 2) -> four patches in (j, i) order."""
    nv, nu, _ = cp.shape
    lo_u, hi_u = np.empty_like(cp), np.empty_like(cp)
    for j in range(nv):
        lo_u[j], hi_u[j] = subdivide_1d(cp[j])
    out = []
    halves = [(lo_u, 0), (hi_u, 1)]
    parts = {}
    for half, i in halves:
        lo_v, hi_v = np.empty_like(half), np.empty_like(half)
        for c in range(nu):
            lo_v[:, c], hi_v[:, c] = subdivide_1d(half[:, c])
        parts[(0, i)] = lo_v
        parts[(1, i)] = hi_v
    for j in range(2):
        for i in range(2):
            out.append(parts[(j, i)])
    return out


def bilinear(p00, p10, p01, p11):
    return np.array([[p00, p10], [p01, p11]], dtype=float)


def sole():
    scale = [0.7, 0.85, 1.0, 1.0]
    ys = [0.0, 1.0, 2.0, 3.0]
    grid = [[(2.5 + (i - 2.5) * scale[j], ys[j]) for i in range(6)] for j in range(4)]
    patches = []
    for j in range(3):
        for i in range(5):
            patches.append(bilinear(grid[j][i], grid[j][i + 1], grid[j + 1][i], grid[j + 1][i + 1]))
    return patches, grid


def toe(a, b, angle_deg, length=2.5, bulge=0.35):
    """Degree-2 toe on the straight base segment a-b, tilted by angle."""
    a, b = np.array(a, float), np.array(b, float)
    th = math.radians(angle_deg)
    d = np.array([math.sin(th), math.cos(th)])
    n = np.array([d[1], -d[0]])  # to the right of the toe axis
    w = np.linalg.norm(b - a)
    mid = 0.5 * (a + b)
    tip_c = mid + length * d
    tl, tr = tip_c - 0.5 * w * n, tip_c + 0.5 * w * n
    rows = [
        [a, mid, b],
        [0.5 * (a + tl), 0.5 * (mid + tip_c), 0.5 * (b + tr)],
        [tl, tip_c + bulge * w * d, tr],
    ]
    return np.array(rows, dtype=float)


def heel(a, b, length=2.0, bulge=0.4):
    a, b = np.array(a, float), np.array(b, float)
    mid = 0.5 * (a + b)
    down = np.array([0.0, -length])
    rows = [
        [a + down, mid + down + np.array([0.0, -bulge]), b + down],
        [a + 0.5 * down, mid + 0.5 * down, b + 0.5 * down],
        [a, mid, b],
    ]
    return np.array(rows, dtype=float)


def insert_midpoint_knot_v(cp):
    """Exact knot insertion at v=1/2 of a Bezier patch; returns rows for the
    knot vector (0^{p+1}, 1/2, 1^{p+1})."""
    nv, nu, _ = cp.shape
    rows = np.empty((nv + 1, nu, 2))
    for c in range(nu):
        lo, hi = subdivide_1d(cp[:, c])
        # C^{p-1} join: drop the shared point and keep the outer polygons
        rows[: nv - 1, c] = lo[: nv - 1]
        rows[nv - 1 :, c] = hi[1:]
    return rows


def fmt(x):
    return repr(float(x))


def write(patches, path):
    with open(path, "w") as f:
        f.write("MULTIPATCH v1\n")
        f.write("# footprint-like test domain: 5x3 sole, 5 toes, heel channel, each split 2x2;\n")
        f.write("# heel patches have two elements along v\n")
        for k, (cp, split_v) in enumerate(patches):
            nv, nu, _ = cp.shape
            pu = nu - 1
            pv = nv - 2 if split_v else nv - 1
            f.write(f"PATCH {k} DEG {pu} {pv} DIM {nu} {nv}\n")
            f.write("KNOTS_U " + " ".join(["0"] * nu + ["1"] * nu) + "\n")
            kv = ["0"] * (pv + 1) + (["0.5"] if split_v else []) + ["1"] * (pv + 1)
            f.write("KNOTS_V " + " ".join(kv) + "\n")
            for j in range(nv):
                for i in range(nu):
                    f.write(f"CP {fmt(cp[j, i, 0])} {fmt(cp[j, i, 1])}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="assets/yeti_like_84.mp")
    args = ap.parse_args()
    coarse, grid = sole()
    for i, ang in enumerate([-32.0, -16.0, 0.0, 16.0, 32.0]):
        coarse.append(toe(grid[3][i], grid[3][i + 1], ang))
    coarse.append(heel(grid[0][2], grid[0][3]))
    fine = [(q, False) for cp in coarse[:-1] for q in split_patch(cp)]
    # the heel channel patches are long and thin: two elements along v
    fine += [(insert_midpoint_knot_v(q), True) for q in split_patch(coarse[-1])]
    assert len(fine) == 84
    write(fine, args.out)


if __name__ == "__main__":
    main()
