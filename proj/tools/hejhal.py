#!/usr/bin/env python3
"""Hecke-normalized coefficients of a level-one Maass cusp form (Hejhal's method).

Writes the MAASS v1 text format read by geolab. The K-Bessel function is taken
from mpmath and scaled by exp(pi R / 2).
"""

import argparse
import math
import sys

import mpmath as mp
import numpy as np


def kscaled(R, x):
    return float((mp.besselk(1j * R, x) * mp.exp(mp.pi * R / 2)).real)


def pullback(x, y):
    while True:
        x -= math.floor(x + 0.5)
        r2 = x * x + y * y
        if r2 >= 1.0:
            return x, y
        x, y = -x / r2, y / r2


def solve(R, even, M0, Q, Y):
    cs = math.cos if even else math.sin
    xs = [(m - 0.5) / (2 * Q) for m in range(1, Q + 1)]
    pts = [pullback(x, Y) for x in xs]
    V = np.zeros((M0, M0))
    for l in range(1, M0 + 1):
        col = np.array([math.sqrt(ys) * kscaled(R, 2 * math.pi * l * ys) * cs(2 * math.pi * l * xs_) for xs_, ys in pts])
        for n in range(1, M0 + 1):
            V[n - 1, l - 1] = 2.0 / Q * sum(col[m] * cs(2 * math.pi * n * xs[m]) for m in range(Q))
    for n in range(1, M0 + 1):
        V[n - 1, n - 1] -= math.sqrt(Y) * kscaled(R, 2 * math.pi * n * Y)
    A = V[1:, 1:]
    b = -V[1:, 0]
    return np.concatenate([[1.0], np.linalg.solve(A, b)])


def size_for(R, Y):
    x = R + 45.0
    M0 = int(math.ceil(x / (2 * math.pi * Y)))
    return M0, M0 + 15


def mismatch(R, even, Y1, Y2):
    a = solve(R, even, *size_for(R, Y1), Y1)
    b = solve(R, even, *size_for(R, Y2), Y2)
    return a[1] - b[1]


def refine(R, even, Y1, Y2, iters):
    r0, r1 = R, R + 1e-7
    f0, f1 = mismatch(r0, even, Y1, Y2), mismatch(r1, even, Y1, Y2)
    for _ in range(iters):
        if f1 == f0:
            break
        r0, r1, f0 = r1, r1 - f1 * (r1 - r0) / (f1 - f0), f1
        f1 = mismatch(r1, even, Y1, Y2)
        print(f"R={float(r1):.17g} mismatch={f1:.3e}", file=sys.stderr)
        if abs(f1) < 1e-13:
            break
    return r1


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--R", required=True)
    ap.add_argument("--parity", choices=["even", "odd"], required=True)
    ap.add_argument("--M", type=int, default=100)
    ap.add_argument("--Y", type=float, default=0.05)
    ap.add_argument("--refine", type=int, default=0)
    ap.add_argument("--dps", type=int, default=20)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    mp.mp.dps = args.dps
    even = args.parity == "even"
    R = float(mp.mpf(args.R))
    Rtext = args.R
    if args.refine:
        R = refine(R, even, 0.15, 0.13, args.refine)
        Rtext = f"{float(R):.17g}"
    Y1, Y2 = args.Y, args.Y * 0.9
    a = solve(R, even, *size_for(R, Y1), Y1)
    b = solve(R, even, *size_for(R, Y2), Y2)
    M = args.M
    err = float(np.max(np.abs(a[:M] - b[:M])))
    prec = max(10 * err, 1e-14)
    with open(args.out, "w", newline="\n") as f:
        f.write("MAASS v1\n")
        f.write(f"R={Rtext} parity={args.parity} M={M} prec={prec:.3e}\n")
        for n in range(1, M + 1):
            f.write(f"{n} {a[n - 1]:.17g}\n")
    print(f"wrote {M} coefficients, two-height difference {err:.3e}", file=sys.stderr)


if __name__ == "__main__":
    main()
