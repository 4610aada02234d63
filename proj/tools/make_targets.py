#!/usr/bin/env python3
"""Regenerates the planar target images in data/targets (75 x 75, P5)."""
import pathlib

import numpy as np

N = 75
OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "targets"


def save(a, name):
    a = (255 * a / a.max()).round().astype(np.uint8)
    img = a.T[::-1]  # cell (i, j) -> pixel (col i, row N-1-j)
    with open(OUT / name, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (img.shape[1], img.shape[0]))
        f.write(img.tobytes())


x, y = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
cx = cy = 37
r = np.hypot(x - cx, y - cy)

# Thin rings and spokes around the arm base: detail at the scale of a few cells.
fine = np.zeros((N, N))
for R in range(6, 36, 6):
    fine = np.maximum(fine, np.exp(-0.5 * ((r - R) / 0.8) ** 2))
for k in range(8):
    a = k * np.pi / 4 + 0.2
    d = np.abs(-(x - cx) * np.sin(a) + (y - cy) * np.cos(a))
    along = (x - cx) * np.cos(a) + (y - cy) * np.sin(a)
    fine = np.maximum(fine, np.exp(-0.5 * (d / 0.8) ** 2) * ((along > 4) & (along < 35)))
fine[fine < 0.05] = 0

# Two broad blobs.
blobs = np.exp(-0.5 * (((x - 22) / 9) ** 2 + ((y - 50) / 9) ** 2)) + 0.8 * np.exp(
    -0.5 * (((x - 52) / 10) ** 2 + ((y - 24) / 10) ** 2))

OUT.mkdir(parents=True, exist_ok=True)
save(fine, "rings_spokes.pgm")
save(blobs, "blobs.pgm")
