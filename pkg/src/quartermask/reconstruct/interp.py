"""Nearest-neighbour and piecewise-linear reconstruction on scattered samples."""

from __future__ import annotations

import numpy as np
from scipy.interpolate import LinearNDInterpolator
from scipy.spatial import cKDTree

from ..sampling import SampledImage

__all__ = ["ReconstructionError", "reconstruct_linear", "reconstruct_nearest"]


class ReconstructionError(ValueError):
    """Not enough (or degenerate) samples to reconstruct from."""


def _nearest_index(points, queries):
    """Index of the nearest point for every query.

    Equidistant candidates are resolved by smaller row, then smaller column.
    Coordinates are integers, so squared distances compare exactly.
    """
    tree = cKDTree(points)
    n = len(points)
    k = min(n, 9)
    out = np.empty(len(queries), dtype=np.intp)
    todo = np.arange(len(queries))
    while len(todo):
        _, idx = tree.query(queries[todo], k=k)
        idx = idx.reshape(len(todo), k)
        diff = points[idx] - queries[todo, None, :]
        d2 = (diff**2).sum(axis=2)
        best = d2.min(axis=1, keepdims=True)
        tied = d2 == best
        # a tie may continue past the k-th neighbour: retry those with larger k
        unsure = tied[:, -1] & (k < n)
        # points are in row-major order, so the smallest index is the
        # lexicographically smallest (row, col)
        cand = np.where(tied, idx, n)
        out[todo[~unsure]] = cand[~unsure].min(axis=1)
        todo = todo[unsure]
        k = min(n, 2 * k)
    return out


def reconstruct_nearest(sampled: SampledImage) -> np.ndarray:
    """Fill every pixel with the value of the nearest known pixel."""
    pts = sampled.positions
    if not len(pts):
        raise ReconstructionError("no known pixels")
    h, w = sampled.shape
    out = sampled.values.copy()
    unknown = np.argwhere(~sampled.known)
    if len(unknown):
        src = _nearest_index(pts, unknown)
        out[unknown[:, 0], unknown[:, 1]] = sampled.known_values[src]
    return out


def reconstruct_linear(sampled: SampledImage) -> np.ndarray:
    """Barycentric interpolation over a Delaunay triangulation of the samples.

    Pixels outside the convex hull of the known pixel centres fall back to
    nearest-neighbour values. Known pixels are returned unchanged.
    """
    pts = sampled.positions
    if len(pts) < 3:
        raise ReconstructionError("linear interpolation needs at least 3 known pixels")
    centred = pts - pts.mean(axis=0)
    if np.linalg.matrix_rank(centred.astype(float)) < 2:
        raise ReconstructionError("known pixels are collinear")
    out = sampled.values.copy()
    unknown = np.argwhere(~sampled.known)
    if not len(unknown):
        return out
    vals = sampled.known_values
    interp = LinearNDInterpolator(pts.astype(np.float64), vals)
    est = interp(unknown.astype(np.float64))
    outside = np.isnan(est)
    if outside.any():
        est[outside] = vals[_nearest_index(pts, unknown[outside])]
    out[unknown[:, 0], unknown[:, 1]] = est
    return out
