"""Deterministic coarse-to-fine grid minimization on the unit box.

No derivatives, no randomness: a full grid pass over [0, 1]^dim picks
an incumbent, then a fixed number of rounds re-grid a shrinking box
around it (clipped to the unit box).  Ties resolve to the
lexicographically smallest point, so repeated runs are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class BoxSearchConfig:
    dim: int
    coarse_points: int = 101
    refine_rounds: int = 4
    refine_factor: float = 0.1

    def __post_init__(self) -> None:
        if not 1 <= self.dim <= 3:
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.coarse_points < 3:
            raise ValueError("coarse_points must be at least 3")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be >= 0")
        if not 0.0 < self.refine_factor < 1.0:
            raise ValueError("refine_factor must lie in (0, 1)")


def _grid_points(lows: np.ndarray, highs: np.ndarray, n: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, n) for lo, hi in zip(lows, highs)]
    mesh = np.meshgrid(*axes, indexing="ij")
    # C-order ravel enumerates points in lexicographic order, so the
    # first argmin is the lexicographically smallest minimizer.
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _evaluate(
    f: Callable, pts: np.ndarray, vectorized: bool, chunk: int
) -> tuple[np.ndarray, float]:
    """Return (best point, best value) over pts, first-min tie-break."""
    best_val = np.inf
    best_idx = -1
    for start in range(0, len(pts), chunk):
        block = pts[start : start + chunk]
        if vectorized:
            vals = np.asarray(f(block), dtype=float)
            if vals.shape != (len(block),):
                raise ValueError(
                    f"vectorized objective returned shape {vals.shape}, "
                    f"expected ({len(block)},)"
                )
        else:
            vals = np.array([float(f(p)) for p in block])
        bad = np.isnan(vals)
        if bad.any():
            where = block[int(np.flatnonzero(bad)[0])]
            raise ValueError(f"objective returned NaN at point {tuple(where)}")
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_idx = start + i
    if best_idx < 0:  # objective was +inf everywhere; keep the tie-break
        best_idx = 0
    return pts[best_idx].copy(), best_val


def minimize_box(
    f: Callable,
    config: BoxSearchConfig,
    vectorized: bool = False,
    chunk: int = 200_000,
) -> tuple[np.ndarray, float]:
    """Minimize f over [0, 1]^dim.

    With ``vectorized=False`` the objective is called per point with a
    1-D array of length dim; with ``vectorized=True`` it is called with
    an (N, dim) array and must return N values.  +inf is a legitimate
    sentinel for infeasible points; NaN raises with the offending point.

    Returns (argmin as an ndarray of length dim, minimum value).  The
    incumbent value never increases across refinement rounds, so the
    result is never worse than the coarse-grid minimum.
    """
    lows = np.zeros(config.dim)
    highs = np.ones(config.dim)
    pts = _grid_points(lows, highs, config.coarse_points)
    best_pt, best_val = _evaluate(f, pts, vectorized, chunk)
    for r in range(1, config.refine_rounds + 1):
        w = config.refine_factor**r
        lows = np.clip(best_pt - w, 0.0, 1.0)
        highs = np.clip(best_pt + w, 0.0, 1.0)
        pts = _grid_points(lows, highs, config.coarse_points)
        pt, val = _evaluate(f, pts, vectorized, chunk)
        if val < best_val:
            best_pt, best_val = pt, val
    return best_pt, best_val
