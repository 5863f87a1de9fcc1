"""Exact hypervolume (2- and 3-objective dimension sweep), an inclusion-
exclusion oracle for small frontiers, and box decompositions of the
non-dominated region used by the Monte-Carlo acquisition functions.

Everything here uses the maximize-all convention with a reference point r:
the hypervolume is the Lebesgue measure of the union of boxes [r, y_i].
"""

from __future__ import annotations

import warnings
from itertools import combinations

import numpy as np

from mixopt.exceptions import InputShapeError, ValidationError
from mixopt.moo.pareto import ParetoFrontier, pareto_filter

INCLUSION_EXCLUSION_CAP = 12


def _as_points(frontier) -> np.ndarray:
    if isinstance(frontier, ParetoFrontier):
        return frontier.points
    pts = np.asarray(frontier, dtype=float)
    if pts.size == 0:
        return np.zeros((0, 0))
    return np.atleast_2d(pts)


def _filter_above_ref(pts: np.ndarray, ref: np.ndarray, warn: bool = True) -> np.ndarray:
    if pts.shape[0] == 0:
        return pts
    keep = np.all(pts > ref, axis=1)
    if warn and not keep.all():
        warnings.warn(
            f"dropping {int((~keep).sum())} point(s) not above the reference point",
            stacklevel=3,
        )
    return pts[keep]


def _hv2d(pts: np.ndarray, ref: np.ndarray) -> float:
    """Sweep for maximization: sort by x descending, accumulate staircase."""
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    y_max = ref[1]
    area = 0.0
    for i in order:
        x, y = pts[i]
        if y > y_max:
            area += (x - ref[0]) * (y - y_max)
            y_max = y
    return area


def _hv3d(pts: np.ndarray, ref: np.ndarray) -> float:
    """Dimension sweep over z-slabs; each slab contributes its active-set 2-d
    hypervolume times the slab height."""
    levels = np.unique(pts[:, 2])[::-1]  # z values, descending
    hv = 0.0
    for k, z_top in enumerate(levels):
        z_bot = levels[k + 1] if k + 1 < len(levels) else ref[2]
        active = pts[pts[:, 2] >= z_top]
        hv += _hv2d(active[:, :2], ref[:2]) * (z_top - z_bot)
    return hv


def hypervolume(frontier, reference_point) -> float:
    """Exact dominated hypervolume for 2 or 3 objectives.

    Points not strictly above the reference point are dropped with a warning;
    dominated or duplicate points are harmless.
    """
    pts = _as_points(frontier)
    ref = np.asarray(reference_point, dtype=float).ravel()
    if pts.shape[0] == 0:
        return 0.0
    if pts.shape[1] != ref.size:
        raise InputShapeError(f"points have {pts.shape[1]} objectives, reference {ref.size}")
    if ref.size not in (2, 3):
        raise ValidationError("exact hypervolume implemented for 2 or 3 objectives")
    pts = _filter_above_ref(pts, ref)
    if pts.shape[0] == 0:
        return 0.0
    return _hv2d(pts, ref) if ref.size == 2 else _hv3d(pts, ref)


def hypervolume_inclusion_exclusion(frontier, reference_point) -> float:
    """Brute-force oracle: sum over all non-empty subsets S of
    (-1)^(|S|+1) * vol(box(r, min S)). Exponential; capped at 12 points."""
    pts = _as_points(frontier)
    ref = np.asarray(reference_point, dtype=float).ravel()
    pts = _filter_above_ref(pts, ref, warn=False)
    n = pts.shape[0]
    if n == 0:
        return 0.0
    if n > INCLUSION_EXCLUSION_CAP:
        raise ValidationError(f"inclusion-exclusion oracle capped at {INCLUSION_EXCLUSION_CAP} points")
    total = 0.0
    for size in range(1, n + 1):
        sign = 1.0 if size % 2 == 1 else -1.0
        for subset in combinations(range(n), size):
            m = pts[list(subset)].min(axis=0)
            total += sign * float(np.prod(np.clip(m - ref, 0.0, None)))
    return total


# ---------------------------------------------------------------------------
# box decomposition of the NON-dominated region (for EHVI integrands)
# ---------------------------------------------------------------------------


def _staircase_complement_2d(pts: np.ndarray, ref: np.ndarray):
    """Disjoint boxes covering {z >= ref} minus the region dominated by pts.

    Returns (lo, hi) arrays; upper bounds may be +inf. pts must be a 2-d
    pareto frontier strictly above ref (may be empty).
    """
    inf = np.inf
    if pts.shape[0] == 0:
        return [np.array([ref[0], ref[1]])], [np.array([inf, inf])]
    order = np.argsort(-pts[:, 0])
    sorted_pts = pts[order]  # x descending -> y ascending for a clean frontier
    los = [np.array([sorted_pts[0, 0], ref[1]])]
    his = [np.array([inf, inf])]
    for i in range(len(sorted_pts)):
        x_right = sorted_pts[i, 0]
        x_left = sorted_pts[i + 1, 0] if i + 1 < len(sorted_pts) else ref[0]
        los.append(np.array([x_left, sorted_pts[i, 1]]))
        his.append(np.array([x_right, inf]))
    return los, his


def box_decomposition(frontier, reference_point) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint axis-aligned boxes covering the not-yet-dominated part of
    {z >= r}, for 2 or 3 objectives. Returns (lo (K, m), hi (K, m)); upper
    bounds may be +inf. The hypervolume improvement of new points Y is then
    the volume of union_j [r, Y_j] intersected with these boxes.
    """
    pts = _as_points(frontier)
    ref = np.asarray(reference_point, dtype=float).ravel()
    m = ref.size
    if m not in (2, 3):
        raise ValidationError("box decomposition implemented for 2 or 3 objectives")
    if pts.shape[0]:
        if pts.shape[1] != m:
            raise InputShapeError(f"points have {pts.shape[1]} objectives, reference {m}")
        pts = _filter_above_ref(pts, ref, warn=False)
        pts = pareto_filter(pts).points
    if pts.shape[0] == 0:
        return np.array([ref]), np.full((1, m), np.inf)

    if m == 2:
        los, his = _staircase_complement_2d(pts, ref)
        return np.array(los), np.array(his)

    los, his = [], []
    levels = np.unique(pts[:, 2])[::-1]
    # above the highest point nothing is dominated
    los.append(np.array([ref[0], ref[1], levels[0]]))
    his.append(np.array([np.inf, np.inf, np.inf]))
    for k, z_top in enumerate(levels):
        z_bot = levels[k + 1] if k + 1 < len(levels) else ref[2]
        active = pts[pts[:, 2] >= z_top][:, :2]
        active = pareto_filter(active).points
        l2, h2 = _staircase_complement_2d(active, ref[:2])
        for lo2, hi2 in zip(l2, h2):
            los.append(np.array([lo2[0], lo2[1], z_bot]))
            his.append(np.array([hi2[0], hi2[1], z_top]))
    return np.array(los), np.array(his)


def batch_hypervolume_improvement(
    lo: np.ndarray, hi: np.ndarray, Y: np.ndarray
) -> np.ndarray:
    """Joint hypervolume improvement of each sample's q-point batch.

    lo/hi: box decomposition, either shared (K, m) or per-sample (S, K, m).
    Y: (S, q, m) candidate objective draws. Returns (S,) improvements,
    computed by inclusion-exclusion over the q points inside each box.
    """
    Y = np.asarray(Y, dtype=float)
    S, q, m = Y.shape
    if q > 16:
        raise ValidationError("joint improvement uses 2^q subset terms; q capped at 16")
    n_sub = (1 << q) - 1
    # subset minima via the lowest-set-bit recursion
    mins = np.empty((S, n_sub + 1, m))
    mins[:, 0] = np.inf
    signs = np.empty(n_sub + 1)
    for b in range(1, n_sub + 1):
        j = (b & -b).bit_length() - 1
        rest = b & (b - 1)
        mins[:, b] = Y[:, j] if rest == 0 else np.minimum(mins[:, rest], Y[:, j])
        signs[b] = 1.0 if bin(b).count("1") % 2 == 1 else -1.0
    mins = mins[:, 1:]
    signs = signs[1:]
    if lo.ndim == 2:
        capped = np.minimum(mins[:, :, None, :], hi[None, None, :, :])
        extent = np.clip(capped - lo[None, None, :, :], 0.0, None)
    else:
        capped = np.minimum(mins[:, :, None, :], hi[:, None, :, :])
        extent = np.clip(capped - lo[:, None, :, :], 0.0, None)
    vols = extent.prod(axis=3)  # (S, n_sub, K)
    return np.einsum("snk,n->s", vols, signs)
