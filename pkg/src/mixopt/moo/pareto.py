"""Pareto domination and non-dominated filtering (maximize-all convention)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mixopt.exceptions import InputShapeError


def dominates(a, b) -> bool:
    """True if a weakly dominates b and differs from it: a >= b with a != b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return bool(np.all(a >= b) and np.any(a > b))


@dataclass(frozen=True)
class ParetoFrontier:
    """A mutually non-dominated point set, in first-occurrence order.

    ``indices`` maps each frontier point back to its position in the input;
    ``tags`` optionally carries associated identifiers (e.g. mixture ids).
    """

    points: np.ndarray
    indices: tuple[int, ...]
    tags: tuple | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            pts = pts.reshape(0, pts.shape[1] if pts.ndim == 2 and pts.shape[1] else 0)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if self.tags is not None:
            object.__setattr__(self, "tags", tuple(self.tags))

    def __len__(self) -> int:
        return self.points.shape[0]


def pareto_filter(points, tags=None) -> ParetoFrontier:
    """Maximal non-dominated subset, keeping the first occurrence among
    duplicates and preserving input order."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return ParetoFrontier(np.zeros((0, 0)), ())
    pts = np.atleast_2d(pts)
    if pts.ndim != 2:
        raise InputShapeError(f"expected a 2-d array of objective vectors, got {pts.shape}")

    kept_idx: list[int] = []
    archive = np.zeros((0, pts.shape[1]))
    for i, p in enumerate(pts):
        if archive.shape[0]:
            # dropped if some kept point is >= p everywhere (covers duplicates)
            if np.any(np.all(archive >= p, axis=1)):
                continue
            alive = ~(np.all(p >= archive, axis=1) & np.any(p > archive, axis=1))
            if not alive.all():
                archive = archive[alive]
                kept_idx = [k for k, a in zip(kept_idx, alive) if a]
        archive = np.vstack([archive, p])
        kept_idx.append(i)
    out_tags = None if tags is None else tuple(tags[i] for i in kept_idx)
    return ParetoFrontier(pts[kept_idx], tuple(kept_idx), out_tags)
