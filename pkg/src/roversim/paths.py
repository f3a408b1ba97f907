"""Piecewise-linear reference paths and geometric queries on them.

Segment data is precomputed as numpy arrays so per-step queries from the
simulation loop stay cheap even for finely sampled paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Path:
    """Piecewise-linear path through a sequence of waypoints (meters)."""

    waypoints: np.ndarray
    _seg_start: np.ndarray = field(init=False, repr=False)
    _seg_vec: np.ndarray = field(init=False, repr=False)
    _seg_len: np.ndarray = field(init=False, repr=False)
    _seg_len2: np.ndarray = field(init=False, repr=False)
    _cum_arc: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.waypoints = np.asarray(self.waypoints, dtype=float)
        if self.waypoints.ndim != 2 or self.waypoints.shape[1] != 2:
            raise ValueError("waypoints must be an (n, 2) array")
        if len(self.waypoints) < 2:
            raise ValueError("path needs at least 2 waypoints")
        self._seg_start = self.waypoints[:-1]
        self._seg_vec = np.diff(self.waypoints, axis=0)
        self._seg_len2 = np.einsum("ij,ij->i", self._seg_vec, self._seg_vec)
        self._seg_len = np.sqrt(self._seg_len2)
        if np.any(self._seg_len == 0.0):
            raise ValueError("path contains duplicate consecutive waypoints")
        self._cum_arc = np.concatenate([[0.0], np.cumsum(self._seg_len)])

    @property
    def length(self) -> float:
        return float(self._cum_arc[-1])

    def point_at(self, arc: float) -> np.ndarray:
        """Point at arc position, clamped to the path ends."""
        arc = min(max(arc, 0.0), self.length)
        i = int(np.searchsorted(self._cum_arc, arc, side="right")) - 1
        i = min(i, len(self._seg_start) - 1)
        t = (arc - self._cum_arc[i]) / self._seg_len[i]
        return self._seg_start[i] + t * self._seg_vec[i]

    def _closest(self, point) -> tuple[int, float, float, float]:
        """(segment index, t on segment, distance^2, cross product) of the
        closest path point to ``point``."""
        p = np.asarray(point, dtype=float)
        rel = p - self._seg_start
        t = np.clip(np.einsum("ij,ij->i", rel, self._seg_vec) / self._seg_len2, 0.0, 1.0)
        offset = rel - t[:, None] * self._seg_vec
        d2 = np.einsum("ij,ij->i", offset, offset)
        i = int(np.argmin(d2))
        cross = self._seg_vec[i, 0] * rel[i, 1] - self._seg_vec[i, 1] * rel[i, 0]
        return i, float(t[i]), float(d2[i]), float(cross)

    def project(self, point) -> float:
        """Arc position of the closest point on the path to ``point``."""
        i, t, _, _ = self._closest(point)
        return float(self._cum_arc[i] + t * self._seg_len[i])

    def signed_offset(self, point) -> float:
        """Signed perpendicular distance to the closest segment.

        Positive when the point lies to the left of the local path
        direction.
        """
        _, _, d2, cross = self._closest(point)
        return math.copysign(math.sqrt(d2), cross) if cross != 0.0 else math.sqrt(d2)

    def circle_intersections(self, center, radius: float) -> np.ndarray:
        """Arc positions where the circle cuts the path, ascending."""
        c = np.asarray(center, dtype=float)
        rel = self._seg_start - c
        qa = self._seg_len2
        qb = 2.0 * np.einsum("ij,ij->i", rel, self._seg_vec)
        qc = np.einsum("ij,ij->i", rel, rel) - radius * radius
        disc = qb * qb - 4.0 * qa * qc
        ok = disc >= 0.0
        if not np.any(ok):
            return np.empty(0)
        sq = np.sqrt(disc[ok])
        t_lo = (-qb[ok] - sq) / (2.0 * qa[ok])
        t_hi = (-qb[ok] + sq) / (2.0 * qa[ok])
        base = self._cum_arc[:-1][ok]
        seg_len = self._seg_len[ok]
        arcs = []
        for t, b, sl in zip(np.concatenate([t_lo, t_hi]),
                            np.concatenate([base, base]),
                            np.concatenate([seg_len, seg_len])):
            if 0.0 <= t <= 1.0:
                arcs.append(b + t * sl)
        arcs.sort()
        deduped: list[float] = []
        for a in arcs:
            if not deduped or a - deduped[-1] > 1e-12:
                deduped.append(a)
        return np.array(deduped)


def straight_path(length: float = 100.0, heading: float = 0.0) -> Path:
    end = [length * math.cos(heading), length * math.sin(heading)]
    return Path(np.array([[0.0, 0.0], end]))


def lane_change_path(
    lane_offset: float = 3.5,
    transition_start: float = 50.0,
    transition_length: float = 30.0,
    total_length: float = 150.0,
) -> Path:
    """Two parallel lanes joined by a straight transition ramp."""
    pts = np.array(
        [
            [0.0, 0.0],
            [transition_start, 0.0],
            [transition_start + transition_length, lane_offset],
            [total_length, lane_offset],
        ]
    )
    return Path(pts)


def circle_path(radius: float = 10.0, n_points: int = 360, turns: float = 1.5) -> Path:
    """Counterclockwise circle through the origin, initially heading +x."""
    ang = np.linspace(-np.pi / 2.0, -np.pi / 2.0 + turns * 2.0 * np.pi, n_points)
    pts = np.column_stack([radius * np.cos(ang), radius * np.sin(ang) + radius])
    return Path(pts)
