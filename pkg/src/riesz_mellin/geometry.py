"""Polygonal boundaries, corner frames, disk covers and partitions of unity."""
import json
from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import CoverError, GeometryError
from .quadrature import radial_cutoff


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _segments_intersect(p1, p2, q1, q2):
    d1 = _cross(p2 - p1, q1 - p1)
    d2 = _cross(p2 - p1, q2 - p1)
    d3 = _cross(q2 - q1, p1 - q1)
    d4 = _cross(q2 - q1, p2 - q1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True

    def on_seg(a, b, p, d):
        return d == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])

    return on_seg(p1, p2, q1, d1) or on_seg(p1, p2, q2, d2) or on_seg(q1, q2, p1, d3) or on_seg(q1, q2, p2, d4)


def _point_segment_distance(p, a, b):
    ab = b - a
    s = np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0)
    return float(np.linalg.norm(p - a - s * ab))


@dataclass(frozen=True)
class CornerFrame:
    """Vertex c with unit vectors e_plus (to the next vertex) and e_minus (to the previous one).

    2*theta is the angle swept counterclockwise from e_plus to e_minus, i.e.
    the interior angle of a counterclockwise polygon.
    """

    vertex: np.ndarray
    e_plus: np.ndarray
    e_minus: np.ndarray
    theta: float

    @property
    def aperture(self):
        return 2.0 * self.theta

    @property
    def is_dummy(self):
        return abs(self.theta - np.pi / 2) < 1e-12

    def ray_point(self, t, side):
        e = self.e_plus if side > 0 else self.e_minus
        return self.vertex + np.multiply.outer(np.asarray(t, dtype=float), e)


class PolygonBoundary:
    """Closed simple polygon, stored counterclockwise, with arc-length parameterization."""

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise GeometryError("a polygon needs at least 3 two-dimensional vertices")
        if not np.all(np.isfinite(v)):
            raise GeometryError("vertex coordinates must be finite")
        n = len(v)
        for i in range(n):
            for j in range(i + 1, n):
                if np.array_equal(v[i], v[j]):
                    raise GeometryError(f"repeated vertex {v[i].tolist()}")
        area2 = sum(_cross(v[i], v[(i + 1) % n]) for i in range(n))
        if area2 < 0:
            v = np.concatenate([v[:1], v[:0:-1]])
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                    raise GeometryError("polygon is self-intersecting")
        # an edge folding back onto its neighbour
        for i in range(n):
            a, b = v[i - 1] - v[i], v[(i + 1) % n] - v[i]
            if _cross(a, b) == 0 and np.dot(a, b) > 0:
                raise GeometryError("polygon is self-intersecting (edge folds back)")
        if area2 == 0:
            raise GeometryError("polygon has zero area")
        self.vertices = v
        self.vertices.setflags(write=False)
        d = np.roll(v, -1, axis=0) - v
        self.edge_lengths = np.hypot(d[:, 0], d[:, 1])
        self.offsets = np.concatenate([[0.0], np.cumsum(self.edge_lengths)])
        self.total_length = float(self.offsets[-1])

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def edges(self):
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def point_at(self, s):
        """Boundary point(s) at arc length s (taken modulo the perimeter)."""
        s = np.mod(np.asarray(s, dtype=float), self.total_length)
        k = np.clip(np.searchsorted(self.offsets, s, side="right") - 1, 0, self.n_vertices - 1)
        frac = (s - self.offsets[k]) / self.edge_lengths[k]
        a = self.vertices[k]
        b = self.vertices[(k + 1) % self.n_vertices]
        return a + frac[..., None] * (b - a)

    def to_json(self, cover_scale=None):
        out = {"vertices": self.vertices.tolist()}
        if cover_scale is not None:
            out["cover_scale"] = cover_scale
        return json.dumps(out)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(data["vertices"])


def build_boundary(vertices):
    return PolygonBoundary(vertices)


def corner_frames(boundary):
    v = boundary.vertices
    n = len(v)
    frames = []
    for i in range(n):
        fwd = v[(i + 1) % n] - v[i]
        back = v[i - 1] - v[i]
        lf, lb = np.linalg.norm(fwd), np.linalg.norm(back)
        if lf == 0 or lb == 0:
            raise GeometryError("zero-length edge")
        ep, em = fwd / lf, back / lb
        ang = np.arctan2(_cross(ep, em), np.dot(ep, em)) % (2.0 * np.pi)
        frames.append(CornerFrame(v[i].copy(), ep, em, float(ang / 2.0)))
    return frames


def boundary_distance(x, y):
    """Euclidean distance in the plane (not along the boundary)."""
    return float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))


@dataclass(frozen=True)
class CoverDisk:
    """Open disk with a raw bump of support radius radius/2.

    Corner disks keep their raw bump, which is radial; edge bumps are
    normalized by the PartitionOfUnity.
    """

    center: np.ndarray
    radius: float
    is_corner_disk: bool
    edge: int = -1

    def raw_bump(self, points):
        r = np.linalg.norm(np.asarray(points, dtype=float) - self.center, axis=-1)
        return radial_cutoff(r, self.radius)

    def radial_profile(self, r):
        return radial_cutoff(r, self.radius)

    def to_dict(self):
        return {"center": self.center.tolist(), "radius": self.radius,
                "is_corner_disk": self.is_corner_disk}


@dataclass
class PartitionOfUnity:
    boundary: PolygonBoundary
    disks: List[CoverDisk]
    scale: float

    @property
    def corner_disks(self):
        return [d for d in self.disks if d.is_corner_disk]

    def bumps(self, points):
        """Array (n_disks, ...) of bump values at boundary points.

        Corner bumps are their raw radial profiles; each edge bump is scaled
        by (1 - sum of corner bumps) / (sum of raw edge bumps), so the values
        sum to 1 at every boundary point.
        """
        pts = np.asarray(points, dtype=float)
        raw = np.array([d.raw_bump(pts) for d in self.disks])
        corner = np.array([d.is_corner_disk for d in self.disks])
        csum = raw[corner].sum(axis=0)
        esum = raw[~corner].sum(axis=0)
        factor = np.zeros_like(esum)
        m = esum > 0
        factor[m] = (1.0 - csum[m]) / esum[m]
        out = raw.copy()
        out[~corner] = raw[~corner] * factor
        return out

    def bump(self, index, points):
        d = self.disks[index]
        if d.is_corner_disk:
            return d.raw_bump(points)
        return self.bumps(points)[index]

    def to_json(self):
        return json.dumps({"vertices": self.boundary.vertices.tolist(), "cover_scale": self.scale,
                           "disks": [d.to_dict() for d in self.disks]})

    def check(self, n_samples=1000):
        """Assert the three cover conditions and the partition identity by direct predicates."""
        s = np.linspace(0.0, self.boundary.total_length, n_samples, endpoint=False)
        pts = self.boundary.point_at(s)
        covered = np.zeros(len(pts), dtype=bool)
        for d in self.disks:
            covered |= np.linalg.norm(pts - d.center, axis=1) < d.radius
        assert covered.all(), "disks do not cover the boundary"
        for c in self.boundary.vertices:
            owners = [d for d in self.disks if np.linalg.norm(c - d.center) <= d.radius]
            assert len(owners) == 1 and owners[0].is_corner_disk and np.array_equal(owners[0].center, c)
        total = self.bumps(pts).sum(axis=0)
        return float(np.max(np.abs(total - 1.0)))


def build_cover(boundary, scale=0.3):
    """Corner disks of radius scale * (shorter adjacent edge), then edge disks.

    Edge disks share the radius min(corner radius)/4 and are spaced so that
    neighbouring plateaus (where a raw bump equals 1) touch.
    """
    if not 0.0 < scale < 1.0:
        raise CoverError("cover scale must lie in (0, 1)")
    v = boundary.vertices
    n = len(v)
    L = boundary.edge_lengths
    rho = np.array([scale * min(L[i], L[i - 1]) for i in range(n)])
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dist = np.linalg.norm(v[i] - v[j])
            if rho[i] >= dist or 0.5 * (rho[i] + rho[j]) >= dist:
                raise CoverError(f"corners {i} and {j} are too close for scale {scale}")
            # edges not touching corner i must stay outside its disk
            if j != i and (j + 1) % n != i:
                if _point_segment_distance(v[i], v[j], v[(j + 1) % n]) <= rho[i]:
                    raise CoverError(f"corner {i} disk meets a non-adjacent edge at scale {scale}")
    disks = [CoverDisk(v[i].copy(), float(rho[i]), True) for i in range(n)]
    rho_e = float(rho.min() / 4.0)
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        e = (b - a) / L[i]
        s0 = rho[i] / 4.0 + rho_e / 8.0
        s1 = L[i] - rho[(i + 1) % n] / 4.0 - rho_e / 8.0
        if s1 < s0:
            raise CoverError(f"edge {i} too short for scale {scale}")
        k = int(np.ceil((s1 - s0) / (0.5 * rho_e))) + 1
        for s in np.linspace(s0, s1, k) if k > 1 else [0.5 * (s0 + s1)]:
            disks.append(CoverDisk(a + s * e, rho_e, False, edge=i))
    return PartitionOfUnity(boundary, disks, float(scale))
