"""Geometric predicates and measurements for balls and spheres in R^d.

All pair predicates compare squared distances against squared radius
combinations with an absolute tolerance ``eps`` (default 0). Tangency
counts as intersection, i.e. closed-set semantics; a positive ``eps``
widens the equality bands toward "intersect" for adversarial inputs.
Everything here is a pure function, safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ValidationError

MIN_DIMENSION = 2
# Constants of the form 9**d and fractions 5**-d make larger dimensions
# useless at desk scale, so they are rejected at load.
MAX_DIMENSION = 16


class BodyKind(str, Enum):
    BALL = "ball"
    SPHERE = "sphere"


class SphereRelation(Enum):
    INTERSECT = "intersect"
    FIRST_INSIDE_SECOND = "first_inside_second"
    SECOND_INSIDE_FIRST = "second_inside_first"
    DISJOINT = "disjoint"


def as_point(p) -> np.ndarray:
    """Validate and convert a coordinate sequence to a float vector."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"point must be a flat coordinate vector, got shape {arr.shape}")
    if not (MIN_DIMENSION <= arr.size <= MAX_DIMENSION):
        raise ValidationError(
            f"dimension {arr.size} outside supported range [{MIN_DIMENSION}, {MAX_DIMENSION}]"
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError("point has non-finite coordinates")
    return arr


@dataclass(frozen=True)
class Body:
    """A ball or sphere given by center and positive radius."""

    center: np.ndarray
    radius: float
    kind: BodyKind

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "kind", BodyKind(self.kind))
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValidationError(f"radius must be positive and finite, got {self.radius}")

    @property
    def dimension(self) -> int:
        return self.center.size


def _check_same_dim(p: np.ndarray, q: np.ndarray) -> None:
    if p.size != q.size:
        raise ValidationError(f"dimension mismatch: {p.size} vs {q.size}")


def sq_dist(p, q) -> float:
    p = as_point(p)
    q = as_point(q)
    _check_same_dim(p, q)
    diff = p - q
    return float(np.dot(diff, diff))


def dist(p, q) -> float:
    """Euclidean distance between two points of equal dimension."""
    return math.sqrt(sq_dist(p, q))


def spheres_relation(s1: Body, s2: Body, eps: float = 0.0) -> SphereRelation:
    """Classify a sphere pair: intersect, one inside the other, or disjoint.

    Two spheres intersect iff (r1-r2)^2 <= D^2 <= (r1+r2)^2 where D is the
    center distance. Comparisons are on squared quantities; tangency counts
    as intersection.
    """
    if s1.kind is not BodyKind.SPHERE or s2.kind is not BodyKind.SPHERE:
        raise ValidationError("spheres_relation requires two sphere-kind bodies")
    d2 = sq_dist(s1.center, s2.center)
    lo = (s1.radius - s2.radius) ** 2
    hi = (s1.radius + s2.radius) ** 2
    if d2 > hi + eps:
        return SphereRelation.DISJOINT
    if d2 < lo - eps:
        if s1.radius < s2.radius:
            return SphereRelation.FIRST_INSIDE_SECOND
        return SphereRelation.SECOND_INSIDE_FIRST
    return SphereRelation.INTERSECT


def balls_intersect(b1: Body, b2: Body, eps: float = 0.0) -> bool:
    """Closed balls intersect iff center distance <= r1 + r2."""
    if b1.kind is not BodyKind.BALL or b2.kind is not BodyKind.BALL:
        raise ValidationError("balls_intersect requires two ball-kind bodies")
    return sq_dist(b1.center, b2.center) <= (b1.radius + b2.radius) ** 2 + eps


def body_crosses_sphere(body: Body, cut_center, cut_radius: float, eps: float = 0.0) -> bool:
    """Does the body meet the cut sphere of the given center and radius?

    For a ball this holds iff D - r <= cut_radius <= D + r; for a sphere it
    is the sphere/sphere intersect relation.
    """
    if cut_radius <= 0:
        raise ValidationError("cut_radius must be positive")
    cut_center = as_point(cut_center)
    _check_same_dim(body.center, cut_center)
    d2 = sq_dist(body.center, cut_center)
    if body.kind is BodyKind.BALL:
        # |cut_radius - D| <= r, compared on squares to avoid a sqrt
        diff = d2 + cut_radius * cut_radius
        return (diff - 2.0 * cut_radius * math.sqrt(d2)) <= body.radius**2 + eps
    lo = (body.radius - cut_radius) ** 2
    hi = (body.radius + cut_radius) ** 2
    return lo - eps <= d2 <= hi + eps


def cap_radius(cut_center, cut_radius: float, sphere: Body, eps: float = 0.0) -> float:
    """Radius of the cap that the ball bounded by ``sphere`` cuts from the cut sphere.

    Uses the chord surrogate: with a = cut_radius, b = sphere radius and
    D the center distance, the base plane of the cap sits at signed height
    h = (a^2 + D^2 - b^2) / (2D) from the cut center. A sub-hemispherical
    cap (h >= 0) gets its base-circle radius sqrt(a^2 - h^2); anything
    larger gets a. The cap must be nonempty (the caller gates on
    body_crosses_sphere for the closed ball bounded by the sphere).
    """
    cut_center = as_point(cut_center)
    if cut_radius <= 0:
        raise ValidationError("cut_radius must be positive")
    _check_same_dim(sphere.center, cut_center)
    a = float(cut_radius)
    b = sphere.radius
    d2 = sq_dist(sphere.center, cut_center)
    d = math.sqrt(d2)
    # empty intersection: |D - a| > b, i.e. the ball misses the cut sphere
    if (d - a) ** 2 > b * b + eps:
        raise ValidationError("cap is empty: ball does not meet the cut sphere")
    if d <= 0.0:
        # concentric with b >= a: the whole cut sphere lies in the ball
        return a
    h = (a * a + d2 - b * b) / (2.0 * d)
    if h >= 0.0:
        return math.sqrt(max(a * a - h * h, 0.0))
    return a


# ---------------------------------------------------------------------------
# Array forms of the same predicates. These evaluate one body against many
# (centers, radii) rows using the identical squared comparisons, so scalar
# and vector paths can never disagree on a pair.
# ---------------------------------------------------------------------------


def ball_cut_masks(
    centers: np.ndarray,
    radii: np.ndarray,
    cut_center: np.ndarray,
    cut_radius: float,
    eps: float = 0.0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Partition balls against a cut sphere: (crossing, strictly inside, strictly outside)."""
    d2 = np.einsum("ij,ij->i", centers - cut_center, centers - cut_center)
    d = np.sqrt(d2)
    cross = (d2 + cut_radius * cut_radius - 2.0 * cut_radius * d) <= radii * radii + eps
    inside = ~cross & (d < cut_radius)
    outside = ~cross & ~inside
    return cross, inside, outside


def sphere_cross_mask(
    centers: np.ndarray,
    radii: np.ndarray,
    cut_center: np.ndarray,
    cut_radius: float,
    eps: float = 0.0,
) -> np.ndarray:
    """Spheres that intersect the cut sphere (tangency included)."""
    d2 = np.einsum("ij,ij->i", centers - cut_center, centers - cut_center)
    lo = (radii - cut_radius) ** 2
    hi = (radii + cut_radius) ** 2
    return (d2 >= lo - eps) & (d2 <= hi + eps)


def sphere_in_closed_ball_mask(
    centers: np.ndarray,
    radii: np.ndarray,
    ball_center: np.ndarray,
    ball_radius: float,
    eps: float = 0.0,
) -> np.ndarray:
    """Spheres whose bounded ball lies inside the closed ball (D + r <= R)."""
    d2 = np.einsum("ij,ij->i", centers - ball_center, centers - ball_center)
    fits = radii <= ball_radius
    return fits & (d2 <= (ball_radius - radii) ** 2 + eps)


def sphere_touches_closed_ball_mask(
    centers: np.ndarray,
    radii: np.ndarray,
    ball_center: np.ndarray,
    ball_radius: float,
    eps: float = 0.0,
) -> np.ndarray:
    """Spheres with at least one point in the closed ball (|D - r| <= R)."""
    d2 = np.einsum("ij,ij->i", centers - ball_center, centers - ball_center)
    d = np.sqrt(d2)
    return (d - radii) ** 2 <= ball_radius * ball_radius + eps


def contains_point_strict_mask(
    centers: np.ndarray, radii: np.ndarray, point: np.ndarray, eps: float = 0.0
) -> np.ndarray:
    """Spheres containing the point strictly in their interior."""
    d2 = np.einsum("ij,ij->i", centers - point, centers - point)
    return d2 < radii * radii - eps


def surrounds_sphere_strict_mask(
    centers: np.ndarray,
    radii: np.ndarray,
    inner_center: np.ndarray,
    inner_radius: float,
    eps: float = 0.0,
) -> np.ndarray:
    """Spheres that contain the given sphere entirely in their open interior."""
    d2 = np.einsum("ij,ij->i", centers - inner_center, centers - inner_center)
    bigger = radii > inner_radius
    return bigger & (d2 < (radii - inner_radius) ** 2 - eps)


def cap_radii(
    centers: np.ndarray, radii: np.ndarray, cut_center: np.ndarray, cut_radius: float
) -> np.ndarray:
    """Vectorized cap_radius for rows already known to cross the cut sphere."""
    a = float(cut_radius)
    d2 = np.einsum("ij,ij->i", centers - cut_center, centers - cut_center)
    d = np.sqrt(d2)
    out = np.full(len(radii), a, dtype=np.float64)
    pos = d > 0.0
    h = np.zeros_like(out)
    h[pos] = (a * a + d2[pos] - radii[pos] ** 2) / (2.0 * d[pos])
    shallow = pos & (h >= 0.0)
    out[shallow] = np.sqrt(np.maximum(a * a - h[shallow] ** 2, 0.0))
    return out
