"""Instance generation and file I/O.

An instance is a homogeneous collection of balls or spheres: a dimension,
a kind, an (n, d) array of centers and an (n,) array of radii, plus
metadata recording how it was produced. Generators are deterministic given
their seed (counter-based Philox keyed by the seed, so results are stable
across platforms).
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .geometry import MAX_DIMENSION, MIN_DIMENSION, Body, BodyKind

_MASK64 = (1 << 64) - 1


def keyed_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by (seed, stream); the substream rule used everywhere."""
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass
class Instance:
    """A homogeneous collection of balls or spheres."""

    dimension: int
    kind: BodyKind
    centers: np.ndarray
    radii: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.kind = BodyKind(self.kind)
        self.centers = np.ascontiguousarray(np.asarray(self.centers, dtype=np.float64))
        self.radii = np.ascontiguousarray(np.asarray(self.radii, dtype=np.float64))
        if not (MIN_DIMENSION <= self.dimension <= MAX_DIMENSION):
            raise ValidationError(
                f"dimension {self.dimension} outside supported range "
                f"[{MIN_DIMENSION}, {MAX_DIMENSION}]"
            )
        if self.centers.ndim != 2 or self.centers.shape[1] != self.dimension:
            raise ValidationError(
                f"centers must have shape (n, {self.dimension}), got {self.centers.shape}"
            )
        if self.radii.shape != (self.centers.shape[0],):
            raise ValidationError("radii must be one per body")
        if self.centers.shape[0] < 1:
            raise ValidationError("instance needs at least one body")
        if not np.all(np.isfinite(self.centers)):
            bad = int(np.where(~np.isfinite(self.centers).all(axis=1))[0][0])
            raise ValidationError(f"bodies[{bad}]: non-finite center coordinate")
        finite_r = np.isfinite(self.radii) & (self.radii > 0.0)
        if not np.all(finite_r):
            bad = int(np.where(~finite_r)[0][0])
            raise ValidationError(f"bodies[{bad}]: radius must be positive, got {self.radii[bad]}")

    @property
    def n(self) -> int:
        return self.centers.shape[0]

    def body(self, i: int) -> Body:
        return Body(self.centers[i], float(self.radii[i]), self.kind)

    @property
    def bodies(self) -> list[Body]:
        return [self.body(i) for i in range(self.n)]

    @classmethod
    def from_bodies(cls, bodies: list[Body], metadata: dict | None = None) -> "Instance":
        if not bodies:
            raise ValidationError("instance needs at least one body")
        kinds = {b.kind for b in bodies}
        if len(kinds) != 1:
            raise ValidationError("mixed ball/sphere collections are rejected")
        dims = {b.dimension for b in bodies}
        if len(dims) != 1:
            raise ValidationError("bodies have mixed dimensions")
        return cls(
            dimension=bodies[0].dimension,
            kind=bodies[0].kind,
            centers=np.array([b.center for b in bodies]),
            radii=np.array([b.radius for b in bodies]),
            metadata=metadata or {},
        )

    def subinstance(self, indices) -> "Instance":
        idx = np.asarray(indices, dtype=np.int64)
        return Instance(
            dimension=self.dimension,
            kind=self.kind,
            centers=self.centers[idx],
            radii=self.radii[idx],
            metadata={"derived_from": self.metadata.get("generator", "unknown")},
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Instance)
            and self.dimension == other.dimension
            and self.kind == other.kind
            and np.array_equal(self.centers, other.centers)
            and np.array_equal(self.radii, other.radii)
            and self.metadata == other.metadata
        )


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def gen_random(
    n: int,
    d: int,
    radius_range: tuple[float, float],
    box_side: float,
    kind: BodyKind | str = BodyKind.BALL,
    seed: int = 0,
) -> Instance:
    """n bodies with centers uniform in [0, box_side]^d and radii uniform in the range."""
    r_min, r_max = float(radius_range[0]), float(radius_range[1])
    if not (0.0 < r_min <= r_max):
        raise ValidationError(f"invalid radius range [{r_min}, {r_max}]")
    if n < 1:
        raise ValidationError("n must be at least 1")
    if box_side <= 0:
        raise ValidationError("box_side must be positive")
    rng = keyed_rng(seed, 0)
    centers = rng.uniform(0.0, box_side, size=(n, d))
    radii = rng.uniform(r_min, r_max, size=n) if r_max > r_min else np.full(n, r_min)
    return Instance(
        dimension=d,
        kind=kind,
        centers=centers,
        radii=radii,
        metadata={
            "generator": "random_uniform",
            "params": {"n": n, "d": d, "radius_range": [r_min, r_max], "box_side": box_side},
            "seed": int(seed),
        },
    )


def _grid_points(k: int, d: int) -> np.ndarray:
    axes = [np.arange(1, k + 1, dtype=np.float64)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _grid_edge_counts(k: int, d: int, max_sq: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct squared displacement norms <= max_sq and the edge count at each.

    Pairs of {1..k}^d at displacement v number prod_i (k - |v_i|); summing
    over nonzero v and halving gives the exact edge count for each distance
    threshold without touching all O(n^2) pairs.
    """
    span = min(k - 1, int(math.isqrt(max_sq)))
    rng = np.arange(-span, span + 1)
    mesh = np.meshgrid(*([rng] * d), indexing="ij")
    vs = np.stack([m.ravel() for m in mesh], axis=1)
    sq = np.sum(vs * vs, axis=1)
    keep = (sq > 0) & (sq <= max_sq)
    vs, sq = vs[keep], sq[keep]
    weights = np.prod(k - np.abs(vs), axis=1)
    order = np.argsort(sq, kind="stable")
    sq, weights = sq[order], weights[order]
    distinct, starts = np.unique(sq, return_index=True)
    sums = np.add.reduceat(weights, starts)
    return distinct, np.cumsum(sums) // 2


GRID_EDGE_SLACK_BASE = 4  # achieved edge count must stay within 4^d * m


def gen_grid(n: int, m: int, d: int, kind: BodyKind | str = BodyKind.BALL) -> Instance:
    """Bodies of radius r/2 on the integer grid {1..k}^d with k = floor(n^(1/d)).

    r >= 1 is the smallest realizable inter-point distance whose induced
    edge count reaches m/2; an exact hit is impossible because the count
    jumps at distance thresholds, so the result is accepted anywhere in
    [m/2, 4^d * m] and the achieved r and count are recorded in metadata.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    if not (n <= m <= n * (n - 1) // 2):
        raise ValidationError(f"edge target m={m} outside [n, n(n-1)/2] for n={n}")
    k = int(math.floor(n ** (1.0 / d) + 1e-9))
    if k < 2:
        raise ValidationError(f"grid side floor(n^(1/d)) = {k} too small for n={n}, d={d}")
    n_pts = k**d
    if m / 2 > n_pts * (n_pts - 1) // 2:
        raise ValidationError(
            f"infeasible m={m}: grid has only {n_pts} points ({n_pts*(n_pts-1)//2} possible edges)"
        )
    max_sq = d * (k - 1) ** 2
    distinct_sq, counts = _grid_edge_counts(k, d, max_sq)
    usable = distinct_sq >= 1
    idx = np.where(usable & (counts >= (m + 1) // 2))[0]
    if idx.size == 0:
        raise ValidationError(f"infeasible m={m}: even the complete grid graph is too sparse")
    chosen = idx[0]
    r = math.sqrt(float(distinct_sq[chosen]))
    achieved = int(counts[chosen])
    if achieved > (GRID_EDGE_SLACK_BASE**d) * m:
        raise ValidationError(
            f"edge count {achieved} overshoots target m={m} beyond the {GRID_EDGE_SLACK_BASE}^d slack"
        )
    return Instance(
        dimension=d,
        kind=kind,
        centers=_grid_points(k, d),
        radii=np.full(n_pts, r / 2.0),
        metadata={
            "generator": "grid_lower_bound",
            "params": {"n": n, "m": m, "d": d, "k": k},
            "achieved_r": r,
            "achieved_edges": achieved,
            "seed": 0,
        },
    )


# Jitter relative to the radius gap; avoids exact concentricity while
# preserving strict containment.
NEST_JITTER = 1e-3


def gen_nested_chain(n: int, d: int, seed: int = 0) -> Instance:
    """n spheres each strictly inside the next; the intersection graph is edgeless."""
    if n < 2:
        raise ValidationError("nested chain needs at least 2 spheres")
    rng = keyed_rng(seed, 0)
    radii = 1.0 + np.arange(n, dtype=np.float64)
    centers = np.zeros((n, d))
    steps = rng.normal(size=(n - 1, d))
    steps /= np.linalg.norm(steps, axis=1, keepdims=True)
    steps *= rng.uniform(0.0, NEST_JITTER, size=(n - 1, 1))
    centers[1:] = np.cumsum(steps, axis=0)
    return Instance(
        dimension=d,
        kind=BodyKind.SPHERE,
        centers=centers,
        radii=radii,
        metadata={
            "generator": "nested_chain",
            "params": {"n": n, "d": d},
            "common_point": [0.0] * d,
            "seed": int(seed),
        },
    )


def gen_nested_bipartite(a: int, d: int, seed: int = 0) -> Instance:
    """2a spheres forming K_{a,a}: two nested families, every cross pair intersecting."""
    if a < 1:
        raise ValidationError("need a >= 1 spheres per side")
    rng = keyed_rng(seed, 0)
    gap = min(0.1, 4.0 / a)
    separation = 10.0
    base = separation / 2.0 + gap / 2.0
    radii_one = base + gap * np.arange(a)
    radii_two = base + gap * np.arange(a)
    p = np.zeros(d)
    q = np.zeros(d)
    q[0] = separation
    jitter = rng.uniform(-NEST_JITTER * gap, NEST_JITTER * gap, size=(2 * a, d))
    centers = np.vstack([np.tile(p, (a, 1)), np.tile(q, (a, 1))]) + jitter
    centers[0] = p  # anchor the innermost of each family exactly
    centers[a] = q
    return Instance(
        dimension=d,
        kind=BodyKind.SPHERE,
        centers=centers,
        radii=np.concatenate([radii_one, radii_two]),
        metadata={
            "generator": "nested_bipartite",
            "params": {"a": a, "d": d},
            "family_split": a,
            "common_points": [list(map(float, p)), list(map(float, q))],
            "seed": int(seed),
        },
    )


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------


def instance_json(instance: Instance) -> str:
    """The instance as a single JSON document (floats round-trip exactly)."""
    doc = {
        "dimension": instance.dimension,
        "kind": instance.kind.value,
        "bodies": [
            {"center": [float(x) for x in instance.centers[i]], "radius": float(instance.radii[i])}
            for i in range(instance.n)
        ],
        "metadata": instance.metadata,
    }
    return json.dumps(doc, sort_keys=True) + "\n"


def save(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(instance_json(instance))


def load(path: str | Path) -> Instance:
    """Read an instance JSON document, with field-level diagnostics on bad input."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: JSON parse error at line {exc.lineno} col {exc.colno}: {exc.msg}")
    for key in ("dimension", "kind", "bodies"):
        if key not in doc:
            raise ValidationError(f"{path}: missing required field '{key}'")
    try:
        kind = BodyKind(doc["kind"])
    except ValueError:
        raise ValidationError(f"{path}: kind must be 'ball' or 'sphere', got {doc['kind']!r}")
    d = doc["dimension"]
    if not isinstance(d, int):
        raise ValidationError(f"{path}: dimension must be an integer")
    bodies = doc["bodies"]
    if not isinstance(bodies, list) or not bodies:
        raise ValidationError(f"{path}: bodies must be a nonempty list")
    centers = np.empty((len(bodies), d))
    radii = np.empty(len(bodies))
    for i, body in enumerate(bodies):
        center = body.get("center")
        if not isinstance(center, list) or len(center) != d:
            raise ValidationError(
                f"{path}: bodies[{i}]: center must have {d} coordinates, got {center!r}"
            )
        radius = body.get("radius")
        if not isinstance(radius, (int, float)) or not radius > 0:
            raise ValidationError(f"{path}: bodies[{i}]: radius must be positive, got {radius!r}")
        centers[i] = center
        radii[i] = radius
    return Instance(
        dimension=d, kind=kind, centers=centers, radii=radii, metadata=doc.get("metadata", {})
    )


def load_csv(path: str | Path, kind: BodyKind | str, dimension: int) -> Instance:
    """Read one body per row: x1,...,xd,radius. Kind and dimension come from flags."""
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != dimension + 1:
                raise ValidationError(
                    f"{path}: line {lineno}: expected {dimension + 1} fields, got {len(row)}"
                )
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}")
    if not rows:
        raise ValidationError(f"{path}: no bodies found")
    arr = np.array(rows)
    return Instance(
        dimension=dimension,
        kind=kind,
        centers=arr[:, :dimension],
        radii=arr[:, dimension],
        metadata={"generator": "csv", "source": str(path)},
    )
