"""Intersection-graph construction and basic graph machinery.

Graphs are immutable CSR adjacency (sorted neighbor lists, no self loops,
no duplicates). The O(n^2) pairwise builder is the ground truth; the
uniform-grid bucketing accelerator for ball instances must produce an
identical graph and is oracle-checked against it in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .geometry import BodyKind
from .instances import Instance


@dataclass(frozen=True)
class IntersectionGraph:
    n: int
    indptr: np.ndarray  # (n+1,) int64
    indices: np.ndarray  # (2m,) int64, sorted within each row

    def __post_init__(self):
        if self.indptr.shape != (self.n + 1,):
            raise ValidationError("indptr must have length n+1")

    @property
    def m(self) -> int:
        return int(self.indices.size // 2)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def adjacency(self) -> list[np.ndarray]:
        return [self.neighbors(v) for v in range(self.n)]

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges with u < v, sorted lexicographically."""
        u = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        v = self.indices
        keep = u < v
        return np.stack([u[keep], v[keep]], axis=1)

    @classmethod
    def from_edge_arrays(cls, n: int, us: np.ndarray, vs: np.ndarray) -> "IntersectionGraph":
        both_u = np.concatenate([us, vs])
        both_v = np.concatenate([vs, us])
        order = np.lexsort((both_v, both_u))
        both_u, both_v = both_u[order], both_v[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, both_u + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n=n, indptr=indptr, indices=both_v.astype(np.int64))

    @classmethod
    def from_edges(cls, n: int, edges) -> "IntersectionGraph":
        """Build from an iterable of (u, v) pairs; convenient for fixtures."""
        pairs = {(min(u, v), max(u, v)) for u, v in edges if u != v}
        if pairs:
            arr = np.array(sorted(pairs), dtype=np.int64)
            us, vs = arr[:, 0], arr[:, 1]
        else:
            us = vs = np.empty(0, dtype=np.int64)
        if us.size and (us.min() < 0 or vs.max() >= n):
            raise ValidationError("edge endpoint out of range")
        return cls.from_edge_arrays(n, us, vs)


def _pairwise_edges(instance: Instance, eps: float) -> tuple[np.ndarray, np.ndarray]:
    centers, radii = instance.centers, instance.radii
    n = instance.n
    us_parts, vs_parts = [], []
    is_ball = instance.kind is BodyKind.BALL
    block = max(1, int(2**22 // max(n, 1)))
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        diff = centers[i0:i1, None, :] - centers[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        rsum2 = (radii[i0:i1, None] + radii[None, :]) ** 2
        if is_ball:
            hit = d2 <= rsum2 + eps
        else:
            rdiff2 = (radii[i0:i1, None] - radii[None, :]) ** 2
            hit = (d2 >= rdiff2 - eps) & (d2 <= rsum2 + eps)
        # keep the upper triangle only
        cols = np.arange(n)[None, :]
        rows = np.arange(i0, i1)[:, None]
        hit &= cols > rows
        u, v = np.nonzero(hit)
        us_parts.append(u + i0)
        vs_parts.append(v)
    us = np.concatenate(us_parts) if us_parts else np.empty(0, dtype=np.int64)
    vs = np.concatenate(vs_parts) if vs_parts else np.empty(0, dtype=np.int64)
    return us.astype(np.int64), vs.astype(np.int64)


def _bucketed_edges(instance: Instance, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Uniform-grid candidate generation for ball instances.

    Cell side 2*max_radius guarantees intersecting pairs land in the same
    or adjacent cells, so checking the 3^d neighborhood loses nothing.
    """
    centers, radii = instance.centers, instance.radii
    d = instance.dimension
    side = 2.0 * float(radii.max())
    cells = np.floor(centers / side).astype(np.int64)
    buckets: dict[tuple, np.ndarray] = {}
    order = np.lexsort(cells.T[::-1])
    sorted_cells = cells[order]
    change = np.any(np.diff(sorted_cells, axis=0) != 0, axis=1)
    starts = np.concatenate([[0], np.where(change)[0] + 1, [len(order)]])
    for a, b in zip(starts[:-1], starts[1:]):
        buckets[tuple(sorted_cells[a])] = order[a:b]
    offsets = np.stack(np.meshgrid(*([np.array([-1, 0, 1])] * d), indexing="ij"), axis=-1).reshape(-1, d)
    us_parts, vs_parts = [], []
    for cell, members in buckets.items():
        cand_parts = []
        for off in offsets:
            other = buckets.get(tuple(np.asarray(cell) + off))
            if other is not None:
                cand_parts.append(other)
        cand = np.concatenate(cand_parts)
        for i in members:
            js = cand[cand > i]
            if js.size == 0:
                continue
            diff = centers[js] - centers[i]
            d2 = np.einsum("ij,ij->i", diff, diff)
            hit = d2 <= (radii[js] + radii[i]) ** 2 + eps
            vs_parts.append(js[hit])
            us_parts.append(np.full(int(hit.sum()), i, dtype=np.int64))
    us = np.concatenate(us_parts) if us_parts else np.empty(0, dtype=np.int64)
    vs = np.concatenate(vs_parts) if vs_parts else np.empty(0, dtype=np.int64)
    return us, vs


def build_graph(instance: Instance, eps: float = 0.0, method: str = "auto") -> IntersectionGraph:
    """Edge {i,j} iff the bodies intersect (ball or sphere predicate by kind)."""
    if method == "auto":
        method = "bucket" if instance.kind is BodyKind.BALL and instance.n > 2048 else "pairwise"
    if method == "pairwise":
        us, vs = _pairwise_edges(instance, eps)
    elif method == "bucket":
        if instance.kind is not BodyKind.BALL:
            raise ValidationError("bucketed construction supports ball instances only")
        us, vs = _bucketed_edges(instance, eps)
    else:
        raise ValidationError(f"unknown build method {method!r}")
    return IntersectionGraph.from_edge_arrays(instance.n, us, vs)


def _as_removed_mask(graph: IntersectionGraph, removed) -> np.ndarray:
    mask = np.zeros(graph.n, dtype=bool)
    if removed is not None:
        idx = np.asarray(list(removed) if isinstance(removed, set) else removed, dtype=np.int64)
        if idx.size:
            if idx.min() < 0 or idx.max() >= graph.n:
                raise ValidationError("removed vertex out of range")
            mask[idx] = True
    return mask


def components(graph: IntersectionGraph, removed=None) -> list[np.ndarray]:
    """Connected components of G minus the removed set, ordered by minimum index."""
    visited = _as_removed_mask(graph, removed)
    indptr, indices = graph.indptr, graph.indices
    out: list[np.ndarray] = []
    for start in range(graph.n):
        if visited[start]:
            continue
        visited[start] = True
        frontier = np.array([start], dtype=np.int64)
        comp = [frontier]
        while frontier.size:
            starts = indptr[frontier]
            counts = indptr[frontier + 1] - starts
            total = int(counts.sum())
            if total == 0:
                break
            offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
            flat_idx = np.arange(total) - np.repeat(offsets, counts) + np.repeat(starts, counts)
            nxt = np.unique(indices[flat_idx])
            nxt = nxt[~visited[nxt]]
            visited[nxt] = True
            if nxt.size:
                comp.append(nxt)
            frontier = nxt
        out.append(np.sort(np.concatenate(comp)))
    return out


def component_sizes(graph: IntersectionGraph, removed=None) -> list[int]:
    return [int(c.size) for c in components(graph, removed)]


def induced(graph: IntersectionGraph, keep) -> tuple[IntersectionGraph, np.ndarray]:
    """Subgraph on ``keep`` plus the new->old index map (sorted ascending)."""
    keep_idx = np.unique(np.asarray(list(keep) if isinstance(keep, set) else keep, dtype=np.int64))
    if keep_idx.size and (keep_idx.min() < 0 or keep_idx.max() >= graph.n):
        raise ValidationError("keep vertex out of range")
    old_to_new = np.full(graph.n, -1, dtype=np.int64)
    old_to_new[keep_idx] = np.arange(keep_idx.size)
    rows = []
    indptr = np.zeros(keep_idx.size + 1, dtype=np.int64)
    for new_i, old_i in enumerate(keep_idx):
        nbrs = old_to_new[graph.neighbors(old_i)]
        nbrs = np.sort(nbrs[nbrs >= 0])
        rows.append(nbrs)
        indptr[new_i + 1] = indptr[new_i] + nbrs.size
    indices = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    return IntersectionGraph(n=keep_idx.size, indptr=indptr, indices=indices), keep_idx


def degeneracy(graph: IntersectionGraph) -> int:
    """Exact degeneracy by iterative minimum-degree peeling."""
    n = graph.n
    if n == 0:
        return 0
    deg = graph.degrees.astype(np.int64)
    max_deg = int(deg.max()) if n else 0
    buckets: list[list[int]] = [[] for _ in range(max_deg + 1)]
    for v in range(n):
        buckets[int(deg[v])].append(v)
    removed = np.zeros(n, dtype=bool)
    best = 0
    cur = 0
    for _ in range(n):
        v = -1
        while v < 0:
            while not buckets[cur]:
                cur += 1
            cand = buckets[cur].pop()
            if not removed[cand] and deg[cand] == cur:
                v = cand
        best = max(best, cur)
        removed[v] = True
        for u in graph.neighbors(v):
            if not removed[u]:
                deg[u] -= 1
                buckets[int(deg[u])].append(int(u))
                if deg[u] < cur:
                    cur = int(deg[u])
    return best


def write_edge_list(graph: IntersectionGraph, path: str | Path) -> None:
    """Text export: one 'i j' line per edge, zero-based, i < j, sorted."""
    lines = [f"{u} {v}" for u, v in graph.edges()]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
