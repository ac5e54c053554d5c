"""Randomized separators for ball intersection graphs.

One round picks an anchor ball that holds a prescribed fraction of the
centers, draws a cut sphere whose radius is uniform in [anchor, 2*anchor],
and removes every ball that crosses it. Balls strictly inside and strictly
outside the cut can never touch, so the crossing set separates them; the
anchor guarantees both sides keep at least a dimension-dependent fraction
of the vertices.

Two anchor modes exist: ``exact`` scans all n candidate centers with
fraction 5^-d, ``sampled`` draws ceil(SAMPLE_MULT * 9^d) candidates with
fraction 9^-d, which keeps the whole round linear in n. Both are
center-anchored 2-approximations of the true smallest ball: for any center
p inside the optimal ball, doubling the optimal radius around p covers it.

Randomness: all draws come from Philox keyed by (seed, round*1024 + attempt),
so runs are reproducible and each retry is an independent substream.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .balancing import (
    RoundOutcome,
    SeparatorResult,
    allowed_component_size,
    balance_loop,
    failure_result,
)
from .constants import Constants
from .errors import (
    InternalConsistencyError,
    SeparatorFailure,
    ValidationError,
)
from .geometry import BodyKind, ball_cut_masks
from .graph import IntersectionGraph, build_graph, components
from .instances import Instance, keyed_rng
from .verify import bounds

DEFAULT_RETRY_BUDGET = 16
_ATTEMPT_STRIDE = 1024  # substream id = round * stride + attempt


class Anchor(NamedTuple):
    center: np.ndarray
    radius: float
    index: int


def _count_for_fraction(fraction: float, n: int) -> int:
    if not 0.0 < fraction <= 1.0:
        raise ValidationError(f"fraction must lie in (0,1], got {fraction}")
    k = math.ceil(fraction * n - 1e-12)
    return max(k, 1)


def _kth_distances(centers: np.ndarray, anchors: np.ndarray, k: int) -> np.ndarray:
    """For each anchor row, the k-th smallest distance to all centers (self included)."""
    out = np.empty(len(anchors))
    block = max(1, int(2**22 // max(len(centers), 1)))
    for i0 in range(0, len(anchors), block):
        i1 = min(i0 + block, len(anchors))
        diff = anchors[i0:i1, None, :] - centers[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        if k == 1:
            kth = d2.min(axis=1)
        else:
            kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
        out[i0:i1] = np.sqrt(kth)
    return out


def anchor_exact_count(centers: np.ndarray, k: int) -> Anchor:
    """Center-anchored ball holding k centers, scanning every center as anchor."""
    if len(centers) < 1:
        raise ValidationError("empty center set")
    if not 1 <= k <= len(centers):
        raise ValidationError(f"k={k} outside [1, {len(centers)}]")
    radii = _kth_distances(centers, centers, k)
    best = int(np.argmin(radii))
    return Anchor(centers[best].copy(), float(radii[best]), best)


def anchor_exact(instance: Instance, fraction: float) -> Anchor:
    """Best center-anchored ball holding ceil(fraction*n) centers, scanning all anchors.

    The returned radius is at most twice the optimal smallest-ball radius.
    Ties break toward the lowest center index.
    """
    if instance.n < 1:
        raise ValidationError("empty instance")
    k = _count_for_fraction(fraction, instance.n)
    return anchor_exact_count(instance.centers, k)


def anchor_sampled(
    instance: Instance, fraction: float, sample_count: int, rng: np.random.Generator
) -> Anchor:
    """Same contract as anchor_exact restricted to sampled candidate anchors.

    Sampling is uniform with replacement; with the optimal ball holding a
    ceil(fraction*n) fraction of centers, some sample lands inside it with
    probability at least 1 - (1 - fraction)^sample_count, and any such hit
    yields a 2-approximate radius. Falls back to the exhaustive scan when
    the sample count reaches n.
    """
    n = instance.n
    if sample_count >= n:
        return anchor_exact(instance, fraction)
    k = _count_for_fraction(fraction, n)
    picks = rng.integers(0, n, size=sample_count)
    radii = _kth_distances(instance.centers, instance.centers[picks], k)
    best = int(np.argmin(radii))
    return Anchor(instance.centers[picks[best]].copy(), float(radii[best]), int(picks[best]))


def radial_cut_round(
    instance: Instance,
    graph: IntersectionGraph,
    anchor: Anchor,
    fraction: float,
    rng: np.random.Generator,
    eps: float = 0.0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """One random radial cut: (crossing set, inside set, outside set, cut radius).

    The cut radius is uniform in [anchor.radius, 2*anchor.radius]. A
    degenerate zero-radius anchor means at least ceil(fraction*n) centers
    coincide with the anchor point (a clique), and gets a clique-aware
    fallback: a tiny cut that every co-centered ball either crosses or
    contains.
    """
    if anchor.radius > 0.0:
        cut_radius = float(rng.uniform(anchor.radius, 2.0 * anchor.radius))
    else:
        cut_radius = _degenerate_cut_radius(instance, anchor, fraction, rng)
    cross, inside, outside = ball_cut_masks(
        instance.centers, instance.radii, anchor.center, cut_radius, eps
    )
    x = np.where(cross)[0]
    ins = np.where(inside)[0]
    outs = np.where(outside)[0]
    _assert_no_cross_edges(graph, inside, outside)
    return x, ins, outs, cut_radius


def _degenerate_cut_radius(
    instance: Instance, anchor: Anchor, fraction: float, rng: np.random.Generator
) -> float:
    d2 = np.einsum(
        "ij,ij->i", instance.centers - anchor.center, instance.centers - anchor.center
    )
    at_anchor = d2 <= 0.0
    positive = d2[~at_anchor]
    cap = math.sqrt(float(positive.min())) / 2.0 if positive.size else math.inf
    # force at least ceil(fraction*n) co-centered balls to cross the cut
    co_radii = np.sort(instance.radii[at_anchor])[::-1]
    k = min(_count_for_fraction(fraction, instance.n), co_radii.size)
    cap = min(cap, float(co_radii[k - 1]))
    return float(rng.uniform(0.0, cap))


def _assert_no_cross_edges(
    graph: IntersectionGraph, inside: np.ndarray, outside: np.ndarray
) -> None:
    """No edge may join the strict inside to the strict outside of a cut."""
    side = np.zeros(graph.n, dtype=np.int8)
    side[inside] = 1
    side[outside] = 2
    u = np.repeat(np.arange(graph.n), np.diff(graph.indptr))
    bad = (side[u] == 1) & (side[graph.indices] == 2)
    if bad.any():
        raise InternalConsistencyError("a cut produced an edge joining inside to outside")


def separate_balls(
    instance: Instance,
    mode: str = "sampled",
    seed: int = 0,
    retry_budget: int = DEFAULT_RETRY_BUDGET,
    eps: float = 0.0,
    graph: IntersectionGraph | None = None,
    constants: Constants | None = None,
    trace: bool = False,
) -> SeparatorResult:
    """Full ball pipeline: balancing loop over radial cut rounds.

    Every accepted round is re-verified for balance; a round that cannot
    produce a balanced cut within the retry budget yields an explicit
    failure result, never an invalid separator.
    """
    if instance.kind is not BodyKind.BALL:
        raise ValidationError("separate_balls requires a ball instance")
    if mode not in ("exact", "sampled"):
        raise ValidationError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    d = instance.dimension
    consts = constants or Constants(d)
    fraction = 5.0**-d if mode == "exact" else 9.0**-d
    c = 1.0 - fraction
    if graph is None:
        graph = build_graph(instance, eps=eps)
    covering_limit = 8.0**d

    def round_fn(keep: np.ndarray, subgraph: IntersectionGraph, round_index: int) -> RoundOutcome:
        sub = instance.subinstance(keep)
        limit = allowed_component_size(c, sub.n)
        exact_anchor = anchor_exact(sub, fraction) if mode == "exact" else None
        for attempt in range(max(retry_budget, 1)):
            rng = keyed_rng(seed, round_index * _ATTEMPT_STRIDE + attempt)
            if mode == "exact":
                anchor = exact_anchor
            else:
                anchor = anchor_sampled(sub, fraction, consts.sample_count, rng)
            x, ins, outs, cut_radius = radial_cut_round(sub, subgraph, anchor, fraction, rng, eps)
            sizes = [comp.size for comp in components(subgraph, x)]
            if not sizes or max(sizes) <= limit:
                covering_ok = True
                if anchor.radius > 0.0:
                    within = np.einsum(
                        "ij,ij->i", sub.centers - anchor.center, sub.centers - anchor.center
                    ) <= (2.0 * anchor.radius) ** 2 + eps
                    cover_cap = covering_limit * _count_for_fraction(fraction, sub.n)
                    covering_ok = bool(within.sum() <= cover_cap)
                round_trace = None
                if trace:
                    round_trace = {
                        "round": round_index,
                        "cut_center": [float(v) for v in anchor.center],
                        "cut_radius": cut_radius,
                        "covering_ok": covering_ok,
                        "separator_size": int(x.size),
                    }
                return RoundOutcome(
                    separator=x,
                    stages={"radial_cut": x},
                    retries=attempt,
                    trace=round_trace,
                    diagnostics={"covering_violations": 0 if covering_ok else 1},
                )
        raise SeparatorFailure(
            f"no balanced radial cut within {retry_budget} attempts",
            round_index=round_index,
            retries=retry_budget,
        )

    try:
        result = balance_loop(graph, round_fn, c)
    except SeparatorFailure as exc:
        result = failure_result(exc, seed, f"ball-{mode}")
        result.bounds = bounds(graph, d, achieved=0).to_json_dict()
        return result
    result.seed = seed
    result.mode = f"ball-{mode}"
    result.bounds = bounds(graph, d, achieved=len(result.separator)).to_json_dict()
    return result
