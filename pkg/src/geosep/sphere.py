"""Randomized separators for sphere intersection graphs.

Nesting makes ply useless for spheres, so one round of this pipeline works
in four stages, each spending at most a quarter of the budget
Sigma = C_d * (sum deg^(1/(d-1)))^(1-1/d):

  1. remove the floor(Sigma/4) highest-degree spheres;
  2. localize: find a minimal-radius sphere holding many centers; if it is
     deeply nested inside many others, split by the containment-order
     median (nested_separator), otherwise cut its neighborhood away and
     recurse into its interior;
  3. draw a random cut sphere around a dense inner ball and discard
     crossing spheres whose cap on the cut sphere is small relative to
     their degree;
  4. greedily pack maximal-radius crossing spheres; their bounded balls
     are pairwise disjoint, which caps the neighborhoods spent in this
     stage through a cap-area volume argument.

Per-stage budget checks are hard assertions: they are theorems for the
constants in use, so a violation means mis-derived constants, not bad
luck. Only the stage-3 cut size is enforced by resampling. Rounds whose
budget Sigma already reaches n return the whole component, flagged
trivial; with the conservative constants this happens for any instance
that is not extremely sparse.
"""

from __future__ import annotations

import math

import numpy as np

from .balancing import (
    RoundOutcome,
    SeparatorResult,
    allowed_component_size,
    balance_loop,
    failure_result,
)
from .ball import _ATTEMPT_STRIDE, anchor_exact_count
from .constants import Constants
from .errors import (
    InternalConsistencyError,
    SeparatorFailure,
    ValidationError,
)
from .geometry import (
    BodyKind,
    cap_radii,
    contains_point_strict_mask,
    sphere_cross_mask,
    sphere_in_closed_ball_mask,
    sphere_touches_closed_ball_mask,
    surrounds_sphere_strict_mask,
)
from .graph import IntersectionGraph, build_graph, components, induced
from .instances import Instance, keyed_rng
from .verify import bounds

DEFAULT_RETRY_BUDGET = 16
_BUDGET_SLACK = 1e-9


def nested_separator(
    instance: Instance, graph: IntersectionGraph, p, s: int, eps: float = 0.0
) -> np.ndarray:
    """Split a family of spheres nested around p by its containment median.

    Requires at least 2s spheres containing p strictly in their interior.
    Any two such spheres intersect or nest, so sorting them by radius
    (ties by index) is a linear extension of the containment order. The
    returned separator is the neighborhood of the median sphere; removing
    it leaves every component with at most n - s vertices.
    """
    if instance.kind is not BodyKind.SPHERE:
        raise ValidationError("nested_separator requires a sphere instance")
    if s < 1:
        raise ValidationError("s must be at least 1")
    p = np.asarray(p, dtype=np.float64)
    holders = np.where(contains_point_strict_mask(instance.centers, instance.radii, p, eps))[0]
    if holders.size < 2 * s:
        raise ValidationError(
            f"only {holders.size} spheres contain the point strictly, need {2 * s}"
        )
    order = np.lexsort((holders, instance.radii[holders]))
    median = int(holders[order[holders.size // 2]])
    return np.sort(graph.neighbors(median)).astype(np.int64)


def trim_high_degree(
    graph: IntersectionGraph, sigma: float, constants: Constants, enforce: bool = True
) -> tuple[np.ndarray, int]:
    """Stage 1: remove the floor(sigma/4) highest-degree vertices (ties by index).

    Returns (removed set, max degree of the remaining induced graph). When
    sigma came from the budget formula and sigma < n, the remaining max
    degree provably stays below both sigma/4 and c_d*n; with ``enforce``
    these are checked and a violation raises InternalConsistencyError.
    """
    n = graph.n
    count = min(int(math.floor(sigma / 4.0 + _BUDGET_SLACK)), n)
    order = np.argsort(-graph.degrees, kind="stable")
    x1 = np.sort(order[:count])
    rest = np.sort(order[count:])
    if rest.size:
        sub, _ = induced(graph, rest)
        delta = int(sub.degrees.max()) if sub.n else 0
    else:
        delta = 0
    if enforce and sigma < n:
        if delta > sigma / 4.0 + _BUDGET_SLACK:
            raise InternalConsistencyError(
                f"max degree {delta} after trim exceeds sigma/4 = {sigma / 4.0}"
            )
        if delta > constants.c_d * n + _BUDGET_SLACK:
            raise InternalConsistencyError(
                f"max degree {delta} after trim exceeds c_d*n = {constants.c_d * n}"
            )
    return x1, delta


def select_small_cap_crossers(
    centers: np.ndarray,
    radii: np.ndarray,
    degrees: np.ndarray,
    cut_center: np.ndarray,
    cut_radius: float,
    inner_radius: float,
    sigma: float,
    constants: Constants,
    eps: float = 0.0,
) -> np.ndarray:
    """Stage 3 membership mask: crossing spheres whose cap is small for their degree.

    A sphere joins the discard set when it crosses the cut sphere and the
    cap it carves is at most Cp_d * R * (deg/sigma)^(1/(d-1)). Isolated
    spheres never join: they cannot disconnect anything, and the zero
    threshold would only admit exact tangencies.
    """
    d = centers.shape[1]
    crossing = sphere_cross_mask(centers, radii, cut_center, cut_radius, eps)
    caps = np.zeros(len(radii))
    caps[crossing] = cap_radii(centers[crossing], radii[crossing], cut_center, cut_radius)
    deg = np.asarray(degrees, dtype=np.float64)
    thresholds = constants.Cp_d * inner_radius * (deg / sigma) ** (1.0 / (d - 1))
    return crossing & (deg >= 1.0) & (caps <= thresholds)


def classify_residual_component(
    instance: Instance,
    members: np.ndarray,
    packing: list[int],
    cut_center: np.ndarray,
    cut_radius: float,
    eps: float = 0.0,
) -> str:
    """Bucket a surviving component: inside a packed ball, inside the cut, or outside."""
    c = instance.centers[members]
    r = instance.radii[members]
    for p in packing:
        if sphere_in_closed_ball_mask(c, r, instance.centers[p], float(instance.radii[p]), eps).all():
            return "inside_packing"
    d2 = np.einsum("ij,ij->i", c - cut_center, c - cut_center)
    dist = np.sqrt(d2)
    if bool(np.all(dist + r < cut_radius)):
        return "inside_cut"
    if bool(np.all(dist - r > cut_radius)):
        return "outside"
    return "mixed"


def _strict_inside_counts(centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """counts[i] = number of the given centers strictly inside sphere i (self included)."""
    n = len(centers)
    out = np.empty(n, dtype=np.int64)
    block = max(1, int(2**22 // max(n, 1)))
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        diff = centers[i0:i1, None, :] - centers[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        out[i0:i1] = (d2 < radii[i0:i1, None] ** 2).sum(axis=1)
    return out


def pack_disjoint(
    centers: np.ndarray,
    radii: np.ndarray,
    graph: IntersectionGraph,
    cut_center: np.ndarray,
    cut_radius: float,
    eps: float = 0.0,
) -> tuple[list[int], np.ndarray]:
    """Stage 4: greedy maximal-radius packing of spheres crossing the cut.

    Repeatedly takes the largest remaining sphere crossing the cut (ties by
    index), charges its whole neighborhood, and drops every sphere touching
    its bounded ball. Returns (packing order, union of charged
    neighborhoods). The bounded balls of the packing are pairwise disjoint,
    which is assert-checked.
    """
    n = len(centers)
    alive = np.ones(n, dtype=bool)
    crossing = sphere_cross_mask(centers, radii, cut_center, cut_radius, eps)
    packing: list[int] = []
    charged = np.zeros(n, dtype=bool)
    while True:
        cand = np.where(alive & crossing)[0]
        if cand.size == 0:
            break
        pick = int(cand[np.lexsort((cand, -radii[cand]))[0]])
        packing.append(pick)
        charged[graph.neighbors(pick)] = True
        touched = sphere_touches_closed_ball_mask(
            centers, radii, centers[pick], float(radii[pick]), eps
        )
        alive &= ~touched
        if alive[pick]:
            raise InternalConsistencyError("packed sphere failed to remove itself")
    if len(packing) > 1:
        idx = np.array(packing)
        diff = centers[idx, None, :] - centers[None, idx, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        rsum2 = (radii[idx, None] + radii[None, idx]) ** 2
        bad = d2 <= rsum2 * (1.0 - 1e-12)
        np.fill_diagonal(bad, False)
        if bad.any():
            raise InternalConsistencyError("packing produced non-disjoint bounded balls")
    return packing, np.where(charged)[0].astype(np.int64)


def _sphere_round(
    sub: Instance,
    subgraph: IntersectionGraph,
    keep: np.ndarray,
    consts: Constants,
    seed: int,
    round_index: int,
    retry_budget: int,
    eps: float,
    want_trace: bool,
) -> RoundOutcome:
    n = sub.n
    d = sub.dimension
    all_ids = np.arange(n, dtype=np.int64)
    sigma = consts.sigma_budget(subgraph.degrees)
    limit = allowed_component_size(1.0 - consts.c_d, n)

    def make_trace(**kw) -> dict | None:
        if not want_trace:
            return None
        base = {"round": round_index, "sigma": sigma, "n": n}
        base.update(kw)
        return base

    if sigma >= n:
        return RoundOutcome(
            separator=all_ids,
            stages={"trivial": all_ids},
            trivial=True,
            trace=make_trace(trivial=True),
        )

    x1, delta = trim_high_degree(subgraph, sigma, consts)
    s1 = np.setdiff1d(all_ids, x1)
    g1, _ = induced(subgraph, s1)
    dense_count = math.ceil(4.0 * consts.c_d * n - 1e-12)
    lemma_s = math.ceil(consts.c_d * n - 1e-12)

    inside_counts = _strict_inside_counts(sub.centers[s1], sub.radii[s1])
    qualifying = np.where(inside_counts >= dense_count)[0]

    x2 = np.empty(0, dtype=np.int64)
    s2 = s1
    s0_global = None
    if qualifying.size:
        pick = qualifying[np.lexsort((qualifying, sub.radii[s1[qualifying]]))[0]]
        s0_local = int(pick)  # index into s1
        s0_global = int(s1[s0_local])
        surround = surrounds_sphere_strict_mask(
            sub.centers[s1], sub.radii[s1], sub.centers[s0_global], float(sub.radii[s0_global]), eps
        )
        if int(surround.sum()) >= 2 * lemma_s:
            nested = nested_separator(
                sub.subinstance(s1), g1, sub.centers[s0_global], lemma_s, eps
            )
            x_nested = s1[nested]
            sep = np.sort(np.concatenate([x1, x_nested]))
            return RoundOutcome(
                separator=sep,
                stages={"high_degree": x1, "nested": x_nested},
                trace=make_trace(
                    X1=[int(keep[v]) for v in x1],
                    nested=[int(keep[v]) for v in x_nested],
                    delta=delta,
                ),
            )
        x2_local = g1.neighbors(s0_local)
        if x2_local.size > delta:
            raise InternalConsistencyError("localizer neighborhood exceeds the degree cap")
        x2 = np.sort(s1[x2_local])
        in_closed = sphere_in_closed_ball_mask(
            sub.centers[s1], sub.radii[s1], sub.centers[s0_global], float(sub.radii[s0_global]), eps
        )
        s2_mask = in_closed.copy()
        s2_mask[x2_local] = False
        s2_mask[s0_local] = False
        s2 = s1[s2_mask]

    if s2.size < (1.0 - consts.c_d) * n or dense_count > s2.size:
        sep = np.sort(np.concatenate([x1, x2]))
        # the localization count argument has integer slop, so check balance
        # here and degrade gracefully instead of tripping the bug trap
        sizes = [c.size for c in components(subgraph, sep)]
        if sizes and max(sizes) > limit:
            raise SeparatorFailure(
                "localization cut missed balance by integer slop",
                round_index=round_index,
            )
        return RoundOutcome(
            separator=sep,
            stages={"high_degree": x1, "localize": x2},
            trace=make_trace(
                X1=[int(keep[v]) for v in x1],
                X2=[int(keep[v]) for v in x2],
                delta=delta,
                survivors=int(s2.size),
            ),
        )

    g2, _ = induced(subgraph, s2)
    deg2 = g2.degrees.astype(np.float64)
    inner = anchor_exact_count(sub.centers[s2], dense_count)
    big_r = inner.radius
    if big_r <= 0.0:
        raise SeparatorFailure(
            "degenerate inner ball: duplicated centers collapse the cut range",
            round_index=round_index,
        )
    for attempt in range(max(retry_budget, 1)):
        rng = keyed_rng(seed, round_index * _ATTEMPT_STRIDE + attempt)
        rho = float(rng.uniform(big_r, 2.0 * big_r))
        x3_mask = select_small_cap_crossers(
            sub.centers[s2], sub.radii[s2], deg2, inner.center, rho, big_r, sigma, consts, eps
        )
        if int(x3_mask.sum()) > sigma / 4.0 + _BUDGET_SLACK:
            continue
        x3 = s2[x3_mask]
        s3 = s2[~x3_mask]
        g3, _ = induced(subgraph, s3)
        packing_local, charged_local = pack_disjoint(
            sub.centers[s3], sub.radii[s3], g3, inner.center, rho, eps
        )
        x4 = s3[charged_local]
        packing = [int(s3[i]) for i in packing_local]
        if x4.size > sigma / 4.0 + _BUDGET_SLACK:
            raise InternalConsistencyError(
                f"stage-4 neighborhood charge {x4.size} exceeds sigma/4 = {sigma / 4.0}"
            )
        if packing:
            pk = np.array(packing, dtype=np.int64)
            pk_caps = cap_radii(sub.centers[pk], sub.radii[pk], inner.center, rho)
            area = consts.tau(d - 1) * float(np.sum(pk_caps ** (d - 1)))
            area_cap = consts.sigma(d) * (2.0 * big_r) ** (d - 1)
            if area > area_cap * (1.0 + 1e-9):
                raise InternalConsistencyError(
                    f"cap-area packing inequality violated: {area} > {area_cap}"
                )
        sep = np.sort(np.concatenate([x1, x2, x3, x4]))
        sizes = [c.size for c in components(subgraph, sep)]
        if sizes and max(sizes) > limit:
            continue
        return RoundOutcome(
            separator=sep,
            stages={"high_degree": x1, "localize": x2, "random_cut": x3, "packing": x4},
            retries=attempt,
            trace=make_trace(
                X1=[int(keep[v]) for v in x1],
                X2=[int(keep[v]) for v in x2],
                X3=[int(keep[v]) for v in x3],
                X4=[int(keep[v]) for v in x4],
                packing=[int(keep[v]) for v in packing],
                S_rand={"center": [float(v) for v in inner.center], "radius": rho},
                delta=delta,
                inner_radius=big_r,
            ),
        )
    raise SeparatorFailure(
        f"no acceptable random cut within {retry_budget} attempts",
        round_index=round_index,
        retries=retry_budget,
    )


def separate_spheres(
    instance: Instance,
    seed: int = 0,
    retry_budget: int = DEFAULT_RETRY_BUDGET,
    eps: float = 0.0,
    graph: IntersectionGraph | None = None,
    constants: Constants | None = None,
    trace: bool = False,
) -> SeparatorResult:
    """Full sphere pipeline: balancing loop over four-stage rounds.

    Every accepted round is re-verified to be (1 - c_d)-balanced; retry
    exhaustion yields an explicit failure result, never an invalid
    separator. A round whose budget already reaches the component size
    returns the whole component, flagged trivial.
    """
    if instance.kind is not BodyKind.SPHERE:
        raise ValidationError("separate_spheres requires a sphere instance")
    d = instance.dimension
    consts = constants or Constants(d)
    if graph is None:
        graph = build_graph(instance, eps=eps)
    c = 1.0 - consts.c_d

    def round_fn(keep: np.ndarray, subgraph: IntersectionGraph, round_index: int) -> RoundOutcome:
        sub = instance.subinstance(keep)
        return _sphere_round(
            sub, subgraph, keep, consts, seed, round_index, retry_budget, eps, trace
        )

    try:
        result = balance_loop(graph, round_fn, c)
    except SeparatorFailure as exc:
        result = failure_result(exc, seed, "sphere")
        result.bounds = bounds(graph, d, achieved=0).to_json_dict()
        return result
    result.seed = seed
    result.mode = "sphere"
    result.bounds = bounds(graph, d, achieved=len(result.separator)).to_json_dict()
    return result
