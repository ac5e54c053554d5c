"""The balancing iteration shared by the ball and sphere pipelines.

A round function produces a c-balanced separator of the largest remaining
component; iterating it drives every component below 2/3 of the original
vertex count within ceil(log_c(2/3)) rounds. Only the largest component is
ever re-cut: the second-largest piece of any round already has at most half
of that round's vertices, which is at most 2/3 of the whole graph.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constants import round_cap
from .errors import InternalConsistencyError, SeparatorFailure
from .graph import IntersectionGraph, components, induced

BALANCE_SLACK = 1e-9  # absolute slack when flooring c*n, guards float dust


def allowed_component_size(c: float, n: int) -> int:
    return int(math.floor(c * n + BALANCE_SLACK))


@dataclass
class RoundOutcome:
    """What one round produced, in the round's local vertex indexing."""

    separator: np.ndarray
    stages: dict[str, np.ndarray] = field(default_factory=dict)
    retries: int = 0
    trivial: bool = False
    trace: dict | None = None
    diagnostics: dict = field(default_factory=dict)  # counter name -> increment


@dataclass
class SeparatorResult:
    success: bool
    separator: list[int]
    component_sizes: list[int]
    rounds: int
    provenance: list[tuple[int, str, int]]
    seed: int = 0
    retries: int = 0
    achieved_balance: float = 0.0
    mode: str = ""
    trivial: bool = False
    failure_reason: str | None = None
    bounds: dict | None = None
    trace: list[dict] | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        doc = {
            "success": self.success,
            "separator": self.separator,
            "component_sizes": self.component_sizes,
            "rounds": self.rounds,
            "provenance": [[int(v), s, int(r)] for v, s, r in self.provenance],
            "seed": int(self.seed),
            "retries": int(self.retries),
            "achieved_balance": self.achieved_balance,
            "mode": self.mode,
            "trivial": self.trivial,
            "bounds": self.bounds,
        }
        if self.failure_reason is not None:
            doc["failure_reason"] = self.failure_reason
        if self.trace is not None:
            doc["trace"] = self.trace
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True) + "\n"


RoundFn = Callable[[np.ndarray, IntersectionGraph, int], RoundOutcome]


def balance_loop(graph: IntersectionGraph, round_fn: RoundFn, c: float) -> SeparatorResult:
    """Iterate a c-balanced round function until every component has <= 2n/3 vertices.

    The round function receives (global vertex ids of the largest component,
    the induced subgraph, the round index) and must return a separator that
    is c-balanced for that subgraph; a violation is a bug trap, not a
    recoverable state. Balance is re-checked here regardless of what the
    round function claims.
    """
    n = graph.n
    if n <= 1:
        # vacuous instance: a single body is its own component
        return SeparatorResult(
            success=True,
            separator=[],
            component_sizes=[1] * n,
            rounds=0,
            provenance=[],
            achieved_balance=1.0 if n == 1 else 0.0,
        )
    cap = round_cap(c)
    target = allowed_component_size(2.0 / 3.0, n)
    removed: list[np.ndarray] = []
    provenance: list[tuple[int, str, int]] = []
    retries = 0
    trivial = False
    traces: list[dict] = []
    diagnostics: dict = {}
    rounds = 0
    while True:
        comps = components(graph, np.concatenate(removed) if removed else None)
        sizes = [c_.size for c_ in comps]
        largest = max(comps, key=lambda c_: c_.size) if comps else np.empty(0, dtype=np.int64)
        if largest.size <= target:
            break
        if rounds >= cap:
            raise InternalConsistencyError(
                f"balancing exceeded its {cap}-round cap; a round was not {c}-balanced"
            )
        subgraph, keep = induced(graph, largest)
        try:
            outcome = round_fn(keep, subgraph, rounds)
        except SeparatorFailure as exc:
            exc.round_index = rounds
            raise
        local_sep = np.asarray(outcome.separator, dtype=np.int64)
        limit = allowed_component_size(c, keep.size)
        sub_sizes = [c_.size for c_ in components(subgraph, local_sep)]
        if sub_sizes and max(sub_sizes) > limit:
            raise InternalConsistencyError(
                f"round {rounds} returned a separator that is not {c}-balanced: "
                f"largest {max(sub_sizes)} > {limit} of {keep.size}"
            )
        global_sep = keep[local_sep]
        removed.append(global_sep)
        stage_of = {}
        for stage, members in outcome.stages.items():
            for v in np.asarray(members, dtype=np.int64):
                stage_of[int(keep[v])] = stage
        for v in global_sep:
            provenance.append((int(v), stage_of.get(int(v), "unknown"), rounds))
        retries += outcome.retries
        trivial = trivial or outcome.trivial
        if outcome.trace is not None:
            traces.append(outcome.trace)
        for key, inc in outcome.diagnostics.items():
            diagnostics[key] = diagnostics.get(key, 0) + inc
        rounds += 1
    separator = np.sort(np.concatenate(removed)) if removed else np.empty(0, dtype=np.int64)
    final_sizes = sorted((c_.size for c_ in comps), reverse=True)
    achieved = (final_sizes[0] / n) if final_sizes else 0.0
    return SeparatorResult(
        success=True,
        separator=[int(v) for v in separator],
        component_sizes=[int(s) for s in final_sizes],
        rounds=rounds,
        provenance=sorted(provenance),
        retries=retries,
        achieved_balance=achieved,
        trivial=trivial,
        trace=traces or None,
        diagnostics=diagnostics,
    )


def failure_result(exc: SeparatorFailure, seed: int, mode: str) -> SeparatorResult:
    return SeparatorResult(
        success=False,
        separator=[],
        component_sizes=[],
        rounds=max(exc.round_index, 0),
        provenance=[],
        seed=seed,
        retries=exc.retries,
        achieved_balance=1.0,
        mode=mode,
        failure_reason=str(exc),
    )
