"""Validation, bound evaluation, and brute-force oracles.

Everything here is deliberately independent of the separator pipelines so
it can serve as their oracle: balance checking walks the graph directly,
the minimum-separator search enumerates subsets, and the bound formulas
are evaluated from degree sequences alone.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .balancing import allowed_component_size
from .errors import ValidationError
from .graph import IntersectionGraph, components


@dataclass
class BoundReport:
    """Evaluated separator-size bounds next to the achieved size."""

    n: int
    m: int
    d: int
    degree_sum_bound: float  # (sum deg^(1/(d-1)))^(1-1/d)
    edge_bound: float  # m^(1/d) * n^(1-2/d)
    ktt_bound: float | None  # t^(1/d) * n^(1-1/d), when t given
    achieved: int
    ratios: dict

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "d": self.d,
            "degree_sum_bound": self.degree_sum_bound,
            "edge_bound": self.edge_bound,
            "ktt_bound": self.ktt_bound,
            "achieved": self.achieved,
            "ratios": self.ratios,
        }


def check_balanced(graph: IntersectionGraph, separator, c: float = 2.0 / 3.0) -> tuple[bool, int]:
    """Is every component of G minus the separator at most c*|V|? Returns (ok, largest)."""
    sizes = [comp.size for comp in components(graph, separator)]
    largest = max(sizes) if sizes else 0
    return largest <= allowed_component_size(c, graph.n), largest


def bounds(graph: IntersectionGraph, d: int, achieved: int, t: int | None = None) -> BoundReport:
    """Evaluate the size-bound formulas for the graph's degree sequence."""
    if d < 2:
        raise ValidationError("d must be at least 2")
    n, m = graph.n, graph.m
    deg = graph.degrees.astype(np.float64)
    degree_sum_bound = float(np.sum(deg ** (1.0 / (d - 1))) ** (1.0 - 1.0 / d))
    edge_bound = float(m ** (1.0 / d) * n ** (1.0 - 2.0 / d))
    ktt = float(t ** (1.0 / d) * n ** (1.0 - 1.0 / d)) if t is not None else None
    ratios = {
        "degree_sum": achieved / degree_sum_bound if degree_sum_bound > 0 else None,
        "edge": achieved / edge_bound if edge_bound > 0 else None,
    }
    if ktt is not None:
        ratios["ktt"] = achieved / ktt if ktt > 0 else None
    return BoundReport(
        n=n,
        m=m,
        d=d,
        degree_sum_bound=degree_sum_bound,
        edge_bound=edge_bound,
        ktt_bound=ktt,
        achieved=achieved,
        ratios=ratios,
    )


def holder_chain_holds(report: BoundReport, slack: float = 1e-9) -> bool:
    """degree_sum_bound <= 2^(1/d) * edge_bound, the Hoelder step made numeric."""
    return report.degree_sum_bound <= 2.0 ** (1.0 / report.d) * report.edge_bound + slack


BRUTE_FORCE_LIMIT = 20


def brute_force_min_separator(
    graph: IntersectionGraph, c: float = 2.0 / 3.0
) -> tuple[int, list[int]]:
    """Minimum-cardinality c-balanced separator by subset enumeration.

    Deterministic: subsets are tried in lexicographic order within each
    size, so the first witness found is the lexicographically smallest.
    """
    n = graph.n
    if n > BRUTE_FORCE_LIMIT:
        raise ValidationError(f"brute force refuses n={n} > {BRUTE_FORCE_LIMIT}")
    adj_bits = [0] * n
    for u, v in graph.edges():
        adj_bits[u] |= 1 << v
        adj_bits[v] |= 1 << u
    allowed = allowed_component_size(c, n)
    full = (1 << n) - 1

    def balanced(removed_bits: int) -> bool:
        left = full & ~removed_bits
        while left:
            seed_bit = left & -left
            comp = seed_bit
            frontier = seed_bit
            while frontier:
                nxt = 0
                f = frontier
                while f:
                    b = f & -f
                    f ^= b
                    nxt |= adj_bits[b.bit_length() - 1]
                nxt &= left & ~comp
                comp |= nxt
                frontier = nxt
            if comp.bit_count() > allowed:
                return False
            left &= ~comp
        return True

    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            bits = 0
            for v in combo:
                bits |= 1 << v
            if balanced(bits):
                return size, list(combo)
    raise ValidationError("unreachable: removing all vertices is always balanced")


def scaling_fit(points: list[tuple[float, float]]) -> float:
    """Least-squares slope of log(size) against log(n)."""
    if len(points) < 3:
        raise ValidationError("need at least 3 data points")
    ns = np.array([p[0] for p in points], dtype=np.float64)
    sizes = np.array([p[1] for p in points], dtype=np.float64)
    if np.any(np.diff(ns) <= 0):
        raise ValidationError("n values must be strictly increasing")
    if np.any(sizes <= 0) or np.any(ns <= 0):
        raise ValidationError("degenerate input: sizes and n must be positive")
    slope, _ = np.polyfit(np.log(ns), np.log(sizes), 1)
    return float(slope)
