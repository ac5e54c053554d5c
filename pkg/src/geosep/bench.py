"""Measurement harnesses: success rates, runtime growth, and size scaling.

The CLI wraps these; the acceptance suite calls them directly. Trials are
sequential with per-trial derived seeds (seed + trial index) so tables are
reproducible apart from the wall-clock columns.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass

from .ball import separate_balls
from .constants import Constants
from .errors import SeparatorFailure
from .geometry import BodyKind
from .graph import build_graph
from .instances import Instance, gen_grid, gen_random
from .sphere import separate_spheres
from .verify import bounds

# radius giving roughly this expected degree keeps m = Theta(n)
DEFAULT_TARGET_DEGREE = 5.0


def radius_for_degree(n: int, d: int, box_side: float, target_degree: float) -> float:
    """Mean radius so a random instance in the box has about the target degree."""
    tau = Constants(max(d, 2)).tau(d)
    return box_side * (target_degree / max(n - 1, 1) / tau / 2.0**d) ** (1.0 / d)


def random_instance(n: int, d: int, kind: BodyKind, seed: int, target_degree: float = DEFAULT_TARGET_DEGREE) -> Instance:
    box = 10.0
    r = radius_for_degree(n, d, box, target_degree)
    return gen_random(n, d, (0.8 * r, 1.2 * r), box, kind, seed)


def run_separator(instance: Instance, algo: str, mode: str, seed: int, retry_budget: int, graph=None, trace: bool = False):
    if algo == "ball":
        return separate_balls(
            instance, mode=mode, seed=seed, retry_budget=retry_budget, graph=graph, trace=trace
        )
    if algo == "sphere":
        return separate_spheres(
            instance, seed=seed, retry_budget=retry_budget, graph=graph, trace=trace
        )
    raise ValueError(f"unknown algorithm {algo!r}")


@dataclass
class BenchRow:
    n: int
    trials: int
    successes: int
    median_build_s: float
    median_separate_s: float
    doubling_ratio: float | None

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0


def bench(
    algo: str,
    sizes: list[int],
    d: int = 2,
    trials: int = 5,
    seed: int = 0,
    mode: str = "sampled",
    retry_budget: int = 16,
    target_degree: float = DEFAULT_TARGET_DEGREE,
) -> list[BenchRow]:
    """Per-n median build/separate times and success fraction.

    For the ball pipeline the separate column excludes graph construction
    (the geometry-primitive phase is the near-linear part); the sphere
    pipeline is quadratic including its pairwise graph, so its separate
    column includes the build.
    """
    kind = BodyKind.BALL if algo == "ball" else BodyKind.SPHERE
    rows: list[BenchRow] = []
    prev_med: float | None = None
    for n in sizes:
        build_times, sep_times, successes = [], [], 0
        for t in range(trials):
            inst = random_instance(n, d, kind, seed + t, target_degree)
            t0 = time.perf_counter()
            g = build_graph(inst)
            t1 = time.perf_counter()
            result = run_separator(inst, algo, mode, seed + t, retry_budget, graph=g)
            t2 = time.perf_counter()
            build_times.append(t1 - t0)
            sep_times.append((t2 - t1) + ((t1 - t0) if algo == "sphere" else 0.0))
            successes += int(result.success)
        med = statistics.median(sep_times)
        rows.append(
            BenchRow(
                n=n,
                trials=trials,
                successes=successes,
                median_build_s=statistics.median(build_times),
                median_separate_s=med,
                doubling_ratio=(med / prev_med) if prev_med else None,
            )
        )
        prev_med = med
    return rows


def bench_csv(rows: list[BenchRow]) -> str:
    lines = ["n,trials,successes,success_rate,median_build_s,median_separate_s,doubling_ratio"]
    for r in rows:
        ratio = "" if r.doubling_ratio is None else f"{r.doubling_ratio:.4f}"
        lines.append(
            f"{r.n},{r.trials},{r.successes},{r.success_rate:.4f},"
            f"{r.median_build_s:.6f},{r.median_separate_s:.6f},{ratio}"
        )
    return "\n".join(lines) + "\n"


def success_rate(
    algo: str,
    n: int,
    d: int = 2,
    trials: int = 100,
    seed: int = 0,
    mode: str = "sampled",
    retry_budget: int = 1,
    target_degree: float = DEFAULT_TARGET_DEGREE,
) -> float:
    """Fraction of trials whose pipeline run succeeds, fresh instance per trial."""
    ok = 0
    for t in range(trials):
        inst = random_instance(n, d, BodyKind.BALL if algo == "ball" else BodyKind.SPHERE, seed + t, target_degree)
        result = run_separator(inst, algo, mode, seed + t, retry_budget)
        ok += int(result.success)
    return ok / trials if trials else 0.0


@dataclass
class ScalingRow:
    n: int
    median_size: float
    bound: float
    ratio: float


def grid_scaling(
    algo: str,
    sizes: list[int],
    d: int = 2,
    seeds: int = 20,
    seed0: int = 0,
    mode: str = "sampled",
    retry_budget: int = 16,
) -> tuple[list[ScalingRow], float]:
    """Median separator size on unit grids vs the m^(1/d) n^(1-2/d) bound.

    Grids use the edge target that realizes unit distance, so m = Theta(n).
    Returns the per-n rows and the fitted log-log slope of size vs n.
    """
    from .verify import scaling_fit

    kind = BodyKind.BALL if algo == "ball" else BodyKind.SPHERE
    rows: list[ScalingRow] = []
    for n in sizes:
        k = round(n ** (1.0 / d))
        m_unit = d * k ** (d - 1) * (k - 1)
        inst = gen_grid(n, m_unit, d, kind)
        g = build_graph(inst)
        sizes_seen = []
        for s in range(seeds):
            result = run_separator(inst, algo, mode, seed0 + s, retry_budget, graph=g)
            if result.success:
                sizes_seen.append(len(result.separator))
        med = statistics.median(sizes_seen) if sizes_seen else math.nan
        bound = bounds(g, d, achieved=0).edge_bound
        rows.append(ScalingRow(n=inst.n, median_size=med, bound=bound, ratio=med / bound if bound else math.nan))
    slope = scaling_fit([(r.n, r.median_size) for r in rows]) if len(rows) >= 3 else math.nan
    return rows, slope


def scaling_csv(rows: list[ScalingRow]) -> str:
    lines = ["n,median_size,bound,ratio"]
    for r in rows:
        lines.append(f"{r.n},{r.median_size},{r.bound:.6f},{r.ratio:.6f}")
    return "\n".join(lines) + "\n"
