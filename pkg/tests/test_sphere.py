import math

import numpy as np
import pytest

from geosep import (
    BodyKind,
    Constants,
    IntersectionGraph,
    ValidationError,
    build_graph,
    check_balanced,
    classify_residual_component,
    components,
    gen_nested_bipartite,
    gen_nested_chain,
    gen_random,
    nested_separator,
    pack_disjoint,
    select_small_cap_crossers,
    separate_spheres,
    trim_high_degree,
)
from geosep.constants import unit_ball_volume, unit_sphere_area
from geosep.errors import SeparatorFailure
from geosep.instances import Instance


def sphere_instance(centers, radii):
    centers = np.asarray(centers, float)
    return Instance(centers.shape[1], BodyKind.SPHERE, centers, np.asarray(radii, float))


class StubConsts:
    """Duck-typed constants with friendlier values for small fixtures.

    The production constants make every stage budget a theorem but push the
    non-trivial code paths beyond desk-scale n; these let unit fixtures
    reach them. Fixtures are designed so the stage assertions still hold.
    """

    def __init__(self, d, c_d, C_d, Cp_d):
        self.d = d
        self.c_d = c_d
        self.C_d = C_d
        self.Cp_d = Cp_d
        self.sample_count = 0
        self.covering_min_n = 1

    def tau(self, k):
        return unit_ball_volume(k)

    def sigma(self, k):
        return unit_sphere_area(k)

    def sigma_budget(self, degrees):
        deg = np.asarray(degrees, dtype=np.float64)
        s = float(np.sum(deg ** (1.0 / (self.d - 1))))
        return self.C_d * s ** (1.0 - 1.0 / self.d)


class TestNestedSeparator:
    def test_edgeless_chain_median_split(self):
        inst = gen_nested_chain(20, 2, seed=1)
        g = build_graph(inst)
        p = np.array(inst.metadata["common_point"])
        x = nested_separator(inst, g, p, s=10)
        assert len(x) == 0
        sizes = [c.size for c in components(g, x)]
        assert max(sizes) <= 20 - 10

    def test_two_spheres(self):
        inst = gen_nested_chain(2, 3, seed=0)
        g = build_graph(inst)
        x = nested_separator(inst, g, np.array(inst.metadata["common_point"]), s=1)
        assert len(x) == 0
        assert max(c.size for c in components(g, x)) <= 1

    def test_chain_with_median_crosser(self):
        # nine nested spheres around the origin plus one small sphere that
        # intersects only the median of the containment order
        centers = [[0.0, 0.0]] * 9 + [[5.0, 0.0]]
        radii = list(range(1, 10)) + [0.3]
        inst = sphere_instance(centers, radii)
        g = build_graph(inst)
        assert g.m == 1 and set(g.neighbors(9)) == {4}
        x = nested_separator(inst, g, np.zeros(2), s=4)
        assert list(x) == [9]
        assert int(g.degrees.max()) == 1  # |X| <= max degree
        sizes = [c.size for c in components(g, x)]
        assert max(sizes) <= 10 - 4

    def test_insufficient_holders(self):
        inst = gen_nested_chain(4, 2, seed=0)
        g = build_graph(inst)
        with pytest.raises(ValidationError, match="contain the point"):
            nested_separator(inst, g, np.array(inst.metadata["common_point"]), s=3)


class TestTrimHighDegree:
    def test_star_center_removed_first(self):
        # large star: the hub plus a quarter of the leaves go, max degree
        # collapses to zero; real constants apply since sigma < n
        n = 5000
        g = IntersectionGraph.from_edges(n, [(0, i) for i in range(1, n)])
        consts = Constants(2)
        sigma = consts.sigma_budget(g.degrees)
        assert sigma < n
        x1, delta = trim_high_degree(g, sigma, consts)
        assert 0 in x1
        assert len(x1) == int(sigma / 4)
        assert delta == 0

    def test_regular_graph_tie_break_by_index(self):
        cycle = IntersectionGraph.from_edges(40, [(i, (i + 1) % 40) for i in range(40)])
        x1, delta = trim_high_degree(cycle, 20.0, StubConsts(2, 0.2, 5, 1), enforce=False)
        assert list(x1) == [0, 1, 2, 3, 4]
        assert delta == 2  # vertices far from the removed arc keep both neighbors

    def test_edgeless(self):
        g = IntersectionGraph.from_edges(7, [])
        x1, delta = trim_high_degree(g, 0.0, Constants(2))
        assert len(x1) == 0 and delta == 0


class TestPackDisjoint:
    def make_fixture(self):
        # three disjoint spheres crossing a radius-10 cut sphere, radii
        # 3 > 2 > 1, each with one pendant sphere inside its ball
        hosts = [((10.0, 0.0), 3.0), ((-10.0, 0.0), 2.0), ((0.0, 10.0), 1.0)]
        centers, radii = [], []
        for (cx, cy), r in hosts:
            centers.append([cx, cy])
            radii.append(r)
        for (cx, cy), r in hosts:
            away = np.array([cx, cy], float)
            away = away / np.linalg.norm(away)
            pend = np.array([cx, cy]) + (r - 0.05) * away
            centers.append(list(pend))
            radii.append(0.1)
        inst = sphere_instance(centers, radii)
        return inst, build_graph(inst)

    def test_hand_traced_packing(self):
        inst, g = self.make_fixture()
        assert g.m == 3  # host-pendant edges only
        packing, charged = pack_disjoint(
            inst.centers, inst.radii, g, np.zeros(2), 10.0
        )
        assert packing == [0, 1, 2]  # radii order 3, 2, 1
        assert sorted(charged) == [3, 4, 5]  # the three pendants

    def test_no_crossers(self):
        inst, g = self.make_fixture()
        packing, charged = pack_disjoint(inst.centers, inst.radii, g, np.zeros(2), 100.0)
        assert packing == [] and len(charged) == 0

    def test_single_isolated_crosser(self):
        inst = sphere_instance([[10.0, 0.0]], [2.0])
        g = build_graph(inst)
        packing, charged = pack_disjoint(inst.centers, inst.radii, g, np.zeros(2), 10.0)
        assert packing == [0] and len(charged) == 0


class TestSelectSmallCapCrossers:
    def test_degree_zero_excluded_regardless(self):
        # a crossing sphere with degree zero has threshold zero and is
        # excluded outright
        centers = np.array([[10.0, 0.0], [30.0, 0.0]])
        radii = np.array([2.0, 1.0])
        consts = Constants(2)
        mask = select_small_cap_crossers(
            centers, radii, np.array([0, 0]), np.zeros(2), 10.0, 5.0, sigma=40.0, constants=consts
        )
        assert not mask.any()

    def test_small_cap_with_degree_selected(self):
        centers = np.array([[10.0, 0.0], [30.0, 0.0]])
        radii = np.array([0.05, 1.0])
        consts = Constants(2)
        # threshold Cp * R * (deg/sigma) = 25.13 * 5 * (2/40) = 6.3 > cap
        mask = select_small_cap_crossers(
            centers, radii, np.array([2, 0]), np.zeros(2), 10.0, 5.0, sigma=40.0, constants=consts
        )
        assert mask[0] and not mask[1]

    def test_large_cap_survives(self):
        # huge sphere swallowing most of the cut sphere: cap radius equals
        # the cut radius, far above any reasonable threshold
        centers = np.array([[1.0, 0.0]])
        radii = np.array([12.0])
        consts = Constants(2)
        mask = select_small_cap_crossers(
            centers, radii, np.array([1]), np.zeros(2), 10.0, 5.0, sigma=1e9, constants=consts
        )
        assert mask[0] == (10.0 <= consts.Cp_d * 5.0 * (1.0 / 1e9))
        assert not mask[0]


def full_stage_fixture():
    """200 spheres driving one round through stages 1-4 with stub constants.

    Index layout: 32 far-pair members (16 edges), 45 cluster spheres (the
    dense anchor region), 10 shell spheres crossing any cut drawn around
    the cluster, 4 pendants hanging on the first four shell spheres, and
    isolated fillers up to n = 200. m = 20, so the stub budget
    sigma = 6 * sqrt(40) ~ 37.9 keeps the high-degree trim within c_d*n.
    """
    centers: list[list[float]] = []
    radii: list[float] = []
    # far pairs along the bottom edge
    for k in range(16):
        x = 0.5 + 0.5 * k
        centers.append([x, 0.3])
        radii.append(0.01)
        centers.append([x + 0.015, 0.3])
        radii.append(0.01)
    # dense cluster around (5, 5): 7x7 grid minus 4 corners
    step = 0.004
    grid = [
        (i, j)
        for i in range(7)
        for j in range(7)
        if (i, j) not in [(0, 0), (0, 6), (6, 0), (6, 6)]
    ]
    for i, j in grid:
        centers.append([5.0 + (i - 3) * step, 5.0 + (j - 3) * step])
        radii.append(0.001)
    # shell spheres at distance ~0.022 from the cluster center cross every
    # cut sphere with radius in [R, 2R]
    n_shell = 10
    for t in range(n_shell):
        ang = 2 * math.pi * t / n_shell
        dist = 0.021 + 0.002 * (t % 3)
        centers.append([5.0 + dist * math.cos(ang), 5.0 + dist * math.sin(ang)])
        radii.append(0.012)
    shell_start = len(centers) - n_shell
    # pendants tucked inside the first four shell spheres
    for t in range(4):
        host = np.array(centers[shell_start + t])
        out = host - np.array([5.0, 5.0])
        out /= np.linalg.norm(out)
        centers.append(list(host + 0.0105 * out))
        radii.append(0.002)
    while len(centers) < 200:
        k = len(centers)
        centers.append([0.5 + 0.05 * k, 9.0])
        radii.append(0.001)
    inst = sphere_instance(centers, radii)
    consts = StubConsts(2, c_d=0.05, C_d=6.0, Cp_d=1.0)
    return inst, consts, shell_start


class TestSeparateSpheres:
    def test_single_sphere(self):
        inst = sphere_instance([[0.0, 0.0]], [1.0])
        result = separate_spheres(inst, seed=0)
        assert result.success and result.separator == []

    def test_kind_check(self):
        inst = gen_random(10, 2, (0.5, 0.5), 10.0, "ball", seed=0)
        with pytest.raises(ValidationError):
            separate_spheres(inst)

    def test_bipartite_trivial_budget(self):
        inst = gen_nested_bipartite(20, 2, seed=4)
        g = build_graph(inst)
        assert g.m == 400
        result = separate_spheres(inst, seed=1, graph=g)
        assert result.success and result.trivial
        consts = Constants(2)
        cap_rounds = 1 + int(math.log(2 / 3) / math.log(1 - consts.c_d))
        assert len(result.separator) <= 4 * consts.C_d * math.sqrt(2 * g.m) * cap_rounds
        ok, _ = check_balanced(g, result.separator)
        assert ok

    def test_random_instances_valid(self):
        for seed in range(5):
            inst = gen_random(300, 2, (0.1, 0.3), 10.0, "sphere", seed=seed)
            g = build_graph(inst)
            result = separate_spheres(inst, seed=seed, graph=g)
            assert result.success
            ok, _ = check_balanced(g, result.separator)
            assert ok

    def test_early_exit_nested_path(self):
        # chain of 60 nested spheres glued into one component by a few
        # low-degree crossers; stub constants keep sigma below n so the
        # round reaches the containment-median early exit
        chain = gen_nested_chain(60, 2, seed=6)
        centers = list(map(list, chain.centers))
        radii = list(chain.radii)
        for k in range(6):
            # one small sphere crossing chain spheres 10k+1 .. 10k+2
            rr = 1.0 + 10 * k + 1.5
            centers.append([rr, 0.0])
            radii.append(1.0)
        inst = sphere_instance(centers, radii)
        g = build_graph(inst)
        comp_sizes = sorted(c.size for c in components(g))
        assert comp_sizes[-1] > (2 / 3) * inst.n
        consts = StubConsts(2, c_d=0.05, C_d=4.0, Cp_d=2.0)
        result = separate_spheres(inst, seed=2, graph=g, constants=consts, trace=True)
        assert result.success
        stages = {s for _, s, _ in result.provenance}
        assert "nested" in stages
        ok, _ = check_balanced(g, result.separator)
        assert ok

    def test_full_stage_round(self):
        inst, consts, shell_start = full_stage_fixture()
        g = build_graph(inst)
        assert g.m == 20
        result = separate_spheres(inst, seed=3, graph=g, constants=consts, trace=True)
        assert result.success
        stages = {s for _, s, _ in result.provenance}
        assert "high_degree" in stages
        assert "packing" in stages  # shell pendants charged by stage 4
        rd = result.trace[0]
        assert rd["packing"], "stage 4 packed at least one shell sphere"
        assert all(p >= shell_start for p in rd["packing"])
        ok, _ = check_balanced(g, result.separator, 1 - consts.c_d)
        assert ok
        # stage budgets recorded against sigma
        sigma = rd["sigma"]
        assert len(rd["X1"]) <= sigma / 4 + 1e-9
        assert len(rd["X3"]) <= sigma / 4 + 1e-9
        assert len(rd["X4"]) <= sigma / 4 + 1e-9
        # residual trichotomy: every surviving component classifies cleanly
        cut = rd["S_rand"]
        for comp in components(g, result.separator):
            kind = classify_residual_component(
                inst, comp, rd["packing"], np.array(cut["center"]), cut["radius"]
            )
            assert kind in ("inside_packing", "inside_cut", "outside")

    def test_retry_exhaustion_is_explicit_failure(self):
        # stub budget so small that sigma/4 < 1 while crossers always land
        # in the discard set: every draw overflows and the round gives up
        inst, _, _ = full_stage_fixture()
        g = build_graph(inst)
        consts = StubConsts(2, c_d=0.05, C_d=0.45, Cp_d=1e6)
        result = separate_spheres(inst, seed=5, graph=g, constants=consts, retry_budget=4)
        assert not result.success
        assert result.failure_reason is not None

    def test_deterministic_given_seed(self):
        inst, consts, _ = full_stage_fixture()
        g = build_graph(inst)
        a = separate_spheres(inst, seed=9, graph=g, constants=consts)
        b = separate_spheres(inst, seed=9, graph=g, constants=consts)
        assert a.separator == b.separator and a.rounds == b.rounds
