import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geosep import (
    Body,
    BodyKind,
    SphereRelation,
    ValidationError,
    balls_intersect,
    body_crosses_sphere,
    cap_radius,
    dist,
    spheres_relation,
)
from geosep.geometry import as_point, ball_cut_masks, cap_radii, sphere_cross_mask

from oracles import mc_cap_half_diameter, mc_sphere_relation


def sphere(center, radius):
    return Body(np.asarray(center, float), radius, BodyKind.SPHERE)


def ball(center, radius):
    return Body(np.asarray(center, float), radius, BodyKind.BALL)


class TestDist:
    def test_pythagorean(self):
        assert dist((0, 0), (3, 4)) == pytest.approx(5.0)

    def test_identity(self):
        assert dist((1, 1, 1), (1, 1, 1)) == 0.0

    def test_unit_diagonal(self):
        assert dist((0, 0), (1, 1)) == pytest.approx(math.sqrt(2))

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            dist((0, 0), (0, 0, 0))

    def test_rejects_nan(self):
        with pytest.raises(ValidationError):
            as_point((float("nan"), 0.0))

    def test_rejects_out_of_range_dimension(self):
        with pytest.raises(ValidationError):
            as_point((1.0,))
        with pytest.raises(ValidationError):
            as_point(tuple(range(17)))


class TestSpheresRelation:
    def test_disjoint(self):
        assert spheres_relation(sphere((0, 0), 1), sphere((3, 0), 1)) is SphereRelation.DISJOINT

    def test_second_inside_first(self):
        rel = spheres_relation(sphere((0, 0), 2), sphere((0, 0.5), 1))
        assert rel is SphereRelation.SECOND_INSIDE_FIRST

    def test_intersect(self):
        # D^2 = 2.25 sits inside [0, 4]
        assert spheres_relation(sphere((0, 0), 1), sphere((1.5, 0), 1)) is SphereRelation.INTERSECT

    def test_tangency_counts_as_intersect(self):
        assert spheres_relation(sphere((0, 0), 1), sphere((2, 0), 1)) is SphereRelation.INTERSECT
        assert spheres_relation(sphere((0, 0), 2), sphere((1, 0), 1)) is SphereRelation.INTERSECT

    def test_kind_mismatch(self):
        with pytest.raises(ValidationError):
            spheres_relation(ball((0, 0), 1), sphere((0, 0), 1))

    def test_symmetry_on_random_pairs(self):
        rng = np.random.default_rng(0)
        swap = {
            SphereRelation.FIRST_INSIDE_SECOND: SphereRelation.SECOND_INSIDE_FIRST,
            SphereRelation.SECOND_INSIDE_FIRST: SphereRelation.FIRST_INSIDE_SECOND,
            SphereRelation.INTERSECT: SphereRelation.INTERSECT,
            SphereRelation.DISJOINT: SphereRelation.DISJOINT,
        }
        for _ in range(2000):
            d = int(rng.integers(2, 5))
            s1 = sphere(rng.uniform(-2, 2, d), float(rng.uniform(0.1, 3)))
            s2 = sphere(rng.uniform(-2, 2, d), float(rng.uniform(0.1, 3)))
            assert spheres_relation(s2, s1) is swap[spheres_relation(s1, s2)]

    def test_monte_carlo_agreement(self):
        # oracle by point sampling; near-tangency pairs are skipped since
        # the sampled oracle cannot resolve arbitrarily thin caps
        rng = np.random.default_rng(1)
        checked = agree = 0
        while checked < 400:
            d = int(rng.integers(2, 4))
            c1, c2 = rng.uniform(-2, 2, d), rng.uniform(-2, 2, d)
            r1, r2 = rng.uniform(0.3, 2.0, 2)
            dd = math.dist(c1, c2)
            band = 0.05 * min(r1, r2)
            if min(abs(dd - (r1 + r2)), abs(dd - abs(r1 - r2))) < band:
                continue
            got = spheres_relation(sphere(c1, r1), sphere(c2, r2)).value
            want = mc_sphere_relation(c1, r1, c2, r2, rng)
            checked += 1
            agree += int(got == want)
        assert agree / checked >= 0.999


class TestBallsIntersect:
    def test_tangent(self):
        assert balls_intersect(ball((0, 0), 1), ball((2, 0), 1))

    def test_far_apart(self):
        assert not balls_intersect(ball((0, 0), 1), ball((5, 0), 1))

    def test_nested(self):
        assert balls_intersect(ball((0, 0), 3), ball((1, 0), 0.5))

    def test_kind_mismatch(self):
        with pytest.raises(ValidationError):
            balls_intersect(ball((0, 0), 1), sphere((0, 0), 1))

    def test_decomposition_against_crossing(self):
        # intersecting balls either cross each other's boundary sphere or
        # one contains the other outright
        rng = np.random.default_rng(2)
        for _ in range(3000):
            d = int(rng.integers(2, 5))
            b1 = ball(rng.uniform(-2, 2, d), float(rng.uniform(0.1, 2)))
            b2 = ball(rng.uniform(-2, 2, d), float(rng.uniform(0.1, 2)))
            dd = dist(b1.center, b2.center)
            contained = dd + b1.radius <= b2.radius or dd + b2.radius <= b1.radius
            rhs = body_crosses_sphere(b1, b2.center, b2.radius) or contained
            assert balls_intersect(b1, b2) == rhs


class TestBodyCrossesSphere:
    def test_ball_crossing(self):
        assert body_crosses_sphere(ball((3, 0), 1), (0, 0), 2.5)

    def test_ball_outside(self):
        assert not body_crosses_sphere(ball((3, 0), 1), (0, 0), 5.0)

    def test_concentric_spheres_do_not_cross(self):
        assert not body_crosses_sphere(sphere((0, 0), 1), (0, 0), 2.0)

    def test_cut_masks_partition(self):
        rng = np.random.default_rng(3)
        centers = rng.uniform(-5, 5, (500, 3))
        radii = rng.uniform(0.1, 2.0, 500)
        cross, inside, outside = ball_cut_masks(centers, radii, np.zeros(3), 2.0)
        assert np.all(cross.astype(int) + inside.astype(int) + outside.astype(int) == 1)
        for i in range(0, 500, 17):
            b = ball(centers[i], radii[i])
            assert cross[i] == body_crosses_sphere(b, np.zeros(3), 2.0)


class TestCapRadius:
    def test_three_dim_chord(self):
        got = cap_radius((0, 0, 0), 2.0, sphere((2, 0, 0), 1.0))
        assert got == pytest.approx(math.sqrt(4 - 3.0625), abs=1e-9)

    def test_whole_cut_sphere_inside(self):
        got = cap_radius((0, 0, 0), 2.0, sphere((0, 0, 0), 3.0))
        assert got == 2.0

    def test_two_dim_chord(self):
        got = cap_radius((0, 0), 1.0, sphere((1, 0), 1.0))
        assert got == pytest.approx(math.sqrt(0.75), abs=1e-9)

    def test_empty_cap_raises(self):
        with pytest.raises(ValidationError):
            cap_radius((0, 0), 1.0, sphere((10, 0), 1.0))

    def test_never_exceeds_cut_radius_and_hemisphere_rule(self):
        rng = np.random.default_rng(4)
        seen = 0
        while seen < 2000:
            d = int(rng.integers(2, 4))
            a = float(rng.uniform(0.5, 3.0))
            c = rng.uniform(-3, 3, d)
            b = float(rng.uniform(0.2, 4.0))
            dd = math.dist(c, np.zeros(d))
            if (dd - a) ** 2 > b * b:
                continue
            got = cap_radius(np.zeros(d), a, sphere(c, b))
            assert got <= a + 1e-12
            h = (a * a + dd * dd - b * b) / (2 * dd) if dd > 0 else -1.0
            if h <= 0:
                assert got == pytest.approx(a)
            seen += 1

    def test_matches_sampled_half_diameter(self):
        rng = np.random.default_rng(5)
        tested = 0
        while tested < 60:
            d = int(rng.integers(2, 4))
            a = float(rng.uniform(0.8, 2.0))
            direction = rng.normal(size=d)
            direction /= np.linalg.norm(direction)
            dd = float(rng.uniform(0.3, a + 1.0))
            c = dd * direction
            b = float(rng.uniform(0.3, 2.5))
            if (dd - a) ** 2 > b * b * 0.9:
                continue
            oracle = mc_cap_half_diameter(np.zeros(d), a, c, b, rng)
            if oracle is None:
                continue
            got = cap_radius(np.zeros(d), a, sphere(c, b))
            assert got == pytest.approx(oracle, rel=0.03)
            tested += 1

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(6)
        centers, radii = [], []
        while len(radii) < 200:
            c = rng.uniform(-3, 3, 3)
            b = float(rng.uniform(0.2, 4.0))
            if (math.dist(c, np.zeros(3)) - 2.0) ** 2 <= b * b:
                centers.append(c)
                radii.append(b)
        centers, radii = np.array(centers), np.array(radii)
        vec = cap_radii(centers, radii, np.zeros(3), 2.0)
        for i in range(200):
            assert vec[i] == pytest.approx(cap_radius(np.zeros(3), 2.0, sphere(centers[i], radii[i])))


finite_coord = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)
radius_value = st.floats(min_value=0.01, max_value=30, allow_nan=False, allow_infinity=False)


@given(
    c1=st.tuples(finite_coord, finite_coord),
    c2=st.tuples(finite_coord, finite_coord),
    r1=radius_value,
    r2=radius_value,
)
@settings(max_examples=300, deadline=None)
def test_relation_cases_are_exhaustive_and_exclusive(c1, c2, r1, r2):
    rel = spheres_relation(sphere(c1, r1), sphere(c2, r2))
    d = math.dist(c1, c2)
    if rel is SphereRelation.DISJOINT:
        assert d >= r1 + r2
    elif rel is SphereRelation.INTERSECT:
        assert abs(r1 - r2) - 1e-9 <= d <= r1 + r2 + 1e-9
    else:
        assert d <= abs(r1 - r2)


@given(
    center=st.tuples(finite_coord, finite_coord, finite_coord),
    r=radius_value,
    a=radius_value,
)
@settings(max_examples=300, deadline=None)
def test_sphere_cross_mask_matches_predicate(center, r, a):
    s = sphere(center, r)
    mask = sphere_cross_mask(np.array([s.center]), np.array([r]), np.zeros(3), a)
    assert mask[0] == body_crosses_sphere(s, np.zeros(3), a)
