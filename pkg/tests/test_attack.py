import math
import random

import pytest

from geoleak.attack import (
    AnnulusConstraint,
    ColludingOptions,
    CollinearAdversaries,
    DistanceObservation,
    EmptyRegion,
    NonConvergence,
    SandwichObservation,
    VictimNeverVisible,
    annulus_from_interval_observation,
    annulus_from_sandwich,
    colluding_trilateration,
    default_vantage_points,
    exact_trilateration_attack,
    intersect_constraints,
    passive_sandwich_survey,
    solve_circle_system,
    trilaterate,
)
from geoleak.fixtures import (
    DEMACHIYANAGI_STATION,
    HEIAN_SHRINE,
    SCIENCE_FRONTIER_LAB,
    SURVEY_TRIANGLE,
)
from geoleak.geodesy import GeoPoint, LocalPoint, Projection, haversine_distance, unproject
from geoleak.lbs_sim import DisclosurePolicy, PolicyMode, QueryKind, World
from geoleak.obfuscation import HORNET_DEFAULT, invert_reading

EXACT = DisclosurePolicy(PolicyMode.EXACT_DISTANCE)
HIDDEN = DisclosurePolicy(PolicyMode.HIDDEN_RESPECTS_FLAG)
HORNET = DisclosurePolicy(PolicyMode.OBFUSCATED, pattern=HORNET_DEFAULT, drop_probability=0.5)

LAB = SCIENCE_FRONTIER_LAB


def _offset(origin, east, north):
    return unproject(LocalPoint(east, north), Projection.at(origin))


def _uniform_world(policy, seed, count, radius, center=LAB, show=True):
    world = World(policy, seed)
    rng = random.Random(seed * 31 + 7)
    proj = Projection.at(center)
    for i in range(count):
        theta = rng.uniform(0.0, 2.0 * math.pi)
        r = radius * math.sqrt(rng.random())
        world.add_user(f"bg-{i:03d}", unproject(LocalPoint(r * math.cos(theta), r * math.sin(theta)), proj), show)
    return world


# -- solver ---------------------------------------------------------------------


def test_pythagorean_circle_system():
    x, y = solve_circle_system([(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)], [5.0, math.sqrt(65.0), math.sqrt(45.0)])
    assert (x, y) == pytest.approx((3.0, 4.0), abs=1e-9)


def test_collinear_anchors_rejected():
    with pytest.raises(CollinearAdversaries):
        solve_circle_system([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], [1.0, 1.0, 1.0])


def test_trilaterate_recovers_fixture_victim():
    proj = Projection.at(LAB)
    obs = [
        DistanceObservation(p, haversine_distance(p, LAB), kind="exact")
        for p in SURVEY_TRIANGLE
    ]
    fix = trilaterate(obs, proj)
    assert haversine_distance(fix.point, LAB) < 1.0
    assert fix.residual < 0.1


def test_trilaterate_reports_residual_for_noisy_distances():
    proj = Projection.at(LAB)
    obs = [
        DistanceObservation(p, haversine_distance(p, LAB) + noise, kind="exact")
        for p, noise in zip(SURVEY_TRIANGLE, (40.0, -25.0, 10.0))
    ]
    fix = trilaterate(obs, proj)
    assert fix.residual > 5.0


def test_trilaterate_validates_input():
    proj = Projection.at(LAB)
    ob = DistanceObservation(LAB, 10.0, kind="exact")
    with pytest.raises(ValueError):
        trilaterate([ob, ob], proj)
    with pytest.raises(ValueError):
        trilaterate([ob, ob, DistanceObservation(LAB, kind="interval", interval=(1.0, 2.0))], proj)


def test_observation_validation():
    with pytest.raises(ValueError):
        DistanceObservation(LAB, -5.0, kind="exact")
    with pytest.raises(ValueError):
        DistanceObservation(LAB, kind="interval", interval=(5.0, 1.0))
    with pytest.raises(ValueError):
        SandwichObservation(LAB, 300.0, 200.0)


# -- constraints and regions -------------------------------------------------------


def test_annulus_membership():
    proj = Projection.at(LAB)
    ann = annulus_from_sandwich(SandwichObservation(LAB, 100.0, 200.0), proj)
    center = ann.center
    assert ann.contains_local(LocalPoint(center.x + 150.0, center.y))
    assert not ann.contains_local(LocalPoint(center.x + 50.0, center.y))
    assert not ann.contains_local(LocalPoint(center.x + 250.0, center.y))


def test_disc_and_unbounded_special_cases():
    proj = Projection.at(LAB)
    disc = annulus_from_sandwich(SandwichObservation(LAB, 0.0, 500.0), proj)
    assert disc.bounded and disc.contains_local(LocalPoint(disc.center.x, disc.center.y))
    outside = annulus_from_sandwich(SandwichObservation(LAB, 500.0, math.inf), proj)
    assert not outside.bounded
    assert outside.contains_local(LocalPoint(outside.center.x + 900.0, outside.center.y))


def test_obfuscated_reading_becomes_interval_annulus():
    proj = Projection.at(LAB)
    interval = invert_reading(350.0, HORNET_DEFAULT)
    obs = DistanceObservation(LAB, kind="interval", interval=interval)
    ann = annulus_from_interval_observation(obs, proj)
    assert (ann.r_lo, ann.r_hi) == (250.0, 350.0)


def test_single_disc_area_close_to_analytic():
    proj = Projection.at(LAB)
    disc = AnnulusConstraint(LocalPoint(0.0, 0.0), 0.0, 100.0)
    region = intersect_constraints([disc], 1.0, proj)
    assert region.area() == pytest.approx(math.pi * 100.0**2, rel=0.03)


def test_region_contains_target_of_two_annuli():
    proj = Projection.at(LAB)
    target = LocalPoint(40.0, -30.0)
    constraints = []
    for cx, cy in ((-400.0, 0.0), (300.0, 500.0)):
        d = math.hypot(target.x - cx, target.y - cy)
        constraints.append(AnnulusConstraint(LocalPoint(cx, cy), d - 25.0, d + 25.0))
    region = intersect_constraints(constraints, 5.0, proj)
    assert region.contains_local(target)
    assert region.contains(unproject(target, proj))


def test_disjoint_annuli_raise_empty_region():
    proj = Projection.at(LAB)
    a = AnnulusConstraint(LocalPoint(0.0, 0.0), 0.0, 100.0)
    b = AnnulusConstraint(LocalPoint(1000.0, 0.0), 0.0, 100.0)
    with pytest.raises(EmptyRegion):
        intersect_constraints([a, b], 5.0, proj)


def test_unbounded_only_constraints_raise_empty_region():
    proj = Projection.at(LAB)
    outside = AnnulusConstraint(LocalPoint(0.0, 0.0), 100.0, math.inf)
    with pytest.raises(EmptyRegion):
        intersect_constraints([outside], 5.0, proj)


def test_region_area_monotone_in_constraints():
    proj = Projection.at(LAB)
    rng = random.Random(606)
    for _ in range(30):
        target = LocalPoint(rng.uniform(-200, 200), rng.uniform(-200, 200))
        constraints = []
        last_area = math.inf
        for _ in range(4):
            cx, cy = rng.uniform(-800, 800), rng.uniform(-800, 800)
            d = math.hypot(target.x - cx, target.y - cy)
            w = rng.uniform(10.0, 120.0)
            constraints.append(AnnulusConstraint(LocalPoint(cx, cy), max(0.0, d - w), d + w))
            region = intersect_constraints(constraints, 5.0, proj)
            assert region.area() <= last_area
            assert region.contains_local(target)
            last_area = region.area()


def test_region_geojson_feature_shape():
    proj = Projection.at(LAB)
    region = intersect_constraints([AnnulusConstraint(LocalPoint(0.0, 0.0), 0.0, 30.0)], 10.0, proj)
    feature = region.to_geojson_feature()
    assert feature["geometry"]["type"] == "MultiPolygon"
    assert len(feature["geometry"]["coordinates"]) == region.cell_count()
    ring = feature["geometry"]["coordinates"][0][0]
    assert len(ring) == 5 and ring[0] == ring[-1]


# -- the original profile-view attack ------------------------------------------------


def test_exact_trilateration_attack_on_fixture_world():
    world = World(EXACT, 1)
    world.add_user("victim", LAB, True)
    world.add_user("attacker", DEMACHIYANAGI_STATION, True)
    report = exact_trilateration_attack(world, "attacker", SURVEY_TRIANGLE, "victim")
    assert haversine_distance(report.estimate, LAB) < 1.0
    assert report.victim_profile_queries == 3
    assert report.moves == 3 and report.queries == 3


def test_exact_trilateration_attack_fails_when_hidden():
    world = World(HIDDEN, 1)
    world.add_user("victim", LAB, False)
    world.add_user("attacker", DEMACHIYANAGI_STATION, True)
    with pytest.raises(VictimNeverVisible):
        exact_trilateration_attack(world, "attacker", SURVEY_TRIANGLE, "victim")


# -- colluding trilateration -----------------------------------------------------------


def _grindr_world(seed, n_background=50):
    world = _uniform_world(HIDDEN, seed, n_background, 1500.0)
    world.add_user("victim", LAB, False)
    for uid in ("attacker", "colluder-a", "colluder-b"):
        world.add_user(uid, DEMACHIYANAGI_STATION, True)
    return world


def test_colluding_locates_hidden_victim():
    world = _grindr_world(seed=5)
    opts = ColludingOptions(vantage_points=SURVEY_TRIANGLE)
    report = colluding_trilateration(world, ("attacker", "colluder-a", "colluder-b"), "victim", opts)
    assert haversine_distance(report.estimate, LAB) <= 25.0
    assert report.victim_profile_queries == 0
    assert report.region is not None and report.region.contains(LAB)
    assert report.region_area > 0.0


def test_colluding_never_touches_the_victim_profile():
    world = _grindr_world(seed=6)
    opts = ColludingOptions(vantage_points=SURVEY_TRIANGLE)
    colluding_trilateration(world, ("attacker", "colluder-a", "colluder-b"), "victim", opts)
    profile_views = [r for r in world.query_log if r.kind is QueryKind.PROFILE_VIEW]
    assert profile_views == []


def test_colluding_accepted_steps_within_log2_budget():
    world = _grindr_world(seed=8)
    opts = ColludingOptions(vantage_points=SURVEY_TRIANGLE, epsilon=20.0)
    report = colluding_trilateration(world, ("attacker", "colluder-a", "colluder-b"), "victim", opts)
    assert len(report.accepted_steps) == 3
    for accepted, s0 in zip(report.accepted_steps, report.initial_separations):
        budget = max(0, math.ceil(math.log2(max(s0, opts.epsilon) / opts.epsilon)))
        assert accepted <= budget


def test_colluding_bisection_shrinks_separation_monotonically():
    # the recorded evidence trail per vantage narrows strictly down to epsilon
    world = _grindr_world(seed=9)
    opts = ColludingOptions(vantage_points=SURVEY_TRIANGLE)
    report = colluding_trilateration(world, ("attacker", "colluder-a", "colluder-b"), "victim", opts)
    assert len(report.initial_separations) == 3
    for vantage in SURVEY_TRIANGLE:
        widths = [
            o.an2 - o.an1
            for o in report.observations
            if o.adversary_position == vantage and math.isfinite(o.an2)
        ]
        assert widths
        assert all(b < a for a, b in zip(widths, widths[1:]))
        assert widths[-1] <= opts.epsilon
        # every recorded bracket truly contains the victim's distance
        av = haversine_distance(vantage, LAB)
        for o in report.observations:
            if o.adversary_position == vantage:
                assert o.an1 <= av <= o.an2


def test_colluding_is_deterministic():
    def run():
        world = _grindr_world(seed=11)
        opts = ColludingOptions(vantage_points=SURVEY_TRIANGLE)
        r = colluding_trilateration(world, ("attacker", "colluder-a", "colluder-b"), "victim", opts)
        return (r.estimate, r.moves, r.queries, r.region_area)

    assert run() == run()


def test_colluding_with_favorites_beats_dropping():
    world = _uniform_world(HORNET, 21, 50, 1500.0)
    world.add_user("victim", LAB, False)
    for uid in ("attacker", "colluder-a", "colluder-b"):
        world.add_user(uid, DEMACHIYANAGI_STATION, True)
    opts = ColludingOptions(vantage_points=SURVEY_TRIANGLE, use_favorites=True)
    report = colluding_trilateration(world, ("attacker", "colluder-a", "colluder-b"), "victim", opts)
    assert haversine_distance(report.estimate, LAB) <= 25.0
    assert report.victim_profile_queries == 0
    assert "victim" in world.favorites["attacker"]


def test_colluding_without_favorites_starves_under_dropping():
    failures = 0
    for seed in range(30, 40):
        world = _uniform_world(HORNET, seed, 50, 1500.0)
        world.add_user("victim", LAB, False)
        for uid in ("attacker", "colluder-a", "colluder-b"):
            world.add_user(uid, DEMACHIYANAGI_STATION, True)
        opts = ColludingOptions(vantage_points=SURVEY_TRIANGLE, use_favorites=False)
        try:
            colluding_trilateration(world, ("attacker", "colluder-a", "colluder-b"), "victim", opts)
        except (VictimNeverVisible, NonConvergence):
            failures += 1
    assert failures >= 9


def test_colluding_budget_exhaustion_raises_nonconvergence():
    world = _grindr_world(seed=13)
    opts = ColludingOptions(vantage_points=SURVEY_TRIANGLE, max_queries=4)
    with pytest.raises(NonConvergence):
        colluding_trilateration(world, ("attacker", "colluder-a", "colluder-b"), "victim", opts)


def test_colluding_validates_arguments():
    world = _grindr_world(seed=14)
    with pytest.raises(ValueError):
        colluding_trilateration(world, ("attacker", "attacker", "colluder-b"), "victim")
    with pytest.raises(ValueError):
        colluding_trilateration(world, ("attacker", "colluder-a", "victim"), "victim")


# -- passive survey ----------------------------------------------------------------


def test_passive_survey_dense_background():
    world = _uniform_world(EXACT, 17, 200, 2000.0)
    world.add_user("victim", LAB, True)
    world.add_user("attacker", DEMACHIYANAGI_STATION, True)
    region = passive_sandwich_survey(world, "attacker", SURVEY_TRIANGLE, "victim")
    assert region.contains(LAB)
    disc_area = math.pi * 2000.0**2
    assert region.area() < 0.05 * disc_area


def test_passive_survey_remote_victim():
    # victim isolated; population clustered 1.5 km east; vantages in between
    cluster = _offset(LAB, 1500.0, 0.0)
    world = _uniform_world(EXACT, 19, 60, 300.0, center=cluster)
    world.add_user("victim", LAB, True)
    world.add_user("attacker", cluster, True)
    vantages = (_offset(LAB, 650.0, 220.0), _offset(LAB, 750.0, 0.0), _offset(LAB, 650.0, -220.0))
    region = passive_sandwich_survey(world, "attacker", vantages, "victim")
    assert region.contains(LAB)


def test_passive_survey_with_no_flankers_raises_empty_region():
    world = World(EXACT, 23)
    world.add_user("victim", LAB, True)
    world.add_user("attacker", DEMACHIYANAGI_STATION, True)
    with pytest.raises(EmptyRegion):
        passive_sandwich_survey(world, "attacker", SURVEY_TRIANGLE, "victim")


def test_passive_survey_victim_never_visible():
    policy = DisclosurePolicy(PolicyMode.EXACT_DISTANCE, drop_probability=1.0)
    world = World(policy, 29)
    world.add_user("victim", LAB, True)
    world.add_user("other", HEIAN_SHRINE, True)
    world.add_user("attacker", DEMACHIYANAGI_STATION, True)
    with pytest.raises(VictimNeverVisible):
        passive_sandwich_survey(world, "attacker", SURVEY_TRIANGLE, "victim")


def test_default_vantage_points_scale_with_population():
    pts = [LAB, _offset(LAB, 900.0, 0.0), _offset(LAB, -900.0, 100.0)]
    vantages = default_vantage_points(pts)
    assert len(vantages) == 3
    center = GeoPoint(sum(p.lat for p in pts) / 3, sum(p.lon for p in pts) / 3)
    dists = [haversine_distance(center, v) for v in vantages]
    assert max(dists) == pytest.approx(max(haversine_distance(center, p) for p in pts), rel=0.05)
