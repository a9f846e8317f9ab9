"""Scenario configuration, seeded experiment runner, metrics, file emission.

Scenario files are JSON (UTF-8); geometry artifacts are RFC 7946 GeoJSON with
(lon, lat) coordinate order; metrics are CSV with a header row, '.' decimals
and comma delimiters. Everything downstream of a (scenario, seed) pair is
deterministic, including serialized bytes.

Scenario JSON schema::

    {
      "name": "grindr-hidden",
      "seed": 7,
      "policy": {"mode": "hidden_respects_flag", "drop_probability": 0.0,
                 "pattern": null, "accuracy_setting": null},
      "victim": {"lat": 35.0235, "lon": 135.7769, "show_distance": false},
      "background": {"count": 50, "center": {"lat": ..., "lon": ...}, "radius_m": 1500.0}
                    -- or -- {"users": [{"id": "bg-000", "lat": ..., "lon": ...,
                                         "show_distance": true}, ...]},
      "attack": {"kind": "colluding", "epsilon_m": 20.0, "cell_size_m": 5.0,
                 "vantage_points": [{"lat": ..., "lon": ...}, x3] | null,
                 "max_moves": 80, "max_queries": 40,
                 "locations": 3000, "queries_per_location": 30,
                 "max_distance_m": 3000.0},
      "max_entries": null
    }

World snapshots (`World.snapshot()`) use the same policy/user leaf objects:
``{"seed", "max_entries", "policy", "users": [{"id", "lat", "lon",
"show_distance"}], "favorites": {owner: [target, ...]}}``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import random
import statistics
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from .attack import (
    AttackReport,
    ColludingOptions,
    EmptyRegion,
    NonConvergence,
    VictimNeverVisible,
    attack_report_to_geojson_features,
    colluding_trilateration,
    default_vantage_points,
    exact_trilateration_attack,
    passive_sandwich_survey,
)
from .geodesy import GeoPoint, LocalPoint, Projection, haversine_distance, unproject
from .lbs_sim import DisclosurePolicy, QueryKind, World, policy_from_json, policy_to_json
from .obfuscation import (
    HORNET_DEFAULT,
    InsufficientSamples,
    ObfuscationPattern,
    ObfuscationSample,
    infer_pattern,
    obfuscate_distance,
    pattern_to_json,
)

log = logging.getLogger(__name__)

VICTIM_ID = "victim"
ATTACK_KINDS = ("trilateration", "passive_sandwich", "colluding", "colluding_favorites", "infer_pattern")
OUTCOMES = ("success", "victim_never_visible", "non_convergence", "empty_region")

_BACKGROUND_SALT = 0x6267656E  # decorrelates user placement from the world's own streams


@dataclass(frozen=True)
class BackgroundSpec:
    """Either an explicit user list or a uniform-disc generator."""

    users: tuple[tuple[str, GeoPoint, bool], ...] | None = None
    count: int = 0
    center: GeoPoint | None = None
    radius_m: float = 0.0

    def __post_init__(self):
        if self.users is None:
            if self.center is None or self.radius_m <= 0.0 or self.count < 0:
                raise ValueError("generator background needs center, radius_m > 0, count >= 0")


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    epsilon_m: float = 20.0
    cell_size_m: float = 5.0
    vantage_points: tuple[GeoPoint, ...] | None = None
    max_moves: int = 80
    max_queries: int = 40
    # pattern-inference runs only
    locations: int = 3000
    queries_per_location: int = 30
    max_distance_m: float = 3000.0

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise ValueError(f"unknown attack kind {self.kind!r}; expected one of {ATTACK_KINDS}")
        if self.epsilon_m <= 0.0 or self.cell_size_m <= 0.0:
            raise ValueError("epsilon_m and cell_size_m must be positive")
        if self.vantage_points is not None and len(self.vantage_points) != 3:
            raise ValueError("vantage_points must hold exactly 3 points")


@dataclass(frozen=True)
class Scenario:
    name: str
    policy: DisclosurePolicy
    seed: int
    victim: GeoPoint
    victim_show_distance: bool
    background: BackgroundSpec
    attack: AttackSpec
    max_entries: int | None = None


@dataclass(frozen=True)
class MetricsRow:
    scenario: str
    seed: int
    outcome: str
    localization_error: float | None
    region_area: float | None
    moves: int | None
    queries: int
    victim_profile_queries: int


@dataclass(frozen=True)
class SuiteSummary:
    scenario: str
    runs: int
    success_rate: float
    median_error: float | None


# -- world construction -------------------------------------------------------


def _attacker_ids(kind: str) -> tuple[str, ...]:
    if kind in ("colluding", "colluding_favorites"):
        return ("attacker", "colluder-a", "colluder-b")
    return ("attacker",)


def build_world(scenario: Scenario, seed: int) -> tuple[World, tuple[str, ...], tuple[GeoPoint, ...]]:
    """Instantiate the scenario's world for one seed.

    Returns the world, the attacker-controlled account ids, and the effective
    vantage points (explicit ones, or the default triangle scaled to the
    victim-plus-background population).
    """
    world = World(scenario.policy, seed, scenario.max_entries)
    world.add_user(VICTIM_ID, scenario.victim, scenario.victim_show_distance)
    bg = scenario.background
    if bg.users is not None:
        for uid, point, show in bg.users:
            world.add_user(uid, point, show)
    else:
        rng = random.Random(seed ^ _BACKGROUND_SALT)
        proj = Projection.at(bg.center)
        for i in range(bg.count):
            theta = 2.0 * math.pi * rng.random()
            r = bg.radius_m * math.sqrt(rng.random())
            point = unproject(LocalPoint(r * math.cos(theta), r * math.sin(theta)), proj)
            world.add_user(f"bg-{i:03d}", point, True)
    if scenario.attack.vantage_points is not None:
        vantages = tuple(scenario.attack.vantage_points)
    else:
        population = [u.location for _, u in sorted(world.users.items())]
        vantages = default_vantage_points(population)
    ids = _attacker_ids(scenario.attack.kind)
    for uid in ids:
        world.add_user(uid, vantages[0], True)
    return world, ids, vantages


# -- scatter sampling ----------------------------------------------------------


def emit_scatter(
    pattern: ObfuscationPattern,
    n_locations: int,
    queries_per_location: int,
    max_distance: float,
    seed: int,
) -> list[ObfuscationSample]:
    """Sample the obfuscation at uniform-random true distances in (0, max]."""
    if n_locations < 1 or queries_per_location < 1:
        raise ValueError("need at least one location and one query per location")
    rng = random.Random(seed)
    samples = []
    for _ in range(n_locations):
        d = max_distance * (1.0 - rng.random())
        for _ in range(queries_per_location):
            samples.append(ObfuscationSample(d, obfuscate_distance(d, pattern, rng)))
    return samples


def save_samples_csv(samples: Sequence[ObfuscationSample], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["true_m", "shown_m"])
        for s in samples:
            writer.writerow([repr(s.true_distance), repr(s.shown_distance)])


def load_samples_csv(path: Path) -> list[ObfuscationSample]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [ObfuscationSample(float(row["true_m"]), float(row["shown_m"])) for row in reader]


# -- runner ---------------------------------------------------------------------


def run_scenario(scenario: Scenario, out_dir: Path | None = None, seed: int | None = None) -> MetricsRow:
    """Run one seeded attack experiment; never raises on declared attack errors.

    When out_dir is given, writes `<name>-<seed>.geojson` for locator attacks
    (victim truth, vantage points, colluder trajectories, region, estimate),
    or the scatter CSV plus inferred-pattern JSON for inference runs.
    """
    seed = scenario.seed if seed is None else seed
    if scenario.attack.kind == "infer_pattern":
        return _run_inference(scenario, seed, out_dir)

    world, ids, vantages = build_world(scenario, seed)
    log_start = len(world.query_log)
    a = scenario.attack
    outcome = "success"
    report: AttackReport | None = None
    try:
        if a.kind == "trilateration":
            report = exact_trilateration_attack(world, ids[0], vantages, VICTIM_ID)
        elif a.kind == "passive_sandwich":
            region = passive_sandwich_survey(world, ids[0], vantages, VICTIM_ID, cell_size=a.cell_size_m)
            report = AttackReport(
                estimate=region.centroid(),
                region_area=region.area(),
                moves=len(vantages),
                queries=0,  # recounted from the log below
                victim_profile_queries=0,
                region=region,
                trajectories={ids[0]: list(vantages)},
            )
        else:
            opts = ColludingOptions(
                epsilon=a.epsilon_m,
                cell_size=a.cell_size_m,
                use_favorites=(a.kind == "colluding_favorites"),
                vantage_points=vantages,
                max_moves=a.max_moves,
                max_queries=a.max_queries,
            )
            report = colluding_trilateration(world, ids, VICTIM_ID, opts)
    except VictimNeverVisible:
        outcome = "victim_never_visible"
    except NonConvergence:
        outcome = "non_convergence"
    except EmptyRegion:
        outcome = "empty_region"

    attacker_records = [r for r in world.query_log[log_start:] if r.observer in ids]
    queries = len(attacker_records)
    profile_queries = sum(
        1 for r in attacker_records if r.kind is QueryKind.PROFILE_VIEW and r.subject == VICTIM_ID
    )
    error = None
    if report is not None:
        report.error = error = haversine_distance(report.estimate, scenario.victim)
        report.queries = queries
    row = MetricsRow(
        scenario=scenario.name,
        seed=seed,
        outcome=outcome,
        localization_error=error if outcome == "success" else None,
        region_area=report.region_area if report is not None else None,
        moves=report.moves if report is not None else None,
        queries=queries,
        victim_profile_queries=profile_queries,
    )
    log.info("%s seed=%d outcome=%s error=%s queries=%d", scenario.name, seed, outcome, error, queries)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        doc = scenario_geojson(scenario, seed, vantages, report, outcome)
        path = out_dir / f"{scenario.name}-{seed}.geojson"
        path.write_text(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")
    return row


def _run_inference(scenario: Scenario, seed: int, out_dir: Path | None) -> MetricsRow:
    a = scenario.attack
    pattern = scenario.policy.pattern if scenario.policy.pattern is not None else HORNET_DEFAULT
    samples = emit_scatter(pattern, a.locations, a.queries_per_location, a.max_distance_m, seed)
    truth = pattern_to_json(pattern)
    outcome = "non_convergence"
    error = None
    inferred_json: dict | None = None
    try:
        inferred = infer_pattern(samples)
        inferred_json = inferred.to_json()
        if inferred.all_exact():
            deviations = [abs(inferred_json[k] - truth[k]) for k in truth]
            if max(deviations) == 0.0:
                outcome = "success"
                error = 0.0
    except InsufficientSamples:
        pass
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        save_samples_csv(samples, out_dir / f"{scenario.name}-{seed}-scatter.csv")
        if inferred_json is not None:
            (out_dir / f"{scenario.name}-{seed}-inferred.json").write_text(
                json.dumps(inferred_json, sort_keys=True, separators=(",", ":")) + "\n"
            )
    return MetricsRow(
        scenario=scenario.name,
        seed=seed,
        outcome=outcome,
        localization_error=error,
        region_area=None,
        moves=a.locations,
        queries=len(samples),
        victim_profile_queries=0,
    )


def run_suite(
    scenarios: Sequence[Scenario],
    repetitions: int,
    out_dir: Path | None = None,
) -> tuple[list[MetricsRow], list[SuiteSummary]]:
    """Run every scenario `repetitions` times with derived seeds seed+i.

    Returns result rows (sorted by scenario then seed) and per-scenario
    summaries; writes metrics.csv when out_dir is given.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    rows: list[MetricsRow] = []
    for sc in scenarios:
        for i in range(repetitions):
            rows.append(run_scenario(sc, out_dir=out_dir, seed=sc.seed + i))
    rows.sort(key=lambda r: (r.scenario, r.seed))
    summaries = []
    for name in sorted({r.scenario for r in rows}):
        mine = [r for r in rows if r.scenario == name]
        errors = [r.localization_error for r in mine if r.outcome == "success"]
        summaries.append(
            SuiteSummary(
                scenario=name,
                runs=len(mine),
                success_rate=len(errors) / len(mine),
                median_error=statistics.median(errors) if errors else None,
            )
        )
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_suite_csv(out_dir / "metrics.csv", rows, summaries)
    return rows, summaries


_CSV_COLUMNS = [
    "row_type",
    "scenario",
    "seed",
    "outcome",
    "localization_error_m",
    "region_area_m2",
    "moves",
    "queries",
    "victim_profile_queries",
    "median_error_m",
    "success_rate",
]


def write_suite_csv(path: Path, rows: Sequence[MetricsRow], summaries: Sequence[SuiteSummary]) -> None:
    def fmt(v):
        return "" if v is None else (repr(v) if isinstance(v, float) else v)

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    "result",
                    r.scenario,
                    r.seed,
                    r.outcome,
                    fmt(r.localization_error),
                    fmt(r.region_area),
                    fmt(r.moves),
                    r.queries,
                    r.victim_profile_queries,
                    "",
                    "",
                ]
            )
        for s in summaries:
            writer.writerow(
                ["summary", s.scenario, "", "", "", "", "", "", "", fmt(s.median_error), fmt(s.success_rate)]
            )


# -- GeoJSON ---------------------------------------------------------------------


def scenario_geojson(
    scenario: Scenario,
    seed: int,
    vantages: Sequence[GeoPoint],
    report: AttackReport | None,
    outcome: str,
) -> dict:
    features = [
        {
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [scenario.victim.lon, scenario.victim.lat]},
            "properties": {"role": "victim"},
        }
    ]
    for i, v in enumerate(vantages):
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [v.lon, v.lat]},
                "properties": {"role": "vantage", "index": i},
            }
        )
    metrics: dict = {"outcome": outcome}
    if report is not None:
        features.extend(attack_report_to_geojson_features(report))
        metrics.update(
            {
                "localization_error_m": report.error,
                "region_area_m2": report.region_area,
                "moves": report.moves,
                "queries": report.queries,
                "victim_profile_queries": report.victim_profile_queries,
            }
        )
    return {
        "type": "FeatureCollection",
        "features": features,
        "scenario": scenario.name,
        "seed": seed,
        "metrics": metrics,
    }


# -- scenario (de)serialization ----------------------------------------------------


def _geo_to_json(p: GeoPoint) -> dict:
    return {"lat": p.lat, "lon": p.lon}


def _geo_from_json(obj: Mapping) -> GeoPoint:
    return GeoPoint(float(obj["lat"]), float(obj["lon"]))


def scenario_to_json(s: Scenario) -> dict:
    bg = s.background
    if bg.users is not None:
        background = {
            "users": [
                {"id": uid, "lat": p.lat, "lon": p.lon, "show_distance": show}
                for uid, p, show in bg.users
            ]
        }
    else:
        background = {"count": bg.count, "center": _geo_to_json(bg.center), "radius_m": bg.radius_m}
    return {
        "name": s.name,
        "seed": s.seed,
        "policy": policy_to_json(s.policy),
        "victim": {"lat": s.victim.lat, "lon": s.victim.lon, "show_distance": s.victim_show_distance},
        "background": background,
        "attack": {
            "kind": s.attack.kind,
            "epsilon_m": s.attack.epsilon_m,
            "cell_size_m": s.attack.cell_size_m,
            "vantage_points": (
                [_geo_to_json(p) for p in s.attack.vantage_points]
                if s.attack.vantage_points is not None
                else None
            ),
            "max_moves": s.attack.max_moves,
            "max_queries": s.attack.max_queries,
            "locations": s.attack.locations,
            "queries_per_location": s.attack.queries_per_location,
            "max_distance_m": s.attack.max_distance_m,
        },
        "max_entries": s.max_entries,
    }


def scenario_from_json(obj: Mapping) -> Scenario:
    bg_obj = obj["background"]
    if "users" in bg_obj:
        background = BackgroundSpec(
            users=tuple(
                (u["id"], GeoPoint(float(u["lat"]), float(u["lon"])), bool(u["show_distance"]))
                for u in bg_obj["users"]
            )
        )
    else:
        background = BackgroundSpec(
            count=int(bg_obj["count"]),
            center=_geo_from_json(bg_obj["center"]),
            radius_m=float(bg_obj["radius_m"]),
        )
    a = obj["attack"]
    vantage = a.get("vantage_points")
    attack = AttackSpec(
        kind=a["kind"],
        epsilon_m=float(a.get("epsilon_m", 20.0)),
        cell_size_m=float(a.get("cell_size_m", 5.0)),
        vantage_points=tuple(_geo_from_json(p) for p in vantage) if vantage else None,
        max_moves=int(a.get("max_moves", 80)),
        max_queries=int(a.get("max_queries", 40)),
        locations=int(a.get("locations", 3000)),
        queries_per_location=int(a.get("queries_per_location", 30)),
        max_distance_m=float(a.get("max_distance_m", 3000.0)),
    )
    victim = obj["victim"]
    return Scenario(
        name=obj["name"],
        policy=policy_from_json(obj["policy"]),
        seed=int(obj["seed"]),
        victim=GeoPoint(float(victim["lat"]), float(victim["lon"])),
        victim_show_distance=bool(victim["show_distance"]),
        background=background,
        attack=attack,
        max_entries=obj.get("max_entries"),
    )


def with_seed(scenario: Scenario, seed: int) -> Scenario:
    return replace(scenario, seed=seed)
