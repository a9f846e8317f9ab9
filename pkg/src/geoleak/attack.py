"""Attacker toolkit: circle-system solving, annulus constraints, grid regions,
and the adaptive colluder-driven localization loop.

Drivers operate purely through the service's query surface plus the attacker's
own knowledge: entry order, entry ids, shown distances, and the positions the
attacker chose for accounts under his control ("side-channel" distances). The
true_distance field inside responses is never read.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .geodesy import GeoPoint, LocalPoint, Projection, haversine_distance, project, unproject
from .lbs_sim import DisclosurePolicy, PolicyMode, QueryKind, QueryResponse, World
from .obfuscation import invert_reading

log = logging.getLogger(__name__)


class CollinearAdversaries(ValueError):
    """The three adversary positions are (nearly) collinear."""


class EmptyRegion(ValueError):
    """Constraint intersection is empty or has no bounded member."""


class VictimNeverVisible(RuntimeError):
    """The victim never appeared in any response the attacker obtained."""


class NonConvergence(RuntimeError):
    """Move/query budget exhausted before the target precision was reached."""


@dataclass(frozen=True)
class DistanceObservation:
    """A distance reading taken at one adversary position."""

    adversary_position: GeoPoint
    distance: float = 0.0
    kind: str = "exact"
    interval: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in ("exact", "interval"):
            raise ValueError(f"kind must be 'exact' or 'interval', got {self.kind!r}")
        if self.kind == "exact" and self.distance < 0.0:
            raise ValueError("exact observation needs a distance >= 0")
        if self.kind == "interval":
            if self.interval is None or self.interval[0] > self.interval[1]:
                raise ValueError("interval observation needs (lo, hi) with lo <= hi")


@dataclass(frozen=True)
class SandwichObservation:
    """Bracketing distances seen from one adversary position: the entries just
    before and just after the victim on a distance-sorted screen."""

    adversary_position: GeoPoint
    an1: float
    an2: float

    def __post_init__(self):
        if not 0.0 <= self.an1 <= self.an2:
            raise ValueError(f"need 0 <= an1 <= an2, got ({self.an1}, {self.an2})")


@dataclass(frozen=True)
class AnnulusConstraint:
    """Closed ring r_lo <= |q - center| <= r_hi in the projection plane.

    r_lo = 0 degenerates to a disc; r_hi = inf to the complement of a disc.
    """

    center: LocalPoint
    r_lo: float
    r_hi: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.r_hi)

    def contains_local(self, q: LocalPoint) -> bool:
        d = math.hypot(q.x - self.center.x, q.y - self.center.y)
        return self.r_lo <= d <= self.r_hi


def annulus_from_sandwich(s: SandwichObservation, proj: Projection) -> AnnulusConstraint:
    return AnnulusConstraint(project(s.adversary_position, proj), s.an1, s.an2)


def annulus_from_interval_observation(obs: DistanceObservation, proj: Projection) -> AnnulusConstraint:
    if obs.kind != "interval":
        raise ValueError("expected an interval observation")
    lo, hi = obs.interval
    return AnnulusConstraint(project(obs.adversary_position, proj), lo, hi)


# -- exact trilateration ---------------------------------------------------

# degenerate-geometry guard; callers should keep anchors well spread
_MIN_TRIANGLE_AREA_M2 = 1.0


@dataclass(frozen=True)
class TrilaterationFix:
    point: GeoPoint
    residual: float


def solve_circle_system(anchors: Sequence[tuple[float, float]], dists: Sequence[float]) -> tuple[float, float]:
    """Solve three simultaneous circle equations in the plane.

    Subtracting the first circle from the other two leaves a 2x2 linear
    system, which is solved exactly; with inconsistent distances this is the
    point whose pairwise power differences match the readings.

    Raises:
        CollinearAdversaries: anchor triangle area below 100 m^2.
    """
    (x1, y1), (x2, y2), (x3, y3) = anchors
    d1, d2, d3 = dists
    area2 = (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1)
    if abs(area2) / 2.0 <= _MIN_TRIANGLE_AREA_M2:
        raise CollinearAdversaries(f"anchor triangle area {abs(area2) / 2.0:.1f} m^2 too small")
    a11, a12 = 2.0 * (x2 - x1), 2.0 * (y2 - y1)
    b1 = d1 * d1 - d2 * d2 - x1 * x1 + x2 * x2 - y1 * y1 + y2 * y2
    a21, a22 = 2.0 * (x3 - x1), 2.0 * (y3 - y1)
    b2 = d1 * d1 - d3 * d3 - x1 * x1 + x3 * x3 - y1 * y1 + y3 * y3
    det = a11 * a22 - a12 * a21
    return (b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det


def trilaterate(observations: Sequence[DistanceObservation], proj: Projection) -> TrilaterationFix:
    """Locate the point at the given exact distances from three positions.

    Returns the solved point plus the residual max_i | |p - A_i| - D_i |,
    which is ~0 for consistent readings and grows with noise.
    """
    if len(observations) != 3:
        raise ValueError(f"need exactly 3 observations, got {len(observations)}")
    if any(o.kind != "exact" for o in observations):
        raise ValueError("trilateration needs exact observations")
    pts = [project(o.adversary_position, proj) for o in observations]
    anchors = [(p.x, p.y) for p in pts]
    dists = [o.distance for o in observations]
    x, y = solve_circle_system(anchors, dists)
    residual = max(abs(math.hypot(x - ax, y - ay) - d) for (ax, ay), d in zip(anchors, dists))
    return TrilaterationFix(point=unproject(LocalPoint(x, y), proj), residual=residual)


# -- candidate regions ------------------------------------------------------

_MAX_GRID_CELLS = 50_000_000


@dataclass
class CandidateRegion:
    """Occupancy grid over the projection plane.

    Cells are axis-aligned squares on an absolute grid (cell (i, j) spans
    [i*cell, (i+1)*cell) x [j*cell, (j+1)*cell)), so appending constraints can
    only clear cells, never shift them. A cell is kept when its square can
    intersect every constraint (interval test on the distance range from the
    square to each annulus center), which makes containment of any point
    satisfying all constraints conservative: guaranteed, not probabilistic.
    """

    projection: Projection
    cell_size: float
    i0: int
    j0: int
    occupied: np.ndarray

    def area(self) -> float:
        return float(self.occupied.sum()) * self.cell_size**2

    def cell_count(self) -> int:
        return int(self.occupied.sum())

    def centroid_local(self) -> LocalPoint:
        js, is_ = np.nonzero(self.occupied)
        x = (is_.mean() + self.i0 + 0.5) * self.cell_size
        y = (js.mean() + self.j0 + 0.5) * self.cell_size
        return LocalPoint(float(x), float(y))

    def centroid(self) -> GeoPoint:
        return unproject(self.centroid_local(), self.projection)

    def contains_local(self, q: LocalPoint) -> bool:
        i = math.floor(q.x / self.cell_size) - self.i0
        j = math.floor(q.y / self.cell_size) - self.j0
        if 0 <= j < self.occupied.shape[0] and 0 <= i < self.occupied.shape[1]:
            return bool(self.occupied[j, i])
        return False

    def contains(self, p: GeoPoint) -> bool:
        return self.contains_local(project(p, self.projection))

    def cell_rings(self) -> list[list[tuple[float, float]]]:
        """Occupied cells as closed (lon, lat) rings, counter-clockwise."""
        rings = []
        c = self.cell_size
        for j, i in zip(*np.nonzero(self.occupied)):
            x0, y0 = (self.i0 + int(i)) * c, (self.j0 + int(j)) * c
            corners = [(x0, y0), (x0 + c, y0), (x0 + c, y0 + c), (x0, y0 + c), (x0, y0)]
            rings.append([_lonlat(unproject(LocalPoint(x, y), self.projection)) for x, y in corners])
        return rings

    def to_geojson_feature(self) -> dict:
        return {
            "type": "Feature",
            "geometry": {"type": "MultiPolygon", "coordinates": [[ring] for ring in self.cell_rings()]},
            "properties": {
                "role": "region",
                "cell_size_m": self.cell_size,
                "area_m2": self.area(),
            },
        }


def _lonlat(p: GeoPoint) -> tuple[float, float]:
    return (p.lon, p.lat)


def intersect_constraints(
    constraints: Sequence[AnnulusConstraint], cell_size: float, proj: Projection
) -> CandidateRegion:
    """Rasterize the intersection of annulus constraints onto the plane.

    Raises:
        EmptyRegion: no bounded constraint, or the intersection is empty.
    """
    if cell_size <= 0.0:
        raise ValueError("cell_size must be positive")
    bounded = [c for c in constraints if c.bounded]
    if not bounded:
        raise EmptyRegion("no bounded constraint; cannot rasterize an unbounded region")
    x_lo = max(c.center.x - c.r_hi for c in bounded)
    x_hi = min(c.center.x + c.r_hi for c in bounded)
    y_lo = max(c.center.y - c.r_hi for c in bounded)
    y_hi = min(c.center.y + c.r_hi for c in bounded)
    if x_lo >= x_hi or y_lo >= y_hi:
        raise EmptyRegion("constraint bounding boxes do not overlap")
    i0, i1 = math.floor(x_lo / cell_size), math.ceil(x_hi / cell_size)
    j0, j1 = math.floor(y_lo / cell_size), math.ceil(y_hi / cell_size)
    if (i1 - i0) * (j1 - j0) > _MAX_GRID_CELLS:
        raise ValueError("cell_size too small for the constraint extent")
    xw = np.arange(i0, i1, dtype=float)[None, :] * cell_size
    ys = np.arange(j0, j1, dtype=float)[:, None] * cell_size
    occupied = np.ones((j1 - j0, i1 - i0), dtype=bool)
    for c in constraints:
        dx_min = np.maximum(np.maximum(xw - c.center.x, c.center.x - (xw + cell_size)), 0.0)
        dy_min = np.maximum(np.maximum(ys - c.center.y, c.center.y - (ys + cell_size)), 0.0)
        dx_max = np.maximum(np.abs(c.center.x - xw), np.abs(c.center.x - (xw + cell_size)))
        dy_max = np.maximum(np.abs(c.center.y - ys), np.abs(c.center.y - (ys + cell_size)))
        d_min = np.hypot(dx_min, dy_min)
        d_max = np.hypot(dx_max, dy_max)
        occupied &= (d_min <= c.r_hi) & (d_max >= c.r_lo)
    if not occupied.any():
        raise EmptyRegion("observations are mutually inconsistent")
    return CandidateRegion(projection=proj, cell_size=cell_size, i0=i0, j0=j0, occupied=occupied)


# -- attack drivers ----------------------------------------------------------


@dataclass
class ColludingOptions:
    epsilon: float = 20.0
    cell_size: float = 5.0
    use_favorites: bool = False
    vantage_points: tuple[GeoPoint, GeoPoint, GeoPoint] | None = None
    max_moves: int = 80
    max_queries: int = 40
    initial_upper: float = 5000.0


@dataclass
class AttackReport:
    """Outcome of one attack run; error is filled by the harness against ground truth."""

    estimate: GeoPoint
    region_area: float
    moves: int
    queries: int
    victim_profile_queries: int
    error: float | None = None
    residual: float | None = None
    region: CandidateRegion | None = None
    trajectories: dict[str, list[GeoPoint]] = field(default_factory=dict)
    accepted_steps: tuple[int, ...] = ()
    initial_separations: tuple[float, ...] = ()
    observations: tuple[SandwichObservation, ...] = ()


def attack_report_to_geojson_features(report: AttackReport) -> list[dict]:
    features = []
    if report.region is not None:
        features.append(report.region.to_geojson_feature())
    for uid, path in sorted(report.trajectories.items()):
        if len(path) >= 2:
            features.append(
                {
                    "type": "Feature",
                    "geometry": {
                        "type": "LineString",
                        "coordinates": [_lonlat(p) for p in path],
                    },
                    "properties": {"role": "trajectory", "user": uid},
                }
            )
    features.append(
        {
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": _lonlat(report.estimate)},
            "properties": {"role": "estimate"},
        }
    )
    return features


class _Session:
    """Budgeted view of the world for one attack run; counts moves and queries
    and remembers where the attacker put his own accounts."""

    def __init__(self, world: World, attacker_ids: Sequence[str], victim_id: str, options: ColludingOptions):
        self.world = world
        self.victim_id = victim_id
        self.options = options
        self.moves = 0
        self.queries = 0
        self.victim_seen = False
        self.own_positions: dict[str, GeoPoint] = {
            uid: world.users[uid].location for uid in attacker_ids
        }
        self.trajectories: dict[str, list[GeoPoint]] = {
            uid: [world.users[uid].location] for uid in attacker_ids
        }

    def move(self, uid: str, where: GeoPoint) -> None:
        if self.moves >= self.options.max_moves:
            self._give_up("move budget exhausted")
        self.world.move_user(uid, where)
        self.moves += 1
        self.own_positions[uid] = where
        self.trajectories[uid].append(where)

    def observe(self, observer: str, favorites: bool) -> QueryResponse:
        if self.queries >= self.options.max_queries:
            self._give_up("query budget exhausted")
        self.queries += 1
        resp = self.world.query_favorites(observer) if favorites else self.world.query_nearby(observer)
        if resp.index_of(self.victim_id) is not None:
            self.victim_seen = True
        return resp

    def side_distance(self, vantage: GeoPoint, uid: str) -> float:
        return haversine_distance(vantage, self.own_positions[uid])

    def _give_up(self, why: str) -> None:
        if not self.victim_seen and not self.options.use_favorites:
            raise VictimNeverVisible(f"{why}; victim never appeared in any response")
        raise NonConvergence(why)


def _geo_centroid(points: Sequence[GeoPoint]) -> GeoPoint:
    return GeoPoint(
        sum(p.lat for p in points) / len(points),
        sum(p.lon for p in points) / len(points),
    )


def _flank_bounds(
    resp: QueryResponse,
    victim_index: int,
    vantage: GeoPoint,
    own_positions: Mapping[str, GeoPoint],
    policy: DisclosurePolicy,
) -> tuple[float, float]:
    """Lower/upper bound on the vantage-to-victim distance from the entries
    flanking the victim. Hidden flankers the attacker does not control yield
    no bound (0 / inf)."""

    def bound(entry, upper: bool) -> float | None:
        if entry.user in own_positions:
            return haversine_distance(vantage, own_positions[entry.user])
        if entry.shown_distance is None:
            return None
        if policy.mode is PolicyMode.OBFUSCATED:
            interval = invert_reading(entry.shown_distance, policy.pattern)
            if interval is None:
                return None
            return interval[1] if upper else interval[0]
        return entry.shown_distance

    lo, hi = 0.0, math.inf
    if victim_index > 0:
        b = bound(resp.entries[victim_index - 1], upper=False)
        if b is not None:
            lo = b
    if victim_index < len(resp.entries) - 1:
        b = bound(resp.entries[victim_index + 1], upper=True)
        if b is not None:
            hi = b
    return lo, hi


def default_vantage_points(reference_points: Sequence[GeoPoint]) -> tuple[GeoPoint, GeoPoint, GeoPoint]:
    """Bundled survey triangle rescaled to the reference population: the Kyoto
    landmark offsets around the lab point, shrunk or grown so the farthest
    vantage sits at the population's extent from its centroid."""
    from .fixtures import SCIENCE_FRONTIER_LAB, SURVEY_TRIANGLE

    center = _geo_centroid(reference_points)
    proj = Projection.at(center)
    extent = max((project(p, proj).norm() for p in reference_points), default=0.0)
    radius = max(500.0, extent)
    anchor = Projection.at(SCIENCE_FRONTIER_LAB)
    offsets = [project(p, anchor) for p in SURVEY_TRIANGLE]
    scale = radius / max(o.norm() for o in offsets)
    return tuple(
        unproject(LocalPoint(o.x * scale, o.y * scale), proj) for o in offsets
    )


def _direction_from(
    v_local: LocalPoint, annuli: list[AnnulusConstraint], proj: Projection, fallback: LocalPoint, coarse: float
) -> tuple[float, float]:
    target = fallback
    bounded = [a for a in annuli if a.bounded]
    if bounded:
        try:
            target = intersect_constraints(bounded, coarse, proj).centroid_local()
        except EmptyRegion:
            pass
    dx, dy = target.x - v_local.x, target.y - v_local.y
    n = math.hypot(dx, dy)
    if n < 1.0:
        return (0.0, 1.0)
    return (dx / n, dy / n)


def _on_ray(v_local: LocalPoint, direction: tuple[float, float], r: float, proj: Projection) -> GeoPoint:
    return unproject(LocalPoint(v_local.x + direction[0] * r, v_local.y + direction[1] * r), proj)


def colluding_trilateration(
    world: World,
    attacker_ids: Sequence[str],
    victim_id: str,
    options: ColludingOptions | None = None,
) -> AttackReport:
    """Locate a victim whose distance may be hidden or obfuscated by keeping
    them sandwiched between two attacker-controlled accounts.

    Per vantage point: read the screen once to find the victim's rank and take
    coarse bounds from the flanking entries, then repeatedly move the two
    colluders a quarter of the way in from the current bracket and confirm the
    victim still sorts between them. A confirmed placement is a sound annulus
    (radii are the attacker-computed true colluder distances); a broken
    sandwich tells which side the victim fell on, so the bracket shrinks on
    every usable observation. Stops when a confirmed bracket is narrower than
    options.epsilon. The victim's profile is never queried.

    Raises:
        VictimNeverVisible: budgets ran out and the victim was never seen
            (only without favorites).
        NonConvergence: move/query budget exhausted.
    """
    opts = options or ColludingOptions()
    if len(attacker_ids) != 3 or len(set(attacker_ids)) != 3:
        raise ValueError("need exactly 3 distinct attacker-controlled accounts")
    if victim_id in attacker_ids:
        raise ValueError("victim cannot be one of the attacker accounts")
    observer, inner_id, outer_id = attacker_ids
    for uid in (*attacker_ids, victim_id):
        if uid not in world.users:
            raise ValueError(f"no such user: {uid}")

    if opts.vantage_points is not None:
        vantages = tuple(opts.vantage_points)
    else:
        others = [u.location for uid, u in sorted(world.users.items()) if uid not in attacker_ids]
        vantages = default_vantage_points(others)
    if len(vantages) != 3:
        raise ValueError("need exactly 3 vantage points")

    log_start = len(world.query_log)
    session = _Session(world, attacker_ids, victim_id, opts)
    proj = Projection.at(_geo_centroid(vantages))
    fallback_target = project(_geo_centroid(vantages), proj)
    coarse_cell = max(opts.cell_size, opts.epsilon)

    annuli: list[AnnulusConstraint] = []
    sandwiches: list[SandwichObservation] = []
    accepted_steps: list[int] = []
    initial_separations: list[float] = []

    def record(obs: SandwichObservation) -> None:
        if sandwiches and sandwiches[-1] == obs:
            return
        sandwiches.append(obs)
        annuli.append(annulus_from_sandwich(obs, proj))

    if opts.use_favorites:
        world.add_favorite(observer, inner_id)
        world.add_favorite(observer, outer_id)
        # anchor the victim on first public sighting; afterwards the favorites
        # view is immune to dropping
        session.move(observer, vantages[0])
        while True:
            resp = session.observe(observer, favorites=False)
            if resp.index_of(victim_id) is not None:
                world.add_favorite(observer, victim_id)
                break

    for vantage in vantages:
        session.move(observer, vantage)
        v_local = project(vantage, proj)
        direction = _direction_from(v_local, annuli, proj, fallback_target, coarse_cell)

        # first sighting from this vantage; flankers give the starting bracket
        while True:
            resp = session.observe(observer, favorites=opts.use_favorites)
            vi = resp.index_of(victim_id)
            if vi is not None:
                break
        lo, hi = _flank_bounds(resp, vi, vantage, session.own_positions, world.policy)
        if lo > 0.0 or math.isfinite(hi):
            record(SandwichObservation(vantage, lo, hi))

        accepted = 0
        s0: float | None = None
        expand = max(opts.initial_upper, lo * 2.0)
        while True:
            # the bracket invariant lo < AV < hi is maintained exactly by every
            # update below, so a narrow bracket is itself a finished vantage
            if math.isfinite(hi):
                if s0 is None:
                    s0 = hi - lo
                if hi - lo <= opts.epsilon:
                    record(SandwichObservation(vantage, lo, hi))
                    break
            top = hi if math.isfinite(hi) else expand
            width = top - lo
            t_inner = lo + width / 4.0
            t_outer = top - width / 4.0
            session.move(inner_id, _on_ray(v_local, direction, t_inner, proj))
            session.move(outer_id, _on_ray(v_local, direction, t_outer, proj))
            r_inner = session.side_distance(vantage, inner_id)
            r_outer = session.side_distance(vantage, outer_id)
            while True:
                resp = session.observe(observer, favorites=opts.use_favorites)
                vi = resp.index_of(victim_id)
                ii = resp.index_of(inner_id)
                oi = resp.index_of(outer_id)
                if vi is not None and ii is not None and oi is not None:
                    break  # all three visible; otherwise burn budget and re-query
            if ii < vi < oi:
                if s0 is None:
                    s0 = r_outer - r_inner  # establishment from an unbounded start
                else:
                    accepted += 1
                lo, hi = r_inner, r_outer
                record(SandwichObservation(vantage, r_inner, r_outer))
            elif vi < ii:
                hi = min(hi, r_inner)
            else:  # vi > oi: victim farther than both colluders
                lo = max(lo, r_outer)
                if not math.isfinite(hi):
                    expand *= 2.0
                    if expand > 100_000.0:
                        session._give_up("victim distance bracket never established")
        accepted_steps.append(accepted)
        initial_separations.append(s0 if s0 is not None else 0.0)
        log.debug("vantage %s bounded to [%.1f, %.1f] after %d accepted steps", vantage, lo, hi, accepted)

    region = intersect_constraints(annuli, opts.cell_size, proj)
    victim_profile_queries = sum(
        1
        for r in world.query_log[log_start:]
        if r.kind is QueryKind.PROFILE_VIEW and r.subject == victim_id
    )
    return AttackReport(
        estimate=region.centroid(),
        region_area=region.area(),
        moves=session.moves,
        queries=session.queries,
        victim_profile_queries=victim_profile_queries,
        region=region,
        trajectories=session.trajectories,
        accepted_steps=tuple(accepted_steps),
        initial_separations=tuple(initial_separations),
        observations=tuple(sandwiches),
    )


def passive_sandwich_survey(
    world: World,
    attacker_id: str,
    vantage_points: Sequence[GeoPoint],
    victim_id: str,
    cell_size: float = 5.0,
) -> CandidateRegion:
    """Non-adaptive variant: one nearby query per vantage point, bounds taken
    from whatever real users happen to flank the victim.

    Raises:
        VictimNeverVisible: victim absent from all three responses.
        EmptyRegion: no bounded constraint was collected, or constraints clash.
    """
    if len(vantage_points) != 3:
        raise ValueError("need exactly 3 vantage points")
    proj = Projection.at(_geo_centroid(vantage_points))
    own = {attacker_id: world.users[attacker_id].location}
    constraints: list[AnnulusConstraint] = []
    victim_seen = False
    for vantage in vantage_points:
        world.move_user(attacker_id, vantage)
        own[attacker_id] = vantage
        resp = world.query_nearby(attacker_id)
        vi = resp.index_of(victim_id)
        if vi is None:
            continue
        victim_seen = True
        lo, hi = _flank_bounds(resp, vi, vantage, own, world.policy)
        if lo > 0.0 or math.isfinite(hi):
            constraints.append(annulus_from_sandwich(SandwichObservation(vantage, lo, hi), proj))
    if not victim_seen:
        raise VictimNeverVisible("victim absent from every vantage response")
    return intersect_constraints(constraints, cell_size, proj)


def exact_trilateration_attack(
    world: World,
    attacker_id: str,
    vantage_points: Sequence[GeoPoint],
    victim_id: str,
) -> AttackReport:
    """The original attack: view the victim's profile from three positions and
    intersect the three distance circles. Requires the shown distance to be
    present (it is taken at face value, so obfuscated services yield a noisy
    residual rather than a fix)."""
    if len(vantage_points) != 3:
        raise ValueError("need exactly 3 vantage points")
    log_start = len(world.query_log)
    trajectories: dict[str, list[GeoPoint]] = {attacker_id: [world.users[attacker_id].location]}
    observations = []
    moves = 0
    for vantage in vantage_points:
        world.move_user(attacker_id, vantage)
        moves += 1
        trajectories[attacker_id].append(vantage)
        entry = world.view_profile(attacker_id, victim_id)
        if entry.shown_distance is None:
            raise VictimNeverVisible("victim's distance is hidden from profile views")
        observations.append(DistanceObservation(vantage, entry.shown_distance, kind="exact"))
    proj = Projection.at(_geo_centroid(vantage_points))
    fix = trilaterate(observations, proj)
    attacker_records = [r for r in world.query_log[log_start:] if r.observer == attacker_id]
    return AttackReport(
        estimate=fix.point,
        region_area=0.0,
        moves=moves,
        queries=len(attacker_records),
        victim_profile_queries=sum(
            1 for r in attacker_records if r.kind is QueryKind.PROFILE_VIEW and r.subject == victim_id
        ),
        residual=fix.residual,
        trajectories=trajectories,
    )
