"""Plan decoding, validation and the myopic baseline planner.

A plan is the executable view of a tour: timed UAV legs, a UGV waypoint
schedule and a battery trace.  Leg durations and the recorded total time
come from the same arithmetic as the edge costs, so a decoded plan's
total_time equals the tour cost exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .energy import PlannerConfig, consumption_levels, recharge_time
from .errors import Infeasible
from .geometry import (Cell, FlightMode, Site, euclid, traversal_heading,
                       ugv_time)
from .graph import ClusteredGraph, EdgeBreakdown
from .solver import GtspTour


class LegKind(Enum):
    FLY = "fly"
    LAND = "land"
    TAKE_OFF = "take_off"
    RECHARGE_IN_PLACE = "recharge_in_place"
    RIDE_AND_RECHARGE = "ride_and_recharge"


@dataclass(frozen=True)
class Leg:
    kind: LegKind
    start_site: Site
    end_site: Site
    duration: float
    battery_before: int
    battery_after: int
    mode: FlightMode | None = None
    levels: int = 0
    covers_cell: int | None = None
    start_heading: float | None = None
    end_heading: float | None = None


@dataclass(frozen=True)
class UgvWaypoint:
    site: Site
    arrive_by: float
    depart_at: float
    via_ride: bool = False


@dataclass(frozen=True)
class Plan:
    cell_order: tuple[tuple[int, str], ...]
    uav_legs: tuple[Leg, ...]
    ugv_waypoints: tuple[UgvWaypoint, ...]
    total_time: float
    battery_trace: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Issue:
    severity: str  # "violation" or "warning"
    code: str
    message: str
    wait: float = 0.0


_ENTRY_STOP = ("entry", "both")
_EXIT_STOP = ("exit", "both")


class _Builder:
    def __init__(self, levels: int) -> None:
        self.legs: list[Leg] = []
        self.waypoints: list[UgvWaypoint] = []
        self.clock = 0.0
        self.battery = levels
        self.trace: list[tuple[str, int]] = [("start", levels)]

    def emit(self, kind: LegKind, start: Site, end: Site, duration: float,
             battery_after: int, event: str, *, mode: FlightMode | None = None,
             levels: int = 0, covers_cell: int | None = None,
             start_heading: float | None = None,
             end_heading: float | None = None) -> None:
        self.legs.append(Leg(kind, start, end, duration, self.battery,
                             battery_after, mode, levels, covers_cell,
                             start_heading, end_heading))
        self.clock += duration
        self.battery = battery_after
        self.trace.append((event, battery_after))

    def add_waypoint(self, site: Site, arrive_by: float, depart_at: float,
                     via_ride: bool = False) -> None:
        last = self.waypoints[-1] if self.waypoints else None
        if last is not None and not via_ride and not last.via_ride \
                and last.site == site:
            self.waypoints[-1] = UgvWaypoint(site, last.arrive_by, depart_at)
            return
        self.waypoints.append(UgvWaypoint(site, arrive_by, depart_at, via_ride))


def _emit_stop(b: _Builder, site: Site, gain: int, cfg: PlannerConfig) -> None:
    """Land, recharge by gain levels, take off again at one road site."""
    arrive = b.clock
    b.emit(LegKind.LAND, site, site, cfg.t_land, b.battery,
           f"land:site{site.id}")
    b.emit(LegKind.RECHARGE_IN_PLACE, site, site, recharge_time(gain, cfg),
           b.battery + gain, f"recharge:site{site.id}", levels=gain)
    b.emit(LegKind.TAKE_OFF, site, site, cfg.t_takeoff, b.battery,
           f"take_off:site{site.id}")
    b.add_waypoint(site, arrive, b.clock)


def _emit_edge(b: _Builder, bd: EdgeBreakdown, from_cell: int,
               cfg: PlannerConfig) -> None:
    t = bd.edge_type
    cover_mode = t.cover_mode
    fw_cover = cover_mode is FlightMode.FIXED_WING
    b.emit(LegKind.FLY, bd.entry_site_i, bd.exit_site_i, bd.cover_time,
           b.battery - bd.cover_cons, f"fly:cover-cell{from_cell}",
           mode=cover_mode, covers_cell=from_cell,
           start_heading=bd.cover_heading if fw_cover else None,
           end_heading=bd.cover_heading if fw_cover else None)

    if t.stops == "ride":
        pickup = b.clock
        b.emit(LegKind.LAND, bd.exit_site_i, bd.exit_site_i, cfg.t_land,
               b.battery, f"land:site{bd.exit_site_i.id}")
        ride_start = b.clock
        b.emit(LegKind.RIDE_AND_RECHARGE, bd.exit_site_i, bd.entry_site_j,
               bd.ride_time, b.battery + bd.split.in_transit,
               f"ride:site{bd.exit_site_i.id}-site{bd.entry_site_j.id}",
               levels=bd.split.in_transit)
        ride_end = b.clock
        b.emit(LegKind.TAKE_OFF, bd.entry_site_j, bd.entry_site_j,
               cfg.t_takeoff, b.battery, f"take_off:site{bd.entry_site_j.id}")
        # The drop-off is reached while carrying the UAV, so only the
        # pick-up imposes a deadline on the UGV.
        b.add_waypoint(bd.exit_site_i, pickup, ride_start)
        b.add_waypoint(bd.entry_site_j, ride_end, b.clock, via_ride=True)
        return

    if t.stops in _EXIT_STOP:
        _emit_stop(b, bd.exit_site_i, bd.split.at_exit, cfg)

    fw_transit = t.transit_mode is FlightMode.FIXED_WING
    b.emit(LegKind.FLY, bd.exit_site_i, bd.entry_site_j, bd.transit_time,
           b.battery - bd.transit_cons, "fly:transit",
           mode=t.transit_mode,
           start_heading=bd.transit_start_heading if fw_transit else None,
           end_heading=bd.transit_end_heading if fw_transit else None)

    if t.stops in _ENTRY_STOP:
        _emit_stop(b, bd.entry_site_j, bd.split.at_entry, cfg)


def decode(g: ClusteredGraph, tour: GtspTour, cfg: PlannerConfig) -> Plan:
    """Expand a tour into timed legs, waypoints and a battery trace."""
    verts = list(tour.vertices)
    if 0 not in verts:
        raise ValueError("tour does not visit the depot")
    pivot = verts.index(0)
    verts = verts[pivot:] + verts[:pivot]
    if len(verts) != len(g.clusters):
        raise ValueError("tour must visit every cluster exactly once")

    b = _Builder(g.levels)
    total = 0.0

    if not math.isfinite(float(g.cost[0, verts[1]])):
        raise ValueError("tour starts on an infeasible depot edge")
    assert g.vertices[verts[1]].level == g.levels
    total += float(g.cost[0, verts[1]])

    for u_id, w_id in zip(verts[1:-1], verts[2:]):
        u = g.vertices[u_id]
        w = g.vertices[w_id]
        bd = g.breakdown(u_id, w_id)
        if bd is None:
            raise ValueError(
                f"tour contains an infeasible edge {u_id}->{w_id}")
        assert b.battery == u.level
        _emit_edge(b, bd, u.cell_index, cfg)
        assert b.battery == w.level
        total += float(g.cost[u_id, w_id])

    last_id = verts[-1]
    last = g.vertices[last_id]
    closing = float(g.cost[last_id, 0])
    if not math.isfinite(closing):
        raise ValueError("tour ends on an infeasible depot edge")
    cell = g.cells[last.cell_index]
    entry = cell.end(last.entry_end)
    exit_site = cell.other_end(last.entry_end)
    cons_m = consumption_levels(cell.length, FlightMode.MULTI_ROTOR, cfg)
    cons_f = consumption_levels(cell.length, FlightMode.FIXED_WING, cfg)
    t_m = cell.length
    t_f = cell.length / cfg.fixed_wing_speed
    if last.level >= cons_m and (last.level < cons_f or t_m <= t_f):
        mode, cons = FlightMode.MULTI_ROTOR, cons_m
    else:
        mode, cons = FlightMode.FIXED_WING, cons_f
    assert b.battery == last.level
    heading = traversal_heading(cell, last.entry_end)
    fw = mode is FlightMode.FIXED_WING
    b.emit(LegKind.FLY, entry, exit_site, closing, b.battery - cons,
           f"fly:cover-cell{last.cell_index}", mode=mode,
           covers_cell=last.cell_index,
           start_heading=heading if fw else None,
           end_heading=heading if fw else None)
    total += closing

    cell_order = tuple((g.vertices[v].cell_index, g.vertices[v].entry_end)
                       for v in verts[1:])
    return Plan(cell_order, tuple(b.legs), tuple(b.waypoints), total,
                tuple(b.trace))


def validate(plan: Plan, cells: list[Cell], cfg: PlannerConfig) -> list[Issue]:
    """Check physical consistency; violations are hard, warnings are not."""
    issues: list[Issue] = []
    cap = cfg.battery_levels

    for idx, leg in enumerate(plan.uav_legs):
        for label, level in (("before", leg.battery_before),
                             ("after", leg.battery_after)):
            if level < 0 or level > cap:
                issues.append(Issue(
                    "violation", "battery-range",
                    f"leg {idx} battery {label} is {level}, outside [0, {cap}]"))

    covered: dict[int, int] = {}
    for leg in plan.uav_legs:
        if leg.covers_cell is not None:
            covered[leg.covers_cell] = covered.get(leg.covers_cell, 0) + 1
    for cell in cells:
        count = covered.get(cell.index, 0)
        if count == 0:
            issues.append(Issue("violation", "cell-uncovered",
                                f"cell {cell.index} is never covered"))
        elif count > 1:
            issues.append(Issue("violation", "cell-recovered",
                                f"cell {cell.index} is covered {count} times"))
    for index in covered:
        if not any(c.index == index for c in cells):
            issues.append(Issue("violation", "cell-unknown",
                                f"plan covers unknown cell {index}"))

    for idx, leg in enumerate(plan.uav_legs):
        if leg.kind is LegKind.RECHARGE_IN_PLACE and not leg.start_site.on_road:
            issues.append(Issue(
                "violation", "recharge-off-road",
                f"leg {idx} recharges at off-road site {leg.start_site.id}"))
        if leg.kind is LegKind.RIDE_AND_RECHARGE and not (
                leg.start_site.on_road and leg.end_site.on_road):
            issues.append(Issue(
                "violation", "ride-off-road",
                f"leg {idx} rides between sites {leg.start_site.id} and "
                f"{leg.end_site.id}, not both on the road"))

    elapsed = 0.0
    for leg in plan.uav_legs:
        elapsed += leg.duration
    if abs(elapsed - plan.total_time) > 1e-6:
        issues.append(Issue(
            "violation", "time-mismatch",
            f"leg durations sum to {elapsed!r} but total_time is "
            f"{plan.total_time!r}"))

    if plan.ugv_waypoints:
        # The UGV starts pre-positioned at its first waypoint.
        prev = plan.ugv_waypoints[0]
        depart = prev.depart_at
        for wp in plan.ugv_waypoints[1:]:
            if wp.via_ride:
                arrival = wp.arrive_by  # carries the UAV on this hop
            else:
                arrival = depart + ugv_time(prev.site, wp.site, cfg)
            if arrival > wp.arrive_by + 1e-9:
                issues.append(Issue(
                    "warning", "ugv-late",
                    f"ugv reaches site {wp.site.id} at {arrival:.3f} but is "
                    f"needed by {wp.arrive_by:.3f}",
                    wait=arrival - wp.arrive_by))
            depart = max(arrival, wp.depart_at)
            prev = wp
    return issues


def baseline_plan(cells: list[Cell], cfg: PlannerConfig) -> Plan:
    """Visit cells in input order, multi-rotor only, recharging myopically."""
    cap = cfg.battery_levels
    b = _Builder(cap)
    order: list[tuple[int, str]] = []
    current: Site | None = None

    for cell in cells:
        if current is None:
            entry_end = "A"
        else:
            d_a = euclid(current, cell.end_a)
            d_b = euclid(current, cell.end_b)
            entry_end = "A" if d_a <= d_b else "B"
        entry = cell.end(entry_end)
        exit_site = cell.other_end(entry_end)
        transit = 0.0 if current is None else euclid(current, entry)
        need = (consumption_levels(transit, FlightMode.MULTI_ROTOR, cfg)
                + consumption_levels(cell.length, FlightMode.MULTI_ROTOR, cfg))
        if need > cap:
            raise Infeasible(
                f"cell {cell.index} needs {need} levels, above capacity {cap}")
        if b.battery < need:
            if current is None:
                raise Infeasible("start battery cannot cover the first cell")
            if not current.on_road:
                raise Infeasible(
                    f"site {current.id} is off-road, cannot recharge there")
            _emit_stop(b, current, cap - b.battery, cfg)
        if transit > 0.0:
            b.emit(LegKind.FLY, current, entry, transit,
                   b.battery - consumption_levels(
                       transit, FlightMode.MULTI_ROTOR, cfg),
                   "fly:transit", mode=FlightMode.MULTI_ROTOR)
        b.emit(LegKind.FLY, entry, exit_site, cell.length,
               b.battery - consumption_levels(
                   cell.length, FlightMode.MULTI_ROTOR, cfg),
               f"fly:cover-cell{cell.index}", mode=FlightMode.MULTI_ROTOR,
               covers_cell=cell.index)
        order.append((cell.index, entry_end))
        current = exit_site

    return Plan(tuple(order), tuple(b.legs), tuple(b.waypoints), b.clock,
                tuple(b.trace))
