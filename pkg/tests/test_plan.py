"""Plan decoding, validation and baseline tests."""

import math
import random

import pytest

from airmule.energy import PlannerConfig
from airmule.errors import Infeasible
from airmule.geometry import Cell, FlightMode, Site
from airmule.graph import EdgeType, build_instance
from airmule.instances import gen_random
from airmule.plan import (Issue, Leg, LegKind, Plan, UgvWaypoint, _Builder,
                          baseline_plan, decode, validate)
from airmule.solver import GtspTour, SolverParams, solve_exact, solve_glns, tour_cost


def two_cells():
    return [
        Cell(0, Site(0, 0.0, 0.0), Site(1, 10.0, 0.0)),
        Cell(1, Site(2, 20.0, 0.0), Site(3, 30.0, 0.0)),
    ]


def test_decode_ride_edge_expansion():
    """A tight battery and slow fixed wing make the ride option win; its
    expansion is fly, land, ride-and-recharge, take off."""
    cells = two_cells()
    cfg = PlannerConfig(d_max=11.0, battery_levels=20, ugv_speed_ratio=0.2,
                        fixed_wing_speed=0.1)
    g = build_instance(cells, cfg)
    u = g.vertex_id(0, "A", 20)
    v = g.vertex_id(1, "A", 20)
    assert g.best_type[u, v] == EdgeType.M_DTU.value
    assert float(g.cost[u, v]) == 110.0

    tour = GtspTour((0, u, v), 0.0)
    tour = GtspTour(tour.vertices, tour_cost(g, tour))
    plan = decode(g, tour, cfg)

    kinds = [leg.kind for leg in plan.uav_legs]
    assert kinds == [LegKind.FLY, LegKind.LAND, LegKind.RIDE_AND_RECHARGE,
                     LegKind.TAKE_OFF, LegKind.FLY]
    assert [leg.duration for leg in plan.uav_legs] == [10.0, 45.0, 50.0, 5.0, 10.0]
    assert plan.total_time == tour.cost == 120.0

    assert len(plan.ugv_waypoints) == 2
    pick, drop = plan.ugv_waypoints
    assert pick.site.id == 1 and not pick.via_ride
    assert pick.arrive_by == 10.0 and pick.depart_at == 55.0
    assert drop.site.id == 2 and drop.via_ride
    assert drop.arrive_by == 105.0 and drop.depart_at == 110.0

    assert not validate(plan, cells, cfg)


def test_decode_stop_edge_waypoints():
    cells = two_cells()
    cfg = PlannerConfig(d_max=100.0, battery_levels=20, fixed_wing_speed=0.1)
    g = build_instance(cells, cfg)
    u = g.vertex_id(0, "A", 20)
    v = g.vertex_id(1, "A", 20)
    assert g.best_type[u, v] == EdgeType.M_MDU.value
    tour = GtspTour((0, u, v), 0.0)
    tour = GtspTour(tour.vertices, tour_cost(g, tour))
    plan = decode(g, tour, cfg)
    kinds = [leg.kind for leg in plan.uav_legs]
    assert kinds == [LegKind.FLY, LegKind.FLY, LegKind.LAND,
                     LegKind.RECHARGE_IN_PLACE, LegKind.TAKE_OFF, LegKind.FLY]
    assert len(plan.ugv_waypoints) == 1
    wp = plan.ugv_waypoints[0]
    assert wp.site.id == 2
    assert wp.arrive_by == 20.0  # lands right after the two flights
    assert wp.depart_at == plan.total_time - 10.0  # leaves after take-off
    assert not validate(plan, cells, cfg)


def test_decode_rejects_infeasible_tour():
    cells = two_cells()
    cfg = PlannerConfig(d_max=100.0, battery_levels=20)
    g = build_instance(cells, cfg)
    bad = GtspTour((0, g.vertex_id(0, "A", 3), g.vertex_id(1, "A", 20)), 0.0)
    with pytest.raises(ValueError):
        decode(g, bad, cfg)  # depot must leave at full battery


def test_decode_rejects_missing_cluster():
    cells = two_cells()
    cfg = PlannerConfig(d_max=100.0, battery_levels=20)
    g = build_instance(cells, cfg)
    with pytest.raises(ValueError):
        decode(g, GtspTour((0, g.vertex_id(0, "A", 20)), 0.0), cfg)
    with pytest.raises(ValueError):
        decode(g, GtspTour((g.vertex_id(0, "A", 20),
                            g.vertex_id(1, "A", 20)), 0.0), cfg)


def test_decode_total_time_equals_tour_cost_seeded():
    rng = random.Random(31)
    for trial in range(12):
        cfg = PlannerConfig(d_max=rng.choice([40.0, 70.0]),
                            battery_levels=rng.choice([3, 4]),
                            fixed_wing_ratio=rng.choice([1.5, 3.0]),
                            turn_radius=rng.choice([0.5, 1.5]),
                            ugv_speed_ratio=rng.choice([0.3, 1.0]),
                            fixed_wing_speed=rng.choice([1.0, 2.0]))
        cells = gen_random(rng.randint(2, 4), 28.0, 8.0, seed=trial,
                           road_fraction=rng.choice([0.8, 1.0]))
        g = build_instance(cells, cfg)
        try:
            tour = solve_exact(g)
        except Infeasible:
            continue
        plan = decode(g, tour, cfg)
        assert plan.total_time == tour.cost
        assert not [i for i in validate(plan, cells, cfg)
                    if i.severity == "violation"]
        assert sorted(index for index, _ in plan.cell_order) == \
            list(range(len(cells)))


def test_decode_rotates_depot_first():
    cells = two_cells()
    cfg = PlannerConfig(d_max=100.0, battery_levels=20)
    g = build_instance(cells, cfg)
    u = g.vertex_id(0, "A", 20)
    v = g.vertex_id(1, "A", 16)
    rotated = GtspTour((v, 0, u), 0.0)
    rotated = GtspTour(rotated.vertices, tour_cost(g, rotated))
    plan = decode(g, rotated, cfg)
    assert plan.cell_order[0][0] == 0


def make_leg(kind=LegKind.FLY, start=None, end=None, duration=1.0,
             before=5, after=5, **kw):
    start = start or Site(0, 0.0, 0.0)
    end = end or Site(1, 1.0, 0.0)
    return Leg(kind, start, end, duration, before, after, **kw)


def plan_of(legs, total=None, waypoints=()):
    total = sum(l.duration for l in legs) if total is None else total
    return Plan(((0, "A"),), tuple(legs), tuple(waypoints), total,
                (("start", 5),))


def test_validate_flags_battery_range():
    cfg = PlannerConfig(battery_levels=5)
    cells = [Cell(0, Site(0, 0.0, 0.0), Site(1, 1.0, 0.0))]
    legs = [make_leg(covers_cell=0, mode=FlightMode.MULTI_ROTOR, after=-1)]
    issues = validate(plan_of(legs), cells, cfg)
    assert [i.code for i in issues] == ["battery-range"]


def test_validate_flags_coverage():
    cfg = PlannerConfig(battery_levels=5)
    cells = [Cell(0, Site(0, 0.0, 0.0), Site(1, 1.0, 0.0)),
             Cell(1, Site(2, 2.0, 0.0), Site(3, 3.0, 0.0))]
    legs = [make_leg(covers_cell=0, mode=FlightMode.MULTI_ROTOR),
            make_leg(covers_cell=0, mode=FlightMode.MULTI_ROTOR)]
    codes = sorted(i.code for i in validate(plan_of(legs), cells, cfg))
    assert codes == ["cell-recovered", "cell-uncovered"]


def test_validate_flags_off_road_recharge():
    cfg = PlannerConfig(battery_levels=5)
    off = Site(0, 0.0, 0.0, on_road=False)
    cells = [Cell(0, off, Site(1, 1.0, 0.0))]
    legs = [make_leg(covers_cell=0, mode=FlightMode.MULTI_ROTOR),
            make_leg(kind=LegKind.RECHARGE_IN_PLACE, start=off, end=off,
                     levels=1)]
    codes = [i.code for i in validate(plan_of(legs), cells, cfg)]
    assert codes == ["recharge-off-road"]


def test_validate_flags_time_mismatch():
    cfg = PlannerConfig(battery_levels=5)
    cells = [Cell(0, Site(0, 0.0, 0.0), Site(1, 1.0, 0.0))]
    legs = [make_leg(covers_cell=0, mode=FlightMode.MULTI_ROTOR)]
    issues = validate(plan_of(legs, total=99.0), cells, cfg)
    assert [i.code for i in issues] == ["time-mismatch"]


def test_validate_warns_late_ugv():
    cfg = PlannerConfig(battery_levels=5, ugv_speed_ratio=0.1)
    cells = [Cell(0, Site(0, 0.0, 0.0), Site(1, 1.0, 0.0))]
    legs = [make_leg(covers_cell=0, mode=FlightMode.MULTI_ROTOR)]
    wps = (UgvWaypoint(Site(0, 0.0, 0.0), 0.0, 0.0),
           UgvWaypoint(Site(9, 100.0, 0.0), 1.0, 1.0))
    issues = validate(plan_of(legs, waypoints=wps), cells, cfg)
    assert [i.severity for i in issues] == ["warning"]
    assert issues[0].wait == pytest.approx(999.0)


def test_validate_fast_ugv_never_late_seeded():
    """With the UGV as fast as the UAV every rendezvous is met."""
    rng = random.Random(77)
    checked = 0
    for trial in range(10):
        cfg = PlannerConfig(d_max=rng.choice([25.0, 45.0]),
                            battery_levels=3, ugv_speed_ratio=1.0,
                            fixed_wing_speed=1.0)
        cells = gen_random(3, 22.0, 7.0, seed=400 + trial)
        g = build_instance(cells, cfg)
        try:
            tour = solve_exact(g)
        except Infeasible:
            continue
        plan = decode(g, tour, cfg)
        issues = validate(plan, cells, cfg)
        assert not issues
        checked += 1
    assert checked >= 5


def test_builder_merges_consecutive_same_site_stops():
    b = _Builder(5)
    site = Site(0, 0.0, 0.0)
    b.add_waypoint(site, 1.0, 2.0)
    b.add_waypoint(site, 3.0, 4.0)
    assert len(b.waypoints) == 1
    assert b.waypoints[0].arrive_by == 1.0
    assert b.waypoints[0].depart_at == 4.0
    # ride hops never merge
    b.add_waypoint(site, 5.0, 6.0, via_ride=True)
    assert len(b.waypoints) == 2


def test_baseline_simple_route():
    cells = two_cells()
    cfg = PlannerConfig(d_max=100.0, battery_levels=20)
    plan = baseline_plan(cells, cfg)
    assert plan.cell_order == ((0, "A"), (1, "A"))
    assert plan.total_time == 30.0
    assert all(leg.mode is FlightMode.MULTI_ROTOR
               for leg in plan.uav_legs if leg.kind is LegKind.FLY)
    assert not [i for i in validate(plan, cells, cfg)
                if i.severity == "violation"]


def test_baseline_inserts_recharge():
    cells = two_cells()
    # 30 units of flying at 2 levels per 10 units exceeds 4 levels
    cfg = PlannerConfig(d_max=30.0, battery_levels=4)
    plan = baseline_plan(cells, cfg)
    kinds = [leg.kind for leg in plan.uav_legs]
    assert LegKind.RECHARGE_IN_PLACE in kinds
    assert len(plan.ugv_waypoints) == 1
    assert not [i for i in validate(plan, cells, cfg)
                if i.severity == "violation"]
    # recharge happens at cell 0's exit, before the transit leg
    assert kinds.index(LegKind.RECHARGE_IN_PLACE) < kinds.index(LegKind.FLY) + 3


def test_baseline_nearest_end_entry():
    cells = [
        Cell(0, Site(0, 0.0, 0.0), Site(1, 10.0, 0.0)),
        Cell(1, Site(2, 30.0, 0.0), Site(3, 12.0, 0.0)),
    ]
    cfg = PlannerConfig(d_max=200.0, battery_levels=20)
    plan = baseline_plan(cells, cfg)
    # end B of cell 1 is nearer to cell 0's exit
    assert plan.cell_order == ((0, "A"), (1, "B"))


def test_baseline_infeasible_cell_too_long():
    cells = [Cell(0, Site(0, 0.0, 0.0), Site(1, 100.0, 0.0))]
    cfg = PlannerConfig(d_max=50.0, battery_levels=5)
    with pytest.raises(Infeasible):
        baseline_plan(cells, cfg)


def test_baseline_infeasible_off_road_stop():
    cells = [
        Cell(0, Site(0, 0.0, 0.0), Site(1, 10.0, 0.0, on_road=False)),
        Cell(1, Site(2, 20.0, 0.0), Site(3, 30.0, 0.0)),
    ]
    cfg = PlannerConfig(d_max=30.0, battery_levels=4)
    with pytest.raises(Infeasible):
        baseline_plan(cells, cfg)


def test_baseline_never_beats_optimal_seeded():
    rng = random.Random(41)
    compared = 0
    for trial in range(8):
        cfg = PlannerConfig(d_max=rng.choice([60.0, 120.0]),
                            battery_levels=4,
                            ugv_speed_ratio=0.4)
        cells = gen_random(rng.randint(2, 4), 30.0, 8.0, seed=600 + trial)
        g = build_instance(cells, cfg)
        try:
            tour = solve_exact(g)
            base = baseline_plan(cells, cfg)
        except Infeasible:
            continue
        assert tour.cost <= base.total_time + 1e-9
        compared += 1
    assert compared >= 4
