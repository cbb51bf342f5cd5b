"""Clustered GTSP graph construction.

One cluster per cell with 2C battery-annotated vertices (C levels per
endpoint), plus a virtual depot cluster that enforces the full-battery
start and the open-path cost: leaving the depot is free only into
level-C vertices, and returning to the depot costs the final coverage
pass of the last cell.

Between two vertices the edge cost is the minimum over eighteen travel
options that combine the coverage-leg flight mode with land, recharge,
take-off and UGV-ride choices on the transit leg.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .energy import PlannerConfig, RechargeSplit, ZERO_SPLIT, consumption_levels, recharge_split
from .geometry import (
    END_A,
    END_B,
    Cell,
    FlightMode,
    Pose,
    Site,
    dubins_shortest,
    euclid,
    traversal_heading,
    ugv_time,
)

INF = math.inf

_MR = FlightMode.MULTI_ROTOR
_FW = FlightMode.FIXED_WING


class EdgeType(enum.Enum):
    """The eighteen travel options; enum order is the tie-break order."""

    M_M = 0
    F_F = 1
    M_F = 2
    F_M = 3
    M_DTU = 4
    F_DTU = 5
    M_MDU = 6
    F_FDU = 7
    M_FDU = 8
    F_MDU = 9
    M_DUM = 10
    F_DUF = 11
    M_DUF = 12
    F_DUM = 13
    M_DUMDU = 14
    F_DUFDU = 15
    M_DUFDU = 16
    F_DUMDU = 17

    @property
    def label(self) -> str:
        return self.name.replace("_", "-")

    @property
    def cover_mode(self) -> FlightMode:
        return _PROFILES[self][0]

    @property
    def transit_mode(self) -> Optional[FlightMode]:
        """Flight mode of the transit leg; None when riding the UGV."""
        return _PROFILES[self][1]

    @property
    def stops(self) -> str:
        """Where recharge stops happen: none, exit, entry, both or ride."""
        return _PROFILES[self][2]


_PROFILES = {
    EdgeType.M_M: (_MR, _MR, "none"),
    EdgeType.F_F: (_FW, _FW, "none"),
    EdgeType.M_F: (_MR, _FW, "none"),
    EdgeType.F_M: (_FW, _MR, "none"),
    EdgeType.M_DTU: (_MR, None, "ride"),
    EdgeType.F_DTU: (_FW, None, "ride"),
    EdgeType.M_MDU: (_MR, _MR, "entry"),
    EdgeType.F_FDU: (_FW, _FW, "entry"),
    EdgeType.M_FDU: (_MR, _FW, "entry"),
    EdgeType.F_MDU: (_FW, _MR, "entry"),
    EdgeType.M_DUM: (_MR, _MR, "exit"),
    EdgeType.F_DUF: (_FW, _FW, "exit"),
    EdgeType.M_DUF: (_MR, _FW, "exit"),
    EdgeType.F_DUM: (_FW, _MR, "exit"),
    EdgeType.M_DUMDU: (_MR, _MR, "both"),
    EdgeType.F_DUFDU: (_FW, _FW, "both"),
    EdgeType.M_DUFDU: (_MR, _FW, "both"),
    EdgeType.F_DUMDU: (_FW, _MR, "both"),
}


@dataclass(frozen=True)
class Vertex:
    cell_index: int  # -1 for the depot
    entry_end: Optional[str]  # "A" or "B", None for the depot
    level: int
    is_depot: bool = False


@dataclass(frozen=True)
class Edge:
    from_vertex: Vertex
    to_vertex: Vertex
    cost: float
    best_type: Optional[EdgeType]
    recharge: Optional[RechargeSplit]


@dataclass(frozen=True)
class EdgeBreakdown:
    """Everything needed to expand one typed edge into executable legs."""

    edge_type: EdgeType
    cost: float
    split: RechargeSplit
    cover_time: float
    cover_cons: int
    cover_heading: float
    entry_site_i: Site
    exit_site_i: Site
    entry_site_j: Site
    transit_time: Optional[float]  # None when riding the UGV
    transit_cons: Optional[int]
    transit_start_heading: Optional[float]  # fixed-wing transit only
    transit_end_heading: Optional[float]
    ugv_travel_time: Optional[float]  # ride edges only
    ride_time: Optional[float]  # max(ugv travel, recharge), ride edges only


def edge_breakdown(t: EdgeType, v_from: Vertex, v_to: Vertex,
                   cells: list[Cell], cfg: PlannerConfig) -> Optional[EdgeBreakdown]:
    """Cost structure of one typed edge, or None when the type is infeasible."""
    if v_from.is_depot or v_to.is_depot:
        raise ValueError("typed edges connect cell vertices only")
    if v_from.cell_index == v_to.cell_index:
        raise ValueError("edges must connect different clusters")

    cell_i = cells[v_from.cell_index]
    cell_j = cells[v_to.cell_index]
    entry_i = cell_i.end(v_from.entry_end)
    exit_i = cell_i.other_end(v_from.entry_end)
    entry_j = cell_j.end(v_to.entry_end)
    h_i = traversal_heading(cell_i, v_from.entry_end)
    h_j = traversal_heading(cell_j, v_to.entry_end)

    stops = t.stops
    exit_stop = stops in ("exit", "both")
    entry_stop = stops in ("entry", "both")
    riding = stops == "ride"
    # Land/recharge/take-off sites and both ride endpoints must be reachable
    # by the UGV.
    if (exit_stop or riding) and not exit_i.on_road:
        return None
    if (entry_stop or riding) and not entry_j.on_road:
        return None

    length_i = cell_i.length
    if t.cover_mode is _MR:
        t1 = length_i
    else:
        t1 = length_i / cfg.fixed_wing_speed
    cons1 = consumption_levels(length_i, t.cover_mode, cfg)

    t2 = cons2 = t_g = start_h = end_h = None
    if riding:
        t_g = ugv_time(exit_i, entry_j, cfg)
    elif t.transit_mode is _MR:
        d2 = euclid(exit_i, entry_j)
        t2 = d2
        cons2 = consumption_levels(d2, _MR, cfg)
    else:
        # Airborne at the exit the leg starts on the coverage heading; after
        # a take-off the hybrid can rotate in place, so it starts already
        # aligned with the next entry heading.
        start_h = h_j if exit_stop else h_i
        end_h = h_j
        path = dubins_shortest(Pose((exit_i.x, exit_i.y), start_h),
                               Pose((entry_j.x, entry_j.y), end_h),
                               cfg.turn_radius)
        t2 = path.total_length / cfg.fixed_wing_speed
        cons2 = consumption_levels(path.total_length, _FW, cfg)

    split = recharge_split(t, v_from.level, cons1, cons2, v_to.level, cfg)
    if split is None:
        return None

    r = cfg.recharge_rate
    t_l = cfg.t_land
    t_to = cfg.t_takeoff
    ride_time = None
    if stops == "none":
        cost = t1 + t2
    elif riding:
        ride_time = max(t_g, r * split.in_transit)
        cost = t1 + t_l + ride_time + t_to
    elif stops == "entry":
        cost = t1 + t2 + t_l + r * split.at_entry + t_to
    elif stops == "exit":
        cost = t1 + t_l + r * split.at_exit + t_to + t2
    else:  # both
        cost = t1 + t_l + r * split.at_exit + t_to + t2 + t_l + r * split.at_entry + t_to

    return EdgeBreakdown(
        edge_type=t,
        cost=cost,
        split=split,
        cover_time=t1,
        cover_cons=cons1,
        cover_heading=h_i,
        entry_site_i=entry_i,
        exit_site_i=exit_i,
        entry_site_j=entry_j,
        transit_time=t2,
        transit_cons=cons2,
        transit_start_heading=start_h,
        transit_end_heading=end_h,
        ugv_travel_time=t_g,
        ride_time=ride_time,
    )


def type_cost(t: EdgeType, v_from: Vertex, v_to: Vertex, cells: list[Cell],
              cfg: PlannerConfig) -> tuple[float, Optional[RechargeSplit]]:
    """Cost of one edge type, or (inf, None) when that type is infeasible."""
    bd = edge_breakdown(t, v_from, v_to, cells, cfg)
    if bd is None:
        return INF, None
    return bd.cost, bd.split


def edge_cost(v_from: Vertex, v_to: Vertex, cells: list[Cell],
              cfg: PlannerConfig) -> Edge:
    """Minimum over all eighteen edge types with a deterministic tie-break."""
    best_cost = INF
    best_type = None
    best_split = None
    for t in EdgeType:
        cost, split = type_cost(t, v_from, v_to, cells, cfg)
        if cost < best_cost:
            best_cost, best_type, best_split = cost, t, split
    return Edge(v_from, v_to, best_cost, best_type, best_split)


class ClusteredGraph:
    """Dense GTSP instance over 2nC cell vertices plus one depot vertex."""

    def __init__(self, cells: list[Cell], cfg: PlannerConfig,
                 vertices: list[Vertex], clusters: list[list[int]],
                 cost: np.ndarray, best_type: np.ndarray) -> None:
        self.cells = cells
        self.cfg = cfg
        self.vertices = vertices
        self.clusters = clusters
        self.cost = cost
        self.best_type = best_type
        self.n_cells = len(cells)
        self.levels = cfg.battery_levels

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def vertex_id(self, cell_index: int, end: str, level: int) -> int:
        if not 1 <= level <= self.levels:
            raise ValueError(f"level {level} out of range")
        offset = 0 if end == END_A else self.levels
        return 1 + cell_index * 2 * self.levels + offset + (self.levels - level)

    def cluster_of(self, vid: int) -> int:
        if vid == 0:
            return 0
        return 1 + (vid - 1) // (2 * self.levels)

    def edge(self, u: int, v: int) -> Edge:
        vu, vv = self.vertices[u], self.vertices[v]
        cost = float(self.cost[u, v])
        if vu.is_depot or vv.is_depot:
            recharge = ZERO_SPLIT if math.isfinite(cost) else None
            return Edge(vu, vv, cost, None, recharge)
        code = int(self.best_type[u, v])
        if code < 0:
            return Edge(vu, vv, INF, None, None)
        t = EdgeType(code)
        _, split = type_cost(t, vu, vv, self.cells, self.cfg)
        return Edge(vu, vv, cost, t, split)

    def breakdown(self, u: int, v: int) -> Optional[EdgeBreakdown]:
        code = int(self.best_type[u, v])
        if code < 0:
            return None
        return edge_breakdown(EdgeType(code), self.vertices[u],
                              self.vertices[v], self.cells, self.cfg)


def _pair_block(C: int, KI: np.ndarray, KJ: np.ndarray, cfg: PlannerConfig,
                t1m: float, c1m: int, t1f: float, c1f: int,
                t2m: float, c2m: int, t2fa: float, c2fa: int,
                t2fs: float, c2fs: int, t_g: float,
                exit_ok: bool, entry_ok: bool) -> tuple[np.ndarray, np.ndarray]:
    """Cost and best-type grids over (k_i, k_j) for one ordered end pair.

    Every cost expression mirrors the scalar path in edge_breakdown
    operation by operation so the two stay float-identical.
    """
    r = cfg.recharge_rate
    t_l = cfg.t_land
    t_to = cfg.t_takeoff
    both_ok = exit_ok and entry_ok
    inf_grid = np.full((C, C), INF)

    def pure(t1, c1, t2, c2):
        return np.where(KJ == KI - (c1 + c2), t1 + t2, INF)

    def ride(t1, c1):
        if not both_ok:
            return inf_grid
        e = KJ - (KI - c1)
        mask = (KI - c1 >= 0) & (e >= 0)
        cost = (t1 + t_l) + np.maximum(t_g, r * e) + t_to
        return np.where(mask, cost, INF)

    def entry(t1, c1, t2, c2):
        if not entry_ok:
            return inf_grid
        arrival = KI - (c1 + c2)
        e = KJ - arrival
        mask = (arrival >= 0) & (e >= 0)
        cost = ((t1 + t2) + t_l) + r * e + t_to
        return np.where(mask, cost, INF)

    def exit_(t1, c1, t2, c2):
        if not exit_ok:
            return inf_grid
        after = KI - c1
        departure = KJ + c2
        e = departure - after
        mask = (after >= 0) & (departure <= C) & (e >= 0)
        cost = ((t1 + t_l) + r * e + t_to) + t2
        return np.where(mask, cost, INF)

    def both(t1, c1, t2, c2):
        if not both_ok or c2 > C:
            return inf_grid
        after = KI - c1
        total = (KJ + c2) - after
        e1 = np.maximum(0, np.minimum(C, KJ + c2) - after)
        e2 = total - e1
        mask = (after >= 0) & (total >= 0)
        cost = ((((t1 + t_l) + r * e1 + t_to) + t2) + t_l) + r * e2 + t_to
        return np.where(mask, cost, INF)

    stacked = np.stack([
        pure(t1m, c1m, t2m, c2m),
        pure(t1f, c1f, t2fa, c2fa),
        pure(t1m, c1m, t2fa, c2fa),
        pure(t1f, c1f, t2m, c2m),
        ride(t1m, c1m),
        ride(t1f, c1f),
        entry(t1m, c1m, t2m, c2m),
        entry(t1f, c1f, t2fa, c2fa),
        entry(t1m, c1m, t2fa, c2fa),
        entry(t1f, c1f, t2m, c2m),
        exit_(t1m, c1m, t2m, c2m),
        exit_(t1f, c1f, t2fs, c2fs),
        exit_(t1m, c1m, t2fs, c2fs),
        exit_(t1f, c1f, t2m, c2m),
        both(t1m, c1m, t2m, c2m),
        both(t1f, c1f, t2fs, c2fs),
        both(t1m, c1m, t2fs, c2fs),
        both(t1f, c1f, t2m, c2m),
    ])
    block = stacked.min(axis=0)
    types = stacked.argmin(axis=0).astype(np.int16)
    types[~np.isfinite(block)] = -1
    return block, types


def build_instance(cells: list[Cell], cfg: PlannerConfig) -> ClusteredGraph:
    """Build the clustered graph for a list of cells."""
    if not cells:
        raise ValueError("need at least one cell")
    ordered = sorted(cells, key=lambda c: c.index)
    if [c.index for c in ordered] != list(range(len(ordered))):
        raise ValueError("cell indices must be unique and contiguous from 0")
    cells = ordered

    n = len(cells)
    C = cfg.battery_levels
    V = 1 + 2 * n * C

    # Levels are stored descending inside each endpoint block so that
    # argmin ties between equal-cost tours prefer arriving with more
    # charge; among equal-time options that favors the cheaper-energy
    # flight mode.
    vertices = [Vertex(-1, None, C, is_depot=True)]
    clusters: list[list[int]] = [[0]]
    for i in range(n):
        cluster = []
        for end in (END_A, END_B):
            for level in range(C, 0, -1):
                cluster.append(len(vertices))
                vertices.append(Vertex(i, end, level))
        clusters.append(cluster)

    cost = np.full((V, V), INF)
    best_type = np.full((V, V), -1, dtype=np.int16)

    KI = np.arange(C, 0, -1, dtype=np.int64)[:, None]
    KJ = np.arange(C, 0, -1, dtype=np.int64)[None, :]

    lengths = [c.length for c in cells]
    headings = {(i, e): traversal_heading(cells[i], e)
                for i in range(n) for e in (END_A, END_B)}
    c1m = [consumption_levels(d, _MR, cfg) for d in lengths]
    c1f = [consumption_levels(d, _FW, cfg) for d in lengths]
    t1f = [d / cfg.fixed_wing_speed for d in lengths]

    def block_base(i: int, end: str) -> int:
        return 1 + i * 2 * C + (0 if end == END_A else C)

    for i in range(n):
        for x in (END_A, END_B):
            exit_i = cells[i].other_end(x)
            h_i = headings[(i, x)]
            rows = slice(block_base(i, x), block_base(i, x) + C)
            for j in range(n):
                if j == i:
                    continue
                for y in (END_A, END_B):
                    entry_j = cells[j].end(y)
                    h_j = headings[(j, y)]
                    d2 = euclid(exit_i, entry_j)
                    air = dubins_shortest(Pose((exit_i.x, exit_i.y), h_i),
                                          Pose((entry_j.x, entry_j.y), h_j),
                                          cfg.turn_radius)
                    stop = dubins_shortest(Pose((exit_i.x, exit_i.y), h_j),
                                           Pose((entry_j.x, entry_j.y), h_j),
                                           cfg.turn_radius)
                    block, types = _pair_block(
                        C, KI, KJ, cfg,
                        lengths[i], c1m[i], t1f[i], c1f[i],
                        d2, consumption_levels(d2, _MR, cfg),
                        air.total_length / cfg.fixed_wing_speed,
                        consumption_levels(air.total_length, _FW, cfg),
                        stop.total_length / cfg.fixed_wing_speed,
                        consumption_levels(stop.total_length, _FW, cfg),
                        ugv_time(exit_i, entry_j, cfg),
                        exit_i.on_road, entry_j.on_road)
                    cols = slice(block_base(j, y), block_base(j, y) + C)
                    cost[rows, cols] = block
                    best_type[rows, cols] = types

    # Depot edges: free departure into full-battery vertices, and the final
    # coverage pass (cheapest battery-feasible mode) on the way back.
    k = np.arange(C, 0, -1)
    for i in range(n):
        for x in (END_A, END_B):
            base = block_base(i, x)
            cost[0, base] = 0.0
            back_m = np.where(k >= c1m[i], lengths[i], INF)
            back_f = np.where(k >= c1f[i], t1f[i], INF)
            cost[base:base + C, 0] = np.minimum(back_m, back_f)

    return ClusteredGraph(cells, cfg, vertices, clusters, cost, best_type)
