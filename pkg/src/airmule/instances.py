"""Versioned JSON serialization for instances and plans, plus a random
instance generator.

All writers use sorted keys and compact separators so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import random

from .energy import PlannerConfig
from .errors import SamplingExhausted
from .geometry import Cell, FlightMode, Site, segments_intersect
from .plan import Leg, LegKind, Plan, UgvWaypoint

FORMAT_VERSION = 1
_SAMPLE_CAP = 100_000

_CONFIG_FIELDS = ("t_takeoff", "t_land", "recharge_rate", "d_max",
                  "battery_levels", "fixed_wing_ratio", "turn_radius",
                  "ugv_speed_ratio", "fixed_wing_speed")


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _config_to_dict(cfg: PlannerConfig) -> dict:
    return {name: getattr(cfg, name) for name in _CONFIG_FIELDS}


def _config_from_dict(data: dict) -> PlannerConfig:
    if not isinstance(data, dict):
        raise ValueError("config must be an object")
    unknown = set(data) - set(_CONFIG_FIELDS)
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    return PlannerConfig(**data)


def _site_to_dict(site: Site) -> dict:
    return {"id": site.id, "x": site.x, "y": site.y, "on_road": site.on_road}


def _site_from_dict(data: dict) -> Site:
    return Site(int(data["id"]), float(data["x"]), float(data["y"]),
                bool(data["on_road"]))


def serialize_instance(cells: list[Cell], cfg: PlannerConfig) -> str:
    body = {
        "version": FORMAT_VERSION,
        "config": _config_to_dict(cfg),
        "cells": [
            {"index": c.index,
             "end_a": _site_to_dict(c.end_a),
             "end_b": _site_to_dict(c.end_b)}
            for c in sorted(cells, key=lambda c: c.index)
        ],
    }
    return _dumps(body)


def parse_instance(text: str) -> tuple[list[Cell], PlannerConfig]:
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("instance document must be an object")
    if data.get("version") != FORMAT_VERSION:
        raise ValueError(
            f"unsupported instance version {data.get('version')!r}")
    cfg = _config_from_dict(data.get("config", {}))
    cells = [
        Cell(int(entry["index"]),
             _site_from_dict(entry["end_a"]),
             _site_from_dict(entry["end_b"]))
        for entry in data.get("cells", [])
    ]
    return cells, cfg


def save_instance(path: str, cells: list[Cell], cfg: PlannerConfig) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_instance(cells, cfg))


def load_instance(path: str) -> tuple[list[Cell], PlannerConfig]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _leg_to_dict(leg: Leg) -> dict:
    return {
        "kind": leg.kind.value,
        "start_site": _site_to_dict(leg.start_site),
        "end_site": _site_to_dict(leg.end_site),
        "duration": leg.duration,
        "battery_before": leg.battery_before,
        "battery_after": leg.battery_after,
        "mode": leg.mode.value if leg.mode is not None else None,
        "levels": leg.levels,
        "covers_cell": leg.covers_cell,
        "start_heading": leg.start_heading,
        "end_heading": leg.end_heading,
    }


def _leg_from_dict(data: dict) -> Leg:
    return Leg(
        kind=LegKind(data["kind"]),
        start_site=_site_from_dict(data["start_site"]),
        end_site=_site_from_dict(data["end_site"]),
        duration=float(data["duration"]),
        battery_before=int(data["battery_before"]),
        battery_after=int(data["battery_after"]),
        mode=FlightMode(data["mode"]) if data["mode"] is not None else None,
        levels=int(data["levels"]),
        covers_cell=(int(data["covers_cell"])
                     if data["covers_cell"] is not None else None),
        start_heading=(float(data["start_heading"])
                       if data["start_heading"] is not None else None),
        end_heading=(float(data["end_heading"])
                     if data["end_heading"] is not None else None),
    )


def serialize_plan(plan: Plan) -> str:
    body = {
        "version": FORMAT_VERSION,
        "total_time": plan.total_time,
        "cell_order": [[index, end] for index, end in plan.cell_order],
        "uav_legs": [_leg_to_dict(leg) for leg in plan.uav_legs],
        "ugv_waypoints": [
            {"site": _site_to_dict(wp.site),
             "arrive_by": wp.arrive_by,
             "depart_at": wp.depart_at,
             "via_ride": wp.via_ride}
            for wp in plan.ugv_waypoints
        ],
        "battery_trace": [[event, level] for event, level in plan.battery_trace],
    }
    return _dumps(body)


def parse_plan(text: str) -> Plan:
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("plan document must be an object")
    if data.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported plan version {data.get('version')!r}")
    return Plan(
        cell_order=tuple((int(i), str(end)) for i, end in data["cell_order"]),
        uav_legs=tuple(_leg_from_dict(d) for d in data["uav_legs"]),
        ugv_waypoints=tuple(
            UgvWaypoint(_site_from_dict(d["site"]), float(d["arrive_by"]),
                        float(d["depart_at"]), bool(d["via_ride"]))
            for d in data["ugv_waypoints"]),
        total_time=float(data["total_time"]),
        battery_trace=tuple((str(event), int(level))
                            for event, level in data["battery_trace"]),
    )


def save_plan(path: str, plan: Plan) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_plan(plan))


def load_plan(path: str) -> Plan:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_plan(fh.read())


def gen_random(n: int, extent: float, max_len: float, seed: int,
               road_fraction: float = 1.0) -> list[Cell]:
    """Sample n pairwise non-intersecting cells inside an extent x extent box.

    Rejection sampling; raises SamplingExhausted when the attempt cap is
    hit before n cells are placed.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if extent <= 0 or max_len <= 0:
        raise ValueError("extent and max_len must be positive")
    if not 0.0 <= road_fraction <= 1.0:
        raise ValueError("road_fraction must be in [0, 1]")
    rng = random.Random(seed)
    cells: list[Cell] = []
    placed: list[tuple[tuple[float, float], tuple[float, float]]] = []
    attempts = 0
    while len(cells) < n:
        if attempts >= _SAMPLE_CAP:
            raise SamplingExhausted(
                f"placed {len(cells)} of {n} cells in {_SAMPLE_CAP} attempts")
        attempts += 1
        ax = rng.uniform(0.0, extent)
        ay = rng.uniform(0.0, extent)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        length = max_len * (1.0 - rng.random())  # length in (0, max_len]
        bx = ax + length * math.cos(angle)
        by = ay + length * math.sin(angle)
        if not (0.0 <= bx <= extent and 0.0 <= by <= extent):
            continue
        if any(segments_intersect((ax, ay), (bx, by), p, q)
               for p, q in placed):
            continue
        index = len(cells)
        a_road = rng.random() < road_fraction
        b_road = rng.random() < road_fraction
        cells.append(Cell(index,
                          Site(2 * index, ax, ay, a_road),
                          Site(2 * index + 1, bx, by, b_road)))
        placed.append(((ax, ay), (bx, by)))
    return cells
