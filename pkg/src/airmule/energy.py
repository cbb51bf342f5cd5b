"""Battery discretization, per-leg consumption and recharge bookkeeping.

Battery charge is discretized into integer levels 0..C where C is 100%.
A full charge sustains d_max meters of multi-rotor flight; fixed-wing
flight consumes 1/fixed_wing_ratio as much energy per meter.  Recharging
takes recharge_rate seconds per level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

from .geometry import FlightMode

if TYPE_CHECKING:
    from .graph import EdgeType

# Tolerates float noise in distance*C/d_max just above an integer.
_LEVEL_EPS = 1e-9


@dataclass(frozen=True)
class PlannerConfig:
    t_takeoff: float = 5.0
    t_land: float = 45.0
    recharge_rate: float = 2.0  # seconds per battery level
    d_max: float = 1800.0  # meters of multi-rotor flight on a full charge
    battery_levels: int = 20
    fixed_wing_ratio: float = 3.0  # >1 means fixed-wing is cheaper per meter
    turn_radius: float = 3.0
    ugv_speed_ratio: float = 0.2  # of the unit multi-rotor speed
    fixed_wing_speed: float = 1.0  # of the unit multi-rotor speed

    def __post_init__(self) -> None:
        numeric = {
            "t_takeoff": self.t_takeoff,
            "t_land": self.t_land,
            "recharge_rate": self.recharge_rate,
            "d_max": self.d_max,
            "fixed_wing_ratio": self.fixed_wing_ratio,
            "turn_radius": self.turn_radius,
            "ugv_speed_ratio": self.ugv_speed_ratio,
            "fixed_wing_speed": self.fixed_wing_speed,
        }
        for name, value in numeric.items():
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if not (isinstance(self.battery_levels, int) and self.battery_levels >= 1):
            raise ValueError(f"battery_levels must be a positive integer, got {self.battery_levels!r}")


@dataclass(frozen=True)
class RechargeSplit:
    """Recharge amounts along one edge, in battery levels."""

    at_exit: int = 0  # stationary recharge at the first cell's exit site
    at_entry: int = 0  # stationary recharge at the next cell's entry site
    in_transit: int = 0  # recharge while riding the UGV

    @property
    def total(self) -> int:
        return self.at_exit + self.at_entry + self.in_transit


ZERO_SPLIT = RechargeSplit()


def consumption_levels(distance: float, mode: FlightMode, cfg: PlannerConfig) -> int:
    """Battery levels consumed by flying the given distance, rounded up."""
    if distance < 0:
        raise ValueError("distance must be non-negative")
    span = cfg.d_max
    if mode is FlightMode.FIXED_WING:
        span = cfg.d_max * cfg.fixed_wing_ratio
    x = distance * cfg.battery_levels / span
    return max(0, math.ceil(x - _LEVEL_EPS))


def recharge_time(levels: int, cfg: PlannerConfig) -> float:
    if levels < 0:
        raise ValueError("levels must be non-negative")
    return cfg.recharge_rate * levels


def recharge_split(edge_type: "EdgeType", k_i: int, cons1: int,
                   cons2: Optional[int], k_j: int,
                   cfg: PlannerConfig) -> Optional[RechargeSplit]:
    """Minimal recharge split reaching exactly k_j, or None when infeasible.

    cons1 is the coverage-leg consumption, cons2 the transit-leg
    consumption (None for UGV rides, which cost no flight energy).  The
    battery must stay within [0, C] at every intermediate event.
    """
    cap = cfg.battery_levels
    after_cover = k_i - cons1
    if after_cover < 0:
        return None

    stops = edge_type.stops
    if stops == "none":
        if cons2 is None or k_j != after_cover - cons2:
            return None
        return ZERO_SPLIT
    if stops == "ride":
        gain = k_j - after_cover
        if gain < 0:
            return None
        return RechargeSplit(in_transit=gain)
    if stops == "entry":
        arrival = after_cover - cons2
        if arrival < 0:
            return None
        gain = k_j - arrival
        if gain < 0:
            return None
        return RechargeSplit(at_entry=gain)
    if stops == "exit":
        departure = k_j + cons2
        if departure > cap:
            return None
        gain = departure - after_cover
        if gain < 0:
            return None
        return RechargeSplit(at_exit=gain)
    if stops == "both":
        total = (k_j + cons2) - after_cover
        if total < 0 or cons2 > cap:
            return None
        # Charge as much as the cap allows at the exit site; the leftover
        # moves to the entry site.  Total time is split-invariant.
        at_exit = max(0, min(cap, k_j + cons2) - after_cover)
        return RechargeSplit(at_exit=at_exit, at_entry=total - at_exit)
    raise ValueError(f"unknown stop profile {stops!r}")
