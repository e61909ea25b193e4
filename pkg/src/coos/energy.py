"""Community-energy simulation and parameter sweep.

Produces the cloud of choices for the slow loop: each parameter combination
is simulated hour by hour and scored on three value indices. Money flows
assume households own ``local_ownership_share`` (sigma) of the community
assets: they pay the local tariff for locally consumed renewable energy
(of which their owned share returns to them), carry their owned share of
amortized capital cost, and collect their owned share of export revenue;
the rest of the asset revenue leaks to external owners.

* social -- regional economic circulation rate: the asset revenue captured
  locally over all money flowing through the community energy accounts,
  ``sigma * (tariff flows + export revenue) /
  (import cost + tariff flows + export revenue)``;
* environmental -- renewable utilization rate: locally consumed renewable
  energy (direct plus storage discharge) over total demand energy;
* economic -- annual energy cost per household:
  ``(import cost + (1 - sigma) * tariff flows + sigma * (amortized capex
  and O&M) - sigma * export revenue) / households``, floored at zero.

The capital charges are deliberately set so that renewables are profitable
while they displace imports and unprofitable once they mostly export;
together with the ownership flows this keeps the three indices in genuine
tension, which is what spreads the scenario cloud across the triangle.

The synthetic profiles are deliberately simple so results stay analytically
checkable: demand is a diurnal sinusoid, solar generates at capacity inside
a fixed daylight window, hydro runs at a constant capacity factor with a
sinusoidal seasonal swing over the horizon (zero-mean, so the average
capacity factor is exact). Storage dispatch is greedy: charge on renewable
surplus, discharge on deficit, with a fixed round-trip efficiency split
evenly between charge and discharge. Everything is deterministic: the same
parameters always produce the same scenario, bit for bit.

The per-index formulas are this artifact's reconstruction; they are not
taken from any published community model.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field, replace
from typing import IO, Optional, Sequence

import numpy as np

from .errors import DomainError
from .ternary import TernaryPoint, to_ternary

SCHEMA_NAME = "coos.scenarios"
SCHEMA_VERSION = 1

HOURS_PER_YEAR = 8760.0

# Amortized capital + O&M charges, currency per unit of installed capacity
# per year. Named so sweeps and docs can reference them; override per run
# via CommunityParams. Sized between the export value and the import value
# of a unit's annual output, so utilization decides profitability.
CAPEX_SOLAR_PER_KW_YR = 90000.0
CAPEX_HYDRO_PER_KW_YR = 110000.0
CAPEX_STORAGE_PER_KWH_YR = 6000.0

ROUND_TRIP_EFFICIENCY = 0.85
HYDRO_CAPACITY_FACTOR = 0.6
HYDRO_SEASONAL_SWING = 0.2

DEFAULT_SWEEP_CAP = 100_000


@dataclass(frozen=True)
class CommunityParams:
    """One community-energy configuration."""

    households: int = 100
    solar_capacity_kw: float = 0.0
    hydro_capacity_kw: float = 0.0
    storage_energy_kwh: float = 0.0
    storage_power_kw: float = 0.0
    local_ownership_share: float = 0.5
    grid_import_price: float = 25.0
    grid_export_price: float = 8.0
    local_tariff: float = 20.0
    horizon_hours: int = 168
    demand_base_kw: float = 0.5  # average per-household demand
    demand_amplitude: float = 0.35  # diurnal swing as a fraction of base
    demand_phase_hours: float = 12.0  # sinusoid phase; peak at phase + 6 h
    solar_window: tuple[float, float] = (6.0, 18.0)
    hydro_capacity_factor: float = HYDRO_CAPACITY_FACTOR
    hydro_seasonal_swing: float = HYDRO_SEASONAL_SWING
    capex_solar_per_kw_yr: float = CAPEX_SOLAR_PER_KW_YR
    capex_hydro_per_kw_yr: float = CAPEX_HYDRO_PER_KW_YR
    capex_storage_per_kwh_yr: float = CAPEX_STORAGE_PER_KWH_YR

    def __post_init__(self) -> None:
        if self.households < 1:
            raise DomainError("households must be >= 1", code="bad_params")
        for name in (
            "solar_capacity_kw",
            "hydro_capacity_kw",
            "storage_energy_kwh",
            "storage_power_kw",
            "grid_import_price",
            "grid_export_price",
            "local_tariff",
            "demand_base_kw",
            "capex_solar_per_kw_yr",
            "capex_hydro_per_kw_yr",
            "capex_storage_per_kwh_yr",
        ):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise DomainError(f"{name} must be finite and >= 0, got {v!r}", code="bad_params")
        if not (0.0 <= self.local_ownership_share <= 1.0):
            raise DomainError("local_ownership_share must be in [0, 1]", code="bad_params")
        if self.horizon_hours < 24 or self.horizon_hours % 24 != 0:
            raise DomainError("horizon_hours must be >= 24 and divisible by 24", code="bad_params")
        if not (0.0 <= self.demand_amplitude <= 1.0):
            raise DomainError("demand_amplitude must be in [0, 1]", code="bad_params")
        lo, hi = self.solar_window
        if not (0.0 <= lo <= hi <= 24.0):
            raise DomainError("solar_window must satisfy 0 <= start <= end <= 24", code="bad_params")
        if not (0.0 <= self.hydro_capacity_factor <= 1.0):
            raise DomainError("hydro_capacity_factor must be in [0, 1]", code="bad_params")
        if not (0.0 <= self.hydro_seasonal_swing <= 1.0):
            raise DomainError("hydro_seasonal_swing must be in [0, 1]", code="bad_params")


@dataclass(frozen=True)
class HourlyTrace:
    """Per-hour energy balance series (all kWh per hour)."""

    demand: np.ndarray
    solar: np.ndarray
    hydro: np.ndarray
    charge: np.ndarray
    discharge: np.ndarray
    grid_import: np.ndarray
    grid_export: np.ndarray
    curtailment: np.ndarray
    soc: np.ndarray  # state of charge at end of hour


@dataclass(frozen=True)
class Scenario:
    """One simulated choice with its three value indices."""

    id: int
    params: CommunityParams
    social: float  # regional economic circulation rate, [0, 1]
    environmental: float  # renewable utilization rate, [0, 1]
    economic_cost: float  # annual energy cost per household, currency/yr
    generation_mix: tuple[float, float, float]  # solar, hydro, grid shares of served demand
    normalized: Optional[tuple[float, float, float]] = None
    point: Optional[TernaryPoint] = None


def demand_profile(params: CommunityParams) -> np.ndarray:
    t = np.arange(params.horizon_hours, dtype=float)
    base = params.households * params.demand_base_kw
    return base * (
        1.0 + params.demand_amplitude * np.sin(2.0 * np.pi * (t - params.demand_phase_hours) / 24.0)
    )


def solar_profile(params: CommunityParams) -> np.ndarray:
    t = np.arange(params.horizon_hours, dtype=float)
    hour_of_day = t % 24.0
    lo, hi = params.solar_window
    window = (hour_of_day >= lo) & (hour_of_day < hi)
    return np.where(window, params.solar_capacity_kw, 0.0)


def hydro_profile(params: CommunityParams) -> np.ndarray:
    t = np.arange(params.horizon_hours, dtype=float)
    seasonal = 1.0 + params.hydro_seasonal_swing * np.sin(2.0 * np.pi * t / params.horizon_hours)
    return params.hydro_capacity_kw * params.hydro_capacity_factor * seasonal


def _dispatch(params: CommunityParams) -> HourlyTrace:
    demand = demand_profile(params)
    solar = solar_profile(params)
    hydro = hydro_profile(params)
    n = params.horizon_hours
    renewable = solar + hydro
    surplus = renewable - demand

    charge = np.zeros(n)
    discharge = np.zeros(n)
    soc = np.zeros(n)

    cap = params.storage_energy_kwh
    power = params.storage_power_kw
    if cap > 0.0 and power > 0.0:
        eff = math.sqrt(ROUND_TRIP_EFFICIENCY)  # split evenly: charge * discharge = 0.85
        s = 0.0
        sur = surplus.tolist()
        ch = charge.tolist()
        dis = discharge.tolist()
        socl = soc.tolist()
        for i in range(n):
            x = sur[i]
            if x > 0.0:
                c = min(x, power, (cap - s) / eff)
                if c > 0.0:
                    ch[i] = c
                    s += c * eff
            elif x < 0.0:
                d = min(-x, power, s * eff)
                if d > 0.0:
                    dis[i] = d
                    s -= d / eff
            socl[i] = s
        charge = np.asarray(ch)
        discharge = np.asarray(dis)
        soc = np.asarray(socl)

    residual = surplus - charge + discharge
    grid_import = np.where(residual < 0.0, -residual, 0.0)
    grid_export = np.where(residual > 0.0, residual, 0.0)
    curtailment = np.zeros(n)  # exports are unbounded, nothing is spilled
    return HourlyTrace(
        demand=demand,
        solar=solar,
        hydro=hydro,
        charge=charge,
        discharge=discharge,
        grid_import=grid_import,
        grid_export=grid_export,
        curtailment=curtailment,
        soc=soc,
    )


def evaluate_scenario(params: CommunityParams, scenario_id: int = 0) -> Scenario:
    """Run the hourly balance and score the three raw indices.

    Normalization is deferred to :func:`normalize_set`, which needs the
    whole result set.
    """
    trace = _dispatch(params)
    demand_total = float(trace.demand.sum())
    renewable = trace.solar + trace.hydro

    direct = np.minimum(renewable, trace.demand)
    renewable_consumed = float(direct.sum() + trace.discharge.sum())
    environmental = renewable_consumed / demand_total if demand_total > 0 else 0.0

    # Attribute direct consumption and storage throughput to solar vs hydro
    # proportionally to their hourly output.
    with np.errstate(invalid="ignore", divide="ignore"):
        solar_share = np.where(renewable > 0, trace.solar / np.where(renewable > 0, renewable, 1.0), 0.0)
    solar_direct = float((direct * solar_share).sum())
    hydro_direct = float((direct * (1.0 - solar_share) * (renewable > 0)).sum())
    charged_total = float(trace.charge.sum())
    if charged_total > 0:
        solar_charged = float((trace.charge * solar_share).sum())
        solar_frac_stored = solar_charged / charged_total
    else:
        solar_frac_stored = 0.0
    discharge_total = float(trace.discharge.sum())
    solar_served = solar_direct + discharge_total * solar_frac_stored
    hydro_served = hydro_direct + discharge_total * (1.0 - solar_frac_stored)
    import_total = float(trace.grid_import.sum())
    served = solar_served + hydro_served + import_total
    if served > 0:
        generation_mix = (solar_served / served, hydro_served / served, import_total / served)
    else:
        generation_mix = (0.0, 0.0, 1.0)

    scale = HOURS_PER_YEAR / params.horizon_hours
    import_cost = import_total * params.grid_import_price * scale
    export_total = float(trace.grid_export.sum())
    export_revenue = export_total * params.grid_export_price * scale
    tariff_flows = renewable_consumed * params.local_tariff * scale
    capex = (
        params.solar_capacity_kw * params.capex_solar_per_kw_yr
        + params.hydro_capacity_kw * params.capex_hydro_per_kw_yr
        + params.storage_energy_kwh * params.capex_storage_per_kwh_yr
    )

    # Households pay the full tariff but their owned share returns to them
    # as asset revenue; likewise they carry only their owned share of the
    # capital charge and collect their owned share of export revenue.
    sigma = params.local_ownership_share
    cost_per_household = (
        max(0.0, import_cost + (1.0 - sigma) * tariff_flows + sigma * capex - sigma * export_revenue)
        / params.households
    )

    money_total = tariff_flows + import_cost + export_revenue
    retained = sigma * (tariff_flows + export_revenue)
    social = retained / money_total if money_total > 0 else 0.0

    return Scenario(
        id=scenario_id,
        params=params,
        social=social,
        environmental=environmental,
        economic_cost=cost_per_household,
        generation_mix=generation_mix,
    )


def hourly_trace(params: CommunityParams) -> HourlyTrace:
    """Expose the raw dispatch series (used by conservation checks)."""
    return _dispatch(params)


@dataclass(frozen=True)
class SweepConfig:
    """Cartesian sweep: per-parameter level lists over a base configuration."""

    base: CommunityParams = field(default_factory=CommunityParams)
    levels: dict[str, tuple[float, ...]] = field(default_factory=dict)
    cap: int = DEFAULT_SWEEP_CAP

    def swept_names(self) -> tuple[str, ...]:
        return tuple(self.levels.keys())

    def product_size(self) -> int:
        size = 1
        for values in self.levels.values():
            if len(values) == 0:
                raise DomainError("each swept parameter needs at least one level", code="bad_sweep")
            size *= len(values)
        return size


def default_sweep_config() -> SweepConfig:
    """The shipped sweep: 20 solar x 10 hydro x 10 storage x 10 ownership
    levels = 20,000 scenarios, spanning undersupply through heavy overbuild."""
    base = CommunityParams()
    solar = tuple(round(5.0 * i, 4) for i in range(20))  # 0 .. 95 kW
    hydro = tuple(round(4.0 * i, 4) for i in range(10))  # 0 .. 36 kW
    storage = tuple(round(20.0 * i, 4) for i in range(10))  # 0 .. 180 kWh
    ownership = tuple(round(i / 9.0, 10) for i in range(10))  # 0 .. 1
    return SweepConfig(
        base=base,
        levels={
            "solar_capacity_kw": solar,
            "hydro_capacity_kw": hydro,
            "storage_energy_kwh": storage,
            "local_ownership_share": ownership,
        },
    )


def _storage_power_for(energy_kwh: float) -> float:
    # Default C-rate of 0.25 when the sweep varies energy but not power.
    return energy_kwh * 0.25


def sweep(config: SweepConfig) -> list[Scenario]:
    """Evaluate the full Cartesian product of the configured levels.

    Scenario ids follow lexicographic sweep order: the first configured
    parameter varies slowest. Output is a pure function of the config.
    """
    size = config.product_size()
    if size > config.cap:
        raise DomainError(
            f"sweep would produce {size} scenarios, above the cap of {config.cap}",
            code="sweep_too_large",
            detail={"size": size, "cap": config.cap},
        )
    names = config.swept_names()
    scenarios: list[Scenario] = []
    implied_power = (
        "storage_energy_kwh" in config.levels and "storage_power_kw" not in config.levels
    )
    for i, combo in enumerate(itertools.product(*(config.levels[n] for n in names))):
        overrides = dict(zip(names, combo))
        if implied_power:
            overrides["storage_power_kw"] = _storage_power_for(overrides["storage_energy_kwh"])
        params = replace(config.base, **overrides)
        scenarios.append(evaluate_scenario(params, scenario_id=i))
    return scenarios


def normalize_set(scenarios: Sequence[Scenario]) -> list[Scenario]:
    """Min-max normalize the three indices over the set and project to the
    simplex.

    Cost is inverted so that larger always means better; a constant column
    normalizes to 0.5 for every scenario.
    """
    if len(scenarios) == 0:
        raise DomainError("cannot normalize an empty scenario set", code="empty_input")

    def minmax(values: list[float], invert: bool) -> list[float]:
        lo, hi = min(values), max(values)
        if hi - lo <= 0.0:
            return [0.5] * len(values)
        if invert:
            return [(hi - v) / (hi - lo) for v in values]
        return [(v - lo) / (hi - lo) for v in values]

    soc = minmax([s.social for s in scenarios], invert=False)
    env = minmax([s.environmental for s in scenarios], invert=False)
    eco = minmax([s.economic_cost for s in scenarios], invert=True)

    out: list[Scenario] = []
    for s, ns, ne, nc in zip(scenarios, soc, env, eco):
        normalized = (ns, ne, nc)
        out.append(replace(s, normalized=normalized, point=to_ternary(normalized)))
    return out


# --- serialization -----------------------------------------------------------
#
# Scenario sets are JSON Lines: a schema-versioned header line followed by
# one scenario object per line. Fields are documented in README.md.


def _params_to_dict(p: CommunityParams) -> dict:
    return {
        "households": p.households,
        "solar_capacity_kw": p.solar_capacity_kw,
        "hydro_capacity_kw": p.hydro_capacity_kw,
        "storage_energy_kwh": p.storage_energy_kwh,
        "storage_power_kw": p.storage_power_kw,
        "local_ownership_share": p.local_ownership_share,
        "grid_import_price": p.grid_import_price,
        "grid_export_price": p.grid_export_price,
        "local_tariff": p.local_tariff,
        "horizon_hours": p.horizon_hours,
        "demand_base_kw": p.demand_base_kw,
        "demand_amplitude": p.demand_amplitude,
        "demand_phase_hours": p.demand_phase_hours,
        "solar_window": list(p.solar_window),
        "hydro_capacity_factor": p.hydro_capacity_factor,
        "hydro_seasonal_swing": p.hydro_seasonal_swing,
        "capex_solar_per_kw_yr": p.capex_solar_per_kw_yr,
        "capex_hydro_per_kw_yr": p.capex_hydro_per_kw_yr,
        "capex_storage_per_kwh_yr": p.capex_storage_per_kwh_yr,
    }


def _params_from_dict(d: dict) -> CommunityParams:
    d = dict(d)
    d["solar_window"] = tuple(d.get("solar_window", (6.0, 18.0)))
    return CommunityParams(**d)


def scenario_to_dict(s: Scenario) -> dict:
    doc = {
        "id": s.id,
        "params": _params_to_dict(s.params),
        "social": s.social,
        "environmental": s.environmental,
        "economic_cost": s.economic_cost,
        "generation_mix": list(s.generation_mix),
    }
    if s.normalized is not None:
        doc["normalized"] = list(s.normalized)
    if s.point is not None:
        doc["point"] = list(s.point.as_tuple())
    return doc


def scenario_from_dict(d: dict) -> Scenario:
    point = None
    if "point" in d:
        pa, pb, pc = d["point"]
        point = TernaryPoint(pa, pb, pc)
    return Scenario(
        id=int(d["id"]),
        params=_params_from_dict(d["params"]),
        social=float(d["social"]),
        environmental=float(d["environmental"]),
        economic_cost=float(d["economic_cost"]),
        generation_mix=tuple(d["generation_mix"]),
        normalized=tuple(d["normalized"]) if "normalized" in d else None,
        point=point,
    )


def write_scenarios(fh: IO[str], scenarios: Sequence[Scenario]) -> None:
    normalized = all(s.normalized is not None for s in scenarios)
    header = {
        "schema": SCHEMA_NAME,
        "version": SCHEMA_VERSION,
        "count": len(scenarios),
        "normalized": normalized,
    }
    fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
    for s in scenarios:
        fh.write(json.dumps(scenario_to_dict(s), sort_keys=True, separators=(",", ":")) + "\n")


def read_scenarios(fh: IO[str]) -> list[Scenario]:
    header_line = fh.readline()
    if not header_line.strip():
        raise DomainError("scenario file is empty", code="bad_scenario_file")
    header = json.loads(header_line)
    if header.get("schema") != SCHEMA_NAME:
        raise DomainError(
            f"unexpected schema {header.get('schema')!r}, expected {SCHEMA_NAME}",
            code="bad_scenario_file",
        )
    if header.get("version") != SCHEMA_VERSION:
        raise DomainError(
            f"unsupported schema version {header.get('version')!r}", code="bad_scenario_file"
        )
    out = []
    for line in fh:
        if line.strip():
            out.append(scenario_from_dict(json.loads(line)))
    return out


def save_scenarios(path: str, scenarios: Sequence[Scenario]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_scenarios(fh, scenarios)


def load_scenarios(path: str) -> list[Scenario]:
    with open(path, "r", encoding="utf-8") as fh:
        return read_scenarios(fh)


def sweep_config_from_dict(doc: dict) -> SweepConfig:
    base = _params_from_dict(doc.get("base", {})) if doc.get("base") else CommunityParams()
    levels_doc = doc.get("levels", {})
    if not isinstance(levels_doc, dict) or not levels_doc:
        raise DomainError("sweep config needs a non-empty 'levels' object", code="bad_sweep")
    levels = {str(k): tuple(float(x) for x in v) for k, v in levels_doc.items()}
    valid = set(_params_to_dict(CommunityParams()).keys()) - {"solar_window"}
    for name in levels:
        if name not in valid:
            raise DomainError(f"unknown sweep parameter {name!r}", code="bad_sweep")
    cap = int(doc.get("cap", DEFAULT_SWEEP_CAP))
    return SweepConfig(base=base, levels=levels, cap=cap)


def sweep_config_to_dict(config: SweepConfig) -> dict:
    return {
        "base": _params_to_dict(config.base),
        "levels": {k: list(v) for k, v in config.levels.items()},
        "cap": config.cap,
    }
