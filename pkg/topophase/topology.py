"""
Production topology - batch economics, the centralized/distributed regime test and
the facility-location allocation that produces per-region output
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .capability import CapabilityVector, CostConstants, SurfaceThresholds, labor_cost, switching_cost
from .errors import DomainError, InfeasibleError, SizeGuardError
from .mca import McaModel, adaptation_factor, feasible_set
from .world import (ENVIRONMENT_NAMES, FACTOR_NAMES, EnvironmentReading,
                    FactorCosts, Region, World, distance)

logger = logging.getLogger(__name__)

MIN_METRO_DEMAND = "min_metro_demand"
EXACT_LIMIT = 12
BRUTE_FORCE_LIMIT = 15
# relative tolerance under which two total costs count as tied
COST_RTOL = 1e-9


@dataclass(frozen=True)
class ProductSpec:
    price: float
    variable_cost: float
    facility_fixed: float
    equipment_fixed: float
    n_star_rule: Union[float, str] = MIN_METRO_DEMAND

    def __post_init__(self):
        for name in ("price", "variable_cost", "facility_fixed", "equipment_fixed"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name}={value} must be finite")
            object.__setattr__(self, name, value)
        if self.facility_fixed < 0 or self.equipment_fixed < 0:
            raise DomainError("fixed costs must be >= 0")
        rule = self.n_star_rule
        if isinstance(rule, str):
            if rule != MIN_METRO_DEMAND:
                raise DomainError(f"unknown n_star_rule {rule!r}")
        elif isinstance(rule, bool) or not math.isfinite(float(rule)) or float(rule) <= 0:
            raise DomainError(f"explicit N*={rule!r} must be a positive number")
        else:
            object.__setattr__(self, "n_star_rule", float(rule))

    @property
    def margin(self) -> float:
        return self.price - self.variable_cost


class Regime(str, Enum):
    CENTRALIZED = "Centralized"
    DISTRIBUTED = "Distributed"


@dataclass(frozen=True)
class RegimeVerdict:
    regime: Regime
    boundary: bool = False


@dataclass(frozen=True)
class Allocation:
    """Chosen facility set, nearest-facility assignment and the per-region output m_r"""
    facilities: Tuple[Tuple[str, float], ...]
    assignment: Dict[str, str]
    outputs: Dict[str, float]
    total_cost: float
    fixed_cost: float
    variable_cost: float
    logistics_cost: float
    mebs_floor: Dict[str, float] = field(default_factory=dict)
    distances: Dict[str, float] = field(default_factory=dict)

    @property
    def facility_ids(self) -> Tuple[str, ...]:
        return tuple(region_id for region_id, _ in self.facilities)

    @property
    def total_output(self) -> float:
        return math.fsum(self.outputs.values())

    def to_frame(self) -> pd.DataFrame:
        facility_ids = set(self.facility_ids)
        rows = []
        for region_id, volume in self.outputs.items():
            rows.append({
                "region_id": region_id,
                "is_facility": region_id in facility_ids,
                "volume": volume,
                "assigned_to": self.assignment.get(region_id, ""),
                "distance_km": self.distances.get(region_id, float("nan")),
            })
        return pd.DataFrame(rows, columns=["region_id", "is_facility", "volume", "assigned_to", "distance_km"])


def cost_breakdown(c: CapabilityVector, k: CostConstants, prod: ProductSpec) -> Dict[str, float]:
    """Per-facility fixed cost terms entering the MEBS numerator"""
    terms = {
        "facility_fixed": prod.facility_fixed,
        "equipment_fixed": prod.equipment_fixed,
        "switching": switching_cost(c.gamma, k),
        "labor": labor_cost(c, k),
    }
    terms["total_fixed"] = math.fsum(terms.values())
    terms["margin"] = prod.margin
    return terms


def mebs(c: CapabilityVector, k: CostConstants, prod: ProductSpec) -> float:
    """
    Minimum Economic Batch Size: smallest run for which revenue covers total cost
    (C_facility + C_equip + C_switch(gamma) + C_labor(delta, rho)) / (p - c_var)
    """
    if prod.margin <= 0:
        raise DomainError(f"price {prod.price} must exceed variable cost {prod.variable_cost}")
    return cost_breakdown(c, k, prod)["total_fixed"] / prod.margin


def regime(mebs_value: float, n_star: float) -> RegimeVerdict:
    """Distributed when MEBS < N*, Centralized when above; equality is Centralized on the boundary"""
    if not math.isfinite(n_star) or n_star <= 0:
        raise DomainError(f"N*={n_star} must be > 0")
    if mebs_value < n_star:
        return RegimeVerdict(Regime.DISTRIBUTED)
    return RegimeVerdict(Regime.CENTRALIZED, boundary=mebs_value == n_star)


def resolve_n_star(world: World, prod: ProductSpec) -> float:
    """Explicit N*, or the smallest positive regional demand under min_metro_demand"""
    if not isinstance(prod.n_star_rule, str):
        return prod.n_star_rule
    demands = [r.demand for r in world.regions if r.demand > 0]
    if not demands:
        raise DomainError("min_metro_demand needs at least one region with positive demand")
    return min(demands)


def logistics_cost(w: World, assignment: Mapping[str, str]) -> float:
    """Sum over demand regions of demand * transport_rate * distance to the serving facility"""
    total = []
    for region in w.regions:
        if region.demand <= 0:
            continue
        if region.id not in assignment:
            raise DomainError(f"demand region {region.id!r} has no assigned facility")
        facility = w.region(assignment[region.id])
        total.append(region.demand * w.transport_rate * distance(facility, region))
    for region_id in assignment:
        w.region(region_id)
    return math.fsum(total)


@dataclass(frozen=True)
class _Problem:
    """Everything a subset evaluation needs, precomputed once per solve"""
    world: World
    candidates: Tuple[str, ...]
    demand_ids: Tuple[str, ...]
    demand: np.ndarray
    dist: np.ndarray
    fixed: np.ndarray
    floor: np.ndarray
    variable_total: float


def _facility_costs(world: World, candidates: Sequence[str], c: CapabilityVector, k: CostConstants,
                    prod: ProductSpec, m: Optional[McaModel],
                    use_effective_reliability: bool) -> Tuple[np.ndarray, np.ndarray]:
    if prod.margin <= 0:
        raise DomainError(f"price {prod.price} must exceed variable cost {prod.variable_cost}")
    if not use_effective_reliability:
        total = cost_breakdown(c, k, prod)["total_fixed"]
        fixed = np.full(len(candidates), total)
    else:
        if m is None:
            raise DomainError("effective reliability needs an environmental response model")
        fixed = np.array([
            cost_breakdown(c.with_rho(c.rho * adaptation_factor(world.region(rid), m)), k, prod)["total_fixed"]
            for rid in candidates
        ])
    return fixed, fixed / prod.margin


def _prepare(world: World, c: CapabilityVector, k: CostConstants, prod: ProductSpec,
             t: SurfaceThresholds, m: Optional[McaModel], use_effective_reliability: bool) -> _Problem:
    candidates = tuple(sorted(feasible_set(world, c, t)))
    if not candidates:
        raise InfeasibleError("no feasible location: feasible set is empty", constraint="feasible_set")
    demand_regions = [r for r in world.regions if r.demand > 0]
    if not demand_regions:
        raise InfeasibleError("total demand is zero, nothing to allocate", constraint="demand")
    fixed, floor = _facility_costs(world, candidates, c, k, prod, m, use_effective_reliability)
    demand_pos = np.array([r.position for r in demand_regions], dtype=float)
    cand_pos = np.array([world.region(rid).position for rid in candidates], dtype=float)
    dist = np.hypot(demand_pos[:, None, 0] - cand_pos[None, :, 0],
                    demand_pos[:, None, 1] - cand_pos[None, :, 1])
    demand = np.array([r.demand for r in demand_regions], dtype=float)
    return _Problem(world=world, candidates=candidates, demand_ids=tuple(r.id for r in demand_regions),
                    demand=demand, dist=dist, fixed=fixed, floor=floor,
                    variable_total=prod.variable_cost * float(demand.sum()))


def _evaluate(problem: _Problem, subset: Tuple[int, ...]) -> Optional[float]:
    """Total cost of a facility subset (candidate indices, ascending) or None when a floor is violated"""
    cols = np.asarray(subset)
    nearest = problem.dist[:, cols].argmin(axis=1)
    volumes = np.bincount(nearest, weights=problem.demand, minlength=len(cols))
    if np.any(volumes < problem.floor[cols]):
        return None
    served = problem.dist[np.arange(len(nearest)), cols[nearest]]
    logistics = problem.world.transport_rate * float(np.dot(problem.demand, served))
    return float(problem.fixed[cols].sum()) + problem.variable_total + logistics


def _better(cost: float, ids: Tuple[str, ...], best: Optional[Tuple[float, Tuple[str, ...]]]) -> bool:
    if best is None:
        return True
    best_cost, best_ids = best
    scale = max(1.0, abs(best_cost))
    if cost < best_cost - COST_RTOL * scale:
        return True
    return abs(cost - best_cost) <= COST_RTOL * scale and ids < best_ids


def _ids(problem: _Problem, subset: Tuple[int, ...]) -> Tuple[str, ...]:
    return tuple(problem.candidates[i] for i in subset)


def _solve_exact(problem: _Problem) -> Optional[Tuple[int, ...]]:
    n = len(problem.candidates)
    best, best_subset = None, None
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            cost = _evaluate(problem, subset)
            if cost is not None and _better(cost, _ids(problem, subset), best):
                best, best_subset = (cost, _ids(problem, subset)), subset
    return best_subset


def _best_move(problem: _Problem, moves: List[Tuple[int, ...]],
               incumbent: Optional[Tuple[float, Tuple[str, ...]]]) -> Optional[Tuple[int, ...]]:
    best, best_subset = incumbent, None
    for subset in moves:
        cost = _evaluate(problem, subset)
        if cost is not None and _better(cost, _ids(problem, subset), best):
            best, best_subset = (cost, _ids(problem, subset)), subset
    return best_subset


def _solve_local_search(problem: _Problem) -> Optional[Tuple[int, ...]]:
    """Greedy add from the best single facility, then add/drop/swap moves to a local optimum"""
    n = len(problem.candidates)
    current = _best_move(problem, [(i,) for i in range(n)], None)
    if current is None:
        return None
    # greedy add
    while True:
        incumbent = (_evaluate(problem, current), _ids(problem, current))
        chosen = set(current)
        step = _best_move(problem, [tuple(sorted(chosen | {i})) for i in range(n) if i not in chosen],
                          incumbent)
        if step is None:
            break
        current = step
    # add / drop / swap
    while True:
        incumbent = (_evaluate(problem, current), _ids(problem, current))
        chosen = set(current)
        outside = [i for i in range(n) if i not in chosen]
        moves = [tuple(sorted(chosen | {i})) for i in outside]
        if len(chosen) > 1:
            moves += [tuple(sorted(chosen - {i})) for i in current]
        moves += [tuple(sorted((chosen - {i}) | {j})) for i in current for j in outside]
        step = _best_move(problem, moves, incumbent)
        if step is None:
            return current
        current = step


def _build_allocation(problem: _Problem, subset: Tuple[int, ...]) -> Allocation:
    cols = np.asarray(subset)
    nearest = problem.dist[:, cols].argmin(axis=1)
    volumes = np.bincount(nearest, weights=problem.demand, minlength=len(cols))
    assignment = {rid: problem.candidates[cols[j]] for rid, j in zip(problem.demand_ids, nearest)}
    distances = {rid: float(problem.dist[i, cols[j]])
                 for i, (rid, j) in enumerate(zip(problem.demand_ids, nearest))}
    facilities = tuple((problem.candidates[i], float(v)) for i, v in zip(subset, volumes))
    volume_of = dict(facilities)
    outputs = {region.id: volume_of.get(region.id, 0.0) for region in problem.world.regions}
    fixed = float(problem.fixed[cols].sum())
    logistics = logistics_cost(problem.world, assignment)
    return Allocation(
        facilities=facilities,
        assignment=assignment,
        outputs=outputs,
        total_cost=fixed + problem.variable_total + logistics,
        fixed_cost=fixed,
        variable_cost=problem.variable_total,
        logistics_cost=logistics,
        mebs_floor={problem.candidates[i]: float(problem.floor[i]) for i in subset},
        distances=distances,
    )


def _floor_error(problem: _Problem) -> InfeasibleError:
    return InfeasibleError(
        f"MEBS floor of {float(problem.floor.min()):.6f} units cannot be met by any facility "
        f"subset (total demand {float(problem.demand.sum()):.6f})",
        constraint="mebs_floor",
    )


def allocate(world: World, c: CapabilityVector, k: CostConstants, prod: ProductSpec, t: SurfaceThresholds,
             m: Optional[McaModel] = None, *, use_effective_reliability: bool = False,
             exact_limit: int = EXACT_LIMIT) -> Allocation:
    """
    Choose facilities among the feasible locations and assign demand to the nearest one
    Args:
        world: regions, demand and transport rate
        c: capability state
        k: switching/labor cost constants
        prod: product economics
        t: surface thresholds that decide the feasible set
        m: environmental response model, needed when use_effective_reliability is set
        use_effective_reliability: use rho * phi(x) in each location's supervision cost
        exact_limit: largest candidate count solved by full enumeration
    Returns:
        Minimum-cost Allocation in which every facility volume meets its MEBS floor
    """
    problem = _prepare(world, c, k, prod, t, m, use_effective_reliability)
    exact = len(problem.candidates) <= exact_limit
    subset = _solve_exact(problem) if exact else _solve_local_search(problem)
    if subset is None:
        raise _floor_error(problem)
    allocation = _build_allocation(problem, subset)
    logger.debug(f"[SOLVE] {'exact' if exact else 'local search'} over {len(problem.candidates)} "
                 f"candidates -> {allocation.facility_ids}, cost {allocation.total_cost:.6f}")
    return allocation


def brute_force_allocate(world: World, c: CapabilityVector, k: CostConstants, prod: ProductSpec,
                         t: SurfaceThresholds, m: Optional[McaModel] = None, *,
                         use_effective_reliability: bool = False,
                         limit: int = BRUTE_FORCE_LIMIT) -> Allocation:
    """Reference optimum by plain enumeration of every nonempty facility subset"""
    candidates = sorted(feasible_set(world, c, t))
    if len(candidates) > limit:
        raise SizeGuardError(f"{len(candidates)} candidates exceeds the brute-force limit of {limit}")
    if not candidates:
        raise InfeasibleError("no feasible location: feasible set is empty", constraint="feasible_set")
    demand_regions = [r for r in world.regions if r.demand > 0]
    if not demand_regions:
        raise InfeasibleError("total demand is zero, nothing to allocate", constraint="demand")
    fixed_arr, floor_arr = _facility_costs(world, candidates, c, k, prod, m, use_effective_reliability)
    fixed = dict(zip(candidates, fixed_arr.tolist()))
    floor = dict(zip(candidates, floor_arr.tolist()))
    variable = prod.variable_cost * math.fsum(r.demand for r in demand_regions)

    best = None
    best_plan = None
    for size in range(1, len(candidates) + 1):
        for chosen in itertools.combinations(candidates, size):
            sites = [world.region(rid) for rid in chosen]
            assignment = {}
            volumes = dict.fromkeys(chosen, 0.0)
            for region in demand_regions:
                # min over sorted ids keeps the lowest id on equal distance
                nearest = min(sites, key=lambda s: distance(s, region))
                assignment[region.id] = nearest.id
                volumes[nearest.id] += region.demand
            if any(volumes[rid] < floor[rid] for rid in chosen):
                continue
            cost = math.fsum(fixed[rid] for rid in chosen) + variable + logistics_cost(world, assignment)
            if _better(cost, chosen, best):
                best = (cost, chosen)
                best_plan = (assignment, volumes)
    if best is None:
        raise InfeasibleError(f"MEBS floor of {min(floor.values()):.6f} units cannot be met by any "
                              f"facility subset", constraint="mebs_floor")

    chosen = best[1]
    assignment, volumes = best_plan
    fixed_total = math.fsum(fixed[rid] for rid in chosen)
    logistics = logistics_cost(world, assignment)
    return Allocation(
        facilities=tuple((rid, volumes[rid]) for rid in chosen),
        assignment=assignment,
        outputs={r.id: volumes.get(r.id, 0.0) for r in world.regions},
        total_cost=fixed_total + variable + logistics,
        fixed_cost=fixed_total,
        variable_cost=variable,
        logistics_cost=logistics,
        mebs_floor={rid: floor[rid] for rid in chosen},
        distances={rid: distance(world.region(fid), world.region(rid)) for rid, fid in assignment.items()},
    )


# plausible climate spans, kept off the phi floor
RANDOM_ENVIRONMENT = {
    "humidity": (5.0, 95.0),
    "dust": (0.0, 10.0),
    "thermal_cycling": (0.0, 20.0),
    "irradiance": (800.0, 2800.0),
    "precipitation_days": (0.0, 250.0),
}


def random_world(rng: np.random.Generator, n_regions: int, transport_rate: Optional[float] = None) -> World:
    """
    Seeded random instance for solver comparisons. The first region is always
    habitable with energy access so the feasible set is never empty.
    """
    if n_regions < 1:
        raise DomainError(f"n_regions={n_regions} must be >= 1")
    regions = []
    for i in range(n_regions):
        environment = [float(rng.uniform(*RANDOM_ENVIRONMENT[name])) for name in ENVIRONMENT_NAMES]
        habitable = bool(i == 0 or rng.random() < 0.85)
        regions.append(Region(
            id=f"r{i:02d}",
            name=f"region {i}",
            position=(float(rng.uniform(0.0, 1000.0)), float(rng.uniform(0.0, 1000.0))),
            factors=FactorCosts(*(float(v) for v in rng.uniform(0.0, 10.0, len(FACTOR_NAMES)))),
            environment=EnvironmentReading(*environment),
            habitable=habitable,
            energy_access=bool(i == 0 or rng.random() < 0.9),
            demand=float(rng.integers(500, 6000)) if i == 0 or rng.random() < 0.75 else 0.0,
        ))
    rate = float(rng.uniform(0.001, 0.05)) if transport_rate is None else transport_rate
    return World(regions=tuple(regions), transport_rate=rate)


def product_from_dict(data: Mapping[str, Any]) -> ProductSpec:
    return ProductSpec(
        price=data["price"],
        variable_cost=data["variable_cost"],
        facility_fixed=data["facility_fixed"],
        equipment_fixed=data["equipment_fixed"],
        n_star_rule=data.get("n_star_rule", MIN_METRO_DEMAND),
    )


def product_to_dict(prod: ProductSpec) -> Dict[str, Any]:
    return {
        "price": prod.price,
        "variable_cost": prod.variable_cost,
        "facility_fixed": prod.facility_fixed,
        "equipment_fixed": prod.equipment_fixed,
        "n_star_rule": prod.n_star_rule,
    }
