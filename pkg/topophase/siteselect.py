"""
Capability-dependent site selection: labor weight decay, weight redistribution,
the classic and machine-climate objectives, Pareto sets and weight-inversion detection
"""
import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .capability import CapabilityVector, fusion_factor
from .errors import ConfigError, DomainError
from .paths import Path, check_nondecreasing, sample_parameters
from .world import FACTOR_NAMES, Region, World

if TYPE_CHECKING:
    from .mca import McaModel

logger = logging.getLogger(__name__)

INVERSION_RULES = ("market", "market_plus_logistics")
MCA_OBJECTIVES = ("full", "reduced")
REDUCED_FACTORS = ("logistics", "energy", "market_distance")


@dataclass(frozen=True)
class WeightProfile:
    """Baseline site-selection weights and the machine-climate penalty weight"""
    baseline: Tuple[float, ...]
    w_phi: float = 0.0
    fusion_exponents: Tuple[float, float] = (0.5, 0.5)
    inversion_rule: str = "market"
    mca_objective: str = "full"

    def __post_init__(self):
        baseline = tuple(float(v) for v in self.baseline)
        if len(baseline) != len(FACTOR_NAMES):
            raise ConfigError(f"baseline needs {len(FACTOR_NAMES)} weights, got {len(baseline)}")
        if any(not math.isfinite(v) or v < 0 for v in baseline):
            raise ConfigError(f"baseline weights must be finite and >= 0: {baseline}")
        if abs(math.fsum(baseline) - 1.0) > 1e-9:
            raise ConfigError(f"baseline weights sum to {math.fsum(baseline)}, expected 1")
        if not math.isfinite(self.w_phi) or self.w_phi < 0:
            raise ConfigError(f"w_phi={self.w_phi} must be finite and >= 0")
        exponents = tuple(float(v) for v in self.fusion_exponents)
        if len(exponents) != 2 or any(not math.isfinite(v) or v <= 0 for v in exponents):
            raise ConfigError(f"fusion_exponents must be two finite values > 0: {exponents}")
        if self.inversion_rule not in INVERSION_RULES:
            raise ConfigError(f"inversion_rule must be one of {INVERSION_RULES}")
        if self.mca_objective not in MCA_OBJECTIVES:
            raise ConfigError(f"mca_objective must be one of {MCA_OBJECTIVES}")
        object.__setattr__(self, "baseline", baseline)
        object.__setattr__(self, "w_phi", float(self.w_phi))
        object.__setattr__(self, "fusion_exponents", exponents)

    @classmethod
    def from_mapping(cls, baseline: Mapping[str, float], **kwargs) -> "WeightProfile":
        unknown = set(baseline) - set(FACTOR_NAMES)
        if unknown:
            raise ConfigError(f"unknown factor weights: {', '.join(sorted(unknown))}")
        missing = [name for name in FACTOR_NAMES if name not in baseline]
        if missing:
            raise ConfigError(f"missing factor weights: {', '.join(missing)}")
        return cls(baseline=tuple(baseline[name] for name in FACTOR_NAMES), **kwargs)

    def baseline_weight(self, factor: str) -> float:
        return self.baseline[FACTOR_NAMES.index(factor)]

    def baseline_weights(self) -> "EffectiveWeights":
        return EffectiveWeights(*self.baseline)


@dataclass(frozen=True)
class EffectiveWeights:
    labor: float
    logistics: float
    land: float
    energy: float
    market_distance: float
    regulatory: float

    def as_tuple(self) -> Tuple[float, ...]:
        return tuple(getattr(self, name) for name in FACTOR_NAMES)

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(FACTOR_NAMES, self.as_tuple()))


@dataclass(frozen=True)
class SiteScore:
    region_id: str
    score: float
    rank: int
    phi: Optional[float] = None


def labor_weight(c: CapabilityVector, p: WeightProfile) -> float:
    """w_L(c) = w_L0 * (1 - delta * rho * h(gamma, tau))"""
    h = fusion_factor(c.gamma, c.tau, p.fusion_exponents)
    return p.baseline_weight("labor") * (1.0 - c.delta * c.rho * h)


def effective_weights(c: CapabilityVector, p: WeightProfile) -> EffectiveWeights:
    """
    Capability-adjusted weights. The labor mass freed by capability is
    redistributed over the other five factors in proportion to their baselines.
    """
    w0 = p.baseline
    w_l0 = w0[0]
    w_l = labor_weight(c, p)
    freed = w_l0 - w_l
    others = w0[1:]
    other_mass = math.fsum(others)
    if other_mass == 0.0:
        if freed > 0.0:
            raise ConfigError("cannot redistribute freed labor weight: all non-labor baselines are 0")
        return EffectiveWeights(*w0)
    scale = freed / other_mass
    return EffectiveWeights(w_l, *(w + w * scale for w in others))


def site_objective(r: Region, w: EffectiveWeights, factors: Sequence[str] = FACTOR_NAMES) -> float:
    """Weighted factor-cost sum for one region"""
    return math.fsum(getattr(w, name) * getattr(r.factors, name) for name in factors)


def site_objective_mca(r: Region, w: EffectiveWeights, phi: float, p: WeightProfile) -> float:
    """Site objective plus the machine-climate penalty w_phi * (1 - phi)"""
    if not (0.0 < phi <= 1.0):
        raise DomainError(f"phi={phi} outside (0, 1]")
    factors = REDUCED_FACTORS if p.mca_objective == "reduced" else FACTOR_NAMES
    return site_objective(r, w, factors) + p.w_phi * (1.0 - phi)


def traditional_score(r: Region, p: WeightProfile) -> float:
    """Phase-I siting attractiveness, higher is more attractive"""
    return -site_objective(r, p.baseline_weights())


def select_site(world: World, c: CapabilityVector, p: WeightProfile, mode: str = "classic",
                mca_model: Optional["McaModel"] = None,
                candidates: Optional[Iterable[str]] = None) -> List[SiteScore]:
    """
    Rank regions under the capability-adjusted objective
    Args:
        world: candidate regions
        c: capability state
        p: weight profile
        mode: "classic" or "mca"
        mca_model: environmental response model, required in mca mode
        candidates: optional subset of region ids to rank
    Returns:
        SiteScore list in ascending score order, ties by region id; the first entry is x*
    """
    if mode not in ("classic", "mca"):
        raise DomainError(f"unknown selection mode {mode!r}")
    if mode == "mca" and mca_model is None:
        raise DomainError("mca mode requires an environmental response model")
    regions = list(world.regions)
    if candidates is not None:
        wanted = set(candidates)
        regions = [r for r in regions if r.id in wanted]
    if not regions:
        raise DomainError("cannot select a site from an empty world")

    weights = effective_weights(c, p)
    scored: List[Tuple[float, str, Optional[float]]] = []
    for region in regions:
        if mode == "mca":
            from .mca import adaptation_factor
            phi = adaptation_factor(region, mca_model)
            scored.append((site_objective_mca(region, weights, phi, p), region.id, phi))
        else:
            scored.append((site_objective(region, weights), region.id, None))
    scored.sort(key=lambda item: (item[0], item[1]))
    logger.debug(f"[OK] Ranked {len(scored)} regions in {mode} mode, x*={scored[0][1]}")
    return [SiteScore(region_id=rid, score=score, rank=i + 1, phi=phi)
            for i, (score, rid, phi) in enumerate(scored)]


def pareto_set(world: World, factor_subset: Sequence[str]) -> FrozenSet[str]:
    """
    Regions not dominated on the chosen factors (lower is better). A region is
    dominated when another is <= on every factor and < on at least one.
    """
    factor_subset = list(factor_subset)
    if not factor_subset:
        raise DomainError("factor subset must be nonempty")
    unknown = [name for name in factor_subset if name not in FACTOR_NAMES]
    if unknown:
        raise DomainError(f"unknown factor names: {', '.join(unknown)}")
    points = np.array([[getattr(r.factors, name) for name in factor_subset] for r in world.regions],
                      dtype=float)
    frontier = []
    for i, region in enumerate(world.regions):
        dominated = False
        for j in range(len(world.regions)):
            if j == i:
                continue
            if np.all(points[j] <= points[i]) and np.any(points[j] < points[i]):
                dominated = True
                break
        if not dominated:
            frontier.append(region.id)
    return frozenset(frontier)


def inversion_gap(c: CapabilityVector, p: WeightProfile) -> float:
    """g(c) = w_L - w_M (or w_L - (w_M + w_T)); negative once the weights have inverted"""
    w = effective_weights(c, p)
    if p.inversion_rule == "market_plus_logistics":
        return w.labor - (w.market_distance + w.logistics)
    return w.labor - w.market_distance


def find_weight_inversion(path: Path, p: WeightProfile, tol: float = 1e-6,
                          samples: int = 64) -> Optional[float]:
    """
    Locate t* where the labor weight falls below the market weight along a path
    Args:
        path: componentwise nondecreasing map t -> c(t) on [0, 1]
        p: weight profile
        tol: width of the final bisection bracket
        samples: sign-change scan resolution
    Returns:
        t* or None when the ordering of the weights never changes on [0, 1]
    """
    if tol <= 0:
        raise DomainError(f"tol={tol} must be > 0")
    check_nondecreasing(path, samples)
    ts = sample_parameters(samples)
    inverted = [inversion_gap(path(float(t)), p) < 0 for t in ts]
    if inverted[0] or not inverted[-1]:
        return None
    i = inverted.index(True)
    lo, hi = float(ts[i - 1]), float(ts[i])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if inversion_gap(path(mid), p) < 0:
            hi = mid
        else:
            lo = mid
    t_star = 0.5 * (lo + hi)
    logger.info(f"[OK] Weight inversion at t*={t_star:.6f}")
    return t_star
