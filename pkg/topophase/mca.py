"""
Machine Climate Advantage - environmental adaptation factor phi, effective reliability,
phi ranking and the capability-dependent feasible location set
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, List, Mapping, Tuple

from .capability import CapabilityVector, SurfaceThresholds, crossed_sigma_h
from .errors import ConfigError, DomainError
from .siteselect import WeightProfile, traditional_score
from .world import ENVIRONMENT_NAMES, ENVIRONMENT_RANGES, Region, World

logger = logging.getLogger(__name__)

SIDEDNESS = ("penalize_above", "penalize_below", "two_sided")


@dataclass(frozen=True)
class EnvResponseSpec:
    """Monotone exponential response of one environmental parameter, 1 at the optimum"""
    parameter: str
    optimum: float
    scale: float
    sensitivity: float
    sidedness: str = "penalize_above"

    def __post_init__(self):
        if self.parameter not in ENVIRONMENT_NAMES:
            raise ConfigError(f"unknown environmental parameter {self.parameter!r}")
        if not math.isfinite(self.scale) or self.scale <= 0:
            raise ConfigError(f"{self.parameter}: scale={self.scale} must be > 0")
        if not math.isfinite(self.sensitivity) or self.sensitivity < 0:
            raise ConfigError(f"{self.parameter}: sensitivity={self.sensitivity} must be >= 0")
        if not math.isfinite(self.optimum):
            raise ConfigError(f"{self.parameter}: optimum must be finite")
        if self.sidedness not in SIDEDNESS:
            raise ConfigError(f"{self.parameter}: sidedness must be one of {SIDEDNESS}")


@dataclass(frozen=True)
class McaModel:
    responses: Tuple[EnvResponseSpec, ...]

    def __post_init__(self):
        names = [spec.parameter for spec in self.responses]
        for name in ENVIRONMENT_NAMES:
            if names.count(name) != 1:
                raise ConfigError(f"mca_model needs exactly one response for {name!r}, "
                                  f"found {names.count(name)}")
        # canonical order so equal models compare and hash equal
        ordered = tuple(sorted(self.responses, key=lambda s: ENVIRONMENT_NAMES.index(s.parameter)))
        object.__setattr__(self, "responses", ordered)


@dataclass(frozen=True)
class McaRanking:
    region_id: str
    phi: float
    rank: int
    responses: Dict[str, float]


def _check_reading(parameter: str, e: float) -> float:
    low, high = ENVIRONMENT_RANGES[parameter]
    if not isinstance(e, (int, float)) or not math.isfinite(e) or e < low or (high is not None and e > high):
        raise DomainError(f"{parameter} reading {e!r} outside its valid range")
    return float(e)


def env_response(e: float, spec: EnvResponseSpec) -> float:
    """
    Per-parameter response in (0, 1]
    penalize_above: exp(-k * max(0, (e - e_opt) / s))
    penalize_below: exp(-k * max(0, (e_opt - e) / s))
    two_sided:      exp(-k * |e - e_opt| / s)
    """
    e = _check_reading(spec.parameter, e)
    if spec.sidedness == "penalize_above":
        excess = max(0.0, (e - spec.optimum) / spec.scale)
    elif spec.sidedness == "penalize_below":
        excess = max(0.0, (spec.optimum - e) / spec.scale)
    else:
        excess = abs(e - spec.optimum) / spec.scale
    return math.exp(-spec.sensitivity * excess)


def response_breakdown(r: Region, m: McaModel) -> Dict[str, float]:
    return {spec.parameter: env_response(r.environment.get(spec.parameter), spec) for spec in m.responses}


def adaptation_factor(r: Region, m: McaModel) -> float:
    """phi(x): product of the per-parameter responses"""
    phi = math.prod(response_breakdown(r, m).values())
    # exp never reaches 0 but the product of five tiny factors can underflow
    return max(phi, math.ulp(0.0))


def effective_reliability(rho_base: float, r: Region, m: McaModel) -> float:
    """rho_eff = rho_base * phi(x)"""
    if not math.isfinite(rho_base) or not 0.0 <= rho_base <= 1.0:
        raise DomainError(f"rho_base={rho_base} outside [0, 1]")
    return rho_base * adaptation_factor(r, m)


def mca_rank(w: World, m: McaModel) -> List[McaRanking]:
    """Regions ranked by phi descending, ties by id"""
    if not w.regions:
        raise DomainError("cannot rank an empty world")
    scored = []
    for region in w.regions:
        breakdown = response_breakdown(region, m)
        scored.append((adaptation_factor(region, m), region.id, breakdown))
    scored.sort(key=lambda item: (-item[0], item[1]))
    logger.debug(f"[OK] MCA ranking computed for {len(scored)} regions")
    return [McaRanking(region_id=rid, phi=phi, rank=i + 1, responses=breakdown)
            for i, (phi, rid, breakdown) in enumerate(scored)]


def has_mca(x: Region, x_ref: Region, m: McaModel, p: WeightProfile) -> bool:
    """True when x is machine-climate superior yet traditionally less attractive than x_ref"""
    return (adaptation_factor(x, m) > adaptation_factor(x_ref, m)
            and traditional_score(x, p) < traditional_score(x_ref, p))


def feasible_set(w: World, c: CapabilityVector, t: SurfaceThresholds) -> FrozenSet[str]:
    """
    Candidate manufacturing locations. Below the decoupling surface a site needs
    habitability and energy access; above it energy access alone suffices.
    """
    if crossed_sigma_h(c, t):
        return frozenset(r.id for r in w.regions if r.energy_access)
    return frozenset(r.id for r in w.regions if r.habitable and r.energy_access)


def mca_model_from_dict(data: Mapping[str, Any]) -> McaModel:
    """Build the model from the `mca_model` section: {parameter: {optimum, scale, sensitivity, sidedness}}"""
    if not isinstance(data, Mapping):
        raise ConfigError("mca_model section must be an object")
    specs = []
    for parameter, record in data.items():
        if not isinstance(record, Mapping):
            raise ConfigError(f"mca_model.{parameter} must be an object")
        try:
            specs.append(EnvResponseSpec(
                parameter=parameter,
                optimum=float(record["optimum"]),
                scale=float(record["scale"]),
                sensitivity=float(record["sensitivity"]),
                sidedness=record.get("sidedness", "penalize_above"),
            ))
        except KeyError as e:
            raise ConfigError(f"mca_model.{parameter}: missing field {e}")
        except (TypeError, ValueError):
            raise ConfigError(f"mca_model.{parameter}: fields must be numbers")
    return McaModel(responses=tuple(specs))


def mca_model_to_dict(m: McaModel) -> Dict[str, Dict[str, Any]]:
    return {
        spec.parameter: {
            "optimum": spec.optimum,
            "scale": spec.scale,
            "sensitivity": spec.sensitivity,
            "sidedness": spec.sidedness,
        }
        for spec in m.responses
    }
