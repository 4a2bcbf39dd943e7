"""
Candidate-location universe: regions with factor costs, environment readings,
demand and infrastructure flags, plus loading and validation of the world document
"""
import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Tuple

from .errors import ConfigError, DomainError, ParseError

logger = logging.getLogger(__name__)

FACTOR_NAMES = ("labor", "logistics", "land", "energy", "market_distance", "regulatory")
ENVIRONMENT_NAMES = ("humidity", "dust", "thermal_cycling", "irradiance", "precipitation_days")

# (low, high) valid range per environmental parameter; None means unbounded
ENVIRONMENT_RANGES = {
    "humidity": (0.0, 100.0),
    "dust": (0.0, None),
    "thermal_cycling": (0.0, None),
    "irradiance": (0.0, None),
    "precipitation_days": (0.0, 366.0),
}


@dataclass(frozen=True)
class EnvironmentReading:
    humidity: float
    dust: float
    thermal_cycling: float
    irradiance: float
    precipitation_days: float

    def get(self, parameter: str) -> float:
        return getattr(self, parameter)


@dataclass(frozen=True)
class FactorCosts:
    """Dimensionless siting cost scores, higher is worse"""
    labor: float
    logistics: float
    land: float
    energy: float
    market_distance: float
    regulatory: float

    def as_tuple(self) -> Tuple[float, ...]:
        return tuple(getattr(self, name) for name in FACTOR_NAMES)

    def scaled(self, factor: float) -> "FactorCosts":
        return FactorCosts(*(value * factor for value in self.as_tuple()))


@dataclass(frozen=True)
class Region:
    id: str
    name: str
    position: Tuple[float, float]
    factors: FactorCosts
    environment: EnvironmentReading
    habitable: bool
    energy_access: bool
    demand: float


@dataclass(frozen=True)
class World:
    regions: Tuple[Region, ...]
    transport_rate: float

    def region(self, region_id: str) -> Region:
        for region in self.regions:
            if region.id == region_id:
                return region
        raise DomainError(f"unknown region id {region_id!r}")

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(region.id for region in self.regions)

    @property
    def total_demand(self) -> float:
        return math.fsum(region.demand for region in self.regions)


@dataclass(frozen=True)
class ValidationIssue:
    region_id: str
    field: str
    reason: str

    def __str__(self):
        where = f"region {self.region_id!r}" if self.region_id else "world"
        return f"{where}: {self.field}: {self.reason}"


def distance(a: Region, b: Region) -> float:
    """Euclidean distance in km between planar region positions"""
    return math.hypot(a.position[0] - b.position[0], a.position[1] - b.position[1])


def _finite(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def validate_world(w: World) -> List[ValidationIssue]:
    """
    Check every Region and World invariant
    Returns:
        One ValidationIssue per violation, empty when the world is valid
    """
    issues: List[ValidationIssue] = []
    if not w.regions:
        issues.append(ValidationIssue("", "regions", "at least one region is required"))
    if not _finite(w.transport_rate) or w.transport_rate < 0:
        issues.append(ValidationIssue("", "transport_rate", "must be finite and >= 0"))

    seen: Dict[str, int] = {}
    for region in w.regions:
        seen[region.id] = seen.get(region.id, 0) + 1
    for region_id, count in seen.items():
        if count > 1:
            issues.append(ValidationIssue(region_id, "id", f"duplicate id used by {count} regions"))

    for region in w.regions:
        if not isinstance(region.id, str) or not region.id:
            issues.append(ValidationIssue(str(region.id), "id", "must be a non-empty string"))
        if len(region.position) != 2 or not all(_finite(v) for v in region.position):
            issues.append(ValidationIssue(region.id, "position", "must be two finite km coordinates"))
        for name in FACTOR_NAMES:
            value = getattr(region.factors, name)
            if not _finite(value) or value < 0:
                issues.append(ValidationIssue(region.id, name, "factor cost must be finite and >= 0"))
        for name in ENVIRONMENT_NAMES:
            value = region.environment.get(name)
            low, high = ENVIRONMENT_RANGES[name]
            if not _finite(value) or value < low or (high is not None and value > high):
                bound = f"[{low:g}, {high:g}]" if high is not None else f">= {low:g}"
                issues.append(ValidationIssue(region.id, name, f"{value} outside range {bound}"))
        if not _finite(region.demand) or region.demand < 0:
            issues.append(ValidationIssue(region.id, "demand", "must be finite and >= 0"))
    return issues


def _reject_constant(name: str):
    raise ParseError(f"non-finite number {name} is not accepted")


def parse_document(document: str) -> Dict[str, Any]:
    """Parse configuration text as JSON, refusing NaN and Infinity"""
    try:
        data = json.loads(document, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed configuration document: {e}")
    if not isinstance(data, dict):
        raise ParseError("configuration document must be a JSON object")
    return data


def _field(record: Mapping[str, Any], key: str, region_id: str) -> Any:
    if key not in record:
        raise ConfigError(f"region {region_id!r}: missing field {key!r}",
                          [ValidationIssue(region_id, key, "missing")])
    return record[key]


def _number(record: Mapping[str, Any], key: str, region_id: str) -> float:
    value = _field(record, key, region_id)
    if not _finite(value):
        raise ConfigError(f"region {region_id!r}: field {key!r} must be a finite number",
                          [ValidationIssue(region_id, key, "not a finite number")])
    return float(value)


def _flag(record: Mapping[str, Any], key: str, region_id: str) -> bool:
    value = _field(record, key, region_id)
    if not isinstance(value, bool):
        raise ConfigError(f"region {region_id!r}: field {key!r} must be true or false",
                          [ValidationIssue(region_id, key, "not a boolean")])
    return value


def _region_from_dict(record: Mapping[str, Any], index: int) -> Region:
    if not isinstance(record, Mapping):
        raise ConfigError(f"regions[{index}] must be an object")
    region_id = record.get("id", f"#{index}")
    if not isinstance(region_id, str):
        raise ConfigError(f"regions[{index}]: id must be a string",
                          [ValidationIssue(str(region_id), "id", "not a string")])
    position = _field(record, "position", region_id)
    if not isinstance(position, list) or len(position) != 2 or not all(_finite(v) for v in position):
        raise ConfigError(f"region {region_id!r}: position must be [x_km, y_km]",
                          [ValidationIssue(region_id, "position", "not two finite numbers")])
    factors = _field(record, "factors", region_id)
    environment = _field(record, "environment", region_id)
    if not isinstance(factors, Mapping) or not isinstance(environment, Mapping):
        raise ConfigError(f"region {region_id!r}: factors and environment must be objects")
    return Region(
        id=region_id,
        name=str(record.get("name", region_id)),
        position=(float(position[0]), float(position[1])),
        factors=FactorCosts(*(_number(factors, name, region_id) for name in FACTOR_NAMES)),
        environment=EnvironmentReading(*(_number(environment, name, region_id)
                                         for name in ENVIRONMENT_NAMES)),
        habitable=_flag(record, "habitable", region_id),
        energy_access=_flag(record, "energy_access", region_id),
        demand=_number(record, "demand", region_id),
    )


def world_from_dict(data: Mapping[str, Any]) -> World:
    """Build and validate a World from the `world` section of a configuration document"""
    if not isinstance(data, Mapping):
        raise ConfigError("world section must be an object")
    regions = data.get("regions")
    if not isinstance(regions, list):
        raise ConfigError("world.regions must be an array",
                          [ValidationIssue("", "regions", "missing or not an array")])
    rate = data.get("transport_rate")
    if not _finite(rate):
        raise ConfigError("world.transport_rate must be a finite number",
                          [ValidationIssue("", "transport_rate", "missing or not a number")])
    w = World(regions=tuple(_region_from_dict(r, i) for i, r in enumerate(regions)),
              transport_rate=float(rate))
    issues = validate_world(w)
    if issues:
        raise ConfigError("invalid world: " + "; ".join(str(issue) for issue in issues), issues)
    logger.debug(f"[OK] World loaded with {len(w.regions)} regions")
    return w


def load_world(document: str) -> World:
    """Parse a configuration document and return its validated World"""
    data = parse_document(document)
    if "world" not in data:
        raise ConfigError("configuration document has no 'world' section")
    return world_from_dict(data["world"])


def region_to_dict(region: Region) -> Dict[str, Any]:
    return {
        "id": region.id,
        "name": region.name,
        "position": [region.position[0], region.position[1]],
        "factors": {name: getattr(region.factors, name) for name in FACTOR_NAMES},
        "environment": {name: region.environment.get(name) for name in ENVIRONMENT_NAMES},
        "habitable": region.habitable,
        "energy_access": region.energy_access,
        "demand": region.demand,
    }


def world_to_dict(w: World) -> Dict[str, Any]:
    return {
        "regions": [region_to_dict(region) for region in w.regions],
        "transport_rate": w.transport_rate,
    }

