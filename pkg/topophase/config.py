"""
Configuration document - loads the JSON model bundle (world, weights, cost constants,
MCA model, product, industry presets, solver knobs), applies dotted-key overrides and
serializes it back
"""
import copy
import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from .capability import (CapabilityVector, CostConstants, DecouplingThresholds, IndustryPreset,
                         SurfaceMinimums, SurfaceThresholds)
from .errors import ConfigError, DomainError
from .mca import McaModel, mca_model_from_dict, mca_model_to_dict
from .siteselect import WeightProfile
from .topology import BRUTE_FORCE_LIMIT, EXACT_LIMIT, ProductSpec, product_from_dict, product_to_dict
from .world import FACTOR_NAMES, World, parse_document, world_from_dict, world_to_dict

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).parent / "presets"
INDUSTRIES_FILE = "industries.json"
DEFAULT_CONFIG = "two-metro"

REQUIRED_SECTIONS = ("world", "weights", "cost_constants", "mca_model", "product")
OPTIONAL_SECTIONS = ("presets", "solver")


@dataclass(frozen=True)
class SolverSettings:
    jump_threshold: float = 0.1
    bisection_tol: float = 1e-4
    inversion_tol: float = 1e-6
    scan_samples: int = 64
    exact_limit: int = EXACT_LIMIT
    brute_force_limit: int = BRUTE_FORCE_LIMIT
    use_effective_reliability: bool = False

    def __post_init__(self):
        for name in ("bisection_tol", "inversion_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"solver.{name} must be > 0")
        if self.jump_threshold < 0:
            raise ConfigError("solver.jump_threshold must be >= 0")
        if self.scan_samples < 2:
            raise ConfigError("solver.scan_samples must be >= 2")
        if self.exact_limit < 0 or self.brute_force_limit < 1:
            raise ConfigError("solver limits must be nonnegative counts")


@dataclass(frozen=True)
class ModelBundle:
    """Everything the engine needs for one run, as loaded from a configuration document"""
    world: World
    weights: WeightProfile
    cost_constants: CostConstants
    mca_model: McaModel
    product: ProductSpec
    industries: Tuple[IndustryPreset, ...]
    default_industry: str
    solver: SolverSettings = SolverSettings()

    def industry(self, name: Optional[str] = None) -> IndustryPreset:
        name = name or self.default_industry
        for preset in self.industries:
            if preset.name == name:
                return preset
        known = ", ".join(p.name for p in self.industries)
        raise DomainError(f"unknown industry preset {name!r} (known: {known})")

    def thresholds(self, name: Optional[str] = None) -> SurfaceThresholds:
        return self.industry(name).thresholds


def bundled_names() -> List[str]:
    """Names of the configuration documents shipped with the package"""
    return sorted(p.stem for p in PRESET_DIR.glob("*.json") if p.name != INDUSTRIES_FILE)


def _minimums(data: Mapping[str, Any]) -> SurfaceMinimums:
    return SurfaceMinimums(data["delta_min"], data["gamma_min"], data["rho_min"])


def industry_from_dict(data: Mapping[str, Any]) -> IndustryPreset:
    try:
        thresholds = data["thresholds"]
        sigma_h = thresholds["sigma_h"]
        return IndustryPreset(
            name=str(data["name"]),
            current=CapabilityVector.from_dict(data["current"]),
            thresholds=SurfaceThresholds(
                sigma_w=_minimums(thresholds["sigma_w"]),
                sigma_n=_minimums(thresholds["sigma_n"]),
                sigma_h=DecouplingThresholds(sigma_h["theta_h"], sigma_h["theta_g"], sigma_h["tau_min"]),
            ),
            metadata={str(k): str(v) for k, v in data.get("metadata", {}).items()},
        )
    except KeyError as e:
        raise ConfigError(f"industry preset {data.get('name', '?')!r}: missing field {e}")
    except (TypeError, AttributeError):
        raise ConfigError(f"industry preset {data.get('name', '?')!r}: malformed record")
    except DomainError as e:
        raise ConfigError(f"industry preset {data.get('name', '?')!r}: {e}")


def industry_to_dict(preset: IndustryPreset) -> Dict[str, Any]:
    t = preset.thresholds
    return {
        "name": preset.name,
        "current": preset.current.as_dict(),
        "thresholds": {
            "sigma_w": asdict(t.sigma_w),
            "sigma_n": asdict(t.sigma_n),
            "sigma_h": asdict(t.sigma_h),
        },
        "metadata": dict(preset.metadata),
    }


def _load_bundled_industries() -> Dict[str, Any]:
    return parse_document((PRESET_DIR / INDUSTRIES_FILE).read_text(encoding="utf-8"))


def _presets_from_dict(data: Mapping[str, Any]) -> Tuple[Tuple[IndustryPreset, ...], str]:
    if not isinstance(data, Mapping) or not isinstance(data.get("industries"), list):
        raise ConfigError("presets must be an object with an 'industries' array")
    industries = tuple(industry_from_dict(record) for record in data["industries"])
    if not industries:
        raise ConfigError("presets.industries must not be empty")
    names = [p.name for p in industries]
    if len(set(names)) != len(names):
        raise ConfigError("industry preset names must be unique")
    default = data.get("default", names[0])
    if default not in names:
        raise ConfigError(f"presets.default {default!r} is not a listed industry")
    return industries, default


def _weights_from_dict(data: Mapping[str, Any]) -> WeightProfile:
    if not isinstance(data, Mapping) or not isinstance(data.get("baseline"), Mapping):
        raise ConfigError("weights must be an object with a 'baseline' object")
    exponents = data.get("fusion_exponents", [0.5, 0.5])
    if not isinstance(exponents, list) or len(exponents) != 2:
        raise ConfigError("weights.fusion_exponents must be [a, b]")
    return WeightProfile.from_mapping(
        data["baseline"],
        w_phi=float(data.get("w_phi", 0.0)),
        fusion_exponents=(float(exponents[0]), float(exponents[1])),
        inversion_rule=data.get("inversion_rule", "market"),
        mca_objective=data.get("mca_objective", "full"),
    )


def _solver_from_dict(data: Mapping[str, Any]) -> SolverSettings:
    if not isinstance(data, Mapping):
        raise ConfigError("solver must be an object")
    known = {f.name for f in fields(SolverSettings)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"unknown solver settings: {', '.join(sorted(unknown))}")
    values = {}
    for name, value in data.items():
        default = getattr(SolverSettings, name)
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"solver.{name} must be true or false")
        elif isinstance(default, int):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"solver.{name} must be an integer")
        elif isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"solver.{name} must be a number")
        values[name] = value
    return SolverSettings(**values)


def bundle_from_document(data: Mapping[str, Any]) -> ModelBundle:
    """Build and validate a ModelBundle from a parsed configuration document"""
    missing = [name for name in REQUIRED_SECTIONS if name not in data]
    if missing:
        raise ConfigError(f"configuration document is missing sections: {', '.join(missing)}")
    unknown = set(data) - set(REQUIRED_SECTIONS) - set(OPTIONAL_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown configuration sections: {', '.join(sorted(unknown))}")
    world = world_from_dict(data["world"])
    try:
        weights = _weights_from_dict(data["weights"])
        cost_constants = CostConstants(**data["cost_constants"])
        product = product_from_dict(data["product"])
    except KeyError as e:
        raise ConfigError(f"missing configuration field {e}")
    except DomainError as e:
        raise ConfigError(str(e))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"malformed configuration section: {e}")
    if product.margin <= 0:
        raise ConfigError(f"product.price {product.price} must exceed variable_cost {product.variable_cost}")
    mca_model = mca_model_from_dict(data["mca_model"])
    industries, default = _presets_from_dict(data.get("presets") or _load_bundled_industries())
    solver = _solver_from_dict(data.get("solver", {}))
    logger.info(f"[OK] Configuration loaded: {len(world.regions)} regions, "
                f"{len(industries)} industry presets, default {default!r}")
    return ModelBundle(world=world, weights=weights, cost_constants=cost_constants, mca_model=mca_model,
                       product=product, industries=industries, default_industry=default, solver=solver)


def load_config(document: str) -> ModelBundle:
    """Parse configuration text and return the validated ModelBundle"""
    return bundle_from_document(parse_document(document))


def read_document(path_or_name: str = DEFAULT_CONFIG) -> Dict[str, Any]:
    """
    Read a configuration document without validating it
    Args:
        path_or_name: a file path, or the name of a bundled document ("two-metro", ...)
    Returns:
        The parsed JSON object
    """
    path = Path(path_or_name)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    elif (PRESET_DIR / f"{path_or_name}.json").is_file() and path_or_name != Path(INDUSTRIES_FILE).stem:
        text = (PRESET_DIR / f"{path_or_name}.json").read_text(encoding="utf-8")
    else:
        raise ConfigError(f"no configuration file or bundled document named {path_or_name!r} "
                          f"(bundled: {', '.join(bundled_names())})")
    return parse_document(text)


def load_config_file(path_or_name: str = DEFAULT_CONFIG) -> ModelBundle:
    return bundle_from_document(read_document(path_or_name))


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _child(node: Any, part: str, key: str) -> Tuple[Any, Any]:
    """Resolve one dotted-path step; returns (container key, child)"""
    if isinstance(node, dict):
        if part not in node:
            raise ConfigError(f"override key {key!r}: no field {part!r}")
        return part, node[part]
    if isinstance(node, list):
        if part.isdigit() and int(part) < len(node):
            return int(part), node[int(part)]
        for i, item in enumerate(node):
            if isinstance(item, dict) and part in (item.get("id"), item.get("name")):
                return i, item
        raise ConfigError(f"override key {key!r}: no element {part!r}")
    raise ConfigError(f"override key {key!r}: {part!r} addresses into a scalar")


def apply_overrides(document: Mapping[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """
    Apply KEY=VALUE overrides onto a copy of a configuration document
    Args:
        document: parsed configuration document
        overrides: dotted keys into existing fields; list elements by index, id or name.
                   VALUE is read as JSON when possible, else as a plain string
    Returns:
        The overridden document
    """
    result = copy.deepcopy(dict(document))
    if "presets" not in result and any(o.split("=", 1)[0].startswith("presets.") for o in overrides):
        result["presets"] = _load_bundled_industries()
    if "solver" not in result and any(o.split("=", 1)[0].startswith("solver.") for o in overrides):
        result["solver"] = asdict(SolverSettings())
    for override in overrides:
        key, sep, raw = override.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"override {override!r} is not KEY=VALUE")
        parts = key.split(".")
        node = result
        for part in parts[:-1]:
            _, node = _child(node, part, key)
        slot, _ = _child(node, parts[-1], key)
        node[slot] = _parse_value(raw)
        logger.debug(f"[OK] Override {key} = {raw}")
    return result


def bundle_to_document(bundle: ModelBundle) -> Dict[str, Any]:
    """Serialize a ModelBundle to a configuration document accepted by bundle_from_document"""
    w = bundle.weights
    return {
        "world": world_to_dict(bundle.world),
        "weights": {
            "baseline": dict(zip(FACTOR_NAMES, w.baseline)),
            "w_phi": w.w_phi,
            "fusion_exponents": list(w.fusion_exponents),
            "inversion_rule": w.inversion_rule,
            "mca_objective": w.mca_objective,
        },
        "cost_constants": asdict(bundle.cost_constants),
        "mca_model": mca_model_to_dict(bundle.mca_model),
        "product": product_to_dict(bundle.product),
        "presets": {
            "default": bundle.default_industry,
            "industries": [industry_to_dict(p) for p in bundle.industries],
        },
        "solver": asdict(bundle.solver),
    }


def dump_config(bundle: ModelBundle) -> str:
    return json.dumps(bundle_to_document(bundle), indent=2) + "\n"
