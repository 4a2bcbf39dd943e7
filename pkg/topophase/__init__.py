"""Capability-driven manufacturing topology engine"""
from .capability import CapabilityVector, CostConstants, IndustryPreset, SurfaceThresholds
from .config import ModelBundle, load_config, load_config_file
from .errors import ConfigError, DomainError, InfeasibleError, ParseError, SizeGuardError, TopophaseError
from .world import Region, World

__all__ = [
    "CapabilityVector",
    "ConfigError",
    "CostConstants",
    "DomainError",
    "IndustryPreset",
    "InfeasibleError",
    "ModelBundle",
    "ParseError",
    "Region",
    "SizeGuardError",
    "SurfaceThresholds",
    "TopophaseError",
    "World",
    "load_config",
    "load_config_file",
]
