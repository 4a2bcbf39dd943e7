"""
Capability Space - capability vectors, critical-surface thresholds and the
capability-dependent cost components shared by every downstream model
"""
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Tuple

from .errors import DomainError

DIMENSIONS = ("delta", "gamma", "rho", "tau")


def _check_unit(name: str, value: float) -> float:
    """Validate that a value lies in the closed unit interval"""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a number, got {value!r}")
    if not math.isfinite(value) or value < 0.0 or value > 1.0:
        raise DomainError(f"{name}={value} outside [0, 1]")
    return value


@dataclass(frozen=True)
class CapabilityVector:
    """A capability state c = (delta, gamma, rho, tau)"""
    delta: float
    gamma: float
    rho: float
    tau: float

    def __post_init__(self):
        for name in DIMENSIONS:
            object.__setattr__(self, name, _check_unit(name, getattr(self, name)))

    @classmethod
    def from_sequence(cls, values: Iterable[float]) -> "CapabilityVector":
        values = list(values)
        if len(values) != 4:
            raise DomainError(f"capability vector needs 4 components, got {len(values)}")
        return cls(*values)

    @classmethod
    def from_dict(cls, data: Mapping[str, float]) -> "CapabilityVector":
        missing = [name for name in DIMENSIONS if name not in data]
        if missing:
            raise DomainError(f"capability vector missing {', '.join(missing)}")
        return cls(**{name: data[name] for name in DIMENSIONS})

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.delta, self.gamma, self.rho, self.tau)

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(DIMENSIONS, self.as_tuple()))

    def dominates(self, other: "CapabilityVector") -> bool:
        """True when every component is >= the other's"""
        return all(a >= b for a, b in zip(self.as_tuple(), other.as_tuple()))

    def with_rho(self, rho: float) -> "CapabilityVector":
        return CapabilityVector(self.delta, self.gamma, rho, self.tau)


@dataclass(frozen=True)
class SurfaceMinimums:
    """Tabulated per-dimension minimums for the weight-inversion and batch-collapse surfaces"""
    delta_min: float
    gamma_min: float
    rho_min: float

    def __post_init__(self):
        for name in ("delta_min", "gamma_min", "rho_min"):
            object.__setattr__(self, name, _check_unit(name, getattr(self, name)))


@dataclass(frozen=True)
class DecouplingThresholds:
    """Human-infrastructure decoupling thresholds on delta*rho, gamma and tau"""
    theta_h: float
    theta_g: float
    tau_min: float

    def __post_init__(self):
        for name in ("theta_h", "theta_g", "tau_min"):
            object.__setattr__(self, name, _check_unit(name, getattr(self, name)))


@dataclass(frozen=True)
class SurfaceThresholds:
    sigma_w: SurfaceMinimums
    sigma_n: SurfaceMinimums
    sigma_h: DecouplingThresholds


@dataclass(frozen=True)
class IndustryPreset:
    """One industry case: its current capability state, thresholds and free-text notes"""
    name: str
    current: CapabilityVector
    thresholds: SurfaceThresholds
    metadata: Dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class CostConstants:
    """Constants of the switching and labor cost components"""
    c_switch_0: float
    switch_exponent: float = 2.0
    labor_baseline: float = 0.0
    supervision_baseline: float = 0.0
    stations: int = 50

    def __post_init__(self):
        for name in ("c_switch_0", "labor_baseline", "supervision_baseline"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name}={value} must be finite and >= 0")
            object.__setattr__(self, name, value)
        q = float(self.switch_exponent)
        if not math.isfinite(q) or q <= 0:
            raise DomainError(f"switch_exponent={q} must be > 0")
        object.__setattr__(self, "switch_exponent", q)
        if isinstance(self.stations, bool) or int(self.stations) != self.stations or self.stations < 1:
            raise DomainError(f"stations={self.stations} must be a positive integer")
        object.__setattr__(self, "stations", int(self.stations))


def fusion_factor(gamma: float, tau: float, exponents: Tuple[float, float] = (0.5, 0.5)) -> float:
    """
    Joint generalization / tactile-vision contribution h(gamma, tau) = gamma^a * tau^b.
    The default exponents give the geometric mean sqrt(gamma * tau).
    """
    gamma = _check_unit("gamma", gamma)
    tau = _check_unit("tau", tau)
    a, b = exponents
    if a <= 0 or b <= 0:
        raise DomainError(f"fusion exponents must be > 0, got ({a}, {b})")
    if a == 0.5 and b == 0.5:
        return math.sqrt(gamma * tau)
    return (gamma ** a) * (tau ** b)


def switching_cost(gamma: float, k: CostConstants) -> float:
    """C_switch(gamma) = C_switch0 * (1 - gamma)^q"""
    gamma = _check_unit("gamma", gamma)
    return k.c_switch_0 * (1.0 - gamma) ** k.switch_exponent


def line_yield(rho: float, n: int) -> float:
    """Probability that an n-station line completes a cycle without failure"""
    rho = _check_unit("rho", rho)
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"station count n={n} must be a positive integer")
    return rho ** int(n)


def labor_cost(c: CapabilityVector, k: CostConstants) -> float:
    """
    C_labor(delta, rho) = L0 * (1 - delta) + S0 * (1 - rho^n)
    The supervision term is the per-cycle line failure probability.
    """
    return (k.labor_baseline * (1.0 - c.delta)
            + k.supervision_baseline * (1.0 - line_yield(c.rho, k.stations)))


def crossed_sigma_h(c: CapabilityVector, t: SurfaceThresholds) -> bool:
    """Autonomy predicate: delta*rho > theta_H and gamma > theta_G and tau >= tau_min"""
    h = t.sigma_h
    return c.delta * c.rho > h.theta_h and c.gamma > h.theta_g and c.tau >= h.tau_min


def meets_surface_minimums(c: CapabilityVector, m: SurfaceMinimums) -> bool:
    return c.delta >= m.delta_min and c.gamma >= m.gamma_min and c.rho >= m.rho_min


def threshold_gaps(c: CapabilityVector, t: SurfaceThresholds) -> Dict[str, Dict[str, object]]:
    """
    Shortfall of the capability state against each surface's thresholds
    Returns:
        {surface: {dimension: max(0, required - current), ..., "binding": name}}
    """
    gaps = {
        "sigma_w": {
            "delta": max(0.0, t.sigma_w.delta_min - c.delta),
            "gamma": max(0.0, t.sigma_w.gamma_min - c.gamma),
            "rho": max(0.0, t.sigma_w.rho_min - c.rho),
        },
        "sigma_n": {
            "delta": max(0.0, t.sigma_n.delta_min - c.delta),
            "gamma": max(0.0, t.sigma_n.gamma_min - c.gamma),
            "rho": max(0.0, t.sigma_n.rho_min - c.rho),
        },
        "sigma_h": {
            "delta_rho": max(0.0, t.sigma_h.theta_h - c.delta * c.rho),
            "gamma": max(0.0, t.sigma_h.theta_g - c.gamma),
            "tau": max(0.0, t.sigma_h.tau_min - c.tau),
        },
    }
    report = {}
    for surface, dims in gaps.items():
        # first largest shortfall wins, "" when nothing binds
        binding = max(dims, key=lambda name: dims[name])
        report[surface] = dict(dims, binding=binding if dims[binding] > 0 else "")
    return report
