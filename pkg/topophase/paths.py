"""
Capability paths t -> c(t) on [0, 1] and the small text language the CLI uses to name them
"""
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .capability import CapabilityVector, IndustryPreset
from .errors import DomainError

Path = Callable[[float], CapabilityVector]

ZERO = CapabilityVector(0.0, 0.0, 0.0, 0.0)
ONE = CapabilityVector(1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True)
class CapabilityPath:
    """Straight segment in capability space, constant when start == end"""
    start: CapabilityVector
    end: CapabilityVector

    def __call__(self, t: float) -> CapabilityVector:
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"path parameter t={t} outside [0, 1]")
        if self.is_constant:
            return self.start
        # a + t * (b - a) is exact for a held component
        values = [min(1.0, max(0.0, a + t * (b - a)))
                  for a, b in zip(self.start.as_tuple(), self.end.as_tuple())]
        return CapabilityVector(*values)

    @property
    def is_constant(self) -> bool:
        return self.start == self.end

    def describe(self) -> str:
        if self.is_constant:
            return "constant:" + _fmt(self.start)
        return f"linear:{_fmt(self.start)}->{_fmt(self.end)}"


DIAGONAL = CapabilityPath(ZERO, ONE)


def _fmt(c: CapabilityVector) -> str:
    return ",".join(f"{v:g}" for v in c.as_tuple())


def _parse_vector(text: str) -> CapabilityVector:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise DomainError(f"cannot read capability vector from {text!r}")
    return CapabilityVector.from_sequence(values)


def parse_path(spec: str, industries: Optional[Iterable[IndustryPreset]] = None) -> CapabilityPath:
    """
    Build a path from its text form
    Args:
        spec: "diagonal", "constant:d,g,r,t", "linear:d,g,r,t->d,g,r,t"
              or "trajectory:<industry>" (preset current state -> (1,1,1,1))
        industries: presets searched by the trajectory form
    Returns:
        CapabilityPath
    """
    spec = spec.strip()
    kind, _, rest = spec.partition(":")
    if kind == "diagonal" and not rest:
        return DIAGONAL
    if kind == "constant" and rest:
        c = _parse_vector(rest)
        return CapabilityPath(c, c)
    if kind == "linear" and "->" in rest:
        left, right = rest.split("->", 1)
        return CapabilityPath(_parse_vector(left), _parse_vector(right))
    if kind == "trajectory" and rest:
        for preset in industries or ():
            if preset.name == rest:
                return CapabilityPath(preset.current, ONE)
        raise DomainError(f"unknown industry preset {rest!r} in path {spec!r}")
    raise DomainError(f"unrecognised path spec {spec!r}")


def sample_parameters(samples: int) -> np.ndarray:
    if samples < 2:
        raise DomainError(f"need at least 2 samples, got {samples}")
    return np.linspace(0.0, 1.0, samples)


def check_nondecreasing(path: Path, samples: int = 64) -> None:
    """Reject paths that decrease in any component between consecutive samples"""
    previous = None
    for t in sample_parameters(samples):
        current = path(float(t))
        if previous is not None and not current.dominates(previous):
            raise DomainError(f"capability path decreases near t={t:.6f}")
        previous = current
