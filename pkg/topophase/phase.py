"""
Phase framework - the concentration order parameter, phase labels, 1-D and 2-D
capability sweeps and critical-point detection by bisection
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from itertools import repeat
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .allocation_cache import AllocationCache, CachedOutcome
from .capability import CapabilityVector, SurfaceThresholds, crossed_sigma_h
from .config import ModelBundle
from .errors import DomainError, InfeasibleError
from .paths import Path, check_nondecreasing, sample_parameters
from .siteselect import WeightProfile, find_weight_inversion, inversion_gap
from .topology import allocate, brute_force_allocate, mebs, resolve_n_star

logger = logging.getLogger(__name__)


class PhaseLabel(str, Enum):
    PHASE_I = "PhaseI"
    PHASE_II = "PhaseII"
    PHASE_III = "PhaseIII"

    @property
    def description(self) -> str:
        return PHASE_DESCRIPTIONS[self]


PHASE_DESCRIPTIONS = {
    PhaseLabel.PHASE_I: "labor cost dominates site selection; centralized, labor-proximal topology",
    PhaseLabel.PHASE_II: "market proximity dominates; distributed, market-proximal topology",
    PhaseLabel.PHASE_III: "human infrastructure decoupled; ubiquitous autonomous topology",
}


class CriticalKind(str, Enum):
    SIGMA_W = "SigmaW"
    SIGMA_N = "SigmaN"
    SIGMA_H = "SigmaH"
    MCI_JUMP = "MciJump"


@dataclass(frozen=True)
class SweepSample:
    t: float
    mci: float
    phase: PhaseLabel
    facilities: int


@dataclass(frozen=True)
class CriticalPoint:
    t: float
    kind: CriticalKind
    magnitude: Optional[float] = None
    t_below: Optional[float] = None
    t_above: Optional[float] = None
    mci_below: Optional[float] = None
    mci_above: Optional[float] = None


@dataclass(frozen=True)
class SweepResult:
    samples: Tuple[SweepSample, ...]
    critical_points: Tuple[CriticalPoint, ...]

    def jumps(self) -> List[CriticalPoint]:
        return [p for p in self.critical_points if p.kind is CriticalKind.MCI_JUMP]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(s.t, s.mci, s.phase.value, s.facilities) for s in self.samples],
            columns=["t", "mci", "phase", "facilities"],
        )

    def critical_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(p.t, p.kind.value, p.magnitude) for p in self.critical_points],
            columns=["t", "kind", "magnitude"],
        )


@dataclass(frozen=True)
class PhaseCell:
    a: float
    gamma: float
    phase: PhaseLabel
    mci: Optional[float]
    facilities: int = 0
    error: str = ""


@dataclass(frozen=True)
class PhaseDiagram:
    """Grid over (a = delta*rho, gamma); rows follow gamma_axis, columns follow a_axis"""
    a_axis: Tuple[float, ...]
    gamma_axis: Tuple[float, ...]
    cells: Tuple[Tuple[PhaseCell, ...], ...]
    fixed_tau: float

    @property
    def resolution(self) -> Tuple[int, int]:
        return len(self.gamma_axis), len(self.a_axis)

    def cell(self, row: int, col: int) -> PhaseCell:
        return self.cells[row][col]

    def labels(self) -> np.ndarray:
        return np.array([[cell.phase.value for cell in row] for row in self.cells])

    def to_frame(self) -> pd.DataFrame:
        rows = [(cell.a, cell.gamma, cell.phase.value, np.nan if cell.mci is None else cell.mci)
                for row in self.cells for cell in row]
        return pd.DataFrame(rows, columns=["a", "gamma", "phase", "mci"])


def mci(outputs: Union[Mapping[str, float], Sequence[float]]) -> float:
    """Manufacturing Concentration Index: sum of squared regional output shares"""
    values = np.asarray(list(outputs.values()) if isinstance(outputs, Mapping) else list(outputs), dtype=float)
    if values.size == 0:
        raise DomainError("MCI needs at least one region")
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise DomainError("regional outputs must be finite and >= 0")
    total = values.sum()
    if total <= 0:
        raise DomainError("total output is zero, MCI is undefined")
    shares = values / total
    return float(np.dot(shares, shares))


def classify_phase(c: CapabilityVector, p: WeightProfile, t: SurfaceThresholds) -> PhaseLabel:
    """PhaseIII past the decoupling surface, PhaseII once the market weight overtakes labor, else PhaseI"""
    if crossed_sigma_h(c, t):
        return PhaseLabel.PHASE_III
    if inversion_gap(c, p) < 0:
        return PhaseLabel.PHASE_II
    return PhaseLabel.PHASE_I


def _solve(bundle: ModelBundle, c: CapabilityVector, thresholds: SurfaceThresholds, exact: bool) -> CachedOutcome:
    solver = bundle.solver
    solve = brute_force_allocate if exact else allocate
    limit = {"limit": solver.brute_force_limit} if exact else {"exact_limit": solver.exact_limit}
    try:
        return solve(bundle.world, c, bundle.cost_constants, bundle.product, thresholds, bundle.mca_model,
                     use_effective_reliability=solver.use_effective_reliability, **limit)
    except InfeasibleError as e:
        return e


class _Evaluator:
    """Allocation outcomes for one bundle, memoized by capability state"""

    def __init__(self, bundle: ModelBundle, thresholds: SurfaceThresholds, exact: bool,
                 workers: Optional[int] = None):
        self.bundle = bundle
        self.thresholds = thresholds
        self.exact = exact
        self.workers = workers
        self.mode = "exact" if exact else "heuristic"
        self.cache = AllocationCache()

    def outcome(self, c: CapabilityVector) -> CachedOutcome:
        cached = self.cache.get(c, self.mode)
        if cached is not None:
            return cached
        result = _solve(self.bundle, c, self.thresholds, self.exact)
        self.cache.put(c, self.mode, result)
        return result

    def outcomes(self, states: Sequence[CapabilityVector]) -> List[CachedOutcome]:
        if not self.workers or self.workers <= 1 or len(states) < 2:
            return [self.outcome(c) for c in states]
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            results = list(pool.map(_solve, repeat(self.bundle), states, repeat(self.thresholds),
                                    repeat(self.exact), chunksize=max(1, len(states) // (4 * self.workers))))
        for c, result in zip(states, results):
            self.cache.put(c, self.mode, result)
        return results

    def mci_at(self, path: Path, t: float) -> float:
        result = self.outcome(path(t))
        if isinstance(result, InfeasibleError):
            raise result.at(t)
        return mci(result.outputs)


def _is_jump(magnitude: float, threshold: float) -> bool:
    """An MCI change counts as a jump when it is nonzero and at least the threshold"""
    return magnitude > 0.0 and magnitude >= threshold


def _refine_jump(evaluator: _Evaluator, path: Path, lo: float, hi: float,
                 mci_lo: float, mci_hi: float, tol: float, threshold: float) -> Optional[CriticalPoint]:
    """Bisect toward the half holding the larger MCI change until the bracket is within tol"""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        mci_mid = evaluator.mci_at(path, mid)
        if abs(mci_mid - mci_lo) >= abs(mci_hi - mci_mid):
            hi, mci_hi = mid, mci_mid
        else:
            lo, mci_lo = mid, mci_mid
    magnitude = abs(mci_hi - mci_lo)
    if not _is_jump(magnitude, threshold):
        return None
    return CriticalPoint(t=0.5 * (lo + hi), kind=CriticalKind.MCI_JUMP, magnitude=magnitude,
                         t_below=lo, t_above=hi, mci_below=mci_lo, mci_above=mci_hi)


def _predicate_root(path: Path, crossed: Callable[[CapabilityVector], bool], tol: float,
                    samples: int) -> Optional[float]:
    """First parameter where a predicate on c(t) changes value, refined by bisection"""
    ts = sample_parameters(samples)
    values = [crossed(path(float(t))) for t in ts]
    for i in range(1, len(values)):
        if values[i] != values[0]:
            break
    else:
        return None
    lo, hi = float(ts[i - 1]), float(ts[i])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if crossed(path(mid)) == values[0]:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_critical_point(path: Path, detector: Union[CriticalKind, str], bundle: ModelBundle,
                        tol: Optional[float] = None, industry: Optional[str] = None,
                        exact: bool = False) -> Optional[float]:
    """
    Locate a critical parameter t* along a path
    Args:
        path: componentwise nondecreasing map t -> c(t)
        detector: SigmaW, SigmaN, SigmaH or MciJump
        bundle: model bundle
        tol: bisection tolerance on t (solver.bisection_tol by default)
        industry: preset supplying the surface thresholds
        exact: use the brute-force allocator for MciJump
    Returns:
        t*, or None when the path never crosses
    """
    detector = CriticalKind(detector)
    solver = bundle.solver
    tol = solver.bisection_tol if tol is None else tol
    if tol <= 0:
        raise DomainError(f"tol={tol} must be > 0")
    thresholds = bundle.thresholds(industry)
    check_nondecreasing(path, solver.scan_samples)

    if detector is CriticalKind.SIGMA_W:
        return find_weight_inversion(path, bundle.weights, tol=tol, samples=solver.scan_samples)
    if detector is CriticalKind.SIGMA_H:
        return _predicate_root(path, lambda c: crossed_sigma_h(c, thresholds), tol, solver.scan_samples)
    if detector is CriticalKind.SIGMA_N:
        n_star = resolve_n_star(bundle.world, bundle.product)
        return _predicate_root(path, lambda c: mebs(c, bundle.cost_constants, bundle.product) < n_star,
                               tol, solver.scan_samples)

    evaluator = _Evaluator(bundle, thresholds, exact)
    ts = sample_parameters(solver.scan_samples)
    values = [evaluator.mci_at(path, float(t)) for t in ts]
    deltas = np.abs(np.diff(values))
    i = int(np.argmax(deltas))
    if not _is_jump(float(deltas[i]), solver.jump_threshold):
        return None
    point = _refine_jump(evaluator, path, float(ts[i]), float(ts[i + 1]), values[i], values[i + 1],
                         tol, solver.jump_threshold)
    return None if point is None else point.t


def sweep_1d(path: Path, steps: int, bundle: ModelBundle, *, industry: Optional[str] = None,
             exact: bool = False, workers: Optional[int] = None) -> SweepResult:
    """
    Sample MCI, phase label and facility count along a capability path
    Args:
        path: componentwise nondecreasing map t -> c(t)
        steps: number of evenly spaced samples on [0, 1], >= 2
        bundle: model bundle
        industry: preset supplying the surface thresholds
        exact: allocate with the brute-force enumerator
        workers: process pool size for the samples
    Returns:
        SweepResult with MciJump, SigmaW, SigmaN and SigmaH critical points
    """
    if steps < 2:
        raise DomainError(f"steps={steps} must be >= 2")
    solver = bundle.solver
    thresholds = bundle.thresholds(industry)
    check_nondecreasing(path, solver.scan_samples)
    ts = [float(t) for t in sample_parameters(steps)]
    states = [path(t) for t in ts]

    evaluator = _Evaluator(bundle, thresholds, exact, workers)
    logger.info(f"[SWEEP] {steps} samples, {'exact' if exact else 'heuristic'} allocation")
    samples = []
    for t, c, result in zip(ts, states, evaluator.outcomes(states)):
        if isinstance(result, InfeasibleError):
            raise result.at(t)
        samples.append(SweepSample(t=t, mci=mci(result.outputs), phase=classify_phase(c, bundle.weights, thresholds),
                                   facilities=len(result.facilities)))

    critical: List[CriticalPoint] = []
    for before, after in zip(samples, samples[1:]):
        if _is_jump(abs(after.mci - before.mci), solver.jump_threshold):
            point = _refine_jump(evaluator, path, before.t, after.t, before.mci, after.mci,
                                 solver.bisection_tol, solver.jump_threshold)
            if point is not None:
                critical.append(point)
    for kind in (CriticalKind.SIGMA_W, CriticalKind.SIGMA_N, CriticalKind.SIGMA_H):
        tol = solver.inversion_tol if kind is CriticalKind.SIGMA_W else solver.bisection_tol
        t_star = find_critical_point(path, kind, bundle, tol=tol, industry=industry)
        if t_star is not None:
            critical.append(CriticalPoint(t=t_star, kind=kind))
    critical.sort(key=lambda p: (p.t, p.kind.value))

    stats = evaluator.cache.get_cache_stats()
    logger.info(f"[SWEEP] {len(critical)} critical points; cache {stats['efficiency']}")
    return SweepResult(samples=tuple(samples), critical_points=tuple(critical))


def embed(a: float, gamma: float, tau: float, delta_exponent: float = 0.5) -> CapabilityVector:
    """Capability state for a phase-diagram cell: delta = a^s, rho = a^(1-s)"""
    if not 0.0 < delta_exponent < 1.0:
        raise DomainError(f"delta_exponent={delta_exponent} must lie in (0, 1)")
    if delta_exponent == 0.5:
        root = math.sqrt(a)
        return CapabilityVector(root, gamma, root, tau)
    return CapabilityVector(a ** delta_exponent, gamma, a ** (1.0 - delta_exponent), tau)


def sweep_2d(bundle: ModelBundle, fixed_tau: float = 1.0, resolution: Tuple[int, int] = (50, 50), *,
             industry: Optional[str] = None, exact: bool = False, workers: Optional[int] = None,
             delta_exponent: float = 0.5) -> PhaseDiagram:
    """
    Phase diagram over the (delta*rho, gamma) projection at fixed tau
    Args:
        bundle: model bundle
        fixed_tau: tactile-vision fusion held constant over the grid
        resolution: (rows along gamma, cols along a), each >= 2
        industry: preset supplying the surface thresholds
        exact: allocate with the brute-force enumerator
        workers: process pool size for the cells
        delta_exponent: split of a between delta and rho
    Returns:
        Fully populated PhaseDiagram; infeasible cells carry the error text and no MCI
    """
    rows, cols = resolution
    if rows < 2 or cols < 2:
        raise DomainError(f"resolution {resolution} must be at least 2x2")
    thresholds = bundle.thresholds(industry)
    gamma_axis = [float(v) for v in np.linspace(0.0, 1.0, rows)]
    a_axis = [float(v) for v in np.linspace(0.0, 1.0, cols)]
    states = [embed(a, gamma, fixed_tau, delta_exponent) for gamma in gamma_axis for a in a_axis]

    logger.info(f"[GRID] {rows}x{cols} phase diagram at tau={fixed_tau:.6f}")
    evaluator = _Evaluator(bundle, thresholds, exact, workers)
    outcomes = evaluator.outcomes(states)

    cells = []
    for i, gamma in enumerate(gamma_axis):
        row = []
        for j, a in enumerate(a_axis):
            c = states[i * cols + j]
            result = outcomes[i * cols + j]
            label = classify_phase(c, bundle.weights, thresholds)
            if isinstance(result, InfeasibleError):
                row.append(PhaseCell(a=a, gamma=gamma, phase=label, mci=None, error=str(result)))
            else:
                row.append(PhaseCell(a=a, gamma=gamma, phase=label, mci=mci(result.outputs),
                                     facilities=len(result.facilities)))
        cells.append(tuple(row))
    infeasible = sum(1 for row in cells for cell in row if cell.error)
    if infeasible:
        logger.warning(f"[WARN] {infeasible} grid cells have no feasible allocation")
    return PhaseDiagram(a_axis=tuple(a_axis), gamma_axis=tuple(gamma_axis), cells=tuple(cells),
                        fixed_tau=fixed_tau)


def phase_counts(diagram: PhaseDiagram) -> Dict[str, int]:
    labels = diagram.labels()
    return {label.value: int(np.sum(labels == label.value)) for label in PhaseLabel}
