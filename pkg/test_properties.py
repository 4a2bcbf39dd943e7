"""
Seeded randomized property suites and the allocator-vs-enumeration oracle
"""
import dataclasses
import math

import numpy as np
import pytest

from topophase.capability import (CapabilityVector, crossed_sigma_h, fusion_factor, labor_cost, line_yield,
                                  switching_cost)
from topophase.errors import InfeasibleError
from topophase.mca import EnvResponseSpec, adaptation_factor, effective_reliability, env_response, feasible_set
from topophase.paths import CapabilityPath
from topophase.phase import PhaseLabel, classify_phase, mci
from topophase.siteselect import (WeightProfile, effective_weights, inversion_gap, pareto_set, select_site)
from topophase.topology import allocate, brute_force_allocate, mebs, random_world
from topophase.world import FACTOR_NAMES, distance

CASES = 1000
SEED = 20240607


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def _capability(rng):
    return CapabilityVector(*(float(v) for v in rng.random(4)))


def _raised(rng, c):
    """A state >= c in every component"""
    values = [min(1.0, v + float(rng.random()) * (1.0 - v)) for v in c.as_tuple()]
    return CapabilityVector(*values)


def _profile(rng):
    return WeightProfile(
        baseline=tuple(float(v) for v in rng.dirichlet(np.ones(len(FACTOR_NAMES)))),
        w_phi=float(rng.uniform(0.0, 3.0)),
        fusion_exponents=(float(rng.uniform(0.1, 2.0)), float(rng.uniform(0.1, 2.0))),
    )


def test_effective_weights_normalized(rng):
    for _ in range(CASES):
        w = effective_weights(_capability(rng), _profile(rng)).as_tuple()
        assert math.fsum(w) == pytest.approx(1.0, abs=1e-9)
        assert min(w) >= 0.0


def test_cost_components_monotone(rng, two_metro):
    k = two_metro.cost_constants
    for _ in range(CASES):
        low = _capability(rng)
        high = _raised(rng, low)
        assert fusion_factor(high.gamma, high.tau) >= fusion_factor(low.gamma, low.tau)
        assert switching_cost(high.gamma, k) <= switching_cost(low.gamma, k)
        assert labor_cost(high, k) <= labor_cost(low, k) + 1e-9
        n = int(rng.integers(1, 200))
        assert line_yield(high.rho, n) >= line_yield(low.rho, n)
        assert line_yield(low.rho, n + 1) <= line_yield(low.rho, n)


def test_line_yield_is_multiplicative(rng):
    for _ in range(CASES):
        rho = float(rng.uniform(0.5, 1.0))
        a, b = (int(v) for v in rng.integers(1, 100, 2))
        assert line_yield(rho, a + b) == pytest.approx(line_yield(rho, a) * line_yield(rho, b), rel=1e-12)


def test_crossed_sigma_h_is_monotone(rng, food_thresholds):
    for _ in range(CASES):
        low = _capability(rng)
        high = _raised(rng, low)
        if crossed_sigma_h(low, food_thresholds):
            assert crossed_sigma_h(high, food_thresholds)


def test_env_response_range_and_one_sided_monotonicity(rng):
    for _ in range(CASES):
        spec = EnvResponseSpec("humidity", optimum=float(rng.uniform(0, 100)), scale=float(rng.uniform(1, 50)),
                               sensitivity=float(rng.uniform(0, 3)))
        assert env_response(spec.optimum, spec) == 1.0
        near, far = sorted(float(v) for v in rng.uniform(spec.optimum, 100.0, 2))
        r_near, r_far = env_response(near, spec), env_response(far, spec)
        assert 0.0 < r_far <= r_near <= 1.0
        below = float(rng.uniform(0.0, spec.optimum))
        assert env_response(below, spec) == 1.0


def test_adaptation_never_helps(rng, two_metro):
    m = two_metro.mca_model
    regions = random_world(rng, CASES).regions
    for region in regions:
        phi = adaptation_factor(region, m)
        assert 1e-5 < phi <= 1.0
        rho = float(rng.random())
        assert effective_reliability(rho, region, m) <= rho


def test_mci_bounds_and_permutation_invariance(rng):
    for _ in range(CASES):
        n = int(rng.integers(1, 12))
        outputs = rng.random(n) * 1000.0
        outputs[int(rng.integers(n))] += 1.0
        value = mci(outputs)
        assert 1.0 / n - 1e-12 <= value <= 1.0 + 1e-12
        assert mci(rng.permutation(outputs)) == pytest.approx(value, rel=1e-12)


def test_mebs_is_nonincreasing(rng, two_metro):
    k, prod = two_metro.cost_constants, two_metro.product
    for _ in range(CASES):
        low = _capability(rng)
        high = _raised(rng, low)
        assert mebs(high, k, prod) <= mebs(low, k, prod) + 1e-9


def test_allocation_invariants(rng, two_metro):
    k, prod, t = two_metro.cost_constants, two_metro.product, two_metro.thresholds()
    solved = 0
    for _ in range(CASES):
        world = random_world(rng, int(rng.integers(1, 7)))
        c = _capability(rng)
        try:
            allocation = allocate(world, c, k, prod, t)
        except InfeasibleError:
            continue
        solved += 1
        feasible = feasible_set(world, c, t)
        for region_id, volume in allocation.facilities:
            assert region_id in feasible
            assert volume >= allocation.mebs_floor[region_id]
        facilities = set(allocation.facility_ids)
        for region in world.regions:
            if region.demand > 0:
                assert allocation.assignment[region.id] in facilities
        assert allocation.total_output == pytest.approx(world.total_demand)
        assert set(allocation.outputs) == set(world.ids)
    assert solved > CASES // 4


def test_argmin_scale_invariance(rng):
    for _ in range(CASES):
        world = random_world(rng, int(rng.integers(2, 8)))
        lam = float(rng.uniform(0.01, 100.0))
        scaled = dataclasses.replace(world, regions=tuple(
            dataclasses.replace(r, factors=r.factors.scaled(lam)) for r in world.regions))
        c, p = _capability(rng), _profile(rng)
        before = [s.region_id for s in select_site(world, c, p)]
        after = [s.region_id for s in select_site(scaled, c, p)]
        assert before == after


def test_winner_is_pareto_optimal(rng):
    for _ in range(CASES):
        world = random_world(rng, int(rng.integers(1, 8)))
        winner = select_site(world, _capability(rng), _profile(rng))[0].region_id
        assert winner in pareto_set(world, FACTOR_NAMES)


def test_distance_is_a_metric(rng):
    regions = random_world(rng, 300).regions
    for _ in range(CASES):
        a, b, c = (regions[int(i)] for i in rng.integers(0, len(regions), 3))
        assert distance(a, b) >= 0.0
        assert distance(a, b) == distance(b, a)
        assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9


def test_inversion_gap_and_phase_monotone_along_paths(rng, food_thresholds):
    default = WeightProfile(baseline=(0.40, 0.15, 0.05, 0.10, 0.20, 0.10))
    order = [PhaseLabel.PHASE_I, PhaseLabel.PHASE_II, PhaseLabel.PHASE_III]
    for _ in range(CASES // 10):
        start = _capability(rng)
        path = CapabilityPath(start, _raised(rng, start))
        ts = np.linspace(0.0, 1.0, 21)
        gaps = [inversion_gap(path(float(t)), default) for t in ts]
        assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
        labels = [order.index(classify_phase(path(float(t)), default, food_thresholds)) for t in ts]
        assert labels == sorted(labels)


def test_oracle_equivalence(two_metro):
    rng = np.random.default_rng(7)
    k, prod, t = two_metro.cost_constants, two_metro.product, two_metro.thresholds()
    c = CapabilityVector(1.0, 1.0, 1.0, 1.0)
    compared = identical = 0
    for _ in range(100):
        world = random_world(rng, int(rng.integers(1, 9)))
        try:
            oracle = brute_force_allocate(world, c, k, prod, t)
        except InfeasibleError:
            with pytest.raises(InfeasibleError):
                allocate(world, c, k, prod, t)
            continue
        for exact_limit in (12, 0):
            solved = allocate(world, c, k, prod, t, exact_limit=exact_limit)
            assert oracle.total_cost <= solved.total_cost * (1 + 1e-9)
            assert solved.total_cost <= oracle.total_cost * 1.02
            if exact_limit:
                assert solved.facility_ids == oracle.facility_ids
            else:
                compared += 1
                identical += solved.total_cost == pytest.approx(oracle.total_cost, rel=1e-9)
    assert identical >= 0.95 * compared
