"""Shared fixtures: bundled configuration documents and small hand-built worlds"""
import pytest

from topophase.capability import CapabilityVector, DecouplingThresholds, SurfaceMinimums, SurfaceThresholds
from topophase.config import load_config_file
from topophase.siteselect import WeightProfile
from topophase.world import EnvironmentReading, FactorCosts, Region, World

BASELINE = (0.40, 0.15, 0.05, 0.10, 0.20, 0.10)
NEUTRAL_ENV = EnvironmentReading(25.0, 0.0, 0.0, 2500.0, 20.0)


def make_region(region_id, factors=(1, 1, 1, 1, 1, 1), position=(0.0, 0.0), demand=0.0,
                habitable=True, energy_access=True, environment=NEUTRAL_ENV):
    return Region(
        id=region_id,
        name=region_id,
        position=tuple(float(v) for v in position),
        factors=FactorCosts(*(float(v) for v in factors)),
        environment=environment,
        habitable=habitable,
        energy_access=energy_access,
        demand=float(demand),
    )


def make_world(*regions, transport_rate=0.01):
    return World(regions=tuple(regions), transport_rate=transport_rate)


def diagonal(t):
    return CapabilityVector(t, t, t, t)


@pytest.fixture
def profile():
    return WeightProfile(baseline=BASELINE, w_phi=2.0)


@pytest.fixture
def food_thresholds():
    return SurfaceThresholds(
        sigma_w=SurfaceMinimums(0.85, 0.60, 0.99),
        sigma_n=SurfaceMinimums(0.75, 0.65, 0.99),
        sigma_h=DecouplingThresholds(0.90, 0.60, 0.70),
    )


@pytest.fixture
def ab_world():
    """Region A is market-proximal, region B is low-wage"""
    return make_world(make_region("A", (1, 2, 2, 2, 8, 2)), make_region("B", (8, 2, 2, 2, 1, 2)))


@pytest.fixture(scope="session")
def two_metro():
    return load_config_file("two-metro")


@pytest.fixture(scope="session")
def mca_demo():
    return load_config_file("mca-demo")


@pytest.fixture(scope="session")
def desert_frontier():
    return load_config_file("desert-frontier")
