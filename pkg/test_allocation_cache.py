"""
Tests for the allocation memo used by sweeps
"""
import pickle

from conftest import diagonal
from topophase.allocation_cache import AllocationCache
from topophase.errors import InfeasibleError
from topophase.topology import allocate


def test_miss_then_hit(two_metro):
    cache = AllocationCache()
    c = diagonal(0.5)
    assert cache.get(c, "exact") is None

    allocation = allocate(two_metro.world, c, two_metro.cost_constants, two_metro.product, two_metro.thresholds())
    assert cache.put(c, "exact", allocation) is True
    assert cache.put(c, "exact", allocation) is False
    assert cache.get(c, "exact") is allocation

    stats = cache.get_cache_stats()
    assert (stats["entries"], stats["hits"], stats["misses"]) == (1, 1, 1)
    assert stats["hit_rate"] == 0.5
    assert stats["efficiency"] == "50.0% hit rate"


def test_mode_is_part_of_the_key():
    cache = AllocationCache()
    error = InfeasibleError("floor exceeds demand", constraint="mebs_floor")
    cache.put(diagonal(0.2), "exact", error)
    assert cache.get(diagonal(0.2), "heuristic") is None
    assert cache.get(diagonal(0.2), "exact") is error
    assert cache.get(diagonal(0.2 + 1e-12), "exact") is None


def test_clear_cache_resets_stats():
    cache = AllocationCache()
    cache.put(diagonal(0.1), "exact", InfeasibleError("x"))
    cache.get(diagonal(0.1), "exact")
    cache.clear_cache()
    assert cache.get_cache_stats() == {"entries": 0, "hits": 0, "misses": 0, "hit_rate": 0.0,
                                       "efficiency": "0.0% hit rate"}


def test_infeasible_error_survives_pickling():
    error = InfeasibleError("no candidate", constraint="feasible_set").at(0.25)
    copy = pickle.loads(pickle.dumps(error))
    assert (copy.constraint, copy.t, str(copy)) == ("feasible_set", 0.25, str(error))
