"""
Allocation memo for sweeps - identical capability states along a path or grid
reuse the solved allocation instead of re-enumerating facility subsets
"""
import hashlib
import json
import logging
from typing import Dict, Optional, Union

from .capability import CapabilityVector
from .errors import InfeasibleError
from .topology import Allocation

logger = logging.getLogger(__name__)

CachedOutcome = Union[Allocation, InfeasibleError]


class AllocationCache:
    """Manages solved allocations for one model bundle, keyed by capability state and solver mode"""

    def __init__(self):
        self._entries: Dict[str, CachedOutcome] = {}
        self._hits = 0
        self._misses = 0

    @staticmethod
    def _hash_key(c: CapabilityVector, mode: str) -> str:
        """Generate hash of the capability state and solver mode"""
        payload = json.dumps({"c": [repr(v) for v in c.as_tuple()], "mode": mode}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()

    def get(self, c: CapabilityVector, mode: str) -> Optional[CachedOutcome]:
        """
        Retrieve a cached outcome if available
        Args:
            c: capability state
            mode: solver mode label ("exact", "heuristic", ...)
        Returns:
            The cached Allocation or InfeasibleError, None on a miss
        """
        outcome = self._entries.get(self._hash_key(c, mode))
        if outcome is None:
            self._misses += 1
            return None
        self._hits += 1
        return outcome

    def put(self, c: CapabilityVector, mode: str, outcome: CachedOutcome) -> bool:
        """Cache an outcome; returns False when the key was already present"""
        key = self._hash_key(c, mode)
        if key in self._entries:
            return False
        self._entries[key] = outcome
        return True

    def get_cache_stats(self) -> Dict:
        """Get statistics about the cache"""
        lookups = self._hits + self._misses
        return {
            "entries": len(self._entries),
            "hits": self._hits,
            "misses": self._misses,
            "hit_rate": self._hits / lookups if lookups else 0.0,
            "efficiency": f"{(self._hits / max(lookups, 1)) * 100:.1f}% hit rate",
        }

    def clear_cache(self):
        self._entries.clear()
        self._hits = 0
        self._misses = 0
        logger.info("[CACHE] Allocation cache cleared")
