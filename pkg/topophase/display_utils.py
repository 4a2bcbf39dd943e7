import sys
from typing import Dict, Iterable, Mapping, Optional, TextIO

from .capability import IndustryPreset
from .topology import Allocation, RegimeVerdict


def _banner(title: str, stream: TextIO):
    print("\n" + "=" * 80, file=stream)
    print(title, file=stream)
    print("=" * 80 + "\n", file=stream)


def display_presets(industries: Iterable[IndustryPreset], default: str, stream: Optional[TextIO] = None):
    stream = stream or sys.stderr
    _banner("INDUSTRY PRESETS", stream)
    for idx, preset in enumerate(industries, 1):
        marker = " (default)" if preset.name == default else ""
        c = ", ".join(f"{v:.6f}" for v in preset.current.as_tuple())
        pathway = preset.metadata.get("primary_pathway", "-")
        print(f"{idx}. {preset.name}{marker}\n   Current: ({c})\n   Pathway: {pathway}\n", file=stream)


def display_mebs(terms: Mapping[str, float], value: float, n_star: float, verdict: RegimeVerdict,
                 stream: Optional[TextIO] = None):
    stream = stream or sys.stderr
    _banner("MINIMUM ECONOMIC BATCH SIZE", stream)
    for name in ("facility_fixed", "equipment_fixed", "switching", "labor"):
        print(f"   {name:<16} {terms[name]:>16.6f}", file=stream)
    print(f"   {'MEBS':<16} {value:>16.6f}", file=stream)
    print(f"   {'N*':<16} {n_star:>16.6f}", file=stream)
    boundary = " (boundary)" if verdict.boundary else ""
    print(f"   Regime: {verdict.regime.value}{boundary}\n", file=stream)


def display_allocation(allocation: Allocation, concentration: float, stream: Optional[TextIO] = None):
    stream = stream or sys.stderr
    _banner("FACILITY ALLOCATION", stream)
    for idx, (region_id, volume) in enumerate(allocation.facilities, 1):
        print(f"{idx}. {region_id}\n   Volume: {volume:.6f}", file=stream)
    print(f"\n   Total cost: {allocation.total_cost:.6f}", file=stream)
    print(f"   Fixed / variable / logistics: {allocation.fixed_cost:.6f} / "
          f"{allocation.variable_cost:.6f} / {allocation.logistics_cost:.6f}", file=stream)
    print(f"   Facilities: {len(allocation.facilities)}   MCI: {concentration:.6f}\n", file=stream)


def display_summary(title: str, rows: Mapping[str, object], stream: Optional[TextIO] = None):
    stream = stream or sys.stderr
    _banner(title.upper(), stream)
    for key, value in rows.items():
        text = f"{value:.6f}" if isinstance(value, float) else str(value)
        print(f"   {key}: {text}", file=stream)
    print("", file=stream)


def display_oracle(stats: Dict[str, float], stream: Optional[TextIO] = None):
    display_summary("Allocator vs brute-force oracle", stats, stream)
