#!/usr/bin/env python3
"""
Verify the bundled configuration documents and industry presets load and solve.
Run this script after editing anything under topophase/presets/.
"""

import sys
from pathlib import Path

PRESET_DIR = Path(__file__).parent / "topophase" / "presets"

# current capability states as published for each industry
SHIPPED_CURRENT = {
    "electronics": (0.7, 0.3, 0.99, 0.4),
    "aerospace": (0.45, 0.15, 0.997, 0.35),
    "food": (0.4, 0.25, 0.97, 0.2),
}


def check_file_exists(filepath, description):
    """Check if a required file exists."""
    if Path(filepath).exists():
        print(f"[OK] {description}: {filepath}")
        return True
    print(f"[FAIL] {description} NOT FOUND: {filepath}")
    return False


def check_import(module_path, description):
    """Check if a module of the package can be imported."""
    try:
        __import__(module_path)
        print(f"[OK] {description}: {module_path}")
        return True
    except ImportError as e:
        print(f"[FAIL] {description} IMPORT FAILED: {module_path}")
        print(f"      Error: {e}")
        return False


def check_document(name):
    """Load one bundled document and run an allocation at the default industry state."""
    from topophase.config import load_config_file
    from topophase.errors import TopophaseError
    from topophase.topology import allocate

    try:
        bundle = load_config_file(name)
        current = bundle.industry().current
        allocation = allocate(bundle.world, current, bundle.cost_constants, bundle.product,
                              bundle.thresholds(), bundle.mca_model)
    except TopophaseError as e:
        print(f"[FAIL] {name}: {e}")
        return False
    print(f"[OK] {name}: {len(bundle.world.regions)} regions, "
          f"{len(allocation.facilities)} facilities at {bundle.default_industry} current state")
    return True


def check_presets():
    """Verify every industry preset matches the shipped table and carries a primary pathway."""
    from topophase.config import load_config_file

    bundle = load_config_file()
    ok = True
    names = {preset.name for preset in bundle.industries}
    for missing in sorted(set(SHIPPED_CURRENT) - names):
        print(f"[FAIL] {missing}: preset missing")
        ok = False
    for preset in bundle.industries:
        expected = SHIPPED_CURRENT.get(preset.name)
        if expected is not None and preset.current.as_tuple() != expected:
            print(f"[FAIL] {preset.name}: current {preset.current.as_tuple()} != {expected}")
            ok = False
            continue
        if "primary_pathway" not in preset.metadata:
            print(f"[WARN] {preset.name}: no primary_pathway in metadata")
            ok = False
        else:
            print(f"[OK] {preset.name}: current {preset.current.as_tuple()}, "
                  f"pathway {preset.metadata['primary_pathway']}")
    return ok


def main():
    print("=" * 80)
    print("PRESET VERIFICATION")
    print("=" * 80 + "\n")

    results = [
        check_file_exists(PRESET_DIR / "industries.json", "Industry presets"),
        check_import("topophase.cli", "Command-line module"),
    ]
    from topophase.config import bundled_names

    for name in bundled_names():
        results.append(check_document(name))
    results.append(check_presets())

    print("\n" + "=" * 80)
    if all(results):
        print(f"[OK] All {len(results)} checks passed")
        return 0
    print(f"[FAIL] {results.count(False)} of {len(results)} checks failed")
    return 1


if __name__ == "__main__":
    sys.exit(main())
