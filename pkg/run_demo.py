from topophase.config import load_config_file
from topophase.paths import DIAGONAL
from topophase.phase import phase_counts, sweep_1d, sweep_2d
from topophase.topology import allocate, mebs, regime, resolve_n_star


def main():
    bundle = load_config_file('two-metro')
    print(f"Loaded two-metro: {len(bundle.world.regions)} regions, default industry {bundle.default_industry}")

    n_star = resolve_n_star(bundle.world, bundle.product)
    for preset in bundle.industries:
        value = mebs(preset.current, bundle.cost_constants, bundle.product)
        verdict = regime(value, n_star)
        print(f"  {preset.name:<12} MEBS {value:>12.6f}  N* {n_star:.6f}  -> {verdict.regime.value}")

    print('\nAllocation at the default industry state...')
    current = bundle.industry().current
    allocation = allocate(bundle.world, current, bundle.cost_constants, bundle.product, bundle.thresholds(),
                          bundle.mca_model)
    for region_id, volume in allocation.facilities:
        print(f"  {region_id}: {volume:.6f} units")

    print('\nSweeping the diagonal path (exact allocation)...')
    result = sweep_1d(DIAGONAL, 101, bundle, exact=True)
    for point in result.critical_points:
        print(f"  {point.kind.value:<8} t* = {point.t:.6f}")

    print('\nPhase diagram at tau = 1 (25 x 25)...')
    diagram = sweep_2d(bundle, 1.0, (25, 25))
    print(f"  {phase_counts(diagram)}")


if __name__ == '__main__':
    main()
