"""
Command-line surface - loads the configuration document, dispatches to the engine and
writes CSV artifacts to stdout (or --out) with human-readable summaries on stderr
"""
import argparse
import io
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from . import display_utils
from .capability import CapabilityVector, line_yield, meets_surface_minimums, threshold_gaps
from .config import DEFAULT_CONFIG, ModelBundle, apply_overrides, bundle_from_document, read_document
from .errors import (EXIT_CONFIG, EXIT_OK, EXIT_USAGE, ConfigError, DomainError, InfeasibleError,
                     TopophaseError, exit_code_for)
from .mca import feasible_set, mca_rank
from .paths import parse_path
from .phase import CriticalKind, find_critical_point, mci, phase_counts, sweep_1d, sweep_2d
from .siteselect import select_site
from .topology import (allocate, brute_force_allocate, cost_breakdown, mebs, random_world, regime,
                       resolve_n_star)
from .world import ENVIRONMENT_NAMES

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6f"


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with the usage status"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def write_csv(frame: pd.DataFrame, out: Optional[str] = None):
    """Write a table with a header row, fixed 6-decimal floats and \\n line endings"""
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if out:
        Path(out).write_text(buffer.getvalue(), encoding="utf-8")
        logger.info(f"[OK] Wrote {len(frame)} rows to {out}")
    else:
        sys.stdout.write(buffer.getvalue())


def _capability(text: str) -> CapabilityVector:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise DomainError(f"cannot read capability vector from {text!r}")
    return CapabilityVector.from_sequence(values)


def load_bundle(args) -> ModelBundle:
    document = read_document(args.config)
    if args.overrides:
        document = apply_overrides(document, args.overrides)
    return bundle_from_document(document)


def _state(args, bundle: ModelBundle) -> CapabilityVector:
    if getattr(args, "c", None):
        return _capability(args.c)
    return bundle.industry(args.preset).current


def cmd_yield(args) -> int:
    value = line_yield(args.rho, args.n)
    write_csv(pd.DataFrame([(float(args.rho), args.n, value)], columns=["rho", "n", "yield"]), args.out)
    return EXIT_OK


def cmd_mebs(args) -> int:
    bundle = load_bundle(args)
    c = _state(args, bundle)
    terms = cost_breakdown(c, bundle.cost_constants, bundle.product)
    value = mebs(c, bundle.cost_constants, bundle.product)
    n_star = resolve_n_star(bundle.world, bundle.product)
    verdict = regime(value, n_star)
    display_utils.display_mebs(terms, value, n_star, verdict)
    row = {"mebs": value, "n_star": n_star, "regime": verdict.regime.value, "boundary": verdict.boundary}
    row.update({name: terms[name] for name in ("facility_fixed", "equipment_fixed", "switching", "labor")})
    write_csv(pd.DataFrame([row]), args.out)
    return EXIT_OK


def cmd_select_site(args) -> int:
    bundle = load_bundle(args)
    c = _state(args, bundle)
    candidates = feasible_set(bundle.world, c, bundle.thresholds(args.preset)) if args.feasible_only else None
    if candidates is not None and not candidates:
        raise InfeasibleError("no feasible location for this capability state", constraint="feasible_set")
    ranking = select_site(bundle.world, c, bundle.weights, mode=args.mode, mca_model=bundle.mca_model,
                          candidates=candidates)
    frame = pd.DataFrame(
        [(s.region_id, s.rank, s.score, np.nan if s.phi is None else s.phi) for s in ranking],
        columns=["region_id", "rank", "score", "phi"],
    )
    display_utils.display_summary("Site selection", {"mode": args.mode, "x*": ranking[0].region_id,
                                                      "score": ranking[0].score})
    write_csv(frame, args.out)
    return EXIT_OK


def cmd_mca_rank(args) -> int:
    bundle = load_bundle(args)
    ranking = mca_rank(bundle.world, bundle.mca_model)
    frame = pd.DataFrame(
        [[r.region_id, r.rank, r.phi] + [r.responses[name] for name in ENVIRONMENT_NAMES] for r in ranking],
        columns=["region_id", "rank", "phi"] + list(ENVIRONMENT_NAMES),
    )
    write_csv(frame, args.out)
    return EXIT_OK


def cmd_allocate(args) -> int:
    bundle = load_bundle(args)
    c = _state(args, bundle)
    solver = bundle.solver
    thresholds = bundle.thresholds(args.preset)
    if args.exact:
        allocation = brute_force_allocate(bundle.world, c, bundle.cost_constants, bundle.product, thresholds,
                                          bundle.mca_model, use_effective_reliability=solver.use_effective_reliability,
                                          limit=solver.brute_force_limit)
    else:
        allocation = allocate(bundle.world, c, bundle.cost_constants, bundle.product, thresholds, bundle.mca_model,
                              use_effective_reliability=solver.use_effective_reliability,
                              exact_limit=solver.exact_limit)
    display_utils.display_allocation(allocation, mci(allocation.outputs))
    write_csv(allocation.to_frame(), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    bundle = load_bundle(args)
    path = parse_path(args.path, bundle.industries)
    result = sweep_1d(path, args.steps, bundle, industry=args.preset, exact=args.exact, workers=args.workers)
    rows = {"path": path.describe()}
    rows.update({f"{i}. {p.kind.value} t*": p.t for i, p in enumerate(result.critical_points, 1)}
                or {"critical points": "none"})
    display_utils.display_summary("Capability sweep", rows)
    if args.critical_out:
        write_csv(result.critical_frame(), args.critical_out)
    write_csv(result.to_frame(), args.out)
    return EXIT_OK


def cmd_phase_diagram(args) -> int:
    bundle = load_bundle(args)
    diagram = sweep_2d(bundle, args.tau, (args.rows, args.cols), industry=args.preset, exact=args.exact,
                       workers=args.workers)
    display_utils.display_summary("Phase diagram", phase_counts(diagram))
    write_csv(diagram.to_frame(), args.out)
    return EXIT_OK


def cmd_presets(args) -> int:
    bundle = load_bundle(args)
    display_utils.display_presets(bundle.industries, bundle.default_industry)
    rows = []
    for preset in bundle.industries:
        t = preset.thresholds
        row = {"name": preset.name, "default": preset.name == bundle.default_industry}
        row.update(preset.current.as_dict())
        row.update({f"sigma_w_{k}": v for k, v in vars(t.sigma_w).items()})
        row.update({f"sigma_n_{k}": v for k, v in vars(t.sigma_n).items()})
        row.update(vars(t.sigma_h))
        row["meets_sigma_w"] = meets_surface_minimums(preset.current, t.sigma_w)
        row["meets_sigma_n"] = meets_surface_minimums(preset.current, t.sigma_n)
        gaps = threshold_gaps(preset.current, t)
        row["primary_pathway"] = preset.metadata.get("primary_pathway", "")
        row["binding_sigma_w"] = gaps["sigma_w"]["binding"]
        row["binding_sigma_n"] = gaps["sigma_n"]["binding"]
        row["binding_sigma_h"] = gaps["sigma_h"]["binding"]
        rows.append(row)
    write_csv(pd.DataFrame(rows), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    columns = ["region_id", "field", "reason"]
    try:
        load_bundle(args)
    except ConfigError as e:
        if not e.issues:
            raise
        write_csv(pd.DataFrame([(i.region_id, i.field, i.reason) for i in e.issues], columns=columns), args.out)
        return EXIT_CONFIG
    write_csv(pd.DataFrame([], columns=columns), args.out)
    return EXIT_OK


def cmd_critical(args) -> int:
    bundle = load_bundle(args)
    path = parse_path(args.path, bundle.industries)
    t_star = find_critical_point(path, args.detector, bundle, tol=args.tol, industry=args.preset, exact=args.exact)
    if t_star is None:
        logger.warning(f"[WARN] No {args.detector} crossing on {args.path}")
    write_csv(pd.DataFrame([(args.detector, np.nan if t_star is None else t_star)], columns=["detector", "t"]),
              args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    """Seeded comparison of the allocator against brute-force enumeration on random worlds"""
    bundle = load_bundle(args)
    rng = np.random.default_rng(args.seed)
    c = _state(args, bundle)
    thresholds = bundle.thresholds(args.preset)
    exact_limit = 0 if args.heuristic else bundle.solver.exact_limit
    rows = []
    for case in range(args.cases):
        world = random_world(rng, int(rng.integers(1, args.max_regions + 1)))
        try:
            oracle = brute_force_allocate(world, c, bundle.cost_constants, bundle.product, thresholds)
            solved = allocate(world, c, bundle.cost_constants, bundle.product, thresholds, exact_limit=exact_limit)
        except InfeasibleError:
            rows.append((case, len(world.regions), np.nan, np.nan, True, 0.0))
            continue
        gap = (solved.total_cost - oracle.total_cost) / max(1.0, abs(oracle.total_cost))
        rows.append((case, len(world.regions), solved.total_cost, oracle.total_cost,
                     solved.facility_ids == oracle.facility_ids, gap))
    frame = pd.DataFrame(rows, columns=["case", "regions", "allocate_cost", "oracle_cost", "identical", "rel_gap"])
    display_utils.display_oracle({
        "cases": len(frame),
        "identical": int(frame["identical"].sum()),
        "max_rel_gap": float(frame["rel_gap"].max()) if len(frame) else 0.0,
    })
    write_csv(frame, args.out)
    return EXIT_OK


COMMANDS: Dict[str, Callable] = {
    "yield": cmd_yield,
    "mebs": cmd_mebs,
    "select-site": cmd_select_site,
    "mca-rank": cmd_mca_rank,
    "allocate": cmd_allocate,
    "sweep": cmd_sweep,
    "phase-diagram": cmd_phase_diagram,
    "presets": cmd_presets,
    "validate": cmd_validate,
    "critical": cmd_critical,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", default=DEFAULT_CONFIG,
                        help=f"configuration file or bundled document name (default: {DEFAULT_CONFIG})")
    common.add_argument("--preset", default=None, help="industry preset (default: the document's default)")
    common.add_argument("--out", default=None, help="write CSV here instead of standard output")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a configuration field by dotted key (repeatable)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized harnesses")
    common.add_argument("--workers", type=int, default=None, help="process pool size for sweeps")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    parser = _Parser(prog="topophase", description="Capability-driven manufacturing topology engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("yield", parents=[common], help="line yield rho^n")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--n", type=int, default=50)

    p = sub.add_parser("mebs", parents=[common], help="minimum economic batch size and regime")
    p.add_argument("--c", default=None, metavar="D,G,R,T", help="capability vector (default: preset current)")

    p = sub.add_parser("select-site", parents=[common], help="rank regions by site objective")
    p.add_argument("--c", default=None, metavar="D,G,R,T")
    p.add_argument("--mode", choices=["classic", "mca"], default="classic")
    p.add_argument("--feasible-only", action="store_true", help="rank only the feasible locations")

    sub.add_parser("mca-rank", parents=[common], help="rank regions by environmental adaptation factor")

    p = sub.add_parser("allocate", parents=[common], help="facility-location allocation")
    p.add_argument("--c", default=None, metavar="D,G,R,T")
    p.add_argument("--exact", action="store_true", help="use brute-force enumeration")

    p = sub.add_parser("sweep", parents=[common], help="1-D capability sweep")
    p.add_argument("--path", default="diagonal")
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--critical-out", default=None, help="also write the critical points as CSV here")

    p = sub.add_parser("phase-diagram", parents=[common], help="2-D phase diagram over (delta*rho, gamma)")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--rows", type=int, default=50)
    p.add_argument("--cols", type=int, default=50)
    p.add_argument("--exact", action="store_true")

    sub.add_parser("presets", parents=[common], help="list industry presets")
    sub.add_parser("validate", parents=[common], help="validate the configuration document")

    p = sub.add_parser("critical", parents=[common], help="locate one critical point along a path")
    p.add_argument("--path", default="diagonal")
    p.add_argument("--detector", choices=[k.value for k in CriticalKind], default=CriticalKind.SIGMA_W.value)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--exact", action="store_true")

    p = sub.add_parser("oracle", parents=[common], help="allocator vs brute-force oracle on random worlds")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--max-regions", type=int, default=8)
    p.add_argument("--c", default=None, metavar="D,G,R,T")
    p.add_argument("--heuristic", action="store_true", help="force the local-search solver")
    return parser


def _configure_logging(verbosity: int):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except TopophaseError as e:
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
