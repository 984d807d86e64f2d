"""
Main entry point for the coarse cohomology toolkit.

This script provides command-line functionality for generating example
spaces, building Rips complexes and complement towers, computing coarse
cohomology and running the audit drivers. Every command writes a JSON result
(and TSV tables where they make sense) into the output directory.
"""

import sys
import json
import argparse
import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from dotenv import load_dotenv
from pydantic import ValidationError

# Load environment variables
load_dotenv()

# Configure logging
logging.basicConfig(
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    level=logging.INFO
)
logger = logging.getLogger(__name__)

# Import modules
from app.cochains import cochain_from_json, full_complex_cohomology, random_cochain
from app.config import RINGS, RunConfig, get_default_params
from app.control import ControlFunction, ControlFunctions
from app.engine import (
    CoarseParams,
    SampleSpec,
    check_acyclicity_at_infinity,
    coarse_cohomology,
    coarse_cohomology_of_complement,
    consistency_check_dA,
)
from app.errors import CoarseError
from app.fillings.maps import FarSubcomplexSpec, far_domain, filling_map_M
from app.fillings.homotopy import verify_homotopy_suite
from app.fillings.operator_t import operator_T, prepare_operator_T
from app.reports import write_result, write_tsv
from app.simplicial import cohomology, export_complex, rips_complex
from app.spaces.generators import default_scale, generate_circle_pack, generate_grid
from app.spaces.loaders import load_space
from app.spaces.metric import FiniteMetricSpace, SubsetSelection, neighborhood
from app.towers import (
    build_complement_tower,
    colimit_analysis,
    default_r_grid,
    tower_rows,
    tower_to_dict,
)

TOWER_COLUMNS = ["r", "degree", "betti", "persistent_rank"]
SEEDED_COMMANDS = ("check-acyclic", "verify-homotopy")


class UsageError(Exception):
    """Bad flag combination detected after parsing."""


def _add_space_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("space")
    group.add_argument("--space", choices=["grid", "circle-pack"], help="Generated example space")
    group.add_argument("--input", type=str, help="CSV/JSON distance matrix or JSON point cloud")
    group.add_argument("--dim", type=int, default=1, help="Grid dimension (1-3)")
    group.add_argument("--half-extent", type=float, default=12.0, help="Grid half extent L")
    group.add_argument("--spacing", type=float, default=1.0, help="Grid spacing")
    group.add_argument("--circles", type=int, default=5, help="Number of circles in the pack")
    group.add_argument("--points-per-circle", type=int, default=24, help="Samples per circle")
    group.add_argument("--strict", action="store_true", help="Reject triangle-inequality violations")


def _add_tower_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scale", type=float, help="Rips scale (default 1.5 x sample spacing)")
    parser.add_argument("--r-grid", type=str, help="Comma-separated increasing radii")
    parser.add_argument("--max-dim", type=int, default=3, help="Highest cohomology degree")
    parser.add_argument("--window", type=int, default=2, help="Persistent-rank window")
    parser.add_argument("--stability", type=int, default=3, help="Stages that must agree")


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    defaults = get_default_params()
    parser = argparse.ArgumentParser(description="Coarse cohomology of finite metric samples")
    parser.add_argument("--output-dir", type=str, default=defaults["output_dir"], help="Result directory")
    parser.add_argument("--threads", type=int, default=defaults["threads"], help="Worker cap")
    parser.add_argument("--ring", type=str, default="gf2", choices=list(RINGS), help="Coefficient ring")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="Warnings only")

    # Add subparsers for different commands
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    gen_parser = subparsers.add_parser("gen", help="Emit an example space as JSON")
    _add_space_args(gen_parser)

    rips_parser = subparsers.add_parser("rips", help="Build the Rips complex of a space")
    _add_space_args(rips_parser)
    rips_parser.add_argument("--scale", type=float, help="Rips scale")
    rips_parser.add_argument("--max-dim", type=int, default=2, help="Highest simplex dimension")

    betti_parser = subparsers.add_parser("betti", help="Cohomology of the Rips complex")
    _add_space_args(betti_parser)
    betti_parser.add_argument("--scale", type=float, help="Rips scale")
    betti_parser.add_argument("--max-dim", type=int, default=2, help="Highest degree")
    betti_parser.add_argument("--reduced", action="store_true", help="Reduced cohomology")

    tower_parser = subparsers.add_parser("tower", help="Complement tower about a subset")
    _add_space_args(tower_parser)
    _add_tower_args(tower_parser)
    tower_parser.add_argument("--subset", type=str, help="Group name or comma-separated IDs (default basepoint)")

    coarse_parser = subparsers.add_parser("coarse", help="Coarse cohomology Hx(X)")
    _add_space_args(coarse_parser)
    _add_tower_args(coarse_parser)
    coarse_parser.add_argument("--bounded", action="store_true", help="Treat the space as bounded")

    complement_parser = subparsers.add_parser("complement", help="Coarse cohomology of X - A")
    _add_space_args(complement_parser)
    _add_tower_args(complement_parser)
    complement_parser.add_argument("--subset", type=str, required=True, help="The removed subset A")

    da_parser = subparsers.add_parser("check-dA", help="Compare towers over (X, d) and (X/A, d_A)")
    _add_space_args(da_parser)
    _add_tower_args(da_parser)
    da_parser.add_argument("--subset", type=str, required=True, help="The collapsed subset A")

    acyclic_parser = subparsers.add_parser("check-acyclic", help="Sampled acyclicity at infinity")
    _add_space_args(acyclic_parser)
    acyclic_parser.add_argument("--scale", type=float, help="Rips scale")
    acyclic_parser.add_argument("--max-dim", type=int, default=2, help="Degrees below this are checked")
    acyclic_parser.add_argument("--mu", type=str, default="0", help="Control mu (3, affine:a,b, quad:a,b,c, table:...)")
    acyclic_parser.add_argument("--rho", type=str, default="affine:1,2", help="Control rho")
    acyclic_parser.add_argument("--radii", type=str, help="Comma-separated ball radii")
    acyclic_parser.add_argument("--centers-per-radius", type=int, default=8, help="Sampled centers per radius")
    acyclic_parser.add_argument("--centers", type=str, help="Explicit centers (group name or IDs)")
    acyclic_parser.add_argument("--mode", choices=["infinity", "away"], default="infinity", help="Check variant")
    acyclic_parser.add_argument("--subset", type=str, help="Base subset A for --mode away")
    acyclic_parser.add_argument("--seed", type=int, help="Random seed")

    fill_parser = subparsers.add_parser("fill", help="Filling map M audit, or the operator T audit")
    _add_space_args(fill_parser)
    fill_parser.add_argument("--scale", type=float, help="Rips scale")
    fill_parser.add_argument("--max-dim", type=int, default=2, help="Highest filled dimension")
    fill_parser.add_argument("--mu", type=str, default="0", help="Control mu of the far subcomplex")
    fill_parser.add_argument("--domain-diameter", type=float, help="Rips scale of the audited far tuples")
    fill_parser.add_argument("--cap", type=float, help="Neighbourhood cap for fillings")
    fill_parser.add_argument("--cochain", type=str, help="Cochain JSON for the operator T audit")
    fill_parser.add_argument("--random", type=int, default=0, help="Number of seeded random cochains for T")
    fill_parser.add_argument("--degree", type=int, default=1, help="Degree of the random cochains")
    fill_parser.add_argument("--seed", type=int, help="Random seed (required with --random)")

    homotopy_parser = subparsers.add_parser("verify-homotopy", help="Chain homotopy identity suite")
    _add_space_args(homotopy_parser)
    homotopy_parser.add_argument("--count", type=int, default=100, help="Random chain maps")
    homotopy_parser.add_argument("--max-degree", type=int, default=3, help="Highest checked degree")
    homotopy_parser.add_argument("--displacement", type=float, help="Vertex map displacement")
    homotopy_parser.add_argument("--seed", type=int, help="Random seed")

    full_parser = subparsers.add_parser("full-cochain", help="Cohomology of the full tuple complex")
    _add_space_args(full_parser)
    full_parser.add_argument("--max-degree", type=int, default=3, help="Highest degree (at most 3)")

    return parser.parse_args(argv)


def _floats(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    return [float(x) for x in text.split(",") if x.strip()]


def load_space_from_args(args: argparse.Namespace) -> FiniteMetricSpace:
    """The generated example or the --input file."""
    if args.input and args.space:
        raise UsageError("Use either --space or --input, not both")
    if args.input:
        return load_space(args.input, strict=args.strict)
    if args.space == "grid":
        return generate_grid(args.dim, args.half_extent, args.spacing)
    if args.space == "circle-pack":
        return generate_circle_pack(args.circles, args.points_per_circle)
    raise UsageError("A space is required: --space grid|circle-pack or --input FILE")


def resolve_subset(X: FiniteMetricSpace, text: Optional[str]) -> SubsetSelection:
    """A named group, comma-separated point IDs, or the basepoint when omitted."""
    if text is None or text == "base":
        return X.base_selection()
    if text in X.groups:
        return X.group(text)
    try:
        ids = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"Unknown subset {text!r}; groups: {sorted(X.groups)}") from None
    return X.select(ids)


def _coarse_params(args: argparse.Namespace, scale: float) -> CoarseParams:
    return CoarseParams(scale=scale, r_grid=_floats(args.r_grid), max_degree=args.max_dim,
                        ring=args.ring, window=args.window, stability=args.stability,
                        threads=args.threads, bounded=True if getattr(args, "bounded", False) else None)


def _field_ring(args: argparse.Namespace) -> str:
    if args.ring == "z":
        raise UsageError(f"{args.command} works over a field: use --ring gf2 or --ring q")
    return args.ring


def run_command(args: argparse.Namespace, X: FiniteMetricSpace,
                config: RunConfig) -> Tuple[Dict[str, Any], Dict[str, List[Dict[str, Any]]]]:
    """Run one subcommand.

    Returns:
        (result payload, TSV tables by file stem)
    """
    scale = config.scale
    tables: Dict[str, List[Dict[str, Any]]] = {}

    if args.command == "gen":
        return X.to_dict(), tables

    elif args.command == "rips":
        K = rips_complex(X, scale, args.max_dim)
        return {"scale": scale, "counts": K.counts(), "complex": export_complex(K)}, tables

    elif args.command == "betti":
        K = rips_complex(X, scale, args.max_dim + 1)
        groups = cohomology(K, args.ring, args.max_dim, reduced=args.reduced)
        for g in groups:
            logger.info(f"H^{g.degree} = {g}")
        return {"scale": scale, "counts": K.counts(), "reduced": args.reduced,
                "groups": [g.to_dict() for g in groups]}, tables

    elif args.command == "tower":
        base = resolve_subset(X, args.subset)
        r_grid = config.r_grid or default_r_grid(X, scale)
        tower = build_complement_tower(X, base, r_grid, scale, args.max_dim, args.ring, args.threads)
        payload = tower_to_dict(tower)
        if len(tower.trusted_indices()) >= args.window + args.stability:
            payload["colimit"] = [r.to_dict() for r in colimit_analysis(tower, args.window, args.stability)]
        else:
            logger.warning("Too few trusted stages for a colimit verdict")
            payload["colimit"] = []
        tables["tower"] = tower_rows(tower)
        return payload, tables

    elif args.command == "coarse":
        profile = coarse_cohomology(X, _coarse_params(args, scale))
        if profile.tower is not None:
            tables["tower"] = tower_rows(profile.tower)
        return profile.to_dict(), tables

    elif args.command == "complement":
        A = resolve_subset(X, args.subset)
        profile = coarse_cohomology_of_complement(X, A, _coarse_params(args, scale))
        if profile.tower is not None:
            tables["tower"] = tower_rows(profile.tower)
        return profile.to_dict(), tables

    elif args.command == "check-dA":
        A = resolve_subset(X, args.subset)
        report = consistency_check_dA(X, A, _coarse_params(args, scale))
        tables["tower_d"] = report.rows_d
        tables["tower_dA"] = report.rows_dA
        return report.to_dict(), tables

    elif args.command == "check-acyclic":
        controls = ControlFunctions(mu=ControlFunction.parse(args.mu), rho=ControlFunction.parse(args.rho))
        centers = resolve_subset(X, args.centers).sorted() if args.centers else None
        sample = SampleSpec(radii=_floats(args.radii), centers_per_radius=args.centers_per_radius,
                            seed=args.seed, centers=centers)
        base = resolve_subset(X, args.subset) if args.subset else None
        report = check_acyclicity_at_infinity(X, controls, sample, scale, args.max_dim, args.ring,
                                              mode=args.mode, base=base)
        return report.to_dict(), tables

    elif args.command == "fill":
        ring = _field_ring(args)
        mu = ControlFunction.parse(args.mu)
        spec = FarSubcomplexSpec(ControlFunctions(mu=mu, rho=mu), X.base_selection())
        if args.cochain or args.random:
            return _operator_t_run(args, X, spec, scale, ring), tables
        return _filling_run(args, X, spec, scale, ring), tables

    elif args.command == "verify-homotopy":
        report = verify_homotopy_suite(X, _field_ring(args), args.count, args.seed, args.max_degree,
                                       displacement=args.displacement)
        return report.to_dict(), tables

    elif args.command == "full-cochain":
        groups = full_complex_cohomology(X, args.max_degree, args.ring)
        return {"groups": [g.to_dict() for g in groups]}, tables

    raise UsageError(f"Unknown command {args.command!r}")


def _filling_run(args: argparse.Namespace, X: FiniteMetricSpace, spec: FarSubcomplexSpec,
                 scale: float, ring: str) -> Dict[str, Any]:
    """Check dM = M d on every far generator up to max_dim; unfillable tuples
    are reported with their cap."""
    M = filling_map_M(X, spec, scale, args.max_dim, ring, cap=args.cap)
    domain = far_domain(X, spec, args.domain_diameter or 2 * scale, args.max_dim)
    failures, unfilled, checked = [], [], 0
    for level in domain:
        for simplex in level:
            checked += 1
            try:
                if not M.check_chain_map(simplex):
                    failures.append(list(simplex))
            except CoarseError as e:
                unfilled.append({"simplex": list(simplex), "error": str(e)})
    logger.info(f"Filling audit: {checked} far tuples, {len(failures)} chain-map failures, "
                f"{len(unfilled)} unfilled")
    return {
        "verdict": "PASS" if not failures and not unfilled else "FAIL",
        "checked": checked,
        "domain_sizes": [len(level) for level in domain],
        "chain_map_failures": failures,
        "unfilled": unfilled,
        "rho": M.certificate_dict(args.max_dim),
        "far_subcomplex": spec.to_dict(),
    }


def _operator_t_run(args: argparse.Namespace, X: FiniteMetricSpace, spec: FarSubcomplexSpec,
                    scale: float, ring: str) -> Dict[str, Any]:
    if args.cochain:
        with open(args.cochain, "r", encoding="utf-8") as f:
            cochains = [cochain_from_json(json.load(f), X.size)]
    else:
        rng = np.random.default_rng(args.seed)
        near = neighborhood(X, spec.base, 2 * scale).sorted()
        cochains = [random_cochain(X, args.degree, ring, 3, rng, support=near) for _ in range(args.random)]
    audits = []
    for phi in cochains:
        setup = prepare_operator_T(X, phi, spec, scale, cap=args.cap)
        audits.append(operator_T(X, phi, setup, scale).to_dict())
    passed = all(a["verdict"] == "PASS" for a in audits)
    return {"verdict": "PASS" if passed else "FAIL", "audits": audits}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.quiet:
        logging.getLogger().setLevel(logging.WARNING)

    if not args.command:
        # No command specified, show help
        logger.info("No command specified, use --help for usage information")
        return 2

    try:
        if args.command in SEEDED_COMMANDS or (args.command == "fill" and args.random):
            if args.seed is None:
                raise UsageError(f"{args.command} is randomized: --seed is required")
        X = load_space_from_args(args)
        scale = getattr(args, "scale", None)
        if scale is None and args.command not in ("gen", "full-cochain", "verify-homotopy"):
            scale = default_scale(X)
        config = RunConfig(
            command=args.command,
            seed=getattr(args, "seed", None) or 0,
            ring=args.ring,
            scale=scale,
            max_dim=args.max_dim if hasattr(args, "max_dim") else getattr(args, "max_degree", 3),
            r_grid=_floats(getattr(args, "r_grid", None)),
            threads=args.threads,
            output_dir=args.output_dir,
            params={k: v for k, v in sorted(vars(args).items())
                    if k not in ("command", "output_dir", "verbose", "quiet")},
        )
    except (UsageError, ValidationError) as e:
        logger.error(f"Usage error: {e}")
        return 2
    except (CoarseError, ValueError, OSError) as e:
        logger.error(f"Could not load the space: {e}")
        return 1

    try:
        payload, tables = run_command(args, X, config)
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        return 2
    except (CoarseError, ValueError) as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        return 1

    # Report results
    stem = args.command if args.command != "gen" else f"space_{X.name}"
    inputs = {"space": X.to_dict(), "command": args.command}
    write_result(stem, payload, config, inputs, args.output_dir)
    for name, rows in tables.items():
        write_tsv(f"{args.command}_{name}", rows, TOWER_COLUMNS, args.output_dir)
    if isinstance(payload, dict) and payload.get("verdict"):
        logger.info(f"{args.command}: {payload['verdict']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
