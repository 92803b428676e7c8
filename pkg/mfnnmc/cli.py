"""Command-line entry point.

USAGE:
    mfnnmc mfnnmc CONFIG [--tol T] [--rep K]      one MFNNMC run
    mfnnmc hfmc CONFIG [--tol T] [--rep K]        one HFMC run
    mfnnmc sweep CONFIG [--with-hfmc]             tolerances x repetitions, then reports
    mfnnmc compare CONFIG|CAMPAIGN_DIR            cost tables and fitted slopes
    mfnnmc validate [--check NAME ...]            property checks, no campaign
    mfnnmc table CAMPAIGN_DIR --id {1,2,3,4}      table<k>.csv from a sweep

CONFIG is a TOML path or the name of a bundled config (see ``mfnnmc.configs``).

Common options: --threads (default 1, single-threaded timing), --output-dir
(overrides MFNNMC_OUTPUT_DIR and the config's output_dir), --log-level.

Exit status: 0 on success, 2 for an invalid config, 3 for a failed campaign
stage, 1 for any other error or a failed validation check.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .artifacts import compare, emit_table, write_compliance
from .config import CampaignConfig, load_config
from .configs import list_configs, load_bundled_config
from .exceptions import ConfigurationError, MfnnmcError, StageError
from .host.environment import resolve_output_root
from .pipeline.campaign import make_run, run_hfmc, run_mfnnmc
from .validation import SUITE, run_validation

logger = logging.getLogger("mfnnmc")

EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_STAGE = 3


def resolve_config(spec: str) -> CampaignConfig:
    """Load a config from a path, falling back to a bundled config name."""
    path = Path(spec)
    if path.exists() or spec not in list_configs():
        return load_config(path)
    return load_bundled_config(spec)


def campaign_dir(args: argparse.Namespace, target: str) -> tuple[Path, Optional[CampaignConfig]]:
    """Campaign directory from a directory argument or a config."""
    path = Path(target)
    if path.is_dir():
        return path, None
    cfg = resolve_config(target)
    return resolve_output_root(args.output_dir, cfg.output_dir) / cfg.campaign, cfg


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True, default=str))


def cmd_single(args: argparse.Namespace) -> int:
    cfg = resolve_config(args.config)
    run = make_run(cfg, args.tol, args.rep, args.output_dir, args.threads, reuse=not args.no_reuse)
    result = run_mfnnmc(run) if args.command == "mfnnmc" else run_hfmc(run)
    _emit(result.to_dict())
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = resolve_config(args.config)
    tolerances = args.tol or [row.tol for row in cfg.tolerances]
    reps = args.reps if args.reps is not None else cfg.repetitions
    for tol in tolerances:
        for rep in range(reps):
            run = make_run(cfg, tol, rep, args.output_dir, args.threads, reuse=not args.no_reuse)
            run_mfnnmc(run)
            if args.with_hfmc:
                run_hfmc(run)
    root = resolve_output_root(args.output_dir, cfg.output_dir) / cfg.campaign
    write_compliance(root)
    slopes = compare(root)
    _emit({"campaign_dir": str(root), "slopes": slopes})
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    root, _ = campaign_dir(args, args.target)
    _emit({"campaign_dir": str(root), "slopes": compare(root)})
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    results = run_validation(args.check)
    _emit({r.name: {"passed": r.passed, **r.detail} for r in results})
    return 0 if all(r.passed for r in results) else EXIT_ERROR


def cmd_table(args: argparse.Namespace) -> int:
    root, cfg = campaign_dir(args, args.target)
    if args.config:
        cfg = resolve_config(args.config)
    path = emit_table(root, args.id, cfg)
    _emit({"table": str(path)})
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1,
                        help="Worker threads for solver and surrogate evaluations (default 1).")
    common.add_argument("--output-dir", default=None,
                        help="Output root; overrides MFNNMC_OUTPUT_DIR and the config.")
    common.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = argparse.ArgumentParser(
        prog="mfnnmc",
        description="Multi-fidelity neural-network Monte Carlo campaigns.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("mfnnmc", "Run one MFNNMC campaign."), ("hfmc", "Run one HFMC baseline.")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("config", help="Config path or bundled config name.")
        p.add_argument("--tol", type=float, default=None, help="Tolerance row (default: first).")
        p.add_argument("--rep", type=int, default=0, help="Repetition index.")
        p.add_argument("--no-reuse", action="store_true", help="Never reuse checkpoints.")
        p.set_defaults(handler=cmd_single)

    p = sub.add_parser("sweep", parents=[common], help="Run all tolerances and repetitions.")
    p.add_argument("config")
    p.add_argument("--tol", type=float, nargs="+", default=None, help="Subset of tolerance rows.")
    p.add_argument("--reps", type=int, default=None, help="Override the repetition count.")
    p.add_argument("--with-hfmc", action="store_true", help="Also run the HFMC baseline.")
    p.add_argument("--no-reuse", action="store_true")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("compare", parents=[common], help="Cost tables and slopes from persisted runs.")
    p.add_argument("target", help="Campaign directory or config.")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("validate", parents=[common], help="Run the property checks.")
    p.add_argument("--check", nargs="+", choices=sorted(SUITE), default=None)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("table", parents=[common], help="Emit table<k>.csv from a sweep.")
    p.add_argument("target", help="Campaign directory or config.")
    p.add_argument("--id", type=int, required=True, choices=[1, 2, 3, 4])
    p.add_argument("--config", default=None, help="Config listing the expected runs.")
    p.set_defaults(handler=cmd_table)

    return parser


def _report(error: MfnnmcError) -> None:
    print(f"error: {error.message}", file=sys.stderr)
    errors = error.errors if isinstance(error, ConfigurationError) else []
    for item in errors:
        print(f"  {item.get('field')}: {item.get('error')}", file=sys.stderr)
    if error.details and not errors:
        print(json.dumps(error.details, indent=2, default=str), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except ConfigurationError as e:
        _report(e)
        return EXIT_CONFIG
    except StageError as e:
        _report(e)
        return EXIT_STAGE if not isinstance(e.cause, ConfigurationError) else EXIT_CONFIG
    except MfnnmcError as e:
        _report(e)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
