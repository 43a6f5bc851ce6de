from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Sequence

from explain_lab.errors import ConfigValidationError, ExplainLabError, FormatError

from .RunConfig import DERIVED_KEYS, DataSection, ModelSection, RunConfig, RunSection
from .configfile import SEED_ENV, build_config, emit_config, parse_config, read_settings
from .commands import COMMANDS, check_paths, load_splits

logger = logging.getLogger(__name__)

EFFECTIVE_CONFIG = "effective-config.conf"
EXPERIMENTS = ("noise", "features", "samples", "table", "convergence")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigValidationError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file in the `section.key = value` grammar")
    common.add_argument("--output", help="output directory (run.output)")
    common.add_argument("--seed", type=int, help=f"seed base (run.seed), overrides {SEED_ENV}")
    common.add_argument("--jobs", type=int, help="concurrent sweep trials (run.jobs)")
    common.add_argument(
        "--log-level", default="INFO", choices=("DEBUG", "INFO", "WARNING", "ERROR")
    )
    common.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override one setting, may be repeated",
    )

    parser = _Parser(prog="explain-lab", description="Contextual explanation networks and LIME experiments")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    prepare = commands.add_parser("prepare", parents=[common], help="write train/test CSV files")
    prepare.add_argument("--synthetic", action="store_true", help="use the bundled synthetic dataset")

    train = commands.add_parser("train", parents=[common], help="train one model")
    train.add_argument("--kind", choices=("lr", "mlp", "moe", "cen"), help="model.kind")
    train.add_argument("--synthetic", action="store_true")

    explain = commands.add_parser("explain", parents=[common], help="explain one test instance")
    explain.add_argument("--model", help="checkpoint file (model.checkpoint)")
    explain.add_argument("--instance", type=int, help="test row index (model.instance)")
    explain.add_argument("--synthetic", action="store_true")

    sweep = commands.add_parser("sweep", parents=[common], help="run one experiment")
    sweep.add_argument("experiment", nargs="?", choices=EXPERIMENTS)
    sweep.add_argument("--experiment", dest="experiment_flag", choices=EXPERIMENTS)
    sweep.add_argument("--synthetic", action="store_true")

    report = commands.add_parser("report", parents=[common], help="summarise a sweep report")
    report.add_argument("report", help="report CSV written by sweep")
    return parser


def flags_from(args: argparse.Namespace) -> dict[str, Any]:
    """
    Dotted config keys set by dedicated flags; unset flags map to `None`
    """

    return {
        "run.command": args.command,
        "run.output": args.output,
        "run.seed": args.seed,
        "run.jobs": args.jobs,
        "run.experiment": getattr(args, "experiment", None) or getattr(args, "experiment_flag", None),
        "run.report": getattr(args, "report", None),
        "data.synthetic": True if getattr(args, "synthetic", False) else None,
        "model.kind": getattr(args, "kind", None),
        "model.checkpoint": getattr(args, "model", None),
        "model.instance": getattr(args, "instance", None),
    }


def main(argv: Sequence[str] | None = None) -> int:
    """
    Entry point of `explain-lab`.

    Returns
    -------
    `int` 0 on success, 1 on invalid configuration, missing paths or malformed
    files, 2 on runtime failures (including failed sweep trials)
    """

    try:
        args = build_parser().parse_args(argv)
    except ConfigValidationError as e:
        print(f"explain-lab: error: {e}", file=sys.stderr)
        return 1

    logging.basicConfig(
        level=args.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = parse_config(args.config, args.set, flags_from(args))
        check_paths(config)
        output = config.run.output
        output.mkdir(parents=True, exist_ok=True)
        (output / EFFECTIVE_CONFIG).write_text(emit_config(config))
        logger.info("%s: effective configuration in %s", config.run.command, output / EFFECTIVE_CONFIG)
        return COMMANDS[config.run.command](config)
    except (ConfigValidationError, FormatError, FileNotFoundError) as e:
        print(f"explain-lab: error: {e}", file=sys.stderr)
        return 1
    except ExplainLabError as e:
        print(f"explain-lab: failed: {e}", file=sys.stderr)
        return 2


__all__ = [
    "COMMANDS",
    "DERIVED_KEYS",
    "DataSection",
    "EFFECTIVE_CONFIG",
    "ModelSection",
    "RunConfig",
    "RunSection",
    "SEED_ENV",
    "build_config",
    "build_parser",
    "check_paths",
    "emit_config",
    "load_splits",
    "main",
    "parse_config",
    "read_settings",
]
