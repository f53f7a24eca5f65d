import argparse
import logging
import sys

from src import config
from src.errors import ConfigError, SbmreError
from src.runner import (EXPERIMENT_NAMES, load_config, replay, run_experiment, validate_config,
                        write_report)

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

logger = logging.getLogger("sbmre")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sbmre", description="Simulation and verification lab for super-Brownian motion "
                                  "in a random environment")
    parser.add_argument("--log-level", default=config.LOG_LEVEL, help="logging level (default from SBMRE_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in EXPERIMENT_NAMES:
        run = sub.add_parser(name, help=f"run the {name} experiment")
        run.add_argument("--config", required=True, help="experiment INI file")
        run.add_argument("--seed", type=int, default=None, help="root seed (overrides SBMRE_SEED)")
        run.add_argument("--workers", type=int, default=None, help="worker processes (overrides SBMRE_WORKERS)")
        run.add_argument("--out", default=None, help="output directory")

    rerun = sub.add_parser("replay", help="rerun a manifest and compare the CSV bytes")
    rerun.add_argument("--manifest", required=True)
    rerun.add_argument("--workers", type=int, default=None)
    rerun.add_argument("--out", default=None, help="also write the replayed report here")

    check = sub.add_parser("validate", help="parse and validate a config without running it")
    check.add_argument("--config", required=True)
    return parser


def resolve_workers(flag):
    """--workers, then SBMRE_WORKERS, then the package default."""
    if flag is not None:
        return max(1, flag)
    env = config.env_override("SBMRE_WORKERS")
    return max(1, int(env)) if env is not None else config.WORKERS


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.INFO),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate":
            cfg = validate_config(load_config(args.config))
            logger.info("%s is valid (experiment %s, hash %s)", args.config, cfg.name, cfg.config_hash)
            return EXIT_PASS

        if args.command == "replay":
            report = replay(args.manifest, args.workers)
            if args.out:
                write_report(report, args.out)
        else:
            cfg = load_config(args.config, {"mc.seed": args.seed})
            if cfg.name != args.command:
                raise ConfigError(f"{args.config} configures {cfg.name!r}, not {args.command!r}")
            report = run_experiment(cfg, resolve_workers(args.workers))
            report.source = args.config
            write_report(report, args.out or cfg.out_dir)
    except ConfigError as e:
        logger.error("config error: %s", e)
        return EXIT_CONFIG
    except SbmreError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_FAIL

    for name in report.failures:
        logger.error("check failed: %s", name)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
