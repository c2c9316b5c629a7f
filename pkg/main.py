import argparse
import logging
import os
import sys
import traceback
from pathlib import Path

from dotenv import load_dotenv

from tdcs.config import load_config, reference_mode
from tdcs.errors import TdcsError
from tdcs.harness import (
    export_design,
    render_info,
    run_efficiency_study,
    run_sidelobe_study,
    sweep_state,
    write_efficiency_outputs,
    write_sidelobe_outputs,
    write_sweep_outputs,
)


def build_parser():
    parser = argparse.ArgumentParser(description="Cluster-based TDCS simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="JSON config file (defaults reproduce the W=10 MHz, gamma=3/4 scenario)")
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--output-dir")
    common.add_argument("--scheme", choices=["continuous", "random"])
    common.add_argument("--reference-mode", action="store_true", help="target BER 1e-4 and 10^4 partition trials")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ber", parents=[common], help="BER vs Eb/N0 sweep")
    sub.add_parser("efficiency", parents=[common], help="spectrum vs power efficiency table")
    sidelobes = sub.add_parser("sidelobes", parents=[common], help="beta_min study, continuous vs random")
    sidelobes.add_argument("--trials", type=int)
    design = sub.add_parser("design", parents=[common], help="export a partition and its FMWs")
    design.add_argument("-L", "--clusters", type=int, required=True)
    sub.add_parser("info", parents=[common], help="spectrum efficiency and search-space analytics")
    return parser


def run(args) -> int:
    config = load_config(
        args.config,
        overrides={
            "seed": args.seed,
            "workers": args.workers,
            "output_dir": args.output_dir,
            "scheme": args.scheme,
        },
    )
    if args.reference_mode:
        config = reference_mode(config)

    if args.command == "info":
        print(render_info(config), end="")
        return 0

    print(f"Starting {args.command} run '{config.name}' (seed {config.seed})")
    if args.command == "ber":
        final_state = sweep_state(config)
        paths = write_sweep_outputs(config, final_state)
        print(f"Review: {final_state.get('feedback')}")
    elif args.command == "efficiency":
        paths = [write_efficiency_outputs(config, run_efficiency_study(config))]
    elif args.command == "sidelobes":
        paths = [write_sidelobe_outputs(config, run_sidelobe_study(config, args.trials))]
    else:
        paths = export_design(config, args.clusters, Path(config.output_dir))

    for path in paths:
        print(f"Saved {path}")
    return 0


def main(argv=None):
    load_dotenv()
    args = build_parser().parse_args(argv)
    level = "DEBUG" if args.verbose else os.getenv("TDCS_LOG_LEVEL", "INFO")
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        return run(args)
    except TdcsError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"\nCRITICAL ERROR: {e}", file=sys.stderr)
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
