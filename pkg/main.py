import argparse
import logging
import sys

import messages as bm
from config import EXIT_CAPACITY_ERROR, EXIT_CONFIG_ERROR, EXIT_FAILURE, LOG_LEVEL
from errors import CapacityError, ConfigError, ValuationError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    import handlers

    parser = argparse.ArgumentParser(prog="fastshap-data", description="Training-data valuation experiments.")
    parser.add_argument("--seed", type=int, default=None, help="override the config's root seed")
    parser.add_argument("--out", default=None, help="output directory for run artifacts")
    parser.add_argument("--threads", type=int, default=None, help="worker threads for utility evaluation")
    parser.add_argument("--header", action="store_true", default=None, help="CSV datasets start with a header row")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for router in handlers.routers:
        router.register(subparsers)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=LOG_LEVEL)
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as e:
        logger.error("config error in %s", e.field)
        print(bm.config_error(e), file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except CapacityError as e:
        logger.error("capacity error: %s", e)
        print(bm.capacity_error(e), file=sys.stderr)
        return EXIT_CAPACITY_ERROR
    except ValuationError as e:
        logger.exception("run failed")
        print(bm.valuation_error(e), file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
