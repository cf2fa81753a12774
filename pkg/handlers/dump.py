from pathlib import Path

from config import EXIT_OK
from errors import ModelError
from model import from_bytes, to_json
from services.artifacts import dumps


def dump_model(path) -> dict:
    """Human-readable parameters of a saved service model blob."""
    path = Path(path)
    if not path.is_file():
        raise ModelError(f"{path}: no such model blob")
    return to_json(from_bytes(path.read_bytes()))


def register(subparsers):
    parser = subparsers.add_parser("dump-json", help="print a saved model blob as JSON")
    parser.add_argument("blob", help="model blob, e.g. <run dir>/service.bin")
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    print(dumps(dump_model(args.blob)), end="")
    return EXIT_OK
