from . import compare, dump, oracle, run

routers = [
    run,
    compare,
    oracle,
    dump,
]

__all__ = [
    'routers',
]
