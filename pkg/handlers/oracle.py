import numpy as np

import messages as bm
from config import EXIT_OK, ORACLE_PERMUTATIONS
from helper import derive_seed
from shapley import exact_shapley, loo_values, permutation_shapley
from utility import load_tabular_game


def oracle_values(game_path, seed: int = 0, permutations: int = ORACLE_PERMUTATIONS) -> dict:
    """Exact, leave-one-out and truncated Monte Carlo values of a tabular game."""
    game = load_tabular_game(game_path)
    exact = exact_shapley(game)
    return {
        "exact": exact.values,
        "loo": np.asarray(loo_values(game)),
        "tmc": permutation_shapley(game, permutations=permutations, seed=derive_seed(seed, "tmc")).values,
        "v_one": game.grand(),
        "v_zero": game.empty(),
        "gap": exact.efficiency_gap,
    }


def register(subparsers):
    parser = subparsers.add_parser("oracle", help="print exact, LOO and TMC values of a tabular game")
    parser.add_argument("game", help="game file: n on the first line, then one 'mask value' line per coalition")
    parser.add_argument("--permutations", type=int, default=ORACLE_PERMUTATIONS,
                        help="sampled orderings for the TMC column")
    parser.set_defaults(handler=handle)


def handle(args) -> int:
    values = oracle_values(args.game, args.seed or 0, args.permutations)
    print(bm.oracle_table(values))
    print(bm.oracle_summary(values["v_one"], values["v_zero"], values["gap"]))
    return EXIT_OK
