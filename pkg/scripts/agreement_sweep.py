#!/usr/bin/env python3
"""Sweep the bounded checker against the brute-force oracle.

Runs every formula template over randomly generated games and the shipped
fixtures, comparing verdicts at each horizon.  Any disagreement is printed
and the script exits nonzero; this is the open-ended version of the pinned
agreement test in the acceptance suite.

    python3 scripts/agreement_sweep.py --games 40 --seed 1234 --k-max 3
"""

import argparse
import sys
import time

from upatl.checker import EvalContext, canonical_assignment, eval_path_formula
from upatl.fixtures import hand_game, hand_game_mixed
from upatl.formula import render_formula
from upatl.oracle import (
    BudgetExceeded,
    GeneratorParams,
    brute_force_eval,
    formula_templates,
    generate_random_game,
)
from upatl.trace import Path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--games", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--k-max", type=int, default=3)
    parser.add_argument("--states", type=int, default=3)
    parser.add_argument("--agents", type=int, default=2)
    parser.add_argument("--skip-deep", action="store_true",
                        help="drop the nested strategic/knowledge templates")
    args = parser.parse_args()

    games = [hand_game(), hand_game_mixed()]
    for i in range(args.games):
        games.append(
            generate_random_game(
                GeneratorParams(
                    seed=args.seed + i,
                    states=args.states,
                    agents=args.agents,
                )
            )
        )

    started = time.perf_counter()
    compared = skipped = mismatched = 0
    for game in games:
        lam = canonical_assignment(game)
        for f in formula_templates(game, include_deep=not args.skip_deep):
            for horizon in range(args.k_max + 1):
                for q in game.states:
                    rho = Path((q,))
                    try:
                        expected = brute_force_eval(
                            game, rho, 1, lam, f, horizon
                        )
                    except BudgetExceeded:
                        skipped += 1
                        continue
                    got = eval_path_formula(
                        EvalContext(game, rho, 1, lam, horizon), f
                    )
                    compared += 1
                    if got is not expected:
                        mismatched += 1
                        print(
                            f"MISMATCH {game.name} {game.state_names[q]} "
                            f"k={horizon} {render_formula(f, game)}: "
                            f"oracle={expected.value} checker={got.value}"
                        )
    elapsed = time.perf_counter() - started
    print(
        f"{compared} comparisons over {len(games)} games, "
        f"{mismatched} mismatches, {skipped} beyond oracle budget, "
        f"{elapsed:.1f}s"
    )
    return 1 if mismatched else 0


if __name__ == "__main__":
    sys.exit(main())
