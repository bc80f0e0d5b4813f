import os
import subprocess
import sys

import numpy as np

from gslmc.paritygame import (
    REFUTER,
    VERIFIER,
    ParityGame,
    solve_fixpoint,
    solve_zielonka,
    verify_strategy,
)


def random_game(rng, max_v=8, max_pr=4):
    n = rng.randint(1, max_v)
    owners = [rng.randrange(2) for _ in range(n)]
    prios = [rng.randrange(max_pr + 1) for _ in range(n)]
    succs = [
        rng.sample(range(n), rng.randint(0, min(3, n))) for _ in range(n)
    ]
    return ParityGame(owners, prios, succs)


class TestExamples:
    def test_even_self_loop_verifier_wins(self):
        g = ParityGame([VERIFIER], [0], [[0]])
        win, _ = solve_zielonka(g)
        assert win[0] == VERIFIER

    def test_odd_self_loop_refuter_wins(self):
        g = ParityGame([VERIFIER], [1], [[0]])
        win, _ = solve_zielonka(g)
        assert win[0] == REFUTER

    def test_dead_end_loses_for_owner(self):
        g = ParityGame([VERIFIER, REFUTER], [0, 0], [[], []])
        win, _ = solve_zielonka(g)
        assert win[0] == REFUTER  # Verifier stuck
        assert win[1] == VERIFIER  # Refuter stuck

    def test_choice_matters(self):
        # Verifier at 0 picks between even loop (1) and odd loop (2)
        g = ParityGame([VERIFIER, VERIFIER, VERIFIER], [3, 0, 1], [[1, 2], [1], [2]])
        win, strat = solve_zielonka(g)
        assert win[0] == VERIFIER
        assert strat[0] == 1


class TestAgreement:
    def test_zielonka_matches_fixpoint_on_200_games(self, rng):
        for _ in range(200):
            g = random_game(rng)
            win_z, _ = solve_zielonka(g)
            win_f = solve_fixpoint(g)
            assert list(win_z) == list(win_f)

    def test_strategies_verify(self, rng):
        for _ in range(100):
            g = random_game(rng)
            win, strat = solve_zielonka(g)
            for player in (VERIFIER, REFUTER):
                region = np.asarray(win) == player
                if region.any():
                    assert verify_strategy(g, region, player, strat)


class TestKernelParity:
    def test_numba_and_numpy_attractors_agree(self, rng):
        env = os.environ.copy()
        script = (
            "import random, json\n"
            "from gslmc.paritygame import ParityGame\n"
            "rng = random.Random(77)\n"
            "out = []\n"
            "for _ in range(40):\n"
            "    n = rng.randint(1, 10)\n"
            "    g = ParityGame([rng.randrange(2) for _ in range(n)],\n"
            "                   [rng.randrange(4) for _ in range(n)],\n"
            "                   [rng.sample(range(n), rng.randint(0, min(3, n)))\n"
            "                    for _ in range(n)])\n"
            "    seed = [False] * n\n"
            "    seed[rng.randrange(n)] = True\n"
            "    player = rng.randrange(2)\n"
            "    mask, _ = g.attractor(player, seed, [True] * n)\n"
            "    out.append([int(x) for x in mask])\n"
            "print(json.dumps(out))\n"
        )
        results = {}
        for flag in ("0", "1"):
            env["GSLMC_DISABLE_NUMBA"] = flag
            proc = subprocess.run(
                [sys.executable, "-c", script],
                capture_output=True,
                text=True,
                env=env,
                check=True,
            )
            results[flag] = proc.stdout.strip()
        assert results["0"] == results["1"]
