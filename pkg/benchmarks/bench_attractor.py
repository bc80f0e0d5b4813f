"""Benchmark the attractor kernel: numba JIT vs the pure-numpy fallback.

The kernel selection is decided at import time from GSLMC_DISABLE_NUMBA, so
each variant runs in a subprocess with the flag set accordingly.

Usage: python3 benchmarks/bench_attractor.py [--sizes 1000,10000,100000]
       [--degree 4] [--repeats 5] [--seed 20240817]
"""

import argparse
import json
import os
import random
import subprocess
import sys
import time

WORKER = """
import json, os, random, sys, time
payload = json.loads(sys.stdin.read())
from gslmc.paritygame import ParityGame

rng = random.Random(payload["seed"])
results = []
for n in payload["sizes"]:
    succs = [
        [rng.randrange(n) for _ in range(payload["degree"])] for _ in range(n)
    ]
    owners = [rng.randrange(2) for _ in range(n)]
    prios = [rng.randrange(4) for _ in range(n)]
    game = ParityGame(owners, prios, succs)
    seed_mask = [rng.random() < 0.05 for _ in range(n)]
    sub_mask = [True] * n
    game.attractor(0, seed_mask, sub_mask)  # warm-up (includes any JIT cost)
    best = float("inf")
    for _ in range(payload["repeats"]):
        t0 = time.perf_counter()
        in_attr, _ = game.attractor(0, seed_mask, sub_mask)
        best = min(best, time.perf_counter() - t0)
    results.append({"n": n, "seconds": best, "attracted": int(in_attr.sum())})
print(json.dumps(results))
"""


def run_variant(disable_numba, payload):
    env = dict(os.environ)
    env["GSLMC_DISABLE_NUMBA"] = "1" if disable_numba else ""
    out = subprocess.run(
        [sys.executable, "-c", WORKER],
        input=json.dumps(payload),
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=20240817)
    args = ap.parse_args()
    payload = {
        "sizes": [int(s) for s in args.sizes.split(",")],
        "degree": args.degree,
        "repeats": args.repeats,
        "seed": args.seed,
    }
    numba_rows = run_variant(False, payload)
    numpy_rows = run_variant(True, payload)
    print(f"{'vertices':>10} {'numba (s)':>12} {'numpy (s)':>12} {'speedup':>8}")
    for nb, np_ in zip(numba_rows, numpy_rows):
        assert nb["n"] == np_["n"]
        assert nb["attracted"] == np_["attracted"], "variants disagree"
        ratio = np_["seconds"] / nb["seconds"] if nb["seconds"] else float("inf")
        print(
            f"{nb['n']:>10} {nb['seconds']:>12.6f} {np_['seconds']:>12.6f}"
            f" {ratio:>7.2f}x"
        )


if __name__ == "__main__":
    main()
