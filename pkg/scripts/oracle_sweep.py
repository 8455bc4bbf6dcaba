#!/usr/bin/env python3
"""Cross-check the native search, brute force and the Imp2 MIP on random instances.

Usage: scripts/oracle_sweep.py [--count 200] [--seed 1] [--max-n 7]

Exits 1 on the first disagreement and prints the instance as JSON.
"""

import argparse
import sys
import time

import numpy as np

from hoistlab.bench import GeneratorParams, dumps_instance, generate, random_variant
from hoistlab.formulations import FormulationSpec, build_model
from hoistlab.milp import mip_solve
from hoistlab.schedule import check_simple_cycle
from hoistlab.solver import brute_force, solve_simple_cycle


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--min-n", type=int, default=4)
    parser.add_argument("--max-n", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    start = time.perf_counter()
    for k in range(args.count):
        n = int(rng.integers(args.min_n, args.max_n + 1))
        mu = float(rng.choice([1.5, 2.0, 2.5]))
        inst = random_variant(generate(GeneratorParams(n, mu, int(rng.integers(2**32)))), rng)
        native = solve_simple_cycle(inst)
        brute = brute_force(inst)
        mip = mip_solve(build_model(inst, FormulationSpec(integral_cycle=True)))
        got = (native.objective, brute.objective, None if mip.objective is None else round(mip.objective))
        sound = native.certificate is None or check_simple_cycle(inst, native.certificate).feasible
        if len(set(got)) != 1 or not sound:
            print(f"mismatch at #{k}: native={got[0]} brute={got[1]} mip={got[2]} certificate_ok={sound}")
            print(dumps_instance(inst))
            sys.exit(1)
        if (k + 1) % 25 == 0:
            print(f"{k + 1} instances agree ({time.perf_counter() - start:.0f}s)")
    print(f"all {args.count} instances agree in {time.perf_counter() - start:.0f}s")


if __name__ == "__main__":
    main()
